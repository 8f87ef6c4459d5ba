#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prophic/engine.hpp"
#include "prophic/errors.hpp"

namespace py = pybind11;

namespace {

py::dict check(const std::string & text,
               const std::string & mode,
               const std::string & engine,
               std::uint32_t max_k,
               double timeout,
               int property,
               bool value_abstraction,
               bool assume_prestate,
               const std::optional<std::string> & solver)
{
  prophic::EngineConfig cfg;
  if (mode == "weak") cfg.mode = prophic::AbsMode::Weak;
  else if (mode == "strong") cfg.mode = prophic::AbsMode::Strong;
  else throw py::value_error("mode must be 'weak' or 'strong'");
  if (engine == "kind") {
    cfg.prove.engine = prophic::EngineKind::KInduction;
  } else if (engine == "bmc-only") {
    cfg.prove.engine = prophic::EngineKind::BmcOnly;
  } else if (engine.rfind("external:", 0) == 0 && engine.size() > 9) {
    cfg.prove.engine = prophic::EngineKind::External;
    cfg.prove.external_path = engine.substr(9);
  } else {
    throw py::value_error("engine must be 'kind', 'bmc-only' or 'external:<path>'");
  }
  cfg.prove.max_k = max_k;
  cfg.prove.assume_prestate = assume_prestate;
  cfg.timeout_s = timeout;
  cfg.property = property;
  cfg.value_abstraction = value_abstraction;
  if (solver) cfg.solver_command = *solver;

  prophic::Verdict v;
  std::string witness, stats;
  {
    py::gil_scoped_release release;
    prophic::TermStore store;
    prophic::VmtDocument doc = prophic::parse_vmt(store, text);
    v = prophic::run(cfg, store, doc);
    witness = prophic::emit_witness(v);
    stats = prophic::stats_json(v);
  }
  py::dict out;
  out["verdict"] = prophic::to_string(v.kind);
  out["bound"] = v.kind == prophic::Verdict::Kind::Unsafe ? v.trace.size() : 0;
  out["reason"] = v.reason;
  out["witness"] = witness;
  out["stats"] = stats;
  return out;
}

}  // namespace

PYBIND11_MODULE(_prophic, m)
{
  m.doc() = "Bindings for the prophic model checker";
  auto base = py::register_exception<prophic::Error>(m, "ProphicError");
  py::register_exception<prophic::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<prophic::UnsupportedLogic>(m, "UnsupportedLogic", base.ptr());
  m.def("check", &check, py::arg("text"), py::kw_only(), py::arg("mode") = "weak", py::arg("engine") = "kind",
        py::arg("max_k") = 25, py::arg("timeout") = 0.0, py::arg("property") = 0,
        py::arg("value_abstraction") = true, py::arg("assume_prestate") = true,
        py::arg("solver") = py::none(),
        "Checks a VMT script. Returns verdict, bound, reason, witness text and stats JSON.");
}
