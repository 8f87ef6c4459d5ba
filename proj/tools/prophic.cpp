// prophic: model checker for array transition systems in VMT format.
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"

#include "prophic/engine.hpp"
#include "prophic/errors.hpp"

namespace {

std::string read_input(const std::string & path)
{
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream f(path);
  if (!f) throw prophic::Error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string & path, const std::string & text)
{
  std::ofstream f(path);
  if (!f) throw prophic::Error("cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{ "Prophecy-based model checker for transition systems over arrays" };
  std::string input;
  std::string engine = "kind";
  std::string solver = prophic::SolverConfig::default_command();
  bool weak = false, strong = false;
  std::uint32_t max_k = 25;
  int property = 0;
  std::string witness, stats;
  bool no_values = false, no_assume = false, no_proph = false, no_core = false, no_axiom = false;
  double timeout = 0, kind_timeout = 0;
  std::size_t max_iters = 200, max_refinements = 50;

  app.add_option("file", input, "VMT file, or - for stdin")->required();
  app.add_option("--engine", engine, "kind, bmc-only or external:<path>");
  app.add_option("--solver", solver, "SMT solver command line (reads SMT-LIB on stdin)");
  auto * wk = app.add_flag("--weak", weak, "weak array abstraction (default)");
  app.add_flag("--strong", strong, "strong array abstraction")->excludes(wk);
  app.add_option("--max-k", max_k, "largest bound for BMC and k-induction");
  app.add_option("--property", property, "index of the :invar-property to check");
  app.add_option("--witness", witness, "write the invariant or counterexample here");
  app.add_option("--stats", stats, "write statistics as JSON here");
  app.add_flag("--no-value-abstraction", no_values);
  app.add_flag("--no-assume-prestate", no_assume);
  app.add_flag("--no-proph-reduction", no_proph);
  app.add_flag("--no-unsatcore-reduction", no_core);
  app.add_flag("--no-axiom-reduction", no_axiom);
  app.add_option("--timeout", timeout, "wall-clock budget in seconds");
  app.add_option("--kind-timeout", kind_timeout, "per-query budget of the builtin engine in seconds");
  app.add_option("--max-refine-iters", max_iters, "refinement iterations per bound");
  app.add_option("--max-refinements", max_refinements, "refinement calls in total");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "report progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  prophic::EngineConfig cfg;
  cfg.mode = strong ? prophic::AbsMode::Strong : prophic::AbsMode::Weak;
  if (engine == "kind") {
    cfg.prove.engine = prophic::EngineKind::KInduction;
  } else if (engine == "bmc-only") {
    cfg.prove.engine = prophic::EngineKind::BmcOnly;
  } else if (engine.rfind("external:", 0) == 0 && engine.size() > 9) {
    cfg.prove.engine = prophic::EngineKind::External;
    cfg.prove.external_path = engine.substr(9);
  } else {
    std::cerr << "error: unknown engine " << engine << "\n";
    return 3;
  }
  cfg.prove.max_k = max_k;
  cfg.prove.assume_prestate = !no_assume;
  cfg.prove.kind_timeout_s = kind_timeout;
  cfg.refine.proph_reduction = !no_proph;
  cfg.refine.unsatcore_reduction = !no_core;
  cfg.refine.axiom_reduction = !no_axiom;
  cfg.refine.max_iters = max_iters;
  cfg.value_abstraction = !no_values;
  cfg.max_refinements = max_refinements;
  cfg.timeout_s = timeout;
  cfg.property = property;
  cfg.solver_command = solver;
  cfg.verbose = verbose;

  try {
    prophic::TermStore store;
    prophic::VmtDocument doc = prophic::parse_vmt(store, read_input(input));
    prophic::Verdict v = prophic::run(cfg, store, doc);
    std::cout << prophic::to_string(v.kind);
    if (v.kind == prophic::Verdict::Kind::Unsafe) std::cout << " " << v.trace.size();
    if (v.kind == prophic::Verdict::Kind::Unknown && !v.reason.empty()) std::cout << " (" << v.reason << ")";
    std::cout << "\n";
    if (!witness.empty() && v.kind != prophic::Verdict::Kind::Unknown) write_file(witness, prophic::emit_witness(v));
    if (!stats.empty()) write_file(stats, prophic::stats_json(v) + "\n");
    switch (v.kind) {
      case prophic::Verdict::Kind::Safe: return 0;
      case prophic::Verdict::Kind::Unsafe: return 1;
      case prophic::Verdict::Kind::Unknown: return 2;
    }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
