#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "prophic/model.hpp"
#include "prophic/sexpr.hpp"
#include "prophic/terms.hpp"

namespace prophic {

struct SolverStats
{
  std::size_t queries = 0;
  std::size_t sessions = 0;
};

struct SolverConfig
{
  std::string command = "z3 -in";
  double query_timeout_s = 0;  // 0: no per-query limit
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::shared_ptr<SolverStats> stats = std::make_shared<SolverStats>();
  bool trace = false;  // echo the script to stderr

  /// Command from the PROPHIC_SOLVER environment variable, else the default.
  static std::string default_command();
};

/// A child process speaking SMT-LIB 2 on stdin/stdout.
class SolverProcess
{
 public:
  explicit SolverProcess(const std::string & command);
  ~SolverProcess();
  SolverProcess(const SolverProcess &) = delete;
  SolverProcess & operator=(const SolverProcess &) = delete;

  void send(const std::string & line);
  /// Reads one complete response. timeout_s <= 0 waits forever.
  SExpr read_response(double timeout_s);
  void kill();
  bool alive() const { return pid_ > 0; }

 private:
  std::string drain_stderr();
  [[noreturn]] void crashed(const std::string & what);

  int pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  int err_fd_ = -1;
  std::string buf_;
  std::string command_;
};

enum class CheckStatus
{
  Sat,
  Unsat,
  Unknown
};

const char * to_string(CheckStatus s);

enum class Want
{
  None,
  Model,
  Core
};

struct CheckResult
{
  CheckStatus status = CheckStatus::Unknown;
  CexModel model;
  std::vector<std::string> core;
};

class SolverSession;

/// Maps internal names to legal, unique SMT-LIB symbols.
class SessionNames : public NameScheme
{
 public:
  std::string var(Term v) const override;
  std::string fun(const FuncDecl & f) const override;
  std::string sort(Sort s) const override;

 private:
  std::string emit(const std::string & internal, const std::string & kind) const;
  mutable std::unordered_map<std::string, std::string> table_;
  mutable std::set<std::string> used_;
};

class SolverSession
{
 public:
  SolverSession(const SolverConfig & cfg, const std::string & logic = "QF_AUFLIA");
  ~SolverSession();

  void push();
  void pop();
  std::size_t depth() const { return depth_; }

  /// Declares every symbol of t, then asserts it. A non-empty label makes the
  /// assertion eligible for unsat cores; cores report these labels.
  void assert_formula(Term t, const std::string & label = {});
  CheckStatus check_sat();
  std::vector<Value> get_values(const std::vector<Term> & ts);
  std::optional<Value> try_value(Term t);
  std::vector<std::string> unsat_core();

  /// Model over every non-array variable and application occurring in roots.
  /// The returned model's fallback queries this session while it is still in
  /// the state of the last check.
  CexModel get_model(const std::vector<Term> & roots);

  /// Adds values for every variable and application of roots that m cannot
  /// evaluate yet, using one get-value request.
  void complete_model(CexModel & m, const std::vector<Term> & roots);

  /// One-shot query in a fresh scope: push, assert, check, extract, pop.
  CheckResult check(const std::vector<std::pair<std::string, Term>> & assertions,
                    Want want = Want::None);

  const SessionNames & names() const { return names_; }
  const SolverConfig & config() const { return cfg_; }

 private:
  void declare_symbols(Term t);
  SExpr command(const std::string & cmd, bool timed = false);
  double time_budget() const;
  Value parse_value(const SExpr & e, Sort s) const;

  SolverConfig cfg_;
  std::unique_ptr<SolverProcess> proc_;
  SessionNames names_;
  std::set<std::uint32_t> declared_sorts_;
  std::set<std::uint32_t> declared_terms_;
  std::set<std::uint32_t> declared_funs_;
  std::unordered_map<std::string, std::string> label_of_;
  std::size_t next_label_ = 0;
  std::size_t depth_ = 0;
  std::size_t generation_ = 0;
  std::shared_ptr<std::size_t> live_generation_;
};

}  // namespace prophic
