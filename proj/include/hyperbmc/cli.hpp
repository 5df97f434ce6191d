#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperbmc/check.hpp"

namespace hyperbmc {

// Process exit codes.
constexpr int exit_holds = 0;
constexpr int exit_violated = 1;
constexpr int exit_inconclusive = 2;
constexpr int exit_usage = 64;
constexpr int exit_input = 65;
constexpr int exit_internal = 70;
constexpr int exit_io = 74;

struct Invocation {
  std::vector<std::string> model_paths;
  std::string formula_path;
  int k = 0;
  Semantics sem = Semantics::Pes;
  Mode mode = Mode::BugHunt;  // default when the flag is omitted
  bool json = false;
  std::optional<std::string> solver_cmd;
  ExternalFormat solver_format = ExternalFormat::Qdimacs;
  std::optional<ExternalFormat> emit;  // emit the query instead of solving
  std::optional<std::string> out_base;
  uint64_t budget = SolveLimits{}.step_budget;
  long timeout_seconds = 300;
  bool help = false;
};

// Parses `<models...> <formula.hq> <k> <-pes|-opt|-hpes|-hopt> [-bughunt|-find]`
// plus options. Returns the usage error message instead of an Invocation when
// the command line is malformed. Quantifier arity is checked later, after the
// formula is parsed.
struct ParsedArgs {
  std::optional<Invocation> invocation;
  std::string error;
};
ParsedArgs parse_args(const std::vector<std::string>& args);

std::string usage_text();

// Full pipeline behind main(): returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperbmc
