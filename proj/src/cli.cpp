#include "hyperbmc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "hyperbmc/diag.hpp"
#include "hyperbmc/smv.hpp"

namespace hyperbmc {

std::string usage_text() {
  return
      "usage: hyperbmc <model.smv>... <formula.hq> <k> <-pes|-opt|-hpes|-hopt>"
      " [-bughunt|-find] [options]\n"
      "\n"
      "Positional arguments (in order):\n"
      "  <model.smv>...   one model per trace quantifier, first model binds the\n"
      "                   first quantified trace variable\n"
      "  <formula.hq>     HyperLTL formula\n"
      "  <k>              unrolling bound, >= 0\n"
      "\n"
      "Semantics (required): -pes, -opt, -hpes, -hopt\n"
      "Mode: -bughunt (default; negates the formula) or -find\n"
      "\n"
      "Options:\n"
      "  --emit qcir|qdimacs   write the QBF query and .map sidecar, don't solve\n"
      "  --out <path>          output base path for --emit\n"
      "  --solver <cmd>        solve with an external QBF solver (also via the\n"
      "                        HYPERBMC_SOLVER environment variable)\n"
      "  --format qcir|qdimacs format handed to the external solver (default\n"
      "                        qdimacs)\n"
      "  --timeout <seconds>   external solver timeout (default 300)\n"
      "  --budget <steps>      internal solver step budget\n"
      "  --json                print a machine-readable verdict as the last line\n"
      "  -h, --help            this text\n";
}

ParsedArgs parse_args(const std::vector<std::string>& args) {
  Invocation inv;
  std::vector<std::string> positional;
  bool sem_seen = false, mode_seen = false;

  auto need_value = [&](size_t& i, const std::string& flag) -> std::optional<std::string> {
    if (i + 1 >= args.size()) return std::nullopt;
    (void)flag;
    return args[++i];
  };

  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "-h" || a == "--help") {
      inv.help = true;
      return {inv, ""};
    } else if (a == "-pes" || a == "-opt" || a == "-hpes" || a == "-hopt") {
      if (sem_seen) return {std::nullopt, "duplicate semantics flag '" + a + "'"};
      sem_seen = true;
      inv.sem = a == "-pes"    ? Semantics::Pes
                : a == "-opt"  ? Semantics::Opt
                : a == "-hpes" ? Semantics::HPes
                               : Semantics::HOpt;
    } else if (a == "-bughunt" || a == "-find") {
      if (mode_seen) return {std::nullopt, "duplicate mode flag '" + a + "'"};
      mode_seen = true;
      inv.mode = a == "-bughunt" ? Mode::BugHunt : Mode::Find;
    } else if (a == "--json") {
      inv.json = true;
    } else if (a == "--solver") {
      auto v = need_value(i, a);
      if (!v) return {std::nullopt, "--solver needs a command"};
      inv.solver_cmd = *v;
    } else if (a == "--emit") {
      auto v = need_value(i, a);
      if (!v || (*v != "qcir" && *v != "qdimacs"))
        return {std::nullopt, "--emit needs 'qcir' or 'qdimacs'"};
      inv.emit = *v == "qcir" ? ExternalFormat::Qcir : ExternalFormat::Qdimacs;
    } else if (a == "--format") {
      auto v = need_value(i, a);
      if (!v || (*v != "qcir" && *v != "qdimacs"))
        return {std::nullopt, "--format needs 'qcir' or 'qdimacs'"};
      inv.solver_format = *v == "qcir" ? ExternalFormat::Qcir : ExternalFormat::Qdimacs;
    } else if (a == "--out") {
      auto v = need_value(i, a);
      if (!v) return {std::nullopt, "--out needs a path"};
      inv.out_base = *v;
    } else if (a == "--budget") {
      auto v = need_value(i, a);
      if (!v) return {std::nullopt, "--budget needs a step count"};
      try {
        inv.budget = std::stoull(*v);
      } catch (...) {
        return {std::nullopt, "--budget: not a number: '" + *v + "'"};
      }
    } else if (a == "--timeout") {
      auto v = need_value(i, a);
      if (!v) return {std::nullopt, "--timeout needs seconds"};
      try {
        inv.timeout_seconds = std::stol(*v);
      } catch (...) {
        return {std::nullopt, "--timeout: not a number: '" + *v + "'"};
      }
    } else if (!a.empty() && a[0] == '-' && a.size() > 1 &&
               !isdigit(static_cast<unsigned char>(a[1]))) {
      return {std::nullopt, "unknown flag '" + a + "'"};
    } else {
      positional.push_back(a);
    }
  }

  if (positional.size() < 3)
    return {std::nullopt,
            "expected at least <model.smv> <formula.hq> <k>, got " +
                std::to_string(positional.size()) + " positional arguments"};
  try {
    size_t used = 0;
    inv.k = std::stoi(positional.back(), &used);
    if (used != positional.back().size()) throw std::invalid_argument("");
  } catch (...) {
    return {std::nullopt, "unrolling bound must be an integer, got '" + positional.back() + "'"};
  }
  if (inv.k < 0) return {std::nullopt, "unrolling bound must be >= 0"};
  inv.formula_path = positional[positional.size() - 2];
  inv.model_paths.assign(positional.begin(), positional.end() - 2);

  if (!sem_seen)
    return {std::nullopt, "missing semantics flag (-pes, -opt, -hpes or -hopt)"};

  if (!inv.solver_cmd) {
    const char* env = std::getenv("HYPERBMC_SOLVER");
    if (env && *env) inv.solver_cmd = env;
  }
  return {inv, ""};
}

namespace {

int emit_query(const Invocation& inv, const QbfInstance& inst, std::ostream& out,
               std::ostream& err) {
  std::string base;
  if (inv.out_base) {
    base = *inv.out_base;
  } else {
    std::string stem = std::filesystem::path(inv.formula_path).stem().string();
    base = stem + "_k" + std::to_string(inv.k) + "_" + semantics_name(inv.sem);
  }
  std::string ext = *inv.emit == ExternalFormat::Qcir ? ".qcir" : ".qdimacs";
  std::string query_path = base + ext;
  std::string map_path = base + ".map";
  std::ofstream qf(query_path);
  if (!qf) {
    err << "error: cannot write '" << query_path << "'\n";
    return exit_io;
  }
  qf << (*inv.emit == ExternalFormat::Qcir ? to_qcir(inst) : to_qdimacs(inst));
  qf.close();
  if (!qf) {
    err << "error: cannot write '" << query_path << "'\n";
    return exit_io;
  }
  std::ofstream mf(map_path);
  if (!mf) {
    err << "error: cannot write '" << map_path << "'\n";
    return exit_io;
  }
  mf << map_sidecar(inst);
  mf.close();
  out << "wrote " << query_path << " and " << map_path << "\n";
  return exit_holds;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ParsedArgs parsed = parse_args(args);
  if (!parsed.invocation) {
    err << "error: " << parsed.error << "\n\n" << usage_text();
    return exit_usage;
  }
  const Invocation& inv = *parsed.invocation;
  if (inv.help) {
    out << usage_text();
    return exit_holds;
  }

  try {
    HyperFormula f = parse_formula_file(inv.formula_path);
    if (f.prefix.size() != inv.model_paths.size()) {
      err << "error: formula '" << inv.formula_path << "' quantifies "
          << f.prefix.size() << " trace variable(s) but " << inv.model_paths.size()
          << " model(s) were given; pass one model per quantifier, in prefix order\n";
      return exit_usage;
    }

    std::vector<std::shared_ptr<SymbolicKripke>> models;
    for (const auto& path : inv.model_paths)
      models.push_back(std::make_shared<SymbolicKripke>(parse_model_file(path)));

    if (inv.emit) {
      std::vector<const SymbolicKripke*> raw;
      for (const auto& m : models) raw.push_back(m.get());
      HyperFormula query = inv.mode == Mode::BugHunt ? negate(f) : to_nnf(f);
      QbfInstance inst = assemble(models, query, inv.k, inv.sem);
      return emit_query(inv, inst, out, err);
    }

    CheckOptions opt;
    opt.limits.step_budget = inv.budget;
    opt.external_command = inv.solver_cmd;
    opt.external_format = inv.solver_format;
    opt.external_timeout = std::chrono::seconds(inv.timeout_seconds);

    Verdict v = check(models, f, inv.k, inv.sem, inv.mode, opt);
    out << dump_verdict_text(v);
    if (inv.json) out << dump_verdict_json(v) << "\n";

    switch (v.answer) {
      case Answer::Holds: return exit_holds;
      case Answer::Violated: return exit_violated;
      case Answer::Inconclusive: return exit_inconclusive;
    }
    return exit_internal;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return exit_inconclusive;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
}

}  // namespace hyperbmc
