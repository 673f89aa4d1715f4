#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "psh/experiments.hpp"
#include "psh/oracle.hpp"

using namespace psh;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInfeasible = 2, kBudget = 3, kInput = 4 };

bool input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedDocument:
    case ErrorKind::MissingField:
    case ErrorKind::ValidationFailed:
    case ErrorKind::GridExcludesBoundary:
    case ErrorKind::ModeDisabled:
    case ErrorKind::InvalidArgument: return true;
    default: return false;
  }
}

int exit_of(ErrorKind k) {
  if (input_error(k)) return kInput;
  if (k == ErrorKind::Infeasible || k == ErrorKind::NoFeasiblePath) return kInfeasible;
  if (k == ErrorKind::BudgetExceeded || k == ErrorKind::LimitsExceeded) return kBudget;
  return kFailure;
}

void write_summary(const std::string& path, const RunOutcome& r, const Instance& in) {
  nlohmann::json j;
  j["method"] = method_name(r.method);
  j["status"] = run_status_name(r.status);
  if (r.has_schedule) {
    j["objective"] = r.objective;
    j["switches"] = r.schedule.switches();
    j["breakdown"] = {{"energy", r.schedule.breakdown.energy},     {"startup", r.schedule.breakdown.startup},
                      {"shutdown", r.schedule.breakdown.shutdown}, {"physical", r.schedule.breakdown.physical},
                      {"water", r.schedule.breakdown.water}};
  }
  j["wall_s"] = r.seconds;
  j["horizon"] = in.T;
  j["nodes"] = r.nodes;
  if (!r.note.empty()) j["note"] = r.note;
  std::ofstream(path) << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pumped-storage scheduling solvers"};
  app.require_subcommand(1);

  std::string instance, method = "gridlp", out, dump_lp, bnb_log, spec_path;
  int refine = 1, jmax = 0, threads = 1;
  bool hsc = false, strict = false, no_cache = false;
  double budget = 600.0;

  auto* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("--instance", instance, "instance JSON")->required();
  solve->add_option("--method", method, "milp | dp | gridlp | bnb")
      ->check(CLI::IsMember({"milp", "dp", "gridlp", "bnb", "bnb_grid"}));
  auto* refine_opt = solve->add_option("--grid-refine", refine, "reservoir grid refinement (bnb: branch on the grid)")
                         ->check(CLI::PositiveNumber);
  solve->add_option("--jmax", jmax, "override the event length cap")->check(CLI::PositiveNumber);
  solve->add_flag("--hsc", hsc, "enable the short-circuit mode");
  solve->add_flag("--strict-terminal-h", strict, "no ramp-down cap where generation stops");
  solve->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  solve->add_option("--out", out, "directory for schedule.csv and summary.json");
  solve->add_option("--time-budget", budget, "seconds for milp and bnb");
  solve->add_flag("--no-cache", no_cache, "ignore PSHOPT_CACHE_DIR");
  solve->add_option("--dump-lp", dump_lp, "write the network LP in LP format (gridlp)");
  solve->add_option("--bnb-log", bnb_log, "node trace CSV (bnb)");

  auto* exp = app.add_subcommand("experiment", "run an experiment spec");
  exp->add_option("--spec", spec_path, "experiment JSON")->required();

  std::string oracle_instance;
  bool oracle_strict = false;
  auto* orc = app.add_subcommand("oracle", "brute-force enumeration of mode sequences");
  orc->add_option("--instance", oracle_instance, "instance JSON")->required();
  orc->add_flag("--strict-terminal-h", oracle_strict, "no ramp-down cap where generation stops");

  std::string validate_instance;
  auto* val = app.add_subcommand("validate", "check an instance file");
  val->add_option("--instance", validate_instance, "instance JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*solve) {
      Instance in = load_instance_file(instance);
      if (jmax > 0) in.j_max = jmax;
      if (hsc) in.hsc = true;
      require_valid(in);
      Method m = method_from_name(method);
      if (m == Method::Bnb && refine_opt->count() > 0) m = Method::BnbGrid;
      SolveOptions so;
      so.grid_refine = refine;
      so.strict = strict;
      so.threads = threads;
      so.time_budget = budget;
      so.use_cache = !no_cache;
      so.dump_lp = dump_lp;
      so.bnb_log = bnb_log;
      RunOutcome r = run_method(in, m, so);
      std::printf("method %s\nstatus %s\n", method_name(r.method), run_status_name(r.status));
      if (r.has_schedule) std::printf("objective %.6f\nswitches %d\n", r.objective, r.schedule.switches());
      std::printf("wall_s %.3f\n", r.seconds);
      if (!r.note.empty()) std::printf("note %s\n", r.note.c_str());
      if (!out.empty()) {
        fs::create_directories(out);
        if (r.has_schedule) write_schedule_csv(r.schedule, (fs::path(out) / "schedule.csv").string());
        write_summary((fs::path(out) / "summary.json").string(), r, in);
      }
      switch (r.status) {
        case RunStatus::Ok: return kOk;
        case RunStatus::Infeasible: return kInfeasible;
        case RunStatus::Budget: return kBudget;
        case RunStatus::Error: return r.error ? exit_of(*r.error) : kFailure;
      }
    }
    if (*exp) {
      ExperimentSpec spec = load_experiment_spec(spec_path);
      ExperimentReport rep = run_experiment(spec);
      for (auto& f : rep.files) std::printf("wrote %s\n", f.c_str());
      return kOk;
    }
    if (*orc) {
      Instance in = load_instance_file(oracle_instance);
      require_valid(in);
      OracleLimits lim;
      lim.strict = oracle_strict;
      OracleResult r = brute_force_oracle(in, lim);
      std::printf("objective %.6f\nsequences %ld\nfeasible %ld\nmodes", r.value, r.sequences, r.feasible);
      for (Mode x : r.modes) std::printf(" %s", mode_name(x));
      std::printf("\n");
      return kOk;
    }
    if (*val) {
      Instance in = load_instance_file(validate_instance);
      auto problems = validate(in);
      for (auto& p : problems) std::printf("%s\n", p.c_str());
      if (!problems.empty()) return kInput;
      build_grid(in, 1);
      std::printf("valid: T=%d j_max=%d hsc=%d\n", in.T, in.j_max, int(in.hsc));
      return kOk;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return exit_of(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kFailure;
  }
  return kOk;
}
