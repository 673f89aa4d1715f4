#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psh/instance.hpp"
#include "psh/schedule.hpp"

namespace psh {

// bnb_grid: branch-and-bound restricted to the reservoir/ramp grid
enum class Method { Milp, Dp, GridLp, Bnb, BnbGrid };
const char* method_name(Method m);
Method method_from_name(const std::string& s);

struct SolveOptions {
  int grid_refine = 1;
  bool strict = false;
  int threads = 1;
  double time_budget = 600.0;
  bool use_cache = true;
  std::string dump_lp;   // gridlp only
  std::string bnb_log;   // bnb only
  long lp_max_size = 8'000'000;
};

enum class RunStatus { Ok, Infeasible, Budget, Error };
const char* run_status_name(RunStatus s);

struct RunOutcome {
  Method method = Method::Milp;
  RunStatus status = RunStatus::Error;
  double objective = 0.0;  // audited cost of the schedule
  double reported = 0.0;   // value returned by the solver
  double seconds = 0.0;
  bool has_schedule = false;
  Schedule schedule;
  long nodes = 0;
  std::string note;
  std::optional<ErrorKind> error;  // set when the run stopped on an exception
};

// runs one method; every schedule is re-audited and a mismatch with the solver value is an Error outcome
RunOutcome run_method(const Instance& inst, Method m, const SolveOptions& opt = {});

// mean + scale * (price - mean)
Instance scale_volatility(const Instance& inst, double scale);
// repeats every per-stage series until the horizon is T; levels and terminal rules carry over
Instance tile_horizon(const Instance& inst, int T);

struct ExperimentSpec {
  std::string kind;
  std::string instance;
  std::vector<std::string> methods;
  std::vector<int> refinements{1, 2, 5, 10, 20};
  std::vector<double> scales{0.5, 1.0, 1.5, 2.0};
  std::vector<int> jmax{1, 2, 3, 4, 6, 8};
  std::vector<int> horizons{24, 48, 96, 168, 240};
  std::uint64_t seed = 1;
  int count = 50;
  std::string out = "results";
  int threads = 1;
  int workers = 1;
  double time_budget = 600.0;
  bool strict = false;
};

ExperimentSpec load_experiment_spec(const std::string& path);
ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& base_dir = ".");

struct ExperimentReport {
  std::vector<std::string> files;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// writes <out>/<kind>.csv (and <out>/horizon_scaling.svg); failures become status cells
ExperimentReport run_experiment(const ExperimentSpec& spec);

struct Series {
  std::string name;
  std::vector<double> x, y;
};
// line plot with a logarithmic y axis
std::string svg_plot(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel);

}  // namespace psh
