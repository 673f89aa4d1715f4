#pragma once

#include <string>
#include <vector>

#include "psh/instance.hpp"

namespace psh {

struct CostBreakdown {
  double energy = 0.0;    // sum of price * (pumped - generated)
  double startup = 0.0;
  double shutdown = 0.0;
  double physical = 0.0;  // piecewise operating costs
  double water = 0.0;     // water value of released minus pumped water
  double total() const { return energy + startup + shutdown + physical + water; }
};

// stage t lives at index t-1; level has T+1 entries (M_1 .. M_{T+1})
struct Schedule {
  std::vector<Mode> mode;
  std::vector<double> h_out, h_in;
  std::vector<double> level;
  std::vector<int> u, d;
  std::vector<double> stage_cost;
  CostBreakdown breakdown;
  double cost = 0.0;

  int horizon() const { return int(mode.size()); }
  // number of mode changes, counting the virtual offline state before stage 1
  int switches() const;
  bool same_dispatch(const Schedule& o, double tol) const;
};

Schedule empty_schedule(int T);

struct AuditOptions {
  // generating output must be at most the ramp limit in the last stage before a non-generating stage
  bool shutdown_cap = true;
  double tol = 1e-6;
};

// recomputes the objective from the dispatch alone; throws InfeasibleSchedule naming the first violated rule
double evaluate_schedule_cost(const Schedule& s, const Instance& inst, const AuditOptions& opt = {});

// fills u, d, stage_cost, breakdown and cost of s from its dispatch (audits first)
void complete_schedule(Schedule& s, const Instance& inst, const AuditOptions& opt = {});

std::string schedule_csv(const Schedule& s);
void write_schedule_csv(const Schedule& s, const std::string& path);

}  // namespace psh
