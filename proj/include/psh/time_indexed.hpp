#pragma once

#include <vector>

#include "psh/instance.hpp"
#include "psh/lp.hpp"
#include "psh/schedule.hpp"

namespace psh {

struct TimeIndexedModel {
  LinearProgram lp;
  bool strict = false;
  // variable indices per stage (index t-1); ysc is empty without HSC; level has T+1 entries
  std::vector<int> yg, yp, ysc, y, u, d;
  std::vector<int> h_out, h_in, level, phi_g, phi_p;
};

// strict: no ramp-down cap when generation stops (the cap is only enforced between generating stages)
TimeIndexedModel build_time_indexed(const Instance& inst, bool strict = false);

// requires integral binaries; throws FractionalBinaries otherwise
Schedule extract_schedule(const LpSolution& sol, const TimeIndexedModel& model, const Instance& inst);

struct MilpResult {
  MipStatus status = MipStatus::Infeasible;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  long nodes = 0;
  double seconds = 0.0;
  Schedule schedule;
  bool has_schedule = false;
};

MilpResult solve_time_indexed(const Instance& inst, bool strict = false, const MipOptions& opt = {});

}  // namespace psh
