#pragma once

#include <optional>
#include <vector>

#include "psh/instance.hpp"
#include "psh/lp.hpp"

namespace psh {

// how the generating output of the last block stage meets the successor boundary
enum class ExitRule {
  Pin,   // H_{j-1} equals the successor ramp boundary
  Cap,   // H_{j-1} <= ramp limit (unit stops generating afterwards)
  Free,  // no condition (open horizon end, or strict mode)
};

struct BlockBoundary {
  int t = 1;  // first stage covered
  int j = 2;  // first stage after the block
  Mode mode = Mode::G;
  double m_start = 0.0;
  double h_start = 0.0;
  std::optional<double> m_end;  // absent: terminal level left free
  double h_end = 0.0;
  ExitRule exit = ExitRule::Pin;
};

struct BlockResult {
  bool feasible = false;
  double cost = 0.0;
  // one entry per covered stage; level holds M_t .. M_j
  std::vector<double> h_out, h_in, level, phi;
};

BlockResult solve_generating_block(const BlockBoundary& b, const Instance& inst);
BlockResult solve_pumping_block(const BlockBoundary& b, const Instance& inst);
BlockResult solve_offline_block(const BlockBoundary& b, const Instance& inst);
BlockResult solve_hsc_block(const BlockBoundary& b, const Instance& inst);
BlockResult solve_block(const BlockBoundary& b, const Instance& inst);

// Building blocks shared by the network and branch-and-bound formulations.
// A Ref is either an existing LP column or a constant; constants are multiplied by the scale column when one is given.
struct Ref {
  int var = -1;
  double value = 0.0;
  static Ref constant(double v) { return {-1, v}; }
  static Ref column(int j) { return {j, 0.0}; }
};

struct TrajectorySpec {
  int t0 = 1;               // first stage
  std::vector<Mode> modes;  // one per stage from t0
  Ref m_start, h_start;
  std::optional<Ref> m_end;
  ExitRule exit = ExitRule::Free;
  Ref h_end;
  bool strict = false;  // no ramp-down cap where generation stops inside the trajectory
  bool free_phi = false;  // scaled form only: epigraph columns unbounded below
};

struct TrajectoryVars {
  std::vector<int> h_out, h_in;  // -1 where the mode has no such flow
  std::vector<int> level;        // M_{t0+1} .. M_{t0+n}
  std::vector<int> phi_g, phi_p; // -1 where absent
};

// appends the operating model of a mode trajectory to lp; with scale >= 0 every constant is multiplied by that
// column (perspective form), so the whole trajectory vanishes when the column is 0
TrajectoryVars append_trajectory(LinearProgram& lp, const Instance& inst, const TrajectorySpec& spec, int scale = -1);

// sound necessary conditions for a block to be feasible (used to prune arcs cheaply)
bool block_may_be_feasible(const BlockBoundary& b, const Instance& inst);

// reservoir level after drifting offline from stage t to j (exclusive); nullopt if a level leaves [0, capacity]
std::optional<double> offline_drift(const Instance& inst, int t, int j, double m_start, double tol = 1e-9);

}  // namespace psh
