#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psh/event_network.hpp"
#include "psh/lp.hpp"
#include "psh/simplex.hpp"

namespace psh {

struct NetworkLpIndex {
  std::vector<int> flow;                 // arc -> flow column
  std::vector<TrajectoryVars> blocks;    // arc -> scaled block columns (empty for offline arcs)
  std::vector<int> conservation;         // node -> row (-1 for the sink)
  std::vector<int> col_begin, row_begin;  // arc -> first block column / row
  std::vector<int> col_count, row_count;
};

struct NetworkLp {
  LinearProgram lp;
  NetworkLpIndex index;
};

NetworkLp build_network_lp(const EventNetwork& net, const Instance& inst);

// trajectory of arc e as it appears in the network LP (constants scaled by the arc flow)
TrajectorySpec arc_trajectory(const EventNetwork& net, int e);

// optimum and basis of every distinct block in its scaled form at flow 1
struct ScaledBlocks {
  std::vector<char> feasible;
  std::vector<double> cost;
  std::vector<SimplexSolver::Basis> basis;  // block columns then block rows; empty for offline blocks
};
ScaledBlocks solve_scaled_blocks(const EventNetwork& net, const Instance& inst, int threads = 1);

// drops arcs whose block is infeasible and nodes left without a route between source and sink;
// origin[k] is the index in net of arc k of the result
EventNetwork feasible_subnetwork(const EventNetwork& net, const std::vector<char>& arc_feasible,
                                 std::vector<int>* origin = nullptr);

// starting basis made of the optimal block bases and a shortest-path tree over the conservation rows;
// net must be free of infeasible blocks; on a projected LP this is the shortest-path tree alone
std::optional<SimplexSolver::Basis> crash_basis(const NetworkLp& model, const EventNetwork& net,
                                                const ScaledBlocks& blocks);

// the same LP with every block minimized out: one flow column per arc costing its block optimum plus the
// boundary cost (exact, since a perspective-scaled block at flow pi costs pi times its optimum)
NetworkLp build_projected_lp(const EventNetwork& net, const ScaledBlocks& blocks);

struct ExtractedPath {
  std::vector<int> arcs;
  double cost = 0.0;  // exact cost of the path (block optima plus boundary costs)
  bool integral = false;
  int paths_considered = 1;
  Schedule schedule;
};

// reads (or decomposes) the flow of an optimal solution into a single source-sink path
ExtractedPath extract_path(const LpSolution& sol, const NetworkLp& model, const EventNetwork& net, const Instance& inst);

struct NetworkLpOptions {
  std::string dump_path;  // LP-format dump of the model
  bool crash = true;      // start from crash_basis instead of the slack basis
  int threads = 1;
  // columns plus rows above which the LP is solved in projected form; negative: never
  long max_size = 8'000'000;
};

struct GridLpResult {
  double objective = 0.0;
  ExtractedPath path;  // arcs index the network passed to solve_network_lp
  int vars = 0, rows = 0;
  int dropped_arcs = 0;
  bool crashed = false;
  bool projected = false;
  long iterations = 0;
};

// solves the monolithic LP over the arcs with feasible blocks
GridLpResult solve_network_lp(const EventNetwork& net, const Instance& inst, const NetworkLpOptions& opt = {});

}  // namespace psh
