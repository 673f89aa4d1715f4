#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psh/event_blocks.hpp"
#include "psh/instance.hpp"
#include "psh/schedule.hpp"

namespace psh {

// Boundary state of an event. Stage 0 is the virtual offline state before the horizon; stage T+1 is the sink.
struct EventState {
  int t = 0;
  Mode mode = Mode::O;
  double m = 0.0;
  double h = 0.0;
  int tau = 0;
  int mi = -1, hi = -1;  // grid indices when on a grid
};

struct EventAction {
  int j = 0;
  Mode next = Mode::O;  // at j = T+1 the successor is the terminal sink (reported as O)
  bool m_free = true;   // continuous mode, or open terminal level
  double m_end = 0.0;
  double h_end = 0.0;
  int mi = -1, hi = -1;
  ExitRule exit = ExitRule::Free;
};

struct EventRules {
  bool strict = false;  // no ramp-down cap when generation stops
};

EventState initial_state(const Instance& inst, const GridSpec* grid = nullptr);
int next_counter(const Instance& inst, Mode from, Mode to, int tau, int t, int j);
double boundary_cost(Mode from, Mode to, int j, const Instance& inst);
// exit rule of a block in mode `from` followed by `to` at stage j
ExitRule exit_rule(const Instance& inst, Mode from, Mode to, int j, const EventRules& rules);

// admissible actions; with grid == nullptr the successor boundary values are left open
std::vector<EventAction> enumerate_events(const EventState& s, const Instance& inst, const GridSpec* grid,
                                          const EventRules& rules = {});
EventState transition(const EventState& s, const EventAction& a, const Instance& inst);

// block boundary of the event taken by action a from s (the virtual stage-0 event starts at stage 1)
BlockBoundary block_of(const EventState& s, const EventAction& a, const Instance& inst);

struct NetArc {
  int from = -1, to = -1;
  EventAction action;
  BlockBoundary block;
  double gamma = 0.0;
  int key = -1;  // index into the distinct block table
};

struct EventNetwork {
  GridSpec grid;
  EventRules rules;
  std::vector<EventState> nodes;  // sorted by stage; node 0 is the source, the last node is the sink
  std::vector<std::vector<int>> out;  // arcs per node in tie-break order
  std::vector<std::vector<int>> in;
  std::vector<NetArc> arcs;
  std::vector<BlockBoundary> blocks;  // distinct block LPs referenced by arcs
  int source = 0, sink = 0;
};

EventNetwork build_grid_network(const Instance& inst, const GridSpec& grid, const EventRules& rules = {});

struct ArcCosts {
  std::vector<char> feasible;  // per distinct block
  std::vector<double> cost;    // block optimum without the boundary cost
  int solved = 0;              // LPs actually solved (not loaded from cache)
  bool from_cache = false;
};

struct PrecomputeOptions {
  int threads = 1;
  bool use_cache = true;
  std::string cache_dir;  // empty: PSHOPT_CACHE_DIR or no cache
};

ArcCosts precompute_arc_costs(const EventNetwork& net, const Instance& inst, const PrecomputeOptions& opt = {});

struct PathResult {
  double value = 0.0;
  std::vector<int> arcs;  // source to sink
  Schedule schedule;
};

// backward Bellman pass; throws NoFeasiblePath when the sink is unreachable
PathResult solve_dp(const EventNetwork& net, const ArcCosts& costs, const Instance& inst);

// solves the blocks along a path and stitches the trajectories into an audited schedule
Schedule path_schedule(const EventNetwork& net, const std::vector<int>& arcs, const Instance& inst);

std::string instance_fingerprint(const Instance& inst, const GridSpec& grid, const EventRules& rules);

}  // namespace psh
