#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psh/event_network.hpp"
#include "psh/lp.hpp"
#include "psh/schedule.hpp"

namespace psh {

struct ReducedState {
  int t = 0;
  Mode mode = Mode::O;
  int tau = 0;
  bool operator==(const ReducedState&) const = default;
};

struct ReducedArc {
  int from = -1, to = -1;
  int j = 0;
  Mode next = Mode::O;
  ExitRule exit = ExitRule::Free;
  double gamma = 0.0;
};

// event network over (t, mode, counter) only; source is the virtual offline state at stage 0, sink is T+1
struct ReducedNetwork {
  EventRules rules;
  std::vector<ReducedState> nodes;
  std::vector<std::vector<int>> out, in;
  std::vector<ReducedArc> arcs;
  int source = 0, sink = 0;
  int find(const ReducedState& s) const;
};

ReducedNetwork build_reduced_network(const Instance& inst, const EventRules& rules = {});

// per-stage modes of an arc path starting at the source (stages 1..j-1 of the last arc)
std::vector<Mode> stage_modes(const ReducedNetwork& rn, const std::vector<int>& arcs);

enum class NodeStatus { Open, Pruned, Expanded, Leaf };

struct SkeletonStep {
  int j = 0;
  Mode next = Mode::O;
};

struct BnbNode {
  int id = 0, parent = -1, depth = 0;
  ReducedState frontier;
  std::vector<SkeletonStep> skeleton;  // events taken from the virtual start
  double c_sofar = 0.0;
  double m_committed = 0.0, h_committed = 0.0;
  double lb = -kInf;
  NodeStatus status = NodeStatus::Open;
};

BnbNode make_root(const Instance& inst);
std::vector<BnbNode> branch(const BnbNode& node, const Instance& inst, const EventRules& rules = {});
// c_sofar plus the optimum of the McCormick flow relaxation over the remaining network; +inf when infeasible
double relax_lower_bound(const BnbNode& node, const Instance& inst, const EventRules& rules = {});

struct Completion {
  double value = 0.0;
  std::vector<Mode> modes;
  Schedule schedule;
};

// greedy extension with exact block LPs; nullopt on a dead end
std::optional<Completion> upper_bound_completion(const BnbNode& node, const Instance& inst,
                                                 const EventRules& rules = {});

// exact cost of a complete per-stage mode sequence: one LP over all stages plus switching costs
std::optional<Completion> evaluate_skeleton(const std::vector<Mode>& modes, const Instance& inst,
                                            const EventRules& rules = {});

struct BnbConfig {
  bool strict = false;
  std::optional<GridSpec> grid;  // set: branch over the grid network LP instead of the continuous relaxation
  int threads = 1;
  double time_budget = 600.0;
  long node_limit = -1;
  std::string log_path;
  bool record_bounds = false;
};

struct NodeBound {
  int node = 0;
  std::vector<Mode> prefix;  // stage modes fixed by the node (stages 1..t of its frontier)
  double lb = 0.0;
};

struct BnbStats {
  long created = 0, expanded = 0, pruned = 0, lps = 0, leaves = 0;
  double seconds = 0.0;
};

struct BnbResult {
  MipStatus status = MipStatus::Infeasible;
  double value = kInf;
  double bound = -kInf;
  Schedule schedule;
  std::vector<Mode> modes;
  BnbStats stats;
  std::vector<NodeBound> bounds;
};

BnbResult solve_bnb(const Instance& inst, const BnbConfig& cfg = {});

}  // namespace psh
