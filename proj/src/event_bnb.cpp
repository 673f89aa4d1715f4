#include "psh/event_bnb.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <thread>

#include "psh/netflow_lp.hpp"
#include "psh/simplex.hpp"

namespace psh {

int ReducedNetwork::find(const ReducedState& s) const {
  auto less = [](const ReducedState& a, const ReducedState& b) {
    return std::tuple(a.t, int(a.mode), a.tau) < std::tuple(b.t, int(b.mode), b.tau);
  };
  auto it = std::lower_bound(nodes.begin(), nodes.end(), s, less);
  if (it == nodes.end() || !(*it == s)) return -1;
  return int(it - nodes.begin());
}

ReducedNetwork build_reduced_network(const Instance& in, const EventRules& rules) {
  require_valid(in);
  const int T = in.T;
  ReducedNetwork rn;
  rn.rules = rules;
  std::vector<std::map<std::pair<int, int>, int>> table(T + 2);
  std::vector<ReducedState> raw;
  struct RawArc {
    int from, to;
    EventAction a;
  };
  std::vector<RawArc> raw_arcs;
  raw.push_back({0, Mode::O, in.tau_init});
  table[0][{int(Mode::O), in.tau_init}] = 0;
  int sink = -1;
  for (int t = 0; t <= T; ++t) {
    for (auto& [key, id] : table[t]) {
      EventState s;
      s.t = raw[id].t;
      s.mode = raw[id].mode;
      s.tau = raw[id].tau;
      for (const EventAction& a : enumerate_events(s, in, nullptr, rules)) {
        int v;
        if (a.j == T + 1) {
          if (sink < 0) {
            sink = int(raw.size());
            raw.push_back({T + 1, Mode::O, 0});
          }
          v = sink;
        } else {
          EventState n = transition(s, a, in);
          auto [it, fresh] = table[a.j].try_emplace({int(n.mode), n.tau}, int(raw.size()));
          if (fresh) raw.push_back({n.t, n.mode, n.tau});
          v = it->second;
        }
        raw_arcs.push_back({id, v, a});
      }
    }
  }
  if (sink < 0) throw Error(ErrorKind::NoFeasiblePath, "no event reaches the end of the horizon");

  std::vector<std::vector<int>> rout(raw.size());
  for (int k = 0; k < int(raw_arcs.size()); ++k) rout[raw_arcs[k].from].push_back(k);
  std::vector<char> alive(raw.size(), 0), reach(raw.size(), 0);
  alive[sink] = 1;
  for (int t = T; t >= 0; --t)
    for (auto& [key, id] : table[t])
      for (int e : rout[id])
        if (alive[raw_arcs[e].to]) alive[id] = 1;
  if (!alive[0]) throw Error(ErrorKind::NoFeasiblePath, "no event path reaches the end of the horizon");
  reach[0] = 1;
  for (int t = 0; t <= T; ++t)
    for (auto& [key, id] : table[t])
      if (reach[id] && alive[id])
        for (int e : rout[id])
          if (alive[raw_arcs[e].to]) reach[raw_arcs[e].to] = 1;

  std::vector<int> newid(raw.size(), -1);
  for (int t = 0; t <= T; ++t)
    for (auto& [key, id] : table[t])
      if (alive[id] && reach[id]) {
        newid[id] = int(rn.nodes.size());
        rn.nodes.push_back(raw[id]);
      }
  newid[sink] = int(rn.nodes.size());
  rn.nodes.push_back(raw[sink]);
  rn.source = 0;
  rn.sink = newid[sink];
  rn.out.resize(rn.nodes.size());
  rn.in.resize(rn.nodes.size());
  for (const RawArc& r : raw_arcs) {
    int u = newid[r.from], v = newid[r.to];
    if (u < 0 || v < 0) continue;
    ReducedArc a;
    a.from = u;
    a.to = v;
    a.j = r.a.j;
    a.next = r.a.next;
    a.exit = r.a.exit;
    a.gamma = boundary_cost(raw[r.from].mode, r.a.next, r.a.j, in);
    int id = int(rn.arcs.size());
    rn.arcs.push_back(a);
    rn.out[u].push_back(id);
    rn.in[v].push_back(id);
  }
  return rn;
}

std::vector<Mode> stage_modes(const ReducedNetwork& rn, const std::vector<int>& arcs) {
  std::vector<Mode> m;
  for (int e : arcs) {
    const ReducedArc& a = rn.arcs[e];
    const ReducedState& u = rn.nodes[a.from];
    for (int s = std::max(u.t, 1); s < a.j; ++s) m.push_back(u.mode);
  }
  return m;
}

std::optional<Completion> evaluate_skeleton(const std::vector<Mode>& modes, const Instance& in,
                                            const EventRules& rules) {
  const int T = in.T;
  if (int(modes.size()) != T) throw Error(ErrorKind::InvalidArgument, "skeleton must cover every stage");
  LinearProgram lp;
  TrajectorySpec sp;
  sp.t0 = 1;
  sp.modes = modes;
  sp.m_start = Ref::constant(in.m_init);
  sp.h_start = Ref::constant(0.0);
  if (in.m_term) sp.m_end = Ref::constant(*in.m_term);
  sp.exit = exit_rule(in, modes.back(), Mode::O, T + 1, rules);
  sp.strict = rules.strict;
  TrajectoryVars v = append_trajectory(lp, in, sp);
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  double gamma = 0.0;
  Mode prev = Mode::O;
  for (int t = 1; t <= T; ++t) {
    gamma += boundary_cost(prev, modes[t - 1], t, in);
    prev = modes[t - 1];
  }
  Completion c;
  c.modes = modes;
  c.value = sol.objective + gamma;
  Schedule& s = c.schedule;
  s = empty_schedule(T);
  s.mode = modes;
  s.level[0] = in.m_init;
  for (int k = 0; k < T; ++k) {
    s.h_out[k] = v.h_out[k] >= 0 ? sol.x[v.h_out[k]] : 0.0;
    s.h_in[k] = v.h_in[k] >= 0 ? sol.x[v.h_in[k]] : 0.0;
    s.level[k + 1] = sol.x[v.level[k]];
  }
  AuditOptions ao;
  ao.shutdown_cap = !rules.strict;
  complete_schedule(s, in, ao);
  if (std::fabs(s.cost - c.value) > 1e-6 * std::max(1.0, std::fabs(c.value)))
    throw Error(ErrorKind::NumericalFailure, "skeleton LP value disagrees with the audited schedule cost");
  return c;
}

namespace {

using Basis = SimplexSolver::Basis;

void mccormick(LinearProgram& lp, int w, int x, int pi, double U) {
  lp.add_row({{w, 1}, {pi, -U}}, Relation::LE, 0.0);
  lp.add_row({{w, 1}, {x, -1}}, Relation::LE, 0.0);
  lp.add_row({{w, 1}, {x, -1}, {pi, -U}}, Relation::GE, -U);
}

// node LP model; with a grid the LP is the grid network flow LP and several LP arcs map to one reduced arc
struct Relaxation {
  const ReducedNetwork* rn = nullptr;
  LinearProgram lp;
  std::vector<int> col, red;
  bool on_grid = false;
  EventNetwork net;
  NetworkLp md;
  std::shared_ptr<const SimplexSolver::Basis> root_basis;
  const LinearProgram& model() const { return on_grid ? md.lp : lp; }
};

void build_mccormick(Relaxation& r, const Instance& in) {
  const ReducedNetwork& rn = *r.rn;
  LinearProgram& lp = r.lp;
  const int na = int(rn.arcs.size()), nn = int(rn.nodes.size());
  const double Mb = in.capacity, Hb = in.gen_cap();
  r.col.resize(na);
  r.red.resize(na);
  for (int e = 0; e < na; ++e) {
    r.col[e] = lp.add_var(0, 1, rn.arcs[e].gamma, false, "pi_" + std::to_string(e));
    r.red[e] = e;
  }
  std::vector<int> M(nn, -1), H(nn, -1);
  for (int v = 0; v < nn; ++v) {
    if (v == rn.source || v == rn.sink) continue;
    M[v] = lp.add_var(0, Mb, 0, false, "M_" + std::to_string(v));
    // generation carries over an event boundary only between G and SC
    if (in.hsc && generates(rn.nodes[v].mode)) H[v] = lp.add_var(0, Hb, 0, false, "Hbar_" + std::to_string(v));
  }
  std::vector<int> mo(na, -1), mi(na, -1), ho(na, -1), hi(na, -1);
  for (int e = 0; e < na; ++e) {
    const ReducedArc& a = rn.arcs[e];
    int pi = r.col[e];
    if (M[a.from] >= 0) {
      mo[e] = lp.add_var(0, Mb, 0);
      mccormick(lp, mo[e], M[a.from], pi, Mb);
    }
    if (M[a.to] >= 0) {
      mi[e] = lp.add_var(0, Mb, 0);
      mccormick(lp, mi[e], M[a.to], pi, Mb);
    }
    if (H[a.from] >= 0) {
      ho[e] = lp.add_var(0, Hb, 0);
      mccormick(lp, ho[e], H[a.from], pi, Hb);
    }
    if (H[a.to] >= 0) {
      hi[e] = lp.add_var(0, generates(rn.nodes[a.from].mode) ? Hb : 0.0, 0);
      mccormick(lp, hi[e], H[a.to], pi, Hb);
    }
  }
  for (int v = 0; v < nn; ++v) {
    if (v == rn.sink) continue;
    std::vector<std::pair<int, double>> f;
    for (int e : rn.out[v]) f.push_back({r.col[e], 1});
    for (int e : rn.in[v]) f.push_back({r.col[e], -1});
    lp.add_row(f, Relation::EQ, v == rn.source ? 1.0 : 0.0, "node_" + std::to_string(v));
    if (M[v] < 0) continue;
    std::vector<std::pair<int, double>> m;
    for (int e : rn.in[v]) m.push_back({mi[e], 1});
    for (int e : rn.out[v]) m.push_back({mo[e], -1});
    lp.add_row(m, Relation::EQ, 0.0);
    if (H[v] < 0) continue;
    std::vector<std::pair<int, double>> h;
    for (int e : rn.in[v]) h.push_back({hi[e], 1});
    for (int e : rn.out[v]) h.push_back({ho[e], -1});
    lp.add_row(h, Relation::EQ, 0.0);
  }

  for (int e = 0; e < na; ++e) {
    const ReducedArc& a = rn.arcs[e];
    const ReducedState& u = rn.nodes[a.from];
    const int t0 = std::max(u.t, 1), n = a.j - t0, pi = r.col[e];
    const bool to_sink = a.to == rn.sink;
    if (u.mode == Mode::O) {
      // start + drift * pi = end, every intermediate level inside [0, capacity] * pi
      double start_pi = mo[e] >= 0 ? 0.0 : in.m_init;
      double D = 0.0, lo = 0.0, hi_ = 0.0;
      for (int s = t0; s < a.j; ++s) {
        D += in.drift(s);
        lo = std::min(lo, D);
        hi_ = std::max(hi_, D);
      }
      std::vector<std::pair<int, double>> r0;
      double end_pi = 0.0;
      bool has_end = true;
      if (mi[e] >= 0)
        r0.push_back({mi[e], 1});
      else if (to_sink && in.m_term)
        end_pi = *in.m_term;
      else
        has_end = false;
      if (has_end) {
        if (mo[e] >= 0) r0.push_back({mo[e], -1});
        r0.push_back({pi, end_pi - start_pi - D});
        lp.add_row(r0, Relation::EQ, 0.0);
      }
      if (n > 0 && lo < 0) {
        std::vector<std::pair<int, double>> r1{{pi, start_pi + lo}};
        if (mo[e] >= 0) r1.push_back({mo[e], 1});
        lp.add_row(r1, Relation::GE, 0.0);
      }
      if (n > 0 && hi_ > 0) {
        std::vector<std::pair<int, double>> r2{{pi, start_pi + hi_ - Mb}};
        if (mo[e] >= 0) r2.push_back({mo[e], 1});
        lp.add_row(r2, Relation::LE, 0.0);
      }
      continue;
    }
    TrajectorySpec sp;
    sp.t0 = t0;
    sp.modes.assign(n, u.mode);
    sp.m_start = mo[e] >= 0 ? Ref::column(mo[e]) : Ref::constant(in.m_init);
    sp.h_start = ho[e] >= 0 ? Ref::column(ho[e]) : Ref::constant(0.0);
    if (mi[e] >= 0)
      sp.m_end = Ref::column(mi[e]);
    else if (to_sink && in.m_term)
      sp.m_end = Ref::constant(*in.m_term);
    sp.exit = a.exit;
    sp.h_end = a.exit == ExitRule::Pin && hi[e] >= 0 ? Ref::column(hi[e]) : Ref::constant(0.0);
    sp.strict = rn.rules.strict;
    append_trajectory(lp, in, sp, pi);
  }
}

void build_grid_relaxation(Relaxation& r, const Instance& in, const GridSpec& g) {
  const ReducedNetwork& rn = *r.rn;
  r.on_grid = true;
  EventNetwork full = build_grid_network(in, g, rn.rules);
  ScaledBlocks sb = solve_scaled_blocks(full, in);
  std::vector<char> keep(full.arcs.size());
  for (size_t e = 0; e < full.arcs.size(); ++e) keep[e] = sb.feasible[full.arcs[e].key];
  r.net = feasible_subnetwork(full, keep);
  r.md = build_network_lp(r.net, in);
  if (auto b = crash_basis(r.md, r.net, sb)) r.root_basis = std::make_shared<const SimplexSolver::Basis>(*b);
  const int na = int(r.net.arcs.size());
  r.col = r.md.index.flow;
  r.red.assign(na, -1);
  for (int k = 0; k < na; ++k) {
    const NetArc& a = r.net.arcs[k];
    const EventState& s = r.net.nodes[a.from];
    int u = rn.find({s.t, s.mode, s.tau});
    if (u >= 0)
      for (int e : rn.out[u])
        if (rn.arcs[e].j == a.action.j && rn.arcs[e].next == a.action.next) r.red[k] = e;
    if (r.red[k] < 0) throw Error(ErrorKind::NumericalFailure, "grid arc has no reduced counterpart");
  }
}

std::vector<char> closed_arcs(const ReducedNetwork& rn, const std::vector<int>& prefix) {
  std::vector<char> closed(rn.arcs.size(), 0);
  for (int e : prefix)
    for (int f : rn.out[rn.arcs[e].from])
      if (f != e) closed[f] = 1;
  return closed;
}

struct Task {
  std::vector<int> prefix;
  int frontier = 0;
  std::shared_ptr<const Basis> warm;
};

struct Outcome {
  bool feasible = false, exact = false, lp = false;
  double lb = kInf;
  std::shared_ptr<const Basis> basis;
  std::optional<Completion> point;  // exact value of the node (leaf or integral relaxation)
  std::optional<Completion> dive;
};

struct Worker {
  const Relaxation& r;
  const Instance& in;
  SimplexSolver solver;
  std::vector<char> closed;

  Worker(const Relaxation& rel, const Instance& inst, const SimplexOptions& opt = {})
      : r(rel), in(inst), solver(rel.model(), opt), closed(rel.col.size(), 0) {}

  Outcome run(const Task& task) {
    const ReducedNetwork& rn = *r.rn;
    Outcome o;
    if (!r.on_grid && task.frontier == rn.sink) {
      o.point = evaluate_skeleton(stage_modes(rn, task.prefix), in, rn.rules);
      o.exact = true;
      o.feasible = bool(o.point);
      if (o.point) o.lb = o.point->value;
      return o;
    }
    std::vector<char> want = closed_arcs(rn, task.prefix);
    for (size_t k = 0; k < r.col.size(); ++k) {
      char c = want[r.red[k]];
      if (c != closed[k]) {
        solver.set_col_bounds(r.col[k], 0.0, c ? 0.0 : 1.0);
        closed[k] = c;
      }
    }
    if (task.warm) solver.set_basis(*task.warm);
    LpStatus st = solver.solve();
    o.lp = true;
    if (st == LpStatus::Unbounded) throw Error(ErrorKind::NumericalFailure, "node relaxation is unbounded");
    if (st == LpStatus::Infeasible) return o;
    o.feasible = true;
    o.lb = solver.objective();
    o.basis = std::make_shared<const Basis>(solver.basis());
    std::vector<double> x = solver.primal();
    std::vector<double> flow(rn.arcs.size(), 0.0);
    bool integral = true;
    for (size_t k = 0; k < r.col.size(); ++k) {
      double f = x[r.col[k]];
      if (std::fabs(f - std::round(f)) > kIntTol) integral = false;
      flow[r.red[k]] += f;
    }
    if (integral && r.on_grid) {
      LpSolution sol;
      sol.status = LpStatus::Optimal;
      sol.objective = o.lb;
      sol.x = std::move(x);
      ExtractedPath p = extract_path(sol, r.md, r.net, in);
      Completion c;
      c.value = p.cost;
      c.schedule = p.schedule;
      c.modes = p.schedule.mode;
      o.point = c;
      o.exact = true;
      return o;
    }
    // follow the heaviest flow to the sink
    std::vector<int> path;
    int u = rn.source;
    while (u != rn.sink) {
      int best = -1;
      for (int e : rn.out[u])
        if (best < 0 || flow[e] > flow[best]) best = e;
      if (best < 0) break;
      path.push_back(best);
      u = rn.arcs[best].to;
    }
    if (u != rn.sink || r.on_grid) return o;
    std::optional<Completion> c = evaluate_skeleton(stage_modes(rn, path), in, rn.rules);
    if (integral && c && std::fabs(c->value - o.lb) <= 1e-6 * std::max(1.0, std::fabs(o.lb))) {
      o.point = c;
      o.exact = true;
    } else {
      o.dive = c;
    }
    return o;
  }
};

std::string skeleton_text(const ReducedNetwork& rn, const std::vector<int>& prefix, int frontier) {
  std::string s;
  for (int e : prefix) {
    const ReducedArc& a = rn.arcs[e];
    const ReducedState& u = rn.nodes[a.from];
    if (a.j > std::max(u.t, 1)) {
      if (!s.empty()) s += ' ';
      s += std::string(mode_name(u.mode)) + ":" + std::to_string(std::max(u.t, 1)) + "-" + std::to_string(a.j - 1);
    }
  }
  if (frontier != rn.sink) {
    if (!s.empty()) s += ' ';
    s += std::string(mode_name(rn.nodes[frontier].mode)) + "@" + std::to_string(rn.nodes[frontier].t);
  }
  return s;
}

std::vector<int> prefix_arcs(const ReducedNetwork& rn, const BnbNode& node) {
  std::vector<int> p;
  int u = rn.source;
  for (const SkeletonStep& st : node.skeleton) {
    int found = -1;
    for (int e : rn.out[u])
      if (rn.arcs[e].j == st.j && rn.arcs[e].next == st.next) found = e;
    if (found < 0) throw Error(ErrorKind::InvalidArgument, "skeleton step is not an admissible event");
    p.push_back(found);
    u = rn.arcs[found].to;
  }
  return p;
}

}  // namespace

BnbNode make_root(const Instance& in) {
  require_valid(in);
  BnbNode n;
  n.frontier = {0, Mode::O, in.tau_init};
  n.m_committed = in.m_init;
  n.h_committed = 0.0;
  return n;
}

std::vector<BnbNode> branch(const BnbNode& node, const Instance& in, const EventRules& rules) {
  std::vector<BnbNode> kids;
  if (node.frontier.t > in.T) return kids;
  EventState s;
  s.t = node.frontier.t;
  s.mode = node.frontier.mode;
  s.tau = node.frontier.tau;
  for (const EventAction& a : enumerate_events(s, in, nullptr, rules)) {
    BnbNode c;
    c.parent = node.id;
    c.depth = node.depth + 1;
    c.skeleton = node.skeleton;
    c.skeleton.push_back({a.j, a.next});
    if (a.j > in.T) {
      c.frontier = {in.T + 1, Mode::O, 0};
      c.status = NodeStatus::Leaf;
    } else {
      EventState n = transition(s, a, in);
      c.frontier = {n.t, n.mode, n.tau};
    }
    c.m_committed = in.m_init;
    kids.push_back(c);
  }
  return kids;
}

double relax_lower_bound(const BnbNode& node, const Instance& in, const EventRules& rules) {
  ReducedNetwork rn = build_reduced_network(in, rules);
  Relaxation r;
  r.rn = &rn;
  build_mccormick(r, in);
  std::vector<int> prefix = prefix_arcs(rn, node);
  Worker w(r, in);
  std::vector<char> want = closed_arcs(rn, prefix);
  for (size_t k = 0; k < r.col.size(); ++k)
    if (want[r.red[k]]) w.solver.set_col_bounds(r.col[k], 0.0, 0.0);
  LpStatus st = w.solver.solve();
  if (st == LpStatus::Infeasible) return kInf;
  if (st == LpStatus::Unbounded) throw Error(ErrorKind::NumericalFailure, "node relaxation is unbounded");
  return node.c_sofar + w.solver.objective();
}

std::optional<Completion> upper_bound_completion(const BnbNode& node, const Instance& in, const EventRules& rules) {
  const int T = in.T;
  EventState s = initial_state(in);
  std::vector<Mode> modes;
  auto take = [&](const EventAction& a, double* cost) -> bool {
    BlockBoundary b = block_of(s, a, in);
    if (b.exit == ExitRule::Pin) b.exit = ExitRule::Free;
    BlockResult r = solve_block(b, in);
    if (!r.feasible) return false;
    if (cost) *cost = r.cost + boundary_cost(s.mode, a.next, a.j, in);
    return true;
  };
  auto advance = [&](const EventAction& a) {
    BlockBoundary b = block_of(s, a, in);
    if (b.exit == ExitRule::Pin) b.exit = ExitRule::Free;
    BlockResult r = solve_block(b, in);
    for (int k = b.t; k < b.j; ++k) modes.push_back(s.mode);
    EventAction a2 = a;
    a2.m_end = r.level.back();
    a2.h_end = generates(s.mode) && generates(a.next) && !r.h_out.empty() ? r.h_out.back() : 0.0;
    s = transition(s, a2, in);
  };
  for (const SkeletonStep& st : node.skeleton) {
    if (s.t > T) return std::nullopt;
    std::optional<EventAction> match;
    for (const EventAction& a : enumerate_events(s, in, nullptr, rules))
      if (a.j == st.j && a.next == st.next) match = a;
    if (!match || !take(*match, nullptr)) return std::nullopt;
    advance(*match);
  }
  while (s.t <= T) {
    std::optional<EventAction> best;
    double best_cost = kInf;
    for (const EventAction& a : enumerate_events(s, in, nullptr, rules)) {
      double c;
      if (take(a, &c) && c < best_cost - 1e-9) {
        best_cost = c;
        best = a;
      }
    }
    if (!best) return std::nullopt;
    advance(*best);
  }
  return evaluate_skeleton(modes, in, rules);
}

BnbResult solve_bnb(const Instance& in, const BnbConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  EventRules rules;
  rules.strict = cfg.strict;
  ReducedNetwork rn = build_reduced_network(in, rules);
  Relaxation rel;
  rel.rn = &rn;
  if (cfg.grid)
    build_grid_relaxation(rel, in, *cfg.grid);
  else
    build_mccormick(rel, in);

  BnbResult res;
  std::FILE* log = nullptr;
  if (!cfg.log_path.empty()) {
    log = std::fopen(cfg.log_path.c_str(), "w");
    if (!log) throw Error(ErrorKind::InvalidArgument, "cannot write " + cfg.log_path);
    std::setvbuf(log, nullptr, _IOLBF, 0);
    std::fprintf(log, "node,parent,skeleton,lb,ub,action\n");
  }
  double ub = kInf;
  std::optional<Completion> best;
  std::set<std::vector<Mode>> tried;
  auto offer = [&](const Completion& c) {
    if (c.value < ub - 1e-9) {
      ub = c.value;
      best = c;
    }
  };
  auto note = [&](int id, int parent, const std::vector<int>& prefix, int frontier, double lb, const char* action) {
    if (!log) return;
    std::fprintf(log, "%d,%d,%s,%.10g,%.10g,%s\n", id, parent, skeleton_text(rn, prefix, frontier).c_str(), lb, ub,
                 action);
  };
  auto record = [&](int id, const std::vector<int>& prefix, int frontier, double lb) {
    if (!cfg.record_bounds) return;
    NodeBound b;
    b.node = id;
    b.prefix = stage_modes(rn, prefix);
    if (frontier != rn.sink) b.prefix.push_back(rn.nodes[frontier].mode);
    b.lb = lb;
    res.bounds.push_back(std::move(b));
  };

  const int nthreads = std::max(1, cfg.threads);
  SimplexOptions lp_opt;
  if (cfg.time_budget < 1e9)
    lp_opt.deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                               std::chrono::duration<double>(std::max(0.0, cfg.time_budget)));
  std::vector<std::unique_ptr<Worker>> workers;
  auto worker = [&](int k) -> Worker& {
    while (int(workers.size()) <= k) workers.push_back(std::make_unique<Worker>(rel, in, lp_opt));
    return *workers[k];
  };
  auto run_all = [&](const std::vector<Task>& tasks) {
    std::vector<Outcome> out(tasks.size());
    int nt = std::min<int>(nthreads, int(tasks.size()));
    if (nt <= 1) {
      for (size_t k = 0; k < tasks.size(); ++k) out[k] = worker(0).run(tasks[k]);
      return out;
    }
    for (int k = 0; k < nt; ++k) worker(k);
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> err(nt);
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w)
      pool.emplace_back([&, w] {
        try {
          for (size_t k; (k = next++) < tasks.size();) out[k] = workers[w]->run(tasks[k]);
        } catch (...) {
          err[w] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : err)
      if (e) std::rethrow_exception(e);
    return out;
  };

  struct Open {
    int id, parent, depth;
    std::vector<int> prefix;
    int frontier;
    double lb;
    std::shared_ptr<const Basis> basis;
  };
  auto worse = [](const Open& a, const Open& b) {
    if (a.lb != b.lb) return a.lb > b.lb;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  };
  std::priority_queue<Open, std::vector<Open>, decltype(worse)> heap(worse);
  int next_id = 0;

  auto absorb = [&](const Task& task, Outcome& o, int parent, int depth) {
    int id = next_id++;
    ++res.stats.created;
    if (o.lp) ++res.stats.lps;
    if (o.feasible) record(id, task.prefix, task.frontier, o.lb);
    if (o.dive && tried.insert(o.dive->modes).second) offer(*o.dive);
    if (!o.feasible) {
      ++res.stats.pruned;
      note(id, parent, task.prefix, task.frontier, kInf, "infeasible");
      return;
    }
    if (o.exact) {
      ++res.stats.leaves;
      tried.insert(o.point->modes);
      offer(*o.point);
      note(id, parent, task.prefix, task.frontier, o.lb, task.frontier == rn.sink ? "leaf" : "integral");
      return;
    }
    if (o.lb >= ub - 1e-9) {
      ++res.stats.pruned;
      note(id, parent, task.prefix, task.frontier, o.lb, "prune");
      return;
    }
    note(id, parent, task.prefix, task.frontier, o.lb, "queue");
    heap.push({id, parent, depth, task.prefix, task.frontier, o.lb, o.basis});
  };

  Task root;
  root.frontier = rn.source;
  root.warm = rel.root_basis;
  bool budget = false;
  double cut_lb = kInf;  // bound of a node whose children were not all evaluated
  auto timed_out = [](const Error& e) { return e.kind() == ErrorKind::BudgetExceeded; };
  try {
    std::vector<Outcome> ro = run_all({root});
    if (ro[0].feasible && !ro[0].exact && !rel.on_grid) {
      auto g = upper_bound_completion(make_root(in), in, rules);
      if (g && tried.insert(g->modes).second) offer(*g);
    }
    absorb(root, ro[0], -1, 0);
  } catch (const Error& e) {
    if (!timed_out(e)) throw;
    budget = true;
    cut_lb = -kInf;
  }

  while (!budget && !heap.empty()) {
    if (elapsed() > cfg.time_budget || (cfg.node_limit >= 0 && res.stats.expanded >= cfg.node_limit)) {
      budget = true;
      break;
    }
    Open node = heap.top();
    heap.pop();
    if (node.lb >= ub - 1e-9) {
      ++res.stats.pruned;
      note(node.id, node.parent, node.prefix, node.frontier, node.lb, "prune");
      continue;
    }
    ++res.stats.expanded;
    note(node.id, node.parent, node.prefix, node.frontier, node.lb, "expand");
    std::vector<Task> tasks;
    for (int e : rn.out[node.frontier]) {
      Task t;
      t.prefix = node.prefix;
      t.prefix.push_back(e);
      t.frontier = rn.arcs[e].to;
      t.warm = node.basis;
      tasks.push_back(std::move(t));
    }
    std::vector<Outcome> outs;
    try {
      outs = run_all(tasks);
    } catch (const Error& e) {
      if (!timed_out(e)) throw;
      budget = true;
      cut_lb = node.lb;
      break;
    }
    for (size_t k = 0; k < tasks.size(); ++k) absorb(tasks[k], outs[k], node.id, node.depth + 1);
  }

  res.stats.seconds = elapsed();
  if (log) std::fclose(log);
  double open_lb = cut_lb;
  if (budget) {
    while (!heap.empty()) {
      open_lb = std::min(open_lb, heap.top().lb);
      heap.pop();
    }
  }
  res.bound = std::min(ub, open_lb);
  if (!best) {
    if (budget) {
      res.status = MipStatus::BudgetExceeded;
      return res;
    }
    throw Error(ErrorKind::Infeasible, "no feasible schedule exists");
  }
  res.status = budget ? MipStatus::BudgetExceeded : MipStatus::Optimal;
  res.value = best->value;
  res.schedule = best->schedule;
  res.modes = best->modes;
  return res;
}

}  // namespace psh
