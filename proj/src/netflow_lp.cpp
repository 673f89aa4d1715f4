#include "psh/netflow_lp.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace psh {

TrajectorySpec arc_trajectory(const EventNetwork& net, int e) {
  const BlockBoundary& b = net.arcs[e].block;
  TrajectorySpec sp;
  sp.t0 = b.t;
  sp.modes.assign(b.j - b.t, b.mode);
  sp.m_start = Ref::constant(b.m_start);
  sp.h_start = Ref::constant(b.h_start);
  if (b.m_end) sp.m_end = Ref::constant(*b.m_end);
  sp.exit = b.exit;
  sp.h_end = Ref::constant(b.h_end);
  sp.strict = net.rules.strict;
  sp.free_phi = true;
  return sp;
}

NetworkLp build_network_lp(const EventNetwork& net, const Instance& in) {
  NetworkLp md;
  LinearProgram& lp = md.lp;
  const int na = int(net.arcs.size()), nn = int(net.nodes.size());
  NetworkLpIndex& ix = md.index;
  ix.flow.resize(na);
  ix.blocks.resize(na);
  ix.col_begin.assign(na, 0);
  ix.row_begin.assign(na, 0);
  ix.col_count.assign(na, 0);
  ix.row_count.assign(na, 0);
  for (int e = 0; e < na; ++e) ix.flow[e] = lp.add_var(0, 1, net.arcs[e].gamma, false, "pi_" + std::to_string(e));
  for (int e = 0; e < na; ++e) {
    if (net.arcs[e].block.mode == Mode::O) continue;
    ix.col_begin[e] = lp.num_vars();
    ix.row_begin[e] = lp.num_rows();
    ix.blocks[e] = append_trajectory(lp, in, arc_trajectory(net, e), ix.flow[e]);
    ix.col_count[e] = lp.num_vars() - ix.col_begin[e];
    ix.row_count[e] = lp.num_rows() - ix.row_begin[e];
  }
  ix.conservation.assign(nn, -1);
  for (int u = 0; u < nn; ++u) {
    if (u == net.sink) continue;
    std::vector<std::pair<int, double>> r;
    for (int e : net.out[u]) r.push_back({ix.flow[e], 1});
    for (int e : net.in[u]) r.push_back({ix.flow[e], -1});
    ix.conservation[u] = lp.add_row(r, Relation::EQ, u == net.source ? 1.0 : 0.0, "node_" + std::to_string(u));
  }
  return md;
}

ScaledBlocks solve_scaled_blocks(const EventNetwork& net, const Instance& in, int threads) {
  const int nb = int(net.blocks.size());
  std::vector<int> rep(nb, -1);
  for (int e = 0; e < int(net.arcs.size()); ++e)
    if (rep[net.arcs[e].key] < 0) rep[net.arcs[e].key] = e;
  ScaledBlocks sb;
  sb.feasible.assign(nb, 0);
  sb.cost.assign(nb, 0.0);
  sb.basis.resize(nb);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k; (k = next.fetch_add(1)) < nb;) {
      if (rep[k] < 0) continue;
      const BlockBoundary& b = net.blocks[k];
      if (b.mode == Mode::O) {
        sb.feasible[k] = solve_offline_block(b, in).feasible;
        continue;
      }
      LinearProgram lp;
      int pi = lp.add_var(1, 1, 0);
      append_trajectory(lp, in, arc_trajectory(net, rep[k]), pi);
      SimplexSolver s(lp);
      if (s.solve() != LpStatus::Optimal) continue;
      sb.feasible[k] = 1;
      sb.cost[k] = s.objective();
      SimplexSolver::Basis full = s.basis();
      if (full[pi] != SimplexSolver::VarState::Basic) sb.basis[k].assign(full.begin() + 1, full.end());
    }
  };
  int nt = std::max(1, threads);
  if (nt == 1 || nb < 64) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return sb;
}

EventNetwork feasible_subnetwork(const EventNetwork& net, const std::vector<char>& arc_feasible,
                                 std::vector<int>* origin) {
  const int nn = int(net.nodes.size()), na = int(net.arcs.size());
  std::vector<char> alive(nn, 0), reach(nn, 0);
  alive[net.sink] = 1;
  for (int u = nn - 1; u >= 0; --u)
    for (int e : net.out[u])
      if (arc_feasible[e] && alive[net.arcs[e].to]) alive[u] = 1;
  if (!alive[net.source]) throw Error(ErrorKind::NoFeasiblePath, "no path of feasible blocks reaches the sink");
  reach[net.source] = 1;
  for (int u = 0; u < nn; ++u)
    if (reach[u] && alive[u])
      for (int e : net.out[u])
        if (arc_feasible[e] && alive[net.arcs[e].to]) reach[net.arcs[e].to] = 1;
  EventNetwork sub;
  sub.grid = net.grid;
  sub.rules = net.rules;
  sub.blocks = net.blocks;
  std::vector<int> id(nn, -1);
  for (int u = 0; u < nn; ++u)
    if (alive[u] && reach[u]) {
      id[u] = int(sub.nodes.size());
      sub.nodes.push_back(net.nodes[u]);
    }
  sub.source = id[net.source];
  sub.sink = id[net.sink];
  sub.out.assign(sub.nodes.size(), {});
  sub.in.assign(sub.nodes.size(), {});
  if (origin) origin->clear();
  for (int e = 0; e < na; ++e) {
    const NetArc& a = net.arcs[e];
    if (!arc_feasible[e] || id[a.from] < 0 || id[a.to] < 0) continue;
    NetArc c = a;
    c.from = id[a.from];
    c.to = id[a.to];
    int k = int(sub.arcs.size());
    sub.arcs.push_back(c);
    sub.out[c.from].push_back(k);
    sub.in[c.to].push_back(k);
    if (origin) origin->push_back(e);
  }
  return sub;
}

std::optional<SimplexSolver::Basis> crash_basis(const NetworkLp& md, const EventNetwork& net, const ScaledBlocks& sb) {
  using VS = SimplexSolver::VarState;
  const int n = md.lp.num_vars(), m = md.lp.num_rows();
  const int na = int(net.arcs.size()), nn = int(net.nodes.size());
  const NetworkLpIndex& ix = md.index;
  SimplexSolver::Basis b(n + m, VS::AtLower);
  for (int e = 0; e < na; ++e) {
    if (!sb.feasible[net.arcs[e].key]) return std::nullopt;
    int nc = ix.col_count[e], nr = ix.row_count[e];
    if (net.arcs[e].block.mode == Mode::O || nc + nr == 0) continue;
    const auto& bb = sb.basis[net.arcs[e].key];
    if (int(bb.size()) != nc + nr) return std::nullopt;
    for (int c = 0; c < nc; ++c) b[ix.col_begin[e] + c] = bb[c];
    for (int r = 0; r < nr; ++r) b[n + ix.row_begin[e] + r] = bb[nc + r];
  }
  // shortest-path tree towards the sink
  std::vector<double> V(nn, kInf);
  std::vector<int> choice(nn, -1);
  V[net.sink] = 0.0;
  for (int u = nn - 1; u >= 0; --u) {
    if (u == net.sink) continue;
    for (int e : net.out[u]) {
      const NetArc& a = net.arcs[e];
      if (V[a.to] == kInf) continue;
      double c = sb.cost[a.key] + a.gamma + V[a.to];
      if (choice[u] < 0 || c < V[u] - 1e-9 * std::max(1.0, std::fabs(V[u]))) {
        V[u] = c;
        choice[u] = e;
      }
    }
    if (choice[u] < 0) return std::nullopt;
    b[ix.flow[choice[u]]] = VS::Basic;
  }
  int basic = 0;
  for (VS v : b) basic += v == VS::Basic;
  if (basic != m) return std::nullopt;
  return b;
}

namespace {

double path_cost(const EventNetwork& net, const std::vector<int>& arcs, const Instance& in, bool& ok) {
  double c = 0.0;
  ok = true;
  for (int e : arcs) {
    BlockResult r = solve_block(net.arcs[e].block, in);
    if (!r.feasible) {
      ok = false;
      return kInf;
    }
    c += r.cost + net.arcs[e].gamma;
  }
  return c;
}

}  // namespace

ExtractedPath extract_path(const LpSolution& sol, const NetworkLp& md, const EventNetwork& net, const Instance& in) {
  if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::InvalidArgument, "extract_path needs an optimal solution");
  const int na = int(net.arcs.size()), nn = int(net.nodes.size());
  std::vector<double> f(na);
  for (int e = 0; e < na; ++e) f[e] = sol.x[md.index.flow[e]];
  for (int u = 0; u < nn; ++u) {
    if (u == net.sink) continue;
    double r = u == net.source ? -1.0 : 0.0;
    for (int e : net.out[u]) r += f[e];
    for (int e : net.in[u]) r -= f[e];
    if (std::fabs(r) > kFeasTol) throw Error(ErrorKind::DecompositionFailure, "flow conservation violated at node " + std::to_string(u));
  }
  bool integral = true;
  for (double v : f)
    if (std::fabs(v - std::round(v)) > kIntTol) integral = false;

  ExtractedPath out;
  out.integral = integral;
  std::vector<std::vector<int>> paths;
  if (integral) {
    std::vector<int> p;
    int u = net.source;
    while (u != net.sink) {
      int next = -1;
      for (int e : net.out[u])
        if (f[e] > 0.5) {
          next = e;
          break;
        }
      if (next < 0) throw Error(ErrorKind::DecompositionFailure, "integral flow path is broken");
      p.push_back(next);
      u = net.arcs[next].to;
    }
    paths.push_back(p);
  } else {
    // peel paths off the flow, following the largest remaining flow out of each node
    std::vector<double> rest = f;
    double left = 1.0;
    while (left > kIntTol && paths.size() < 10000) {
      std::vector<int> p;
      int u = net.source;
      double bottleneck = kInf;
      while (u != net.sink) {
        int best = -1;
        for (int e : net.out[u])
          if (rest[e] > 1e-12 && (best < 0 || rest[e] > rest[best])) best = e;
        if (best < 0) break;
        p.push_back(best);
        bottleneck = std::min(bottleneck, rest[best]);
        u = net.arcs[best].to;
      }
      if (u != net.sink || bottleneck <= 1e-12) break;
      for (int e : p) rest[e] -= bottleneck;
      left -= bottleneck;
      paths.push_back(p);
    }
    if (paths.empty()) throw Error(ErrorKind::DecompositionFailure, "no path in the flow support");
  }
  double best = kInf;
  int arg = -1;
  for (size_t k = 0; k < paths.size(); ++k) {
    bool ok;
    double c = path_cost(net, paths[k], in, ok);
    if (ok && (arg < 0 || c < best - 1e-9 * std::max(1.0, std::fabs(best)))) {
      best = c;
      arg = int(k);
    }
  }
  if (arg < 0) throw Error(ErrorKind::DecompositionFailure, "no decomposed path has feasible blocks");
  if (best > sol.objective + 1e-6 * std::max(1.0, std::fabs(sol.objective)))
    throw Error(ErrorKind::DecompositionFailure, "best decomposed path is worse than the LP objective");
  out.arcs = paths[arg];
  out.cost = best;
  out.paths_considered = int(paths.size());
  out.schedule = path_schedule(net, out.arcs, in);
  return out;
}

NetworkLp build_projected_lp(const EventNetwork& net, const ScaledBlocks& sb) {
  NetworkLp md;
  LinearProgram& lp = md.lp;
  const int na = int(net.arcs.size()), nn = int(net.nodes.size());
  NetworkLpIndex& ix = md.index;
  ix.flow.resize(na);
  ix.blocks.resize(na);
  ix.col_begin.assign(na, 0);
  ix.row_begin.assign(na, 0);
  ix.col_count.assign(na, 0);
  ix.row_count.assign(na, 0);
  for (int e = 0; e < na; ++e) {
    const NetArc& a = net.arcs[e];
    if (!sb.feasible[a.key]) throw Error(ErrorKind::InvalidArgument, "projected LP needs feasible blocks only");
    ix.flow[e] = lp.add_var(0, 1, a.gamma + sb.cost[a.key], false, "pi_" + std::to_string(e));
  }
  ix.conservation.assign(nn, -1);
  for (int u = 0; u < nn; ++u) {
    if (u == net.sink) continue;
    std::vector<std::pair<int, double>> r;
    for (int e : net.out[u]) r.push_back({ix.flow[e], 1});
    for (int e : net.in[u]) r.push_back({ix.flow[e], -1});
    ix.conservation[u] = lp.add_row(r, Relation::EQ, u == net.source ? 1.0 : 0.0, "node_" + std::to_string(u));
  }
  return md;
}

GridLpResult solve_network_lp(const EventNetwork& full, const Instance& in, const NetworkLpOptions& opt) {
  ScaledBlocks sb = solve_scaled_blocks(full, in, opt.threads);
  std::vector<char> keep(full.arcs.size());
  for (size_t e = 0; e < full.arcs.size(); ++e) keep[e] = sb.feasible[full.arcs[e].key];
  std::vector<int> origin;
  EventNetwork net = feasible_subnetwork(full, keep, &origin);
  long size = long(net.arcs.size() + net.nodes.size());
  for (const NetArc& a : net.arcs) size += long(sb.basis[a.key].size());
  GridLpResult r;
  r.projected = opt.max_size >= 0 && size > opt.max_size;
  NetworkLp md = r.projected ? build_projected_lp(net, sb) : build_network_lp(net, in);
  if (!opt.dump_path.empty()) write_lp_format(md.lp, opt.dump_path);
  SimplexSolver solver(md.lp);
  if (opt.crash)
    if (auto b = crash_basis(md, net, sb)) {
      solver.set_basis(*b);
      r.crashed = true;
    }
  LpStatus st = solver.solve();
  if (st == LpStatus::Infeasible) throw Error(ErrorKind::NoFeasiblePath, "network LP is infeasible");
  if (st == LpStatus::Unbounded) throw Error(ErrorKind::NumericalFailure, "network LP is unbounded");
  LpSolution sol = solver.solution();
  r.objective = sol.objective;
  r.vars = md.lp.num_vars();
  r.rows = md.lp.num_rows();
  r.dropped_arcs = int(full.arcs.size() - net.arcs.size());
  r.iterations = sol.iterations;
  r.path = extract_path(sol, md, net, in);
  for (int& e : r.path.arcs) e = origin[e];
  return r;
}

}  // namespace psh
