#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "psh/lp.hpp"
#include "psh/simplex.hpp"

namespace psh {

namespace {

struct Node {
  double bound;
  int depth;
  long id;
  std::vector<std::pair<int, signed char>> fixes;  // binary index, fixed value
  std::shared_ptr<const SimplexSolver::Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

}  // namespace

MipResult solve_binary_mip(const LinearProgram& lp, const MipOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  MipResult res;
  std::vector<int> bins;
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.vars[j].binary) bins.push_back(j);

  SimplexOptions lp_opt = opt.lp;
  if (opt.time_budget < 1e9)
    lp_opt.deadline = std::min(lp_opt.deadline, t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                         std::chrono::duration<double>(std::max(0.0, opt.time_budget))));
  SimplexSolver solver(lp, lp_opt);
  double incumbent = kInf;
  auto tol_for = [&](double ub) { return std::max(opt.abs_gap, opt.rel_gap * std::fabs(ub)); };

  auto apply = [&](const std::vector<std::pair<int, signed char>>& fixes) {
    for (int j : bins) solver.set_col_bounds(j, lp.vars[j].lb, lp.vars[j].ub);
    for (auto [j, v] : fixes) solver.set_col_bounds(j, v, v);
  };

  auto fractional = [&](const std::vector<double>& x) {
    int best = -1;
    double bestf = kIntTol;
    for (int j : bins) {
      double f = x[j] - std::floor(x[j]);
      double d = std::min(f, 1.0 - f);
      if (d > bestf) {
        bestf = d;
        best = j;
      }
    }
    return best;
  };

  auto try_rounding = [&](const std::vector<double>& x, const SimplexSolver::Basis& b) {
    std::vector<std::pair<int, signed char>> fixes;
    for (int j : bins) fixes.push_back({j, (signed char)(x[j] >= 0.5 ? 1 : 0)});
    apply(fixes);
    solver.set_basis(b);
    LpStatus st;
    try {
      st = solver.solve();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BudgetExceeded) throw;
      return;
    }
    if (st == LpStatus::Optimal) {
      double obj = solver.objective();
      if (obj < incumbent - tol_for(obj)) {
        incumbent = obj;
        res.solution = solver.solution();
      }
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push(Node{-kInf, 0, next_id++, {}, nullptr});
  bool root = true;
  double root_bound = -kInf;

  while (!open.empty()) {
    if (elapsed() > opt.time_budget || (opt.node_limit >= 0 && res.nodes >= opt.node_limit)) {
      double lb = open.top().bound;
      res.bound = std::min(lb, incumbent);
      res.status = MipStatus::BudgetExceeded;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - tol_for(incumbent)) continue;
    ++res.nodes;
    apply(node.fixes);
    if (node.basis) solver.set_basis(*node.basis);
    LpStatus st;
    try {
      st = solver.solve();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BudgetExceeded) throw;
      double lb = open.empty() ? node.bound : std::min(node.bound, open.top().bound);
      res.bound = std::min(lb, incumbent);
      res.status = MipStatus::BudgetExceeded;
      break;
    }
    if (st == LpStatus::Unbounded) throw Error(ErrorKind::NumericalFailure, "relaxation is unbounded");
    if (st == LpStatus::Infeasible) continue;
    double obj = solver.objective();
    if (root) {
      root_bound = obj;
      root = false;
    }
    if (obj >= incumbent - tol_for(incumbent)) continue;
    std::vector<double> x = solver.primal();
    int br = fractional(x);
    if (br < 0) {
      incumbent = obj;
      res.solution = solver.solution();
      continue;
    }
    auto basis = std::make_shared<const SimplexSolver::Basis>(solver.basis());
    if (res.nodes == 1 || res.nodes % 64 == 0) try_rounding(x, *basis);
    for (signed char v : {0, 1}) {
      Node child{obj, node.depth + 1, next_id++, node.fixes, basis};
      child.fixes.push_back({br, v});
      open.push(std::move(child));
    }
  }
  (void)root_bound;
  res.seconds = elapsed();
  if (res.status != MipStatus::BudgetExceeded) {
    res.status = res.has_solution() ? MipStatus::Optimal : MipStatus::Infeasible;
    res.bound = incumbent;
  }
  if (res.has_solution()) {
    double ub = res.solution.objective;
    res.gap = res.status == MipStatus::Optimal ? 0.0 : std::max(0.0, (ub - res.bound) / std::max(1.0, std::fabs(ub)));
  }
  return res;
}

}  // namespace psh
