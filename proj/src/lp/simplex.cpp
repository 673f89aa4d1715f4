#include "psh/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "factor.hpp"

namespace psh {
namespace lp {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kMinWeight = 1e-4;

double hash01(std::uint64_t seed, std::uint64_t j) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (j + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return double(z >> 11) * (1.0 / 9007199254740992.0);
}
}  // namespace

enum class Phase { Done, Infeasible, Unbounded, Restart };

struct Engine {
  using VarState = SimplexSolver::VarState;

  int n = 0, m = 0, N = 0;
  SimplexOptions opt;
  std::vector<int> a_start, a_index;
  std::vector<double> a_value;
  std::vector<int> r_start, r_index;
  std::vector<double> r_value;
  std::vector<double> lower, upper, cost_orig, cost;
  double offset = 0.0;

  std::vector<int> basic_index;
  std::vector<char> nonbasic;
  std::vector<signed char> move;
  std::vector<double> value, dual;
  std::vector<double> dse;
  std::vector<double> infeas;
  std::vector<int> inf_list, inf_pos;  // rows with nonzero infeasibility
  bool have_basis = false;
  bool weights_exact = false;

  LuFactor factor;
  HVector rho, col, tau, flipcol, rowap;
  long iters = 0;
  LpStatus status = LpStatus::Infeasible;

  explicit Engine(const LinearProgram& lp, SimplexOptions o) : opt(o) {
    lp.check();
    n = lp.num_vars();
    m = lp.num_rows();
    N = n + m;
    opt.refactor_interval = std::min(std::max(opt.refactor_interval, m / 300), 400);
    offset = lp.objective_offset;
    lower.resize(N);
    upper.resize(N);
    cost_orig.assign(N, 0.0);
    for (int j = 0; j < n; ++j) {
      lower[j] = lp.vars[j].lb;
      upper[j] = lp.vars[j].ub;
      cost_orig[j] = lp.vars[j].cost;
    }
    // merge duplicate coefficients per row, then build both orientations
    std::vector<int> cnt(n + 1, 0);
    std::vector<std::vector<std::pair<int, double>>> merged(m);
    for (int i = 0; i < m; ++i) {
      auto c = lp.rows[i].coefs;
      std::sort(c.begin(), c.end());
      for (auto& [j, a] : c) {
        if (!merged[i].empty() && merged[i].back().first == j)
          merged[i].back().second += a;
        else
          merged[i].push_back({j, a});
      }
      std::erase_if(merged[i], [](const auto& p) { return p.second == 0.0; });
      for (auto& [j, a] : merged[i]) cnt[j + 1]++;
      const auto& row = lp.rows[i];
      double rl = row.rel == Relation::LE ? -kInf : row.rhs;
      double ru = row.rel == Relation::GE ? kInf : row.rhs;
      lower[n + i] = -ru;
      upper[n + i] = -rl;
    }
    a_start.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) a_start[j + 1] = a_start[j] + cnt[j + 1];
    a_index.resize(a_start[n]);
    a_value.resize(a_start[n]);
    r_start.assign(m + 1, 0);
    r_index.resize(a_start[n]);
    r_value.resize(a_start[n]);
    std::vector<int> fill(a_start.begin(), a_start.end() - 1);
    int p = 0;
    for (int i = 0; i < m; ++i) {
      r_start[i] = p;
      for (auto& [j, a] : merged[i]) {
        r_index[p] = j;
        r_value[p] = a;
        ++p;
        int q = fill[j]++;
        a_index[q] = i;
        a_value[q] = a;
      }
    }
    r_start[m] = p;
    cost = cost_orig;
    basic_index.resize(m);
    nonbasic.assign(N, 1);
    move.assign(N, 0);
    value.assign(N, 0.0);
    dual.assign(N, 0.0);
    dse.assign(m, 1.0);
    infeas.assign(m, 0.0);
    inf_pos.assign(m, -1);
    rho.setup(m);
    col.setup(m);
    tau.setup(m);
    flipcol.setup(m);
    rowap.setup(n);
  }

  bool is_free(int j) const { return std::isinf(lower[j]) && std::isinf(upper[j]); }
  bool is_fixed(int j) const { return lower[j] == upper[j]; }

  void set_nonbasic_at(int j, int mv) {
    nonbasic[j] = 1;
    if (is_fixed(j)) {
      move[j] = 0;
      value[j] = lower[j];
    } else if (is_free(j)) {
      move[j] = 0;
      value[j] = 0.0;
    } else if (mv > 0 && std::isfinite(lower[j])) {
      move[j] = 1;
      value[j] = lower[j];
    } else if (mv < 0 && std::isfinite(upper[j])) {
      move[j] = -1;
      value[j] = upper[j];
    } else if (std::isfinite(lower[j])) {
      move[j] = 1;
      value[j] = lower[j];
    } else {
      move[j] = -1;
      value[j] = upper[j];
    }
  }

  void slack_basis() {
    for (int i = 0; i < m; ++i) {
      basic_index[i] = n + i;
      nonbasic[n + i] = 0;
      move[n + i] = 0;
    }
    for (int j = 0; j < n; ++j) set_nonbasic_at(j, cost_orig[j] >= 0 ? 1 : -1);
    dse.assign(m, 1.0);
    weights_exact = true;
    have_basis = true;
  }

  // column j of [A I] scattered into v (by row)
  void load_column(int j, HVector& v) const {
    v.clear();
    if (j < n) {
      for (int p = a_start[j]; p < a_start[j + 1]; ++p) v.set(a_index[p], a_value[p]);
    } else {
      v.set(j - n, 1.0);
    }
  }

  void reinvert() {
    for (int round = 0; round < 50; ++round) {
      BasisColumns bc;
      bc.start.resize(m + 1);
      bc.start[0] = 0;
      for (int r = 0; r < m; ++r) {
        int j = basic_index[r];
        if (j < n) {
          for (int p = a_start[j]; p < a_start[j + 1]; ++p) {
            bc.index.push_back(a_index[p]);
            bc.value.push_back(a_value[p]);
          }
        } else {
          bc.index.push_back(j - n);
          bc.value.push_back(1.0);
        }
        bc.start[r + 1] = int(bc.index.size());
      }
      auto singular = factor.build(m, bc);
      if (singular.empty()) break;
      for (auto [pos, row] : singular) {
        int out = basic_index[pos];
        set_nonbasic_at(out, 1);
        basic_index[pos] = n + row;
        nonbasic[n + row] = 0;
        move[n + row] = 0;
        dse[pos] = 1.0;
      }
      weights_exact = false;
    }
    compute_primal();
    compute_dual();
  }

  void compute_primal() {
    HVector& v = col;
    v.clear();
    std::vector<double>& b = v.array;
    for (int j = 0; j < N; ++j) {
      if (!nonbasic[j] || value[j] == 0.0) continue;
      double x = value[j];
      if (j < n) {
        for (int p = a_start[j]; p < a_start[j + 1]; ++p) b[a_index[p]] -= a_value[p] * x;
      } else {
        b[j - n] -= x;
      }
    }
    v.rescan(0.0);
    factor.ftran(v);
    for (int r = 0; r < m; ++r) {
      value[basic_index[r]] = v.array[r];
      update_infeas(r);
    }
    v.clear();
  }

  void compute_dual() {
    HVector& v = rho;
    v.clear();
    for (int r = 0; r < m; ++r) {
      double c = cost[basic_index[r]];
      if (c != 0.0) v.set(r, c);
    }
    factor.btran(v);
    const std::vector<double>& y = v.array;
    for (int j = 0; j < n; ++j) {
      if (!nonbasic[j]) {
        dual[j] = 0.0;
        continue;
      }
      double d = cost[j];
      for (int p = a_start[j]; p < a_start[j + 1]; ++p) d -= y[a_index[p]] * a_value[p];
      dual[j] = d;
    }
    for (int i = 0; i < m; ++i) dual[n + i] = nonbasic[n + i] ? cost[n + i] - y[i] : 0.0;
    v.clear();
  }

  std::vector<double> row_prices() {
    HVector& v = rho;
    v.clear();
    for (int r = 0; r < m; ++r) {
      double c = cost_orig[basic_index[r]];
      if (c != 0.0) v.set(r, c);
    }
    factor.btran(v);
    std::vector<double> y(v.array.begin(), v.array.end());
    v.clear();
    return y;
  }

  void update_infeas(int r) {
    int j = basic_index[r];
    double x = value[j];
    double v = 0.0;
    if (x < lower[j] - opt.primal_tol)
      v = lower[j] - x;
    else if (x > upper[j] + opt.primal_tol)
      v = x - upper[j];
    infeas[r] = v * v;
    if (v != 0.0 && inf_pos[r] < 0) {
      inf_pos[r] = int(inf_list.size());
      inf_list.push_back(r);
    } else if (v == 0.0 && inf_pos[r] >= 0) {
      int last = inf_list.back();
      inf_list[inf_pos[r]] = last;
      inf_pos[last] = inf_pos[r];
      inf_list.pop_back();
      inf_pos[r] = -1;
    }
  }

  // make every nonbasic reduced cost sign-consistent: flip boxed columns, shift the cost of the rest
  bool make_dual_feasible() {
    bool flipped = false;
    for (int j = 0; j < N; ++j) {
      if (!nonbasic[j] || is_fixed(j)) continue;
      double d = dual[j];
      if (is_free(j)) {
        if (d != 0.0) {
          cost[j] -= d;
          dual[j] = 0.0;
        }
        continue;
      }
      if (move[j] > 0 && d < -opt.dual_tol) {
        if (std::isfinite(upper[j])) {
          move[j] = -1;
          value[j] = upper[j];
          flipped = true;
        } else {
          cost[j] -= d;
          dual[j] = 0.0;
        }
      } else if (move[j] < 0 && d > opt.dual_tol) {
        if (std::isfinite(lower[j])) {
          move[j] = 1;
          value[j] = lower[j];
          flipped = true;
        } else {
          cost[j] -= d;
          dual[j] = 0.0;
        }
      }
    }
    return flipped;
  }

  void perturb_costs() {
    double cmax = 0.0;
    for (int j = 0; j < n; ++j) cmax = std::max(cmax, std::fabs(cost_orig[j]));
    double base = 5e-7 * std::max(1.0, std::min(cmax, 1e3));
    for (int j = 0; j < n; ++j) {
      if (is_fixed(j) || is_free(j)) continue;
      double eps = base * (1.0 + std::fabs(cost_orig[j]) * 1e-3) * (1.0 + hash01(opt.seed, std::uint64_t(j)));
      int dir;
      if (nonbasic[j])
        dir = move[j] > 0 ? 1 : -1;
      else
        dir = cost[j] >= 0 ? 1 : -1;
      cost[j] += dir * eps;
    }
  }

  // pivot row alpha_r over structural columns into rowap; logical part is rho itself
  void compute_pivot_row() {
    rowap.clear();
    std::vector<double>& a = rowap.array;
    if (rho.count < 0.1 * m) {
      for (int t = 0; t < rho.count; ++t) {
        int i = rho.index[t];
        double yi = rho.array[i];
        if (yi == 0.0) continue;
        for (int p = r_start[i]; p < r_start[i + 1]; ++p) {
          int j = r_index[p];
          if (a[j] == 0.0) rowap.index[rowap.count++] = j;
          double nv = a[j] + yi * r_value[p];
          a[j] = nv == 0.0 ? 1e-300 : nv;
        }
      }
    } else {
      for (int j = 0; j < n; ++j) {
        if (!nonbasic[j]) continue;
        double s = 0.0;
        for (int p = a_start[j]; p < a_start[j + 1]; ++p) s += rho.array[a_index[p]] * a_value[p];
        if (s != 0.0) rowap.set(j, s);
      }
    }
  }

  double alpha_of(int j) const { return j < n ? rowap.array[j] : rho.array[j - n]; }

  struct Cand {
    int j;
    double t, h, abs_a;
  };
  std::vector<Cand> cands;
  std::vector<int> flips;

  // returns entering column or -1 when the row proves infeasibility
  int dual_ratio_test(double delta) {
    cands.clear();
    flips.clear();
    const double s = delta < 0 ? -1.0 : 1.0;
    auto consider = [&](int j, double a) {
      if (!nonbasic[j] || is_fixed(j)) return;
      double at = s * a;
      if (std::fabs(at) < kPivotTol) return;
      int mv = move[j];
      double d = dual[j];
      if (mv > 0) {
        if (at <= 0) return;
      } else if (mv < 0) {
        if (at >= 0) return;
      }
      double dd = mv == 0 ? std::fabs(d) : std::max(0.0, mv * d);
      double aa = std::fabs(a);
      cands.push_back({j, dd / aa, (dd + opt.dual_tol) / aa, aa});
    };
    for (int t = 0; t < rowap.count; ++t) {
      int j = rowap.index[t];
      consider(j, rowap.array[j]);
    }
    for (int t = 0; t < rho.count; ++t) {
      int i = rho.index[t];
      consider(n + i, rho.array[i]);
    }
    if (cands.empty()) return -1;
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
      if (x.t != y.t) return x.t < y.t;
      return x.j < y.j;
    });
    const int K = int(cands.size());
    std::vector<double> sufmin(K + 1, kInf);
    for (int k = K - 1; k >= 0; --k) sufmin[k] = std::min(sufmin[k + 1], cands[k].h);
    double slope = std::fabs(delta);
    int pos = 0;
    while (pos < K) {
      double th = sufmin[pos];
      int end = pos;
      double total = 0.0;
      while (end < K && cands[end].t <= th) {
        const Cand& c = cands[end];
        double range = upper[c.j] - lower[c.j];
        total += std::isfinite(range) ? c.abs_a * range : kInf;
        ++end;
      }
      if (end == pos) end = pos + 1;
      if (std::isfinite(total) && slope - total > 0.0 && end < K) {
        for (int k = pos; k < end; ++k) flips.push_back(cands[k].j);
        slope -= total;
        pos = end;
        continue;
      }
      if (std::isfinite(total) && slope - total > opt.primal_tol && end == K) {
        // flipping everything still leaves the row infeasible
        return -1;
      }
      int best = pos;
      for (int k = pos + 1; k < end; ++k)
        if (cands[k].abs_a > cands[best].abs_a) best = k;
      return cands[best].j;
    }
    return -1;
  }

  int chuzr(const std::vector<char>& rejected) const {
    int best = -1;
    double bestv = 0.0;
    for (int r : inf_list) {
      if (rejected[r]) continue;
      double v = infeas[r] / dse[r];
      if (v > bestv || (v == bestv && r < best)) {
        bestv = v;
        best = r;
      }
    }
    return best;
  }

  void apply_flips() {
    if (flips.empty()) return;
    flipcol.clear();
    std::vector<double>& b = flipcol.array;
    for (int j : flips) {
      double from = value[j];
      double to;
      if (move[j] > 0) {
        to = upper[j];
        move[j] = -1;
      } else {
        to = lower[j];
        move[j] = 1;
      }
      value[j] = to;
      double dx = to - from;
      if (j < n) {
        for (int p = a_start[j]; p < a_start[j + 1]; ++p) {
          int i = a_index[p];
          if (b[i] == 0.0) flipcol.index[flipcol.count++] = i;
          double nv = b[i] + a_value[p] * dx;
          b[i] = nv == 0.0 ? 1e-300 : nv;
        }
      } else {
        int i = j - n;
        if (b[i] == 0.0) flipcol.index[flipcol.count++] = i;
        double nv = b[i] + dx;
        b[i] = nv == 0.0 ? 1e-300 : nv;
      }
    }
    flipcol.tidy();
    factor.ftran(flipcol);
    for (int t = 0; t < flipcol.count; ++t) {
      int r = flipcol.index[t];
      value[basic_index[r]] -= flipcol.array[r];
      update_infeas(r);
    }
  }

  Phase dual_phase() {
    std::vector<char> rejected(m, 0);
    std::vector<int> rejected_rows;
    int since_reinvert = 0;
    while (true) {
      if (iters >= opt.iteration_limit) throw Error(ErrorKind::NumericalFailure, "simplex iteration limit reached");
      if ((iters & 127) == 0 && std::chrono::steady_clock::now() > opt.deadline)
        throw Error(ErrorKind::BudgetExceeded, "simplex deadline reached");
      if (need_reinvert()) {
        reinvert();
        if (make_dual_feasible()) compute_primal();
        since_reinvert = 0;
      }
      int r = chuzr(rejected);
      if (r < 0) return Phase::Done;
      int p = basic_index[r];
      double x = value[p];
      double delta = x < lower[p] ? x - lower[p] : x - upper[p];

      rho.clear();
      rho.set(r, 1.0);
      factor.btran(rho);
      compute_pivot_row();
      int q = dual_ratio_test(delta);
      if (q < 0) {
        if (factor.updates() > 0 && since_reinvert > 0) {
          reinvert();
          if (make_dual_feasible()) compute_primal();
          since_reinvert = 0;
          continue;
        }
        return Phase::Infeasible;
      }
      double arq = alpha_of(q);
      load_column(q, col);
      factor.ftran(col);
      double arq_col = col.array[r];
      if (std::fabs(arq_col - arq) > 1e-7 * (1.0 + std::fabs(arq)) || std::fabs(arq_col) < kPivotTol) {
        if (factor.updates() > 0) {
          reinvert();
          if (make_dual_feasible()) compute_primal();
          since_reinvert = 0;
          continue;
        }
        rejected[r] = 1;
        rejected_rows.push_back(r);
        continue;
      }
      arq = arq_col;

      // dual steepest edge helper
      double wr = 0.0;
      for (int t = 0; t < rho.count; ++t) wr += rho.array[rho.index[t]] * rho.array[rho.index[t]];
      tau.clear();
      for (int t = 0; t < rho.count; ++t) tau.set(rho.index[t], rho.array[rho.index[t]]);
      factor.ftran(tau);

      // dual update
      double theta_d = dual[q] / arq;
      for (int t = 0; t < rowap.count; ++t) {
        int j = rowap.index[t];
        if (nonbasic[j]) dual[j] -= theta_d * rowap.array[j];
      }
      for (int t = 0; t < rho.count; ++t) {
        int i = rho.index[t];
        if (nonbasic[n + i]) dual[n + i] -= theta_d * rho.array[i];
      }
      dual[q] = 0.0;
      dual[p] = -theta_d;

      apply_flips();

      double bound = delta < 0 ? lower[p] : upper[p];
      double theta_p = (value[p] - bound) / arq;
      for (int t = 0; t < col.count; ++t) {
        int i = col.index[t];
        value[basic_index[i]] -= theta_p * col.array[i];
      }
      double enter_val = value[q] + theta_p;

      // steepest edge weights
      for (int t = 0; t < col.count; ++t) {
        int i = col.index[t];
        if (i == r) continue;
        double k = col.array[i] / arq;
        dse[i] = std::max(kMinWeight, dse[i] + k * (k * wr - 2.0 * tau.array[i]));
      }
      dse[r] = std::max(kMinWeight, wr / (arq * arq));

      // basis change
      basic_index[r] = q;
      nonbasic[q] = 0;
      move[q] = 0;
      value[q] = enter_val;
      nonbasic[p] = 1;
      value[p] = bound;
      if (is_fixed(p))
        move[p] = 0;
      else
        move[p] = delta < 0 ? 1 : -1;
      if (std::fabs(dual[p]) > 0 && ((move[p] > 0 && dual[p] < 0) || (move[p] < 0 && dual[p] > 0))) dual[p] = 0.0;
      for (int t = 0; t < col.count; ++t) update_infeas(col.index[t]);
      update_infeas(r);
      factor.update(col, r);
      for (int rr : rejected_rows) rejected[rr] = 0;
      rejected_rows.clear();
      ++iters;
      ++since_reinvert;
    }
  }

  // entering column for the primal simplex, Dantzig rule, ties to the lowest index
  int chuzc() const {
    int best = -1;
    double bestv = opt.dual_tol;
    for (int j = 0; j < N; ++j) {
      if (!nonbasic[j] || is_fixed(j)) continue;
      double d = dual[j];
      double v;
      if (move[j] > 0)
        v = -d;
      else if (move[j] < 0)
        v = d;
      else
        v = std::fabs(d);
      if (v > bestv) {
        bestv = v;
        best = j;
      }
    }
    return best;
  }

  bool need_reinvert() const {
    if (factor.updates() >= opt.refactor_interval) return true;
    return factor.updates() >= 10 && factor.eta_nonzeros() > 2 * factor.factor_nonzeros() + 4L * m;
  }

  Phase primal_phase() {
    while (true) {
      if (iters >= opt.iteration_limit) throw Error(ErrorKind::NumericalFailure, "simplex iteration limit reached");
      if ((iters & 127) == 0 && std::chrono::steady_clock::now() > opt.deadline)
        throw Error(ErrorKind::BudgetExceeded, "simplex deadline reached");
      if (need_reinvert()) reinvert();
      int q = chuzc();
      if (q < 0) return Phase::Done;
      double dir = dual[q] < 0 ? 1.0 : -1.0;
      load_column(q, col);
      factor.ftran(col);

      // Harris two-pass over the basic variables
      double tol = opt.primal_tol;
      double theta_max = kInf;
      for (int t = 0; t < col.count; ++t) {
        int i = col.index[t];
        double a = col.array[i];
        if (std::fabs(a) < kPivotTol) continue;
        double rate = -dir * a;
        int j = basic_index[i];
        double lim;
        if (rate < 0) {
          if (std::isinf(lower[j])) continue;
          lim = (value[j] - lower[j] + tol) / -rate;
        } else {
          if (std::isinf(upper[j])) continue;
          lim = (upper[j] - value[j] + tol) / rate;
        }
        theta_max = std::min(theta_max, lim);
      }
      double range = upper[q] - lower[q];
      int r = -1;
      double theta = kInf, best_a = 0.0;
      for (int t = 0; t < col.count; ++t) {
        int i = col.index[t];
        double a = col.array[i];
        if (std::fabs(a) < kPivotTol) continue;
        double rate = -dir * a;
        int j = basic_index[i];
        double lim;
        if (rate < 0) {
          if (std::isinf(lower[j])) continue;
          lim = (value[j] - lower[j]) / -rate;
        } else {
          if (std::isinf(upper[j])) continue;
          lim = (upper[j] - value[j]) / rate;
        }
        if (lim <= theta_max && std::fabs(a) > best_a) {
          best_a = std::fabs(a);
          r = i;
          theta = std::max(0.0, lim);
        }
      }
      if (r < 0 && std::isinf(range)) return Phase::Unbounded;
      if (r < 0 || range <= theta) {
        // bound flip of the entering column
        double dx = dir * range;
        for (int t = 0; t < col.count; ++t) {
          int i = col.index[t];
          value[basic_index[i]] -= dx * col.array[i];
          update_infeas(i);
        }
        if (move[q] > 0) {
          move[q] = -1;
          value[q] = upper[q];
        } else {
          move[q] = 1;
          value[q] = lower[q];
        }
        ++iters;
        continue;
      }
      int p = basic_index[r];
      double arq = col.array[r];
      rho.clear();
      rho.set(r, 1.0);
      factor.btran(rho);
      compute_pivot_row();
      double theta_d = dual[q] / arq;
      for (int t = 0; t < rowap.count; ++t) {
        int j = rowap.index[t];
        if (nonbasic[j]) dual[j] -= theta_d * rowap.array[j];
      }
      for (int t = 0; t < rho.count; ++t) {
        int i = rho.index[t];
        if (nonbasic[n + i]) dual[n + i] -= theta_d * rho.array[i];
      }
      dual[q] = 0.0;
      dual[p] = -theta_d;

      double rate = -dir * arq;
      double bound = rate < 0 ? lower[p] : upper[p];
      for (int t = 0; t < col.count; ++t) {
        int i = col.index[t];
        value[basic_index[i]] -= dir * theta * col.array[i];
      }
      double enter_val = value[q] + dir * theta;
      basic_index[r] = q;
      nonbasic[q] = 0;
      move[q] = 0;
      value[q] = enter_val;
      nonbasic[p] = 1;
      value[p] = bound;
      move[p] = is_fixed(p) ? 0 : (rate < 0 ? 1 : -1);
      for (int t = 0; t < col.count; ++t) update_infeas(col.index[t]);
      weights_exact = false;
      dse[r] = 1.0;
      factor.update(col, r);
      ++iters;
    }
  }

  double max_primal_infeas() const {
    double w = 0.0;
    for (int r = 0; r < m; ++r) {
      int j = basic_index[r];
      w = std::max(w, std::max(lower[j] - value[j], value[j] - upper[j]));
    }
    return w;
  }

  double max_dual_infeas() const {
    double w = 0.0;
    for (int j = 0; j < N; ++j) {
      if (!nonbasic[j] || is_fixed(j)) continue;
      double d = dual[j];
      if (move[j] > 0)
        w = std::max(w, -d);
      else if (move[j] < 0)
        w = std::max(w, d);
      else
        w = std::max(w, std::fabs(d));
    }
    return w;
  }

  LpStatus run() {
    if (!have_basis) slack_basis();
    // place nonbasic columns on their current bounds
    for (int j = 0; j < N; ++j)
      if (nonbasic[j]) set_nonbasic_at(j, move[j] >= 0 ? 1 : -1);
    cost = cost_orig;
    reinvert();
    make_dual_feasible();
    if (opt.perturb) {
      perturb_costs();
      compute_dual();
      make_dual_feasible();
    }
    compute_primal();

    for (int round = 0; round < 8; ++round) {
      Phase ph = dual_phase();
      if (ph == Phase::Infeasible) {
        status = LpStatus::Infeasible;
        cost = cost_orig;
        return status;
      }
      // drop perturbations and shifts, clean up with the primal simplex
      cost = cost_orig;
      reinvert();
      if (max_primal_infeas() > opt.primal_tol * 10) {
        make_dual_feasible();
        compute_primal();
        continue;
      }
      ph = primal_phase();
      if (ph == Phase::Unbounded) {
        status = LpStatus::Unbounded;
        return status;
      }
      reinvert();
      double pinf = max_primal_infeas();
      double dinf = max_dual_infeas();
      if (pinf <= opt.primal_tol * 10 && dinf <= opt.dual_tol * 10) {
        status = LpStatus::Optimal;
        return status;
      }
      if (dinf > opt.dual_tol * 10) {
        // primal cleanup left dual infeasibilities after refactoring; loop again
        make_dual_feasible();
        compute_primal();
      }
    }
    throw Error(ErrorKind::NumericalFailure, "simplex could not certify a status");
  }

  double objective() const {
    double s = offset;
    for (int j = 0; j < n; ++j) s += cost_orig[j] * value[j];
    return s;
  }
};

}  // namespace lp

SimplexSolver::SimplexSolver(const LinearProgram& lp, SimplexOptions opt) : e_(std::make_unique<lp::Engine>(lp, opt)) {}
SimplexSolver::~SimplexSolver() = default;

LpStatus SimplexSolver::solve() { return e_->run(); }
int SimplexSolver::num_vars() const { return e_->n; }
int SimplexSolver::num_rows() const { return e_->m; }

void SimplexSolver::set_col_bounds(int j, double lb, double ub) {
  if (!(lb <= ub)) throw Error(ErrorKind::InvalidArgument, "inconsistent column bounds");
  e_->lower[j] = lb;
  e_->upper[j] = ub;
}

double SimplexSolver::col_lower(int j) const { return e_->lower[j]; }
double SimplexSolver::col_upper(int j) const { return e_->upper[j]; }
double SimplexSolver::objective() const { return e_->objective(); }
std::vector<double> SimplexSolver::primal() const { return {e_->value.begin(), e_->value.begin() + e_->n}; }
double SimplexSolver::value(int j) const { return e_->value[j]; }
std::vector<double> SimplexSolver::row_duals() const { return e_->row_prices(); }
long SimplexSolver::iterations() const { return e_->iters; }

LpSolution SimplexSolver::solution() const {
  LpSolution s;
  s.status = e_->status;
  s.iterations = e_->iters;
  if (s.status == LpStatus::Optimal) {
    s.x = primal();
    s.objective = objective();
    s.duals = row_duals();
  }
  return s;
}

SimplexSolver::Basis SimplexSolver::basis() const {
  Basis b(e_->N);
  for (int j = 0; j < e_->N; ++j) {
    if (!e_->nonbasic[j])
      b[j] = VarState::Basic;
    else if (e_->move[j] > 0)
      b[j] = VarState::AtLower;
    else if (e_->move[j] < 0)
      b[j] = VarState::AtUpper;
    else
      b[j] = e_->is_fixed(j) ? VarState::AtLower : VarState::AtZero;
  }
  return b;
}

void SimplexSolver::set_basis(const Basis& b) {
  auto& e = *e_;
  if (int(b.size()) != e.N) throw Error(ErrorKind::InvalidArgument, "basis size mismatch");
  int nb = 0;
  for (auto s : b) nb += s == VarState::Basic;
  if (nb != e.m) {
    e.have_basis = false;
    return;
  }
  int r = 0;
  for (int j = 0; j < e.N; ++j) {
    if (b[j] == VarState::Basic) {
      e.basic_index[r++] = j;
      e.nonbasic[j] = 0;
      e.move[j] = 0;
    } else {
      e.set_nonbasic_at(j, b[j] == VarState::AtUpper ? -1 : 1);
    }
  }
  e.dse.assign(e.m, 1.0);
  e.weights_exact = false;
  e.have_basis = true;
}

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt) {
  SimplexSolver s(lp, opt);
  s.solve();
  return s.solution();
}

}  // namespace psh
