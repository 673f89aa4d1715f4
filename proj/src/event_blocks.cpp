#include "psh/event_blocks.hpp"

#include <cmath>

namespace psh {

namespace {

using Terms = std::vector<std::pair<int, double>>;

struct Writer {
  LinearProgram& lp;
  int scale;

  // adds row terms + konst*(scale or 1) rel rhs
  void row(Terms terms, double konst, Relation rel, double rhs = 0.0) {
    if (scale >= 0) {
      if (konst != 0.0) terms.push_back({scale, konst});
    } else {
      rhs -= konst;
    }
    lp.add_row(std::move(terms), rel, rhs);
  }
  // ref as a term with coefficient c: appends a column or returns the constant part
  double put(const Ref& r, double c, Terms& terms) {
    if (r.var >= 0) {
      terms.push_back({r.var, c});
      return 0.0;
    }
    return c * r.value;
  }
};

}  // namespace

TrajectoryVars append_trajectory(LinearProgram& lp, const Instance& in, const TrajectorySpec& sp, int scale) {
  Writer w{lp, scale};
  const int n = int(sp.modes.size());
  const bool scaled = scale >= 0;
  TrajectoryVars v;
  v.h_out.assign(n, -1);
  v.h_in.assign(n, -1);
  v.phi_g.assign(n, -1);
  v.phi_p.assign(n, -1);
  v.level.assign(n, -1);

  for (int k = 0; k < n; ++k) {
    const int t = sp.t0 + k, i = t - 1;
    Mode x = sp.modes[k];
    if (generates(x)) {
      if (scaled) {
        v.h_out[k] = lp.add_var(0, kInf, 0);
        if (in.gen_lo[i] > 0) w.row({{v.h_out[k], 1}}, -in.gen_lo[i], Relation::GE);
        w.row({{v.h_out[k], 1}}, -in.gen_hi[i], Relation::LE);
      } else {
        v.h_out[k] = lp.add_var(in.gen_lo[i], in.gen_hi[i], 0);
      }
      v.phi_g[k] = lp.add_var(scaled && sp.free_phi ? -kInf : gen_cost_floor(in, t), kInf, 1);
    }
    if (pumps(x)) {
      if (scaled) {
        v.h_in[k] = lp.add_var(0, kInf, 0);
        if (in.pump_lo[i] > 0) w.row({{v.h_in[k], 1}}, -in.pump_lo[i], Relation::GE);
        w.row({{v.h_in[k], 1}}, -in.pump_hi[i], Relation::LE);
      } else {
        v.h_in[k] = lp.add_var(in.pump_lo[i], in.pump_hi[i], 0);
      }
      v.phi_p[k] = lp.add_var(scaled && sp.free_phi ? -kInf : pump_cost_floor(in, t), kInf, 1);
    }
    v.level[k] = lp.add_var(0, scaled ? kInf : in.capacity, 0);
    if (scaled) w.row({{v.level[k], 1}}, -in.capacity, Relation::LE);
  }

  for (int k = 0; k < n; ++k) {
    const int t = sp.t0 + k, i = t - 1;
    Mode x = sp.modes[k];
    // mass balance M_{t+1} = M_t - mu H_out + alpha H_in + inflow - spill
    Terms mb{{v.level[k], 1}};
    double konst = 0.0;
    if (k == 0)
      konst += w.put(sp.m_start, -1, mb);
    else
      mb.push_back({v.level[k - 1], -1});
    if (v.h_out[k] >= 0) mb.push_back({v.h_out[k], in.mu[i]});
    if (v.h_in[k] >= 0) mb.push_back({v.h_in[k], -in.alpha[i]});
    konst -= in.inflow[i] - in.spill[i];
    w.row(mb, konst, Relation::EQ);

    if (generates(x)) {
      // ramping against the previous stage (or the incoming boundary)
      Terms up{{v.h_out[k], 1}}, down{{v.h_out[k], -1}};
      double cu = -in.ramp, cd = -in.ramp;
      bool prev_gen = k == 0 || generates(sp.modes[k - 1]);
      if (k == 0) {
        cu += w.put(sp.h_start, -1, up);
        cd += w.put(sp.h_start, 1, down);
      } else if (prev_gen) {
        up.push_back({v.h_out[k - 1], -1});
        down.push_back({v.h_out[k - 1], 1});
      }
      w.row(up, cu, Relation::LE);
      if (prev_gen) w.row(down, cd, Relation::LE);

      double sg = in.water_value * in.mu[i] - in.price[i];
      for (auto& p : in.gen_pieces[i]) w.row({{v.phi_g[k], 1}, {v.h_out[k], -(p.a + sg)}}, -p.b, Relation::GE);
    }
    if (pumps(x)) {
      double sp_ = in.price[i] - in.water_value * in.alpha[i];
      for (auto& p : in.pump_pieces[i]) w.row({{v.phi_p[k], 1}, {v.h_in[k], -(p.a + sp_)}}, -p.b, Relation::GE);
    }
    // generation stops after this stage inside the trajectory
    if (generates(x) && k + 1 < n && !generates(sp.modes[k + 1]) && !sp.strict)
      w.row({{v.h_out[k], 1}}, -in.ramp, Relation::LE);
  }

  if (sp.m_end) {
    Terms r{{v.level[n - 1], 1}};
    double c = w.put(*sp.m_end, -1, r);
    w.row(r, c, Relation::EQ);
  }
  if (n > 0 && generates(sp.modes[n - 1])) {
    int h = v.h_out[n - 1];
    if (sp.exit == ExitRule::Pin) {
      Terms r{{h, 1}};
      double c = w.put(sp.h_end, -1, r);
      w.row(r, c, Relation::EQ);
    } else if (sp.exit == ExitRule::Cap) {
      w.row({{h, 1}}, -in.ramp, Relation::LE);
    }
  }
  return v;
}

std::optional<double> offline_drift(const Instance& in, int t, int j, double m, double tol) {
  for (int s = t; s < j; ++s) {
    m += in.inflow[s - 1] - in.spill[s - 1];
    if (m < -tol || m > in.capacity + tol) return std::nullopt;
  }
  return m;
}

namespace {

BlockResult solve_online(const BlockBoundary& b, const Instance& in) {
  BlockResult res;
  if (b.j <= b.t) throw Error(ErrorKind::InvalidArgument, "block must cover at least one stage");
  if (b.t < 1 || b.j > in.T + 1) throw Error(ErrorKind::InvalidArgument, "block outside the horizon");
  LinearProgram lp;
  TrajectorySpec sp;
  sp.t0 = b.t;
  sp.modes.assign(b.j - b.t, b.mode);
  sp.m_start = Ref::constant(b.m_start);
  sp.h_start = Ref::constant(generates(b.mode) ? b.h_start : 0.0);
  if (b.m_end) sp.m_end = Ref::constant(*b.m_end);
  sp.exit = b.exit;
  sp.h_end = Ref::constant(b.h_end);
  TrajectoryVars v = append_trajectory(lp, in, sp);
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) return res;
  res.feasible = true;
  res.cost = sol.objective;
  const int n = b.j - b.t;
  res.level.push_back(b.m_start);
  for (int k = 0; k < n; ++k) {
    res.h_out.push_back(v.h_out[k] >= 0 ? sol.x[v.h_out[k]] : 0.0);
    res.h_in.push_back(v.h_in[k] >= 0 ? sol.x[v.h_in[k]] : 0.0);
    res.level.push_back(sol.x[v.level[k]]);
    double phi = 0.0;
    if (v.phi_g[k] >= 0) phi += sol.x[v.phi_g[k]];
    if (v.phi_p[k] >= 0) phi += sol.x[v.phi_p[k]];
    res.phi.push_back(phi);
  }
  return res;
}

}  // namespace

BlockResult solve_generating_block(const BlockBoundary& b, const Instance& in) {
  if (b.mode != Mode::G) throw Error(ErrorKind::InvalidArgument, "generating block needs mode G");
  return solve_online(b, in);
}

BlockResult solve_pumping_block(const BlockBoundary& b, const Instance& in) {
  if (b.mode != Mode::P) throw Error(ErrorKind::InvalidArgument, "pumping block needs mode P");
  if (b.h_end != 0.0) throw Error(ErrorKind::BoundaryContract, "pumping block must end with ramp boundary 0");
  return solve_online(b, in);
}

BlockResult solve_hsc_block(const BlockBoundary& b, const Instance& in) {
  if (!in.hsc) throw Error(ErrorKind::ModeDisabled, "short-circuit mode is not enabled");
  if (b.mode != Mode::SC) throw Error(ErrorKind::InvalidArgument, "short-circuit block needs mode SC");
  return solve_online(b, in);
}

BlockResult solve_offline_block(const BlockBoundary& b, const Instance& in) {
  if (b.mode != Mode::O) throw Error(ErrorKind::InvalidArgument, "offline block needs mode O");
  if (b.h_end != 0.0) throw Error(ErrorKind::BoundaryContract, "offline block must end with ramp boundary 0");
  BlockResult res;
  double m = b.m_start;
  res.level.push_back(m);
  for (int s = b.t; s < b.j; ++s) {
    m += in.inflow[s - 1] - in.spill[s - 1];
    if (m < -kFeasTol || m > in.capacity + kFeasTol) return res;
    res.level.push_back(m);
    res.h_out.push_back(0.0);
    res.h_in.push_back(0.0);
    res.phi.push_back(0.0);
  }
  if (b.m_end && std::fabs(*b.m_end - m) > kFeasTol) return res;
  res.feasible = true;
  return res;
}

BlockResult solve_block(const BlockBoundary& b, const Instance& in) {
  switch (b.mode) {
    case Mode::G: return solve_generating_block(b, in);
    case Mode::P: return solve_pumping_block(b, in);
    case Mode::SC: return solve_hsc_block(b, in);
    case Mode::O: return solve_offline_block(b, in);
  }
  return {};
}

bool block_may_be_feasible(const BlockBoundary& b, const Instance& in) {
  if (b.mode == Mode::O) {
    auto m = offline_drift(in, b.t, b.j, b.m_start, kFeasTol);
    return m && (!b.m_end || std::fabs(*b.m_end - *m) <= kFeasTol);
  }
  const int n = b.j - b.t;
  const double V = in.ramp;
  double lo_sum = 0.0, hi_sum = 0.0;  // net water change excluding drift
  for (int k = 0; k < n; ++k) {
    const int i = b.t + k - 1;
    double drift = in.inflow[i] - in.spill[i];
    double lo = drift, hi = drift;
    if (generates(b.mode)) {
      double hmin = in.gen_lo[i], hmax = in.gen_hi[i];
      hmax = std::min(hmax, b.h_start + V * (k + 1));
      hmin = std::max(hmin, b.h_start - V * (k + 1));
      int to_end = n - 1 - k;
      if (b.exit == ExitRule::Pin) {
        hmax = std::min(hmax, b.h_end + V * to_end);
        hmin = std::max(hmin, b.h_end - V * to_end);
      } else if (b.exit == ExitRule::Cap) {
        hmax = std::min(hmax, V * (to_end + 1));
      }
      if (hmin > hmax + kFeasTol) return false;
      lo -= in.mu[i] * hmax;
      hi -= in.mu[i] * hmin;
    }
    if (pumps(b.mode)) {
      lo += in.alpha[i] * in.pump_lo[i];
      hi += in.alpha[i] * in.pump_hi[i];
    }
    lo_sum += lo;
    hi_sum += hi;
  }
  if (!b.m_end) return true;
  double dm = *b.m_end - b.m_start;
  return dm >= lo_sum - kFeasTol && dm <= hi_sum + kFeasTol;
}

}  // namespace psh
