#include "psh/time_indexed.hpp"

#include <cmath>
#include <string>

namespace psh {

namespace {
std::string nm(const char* base, int t) { return std::string(base) + "_" + std::to_string(t); }
}  // namespace

TimeIndexedModel build_time_indexed(const Instance& in, bool strict) {
  require_valid(in);
  const int T = in.T;
  TimeIndexedModel md;
  md.strict = strict;
  LinearProgram& lp = md.lp;

  for (int t = 1; t <= T; ++t) {
    const int i = t - 1;
    bool locked = t <= in.tau_init;
    double ub = locked ? 0.0 : 1.0;
    md.yg.push_back(lp.add_var(0, ub, 0, true, nm("yG", t)));
    md.yp.push_back(lp.add_var(0, ub, 0, true, nm("yP", t)));
    if (in.hsc) md.ysc.push_back(lp.add_var(0, ub, 0, true, nm("ySC", t)));
    md.y.push_back(lp.add_var(0, ub, 0, true, nm("y", t)));
    md.u.push_back(lp.add_var(0, 1, in.startup[i], true, nm("u", t)));
    md.d.push_back(lp.add_var(0, 1, in.shutdown[i], true, nm("d", t)));
    md.h_out.push_back(lp.add_var(0, in.gen_hi[i], 0, false, nm("HO", t)));
    md.h_in.push_back(lp.add_var(0, in.pump_hi[i], 0, false, nm("HI", t)));
    md.phi_g.push_back(lp.add_var(gen_cost_floor(in, t), kInf, 1, false, nm("phiG", t)));
    md.phi_p.push_back(lp.add_var(pump_cost_floor(in, t), kInf, 1, false, nm("phiP", t)));
  }
  for (int t = 1; t <= T + 1; ++t) {
    double lo = 0.0, hi = in.capacity;
    if (t == 1) lo = hi = in.m_init;
    if (t == T + 1 && in.m_term) lo = hi = *in.m_term;
    md.level.push_back(lp.add_var(lo, hi, 0, false, nm("M", t)));
  }

  auto gen_terms = [&](int i, double c, std::vector<std::pair<int, double>>& row) {
    row.push_back({md.yg[i], c});
    if (in.hsc) row.push_back({md.ysc[i], c});
  };
  auto pump_terms = [&](int i, double c, std::vector<std::pair<int, double>>& row) {
    row.push_back({md.yp[i], c});
    if (in.hsc) row.push_back({md.ysc[i], c});
  };

  for (int t = 1; t <= T; ++t) {
    const int i = t - 1;
    {
      std::vector<std::pair<int, double>> r{{md.yg[i], 1}, {md.yp[i], 1}, {md.y[i], -1}};
      if (in.hsc) r.push_back({md.ysc[i], 1});
      lp.add_row(r, Relation::EQ, 0, nm("mode", t));
    }
    {
      std::vector<std::pair<int, double>> r{{md.u[i], 1}, {md.d[i], -1}, {md.y[i], -1}};
      if (t > 1) r.push_back({md.y[i - 1], 1});
      lp.add_row(r, Relation::EQ, 0, nm("switch", t));
    }
    {
      std::vector<std::pair<int, double>> r{{md.y[i], -1}};
      for (int k = std::max(1, t - in.min_up + 1); k <= t; ++k) r.push_back({md.u[k - 1], 1});
      lp.add_row(r, Relation::LE, 0, nm("min_up", t));
    }
    {
      std::vector<std::pair<int, double>> r{{md.y[i], 1}};
      for (int k = std::max(1, t - in.min_down + 1); k <= t; ++k) r.push_back({md.d[k - 1], 1});
      lp.add_row(r, Relation::LE, 1, nm("min_down", t));
    }
    // output bounds gated by the commitment of the matching modes
    {
      std::vector<std::pair<int, double>> lo{{md.h_out[i], 1}}, hi{{md.h_out[i], 1}};
      gen_terms(i, -in.gen_lo[i], lo);
      gen_terms(i, -in.gen_hi[i], hi);
      lp.add_row(lo, Relation::GE, 0, nm("gen_lo", t));
      lp.add_row(hi, Relation::LE, 0, nm("gen_hi", t));
    }
    {
      std::vector<std::pair<int, double>> lo{{md.h_in[i], 1}}, hi{{md.h_in[i], 1}};
      pump_terms(i, -in.pump_lo[i], lo);
      pump_terms(i, -in.pump_hi[i], hi);
      lp.add_row(lo, Relation::GE, 0, nm("pump_lo", t));
      lp.add_row(hi, Relation::LE, 0, nm("pump_hi", t));
    }
    {
      std::vector<std::pair<int, double>> r{{md.h_out[i], 1}};
      if (t > 1) r.push_back({md.h_out[i - 1], -1});
      lp.add_row(r, Relation::LE, in.ramp, nm("ramp_up", t));
    }
    if (t > 1) {
      std::vector<std::pair<int, double>> r{{md.h_out[i - 1], 1}, {md.h_out[i], -1}};
      double rhs = in.ramp;
      if (strict) {
        double big = in.gen_hi[i - 1];
        gen_terms(i, big, r);
        rhs += big;
      }
      lp.add_row(r, Relation::LE, rhs, nm("ramp_down", t));
    }
    lp.add_row({{md.level[i + 1], 1}, {md.level[i], -1}, {md.h_out[i], in.mu[i]}, {md.h_in[i], -in.alpha[i]}},
               Relation::EQ, in.inflow[i] - in.spill[i], nm("mass", t));

    double sg = in.water_value * in.mu[i] - in.price[i];
    for (size_t k = 0; k < in.gen_pieces[i].size(); ++k) {
      const CostPiece& p = in.gen_pieces[i][k];
      std::vector<std::pair<int, double>> r{{md.phi_g[i], 1}, {md.h_out[i], -(p.a + sg)}};
      gen_terms(i, -p.b, r);
      lp.add_row(r, Relation::GE, 0, nm("epi_gen", t) + "_" + std::to_string(k + 1));
    }
    double sp = in.price[i] - in.water_value * in.alpha[i];
    for (size_t k = 0; k < in.pump_pieces[i].size(); ++k) {
      const CostPiece& p = in.pump_pieces[i][k];
      std::vector<std::pair<int, double>> r{{md.phi_p[i], 1}, {md.h_in[i], -(p.a + sp)}};
      pump_terms(i, -p.b, r);
      lp.add_row(r, Relation::GE, 0, nm("epi_pump", t) + "_" + std::to_string(k + 1));
    }
  }
  if (in.terminal_offline && !strict) lp.add_row({{md.h_out[T - 1], 1}}, Relation::LE, in.ramp, nm("ramp_down", T + 1));

  // no online mode may run longer than j_max consecutive stages
  if (in.j_max < T) {
    std::vector<const std::vector<int>*> fams{&md.yg, &md.yp};
    if (in.hsc) fams.push_back(&md.ysc);
    const char* names[] = {"jmax_G", "jmax_P", "jmax_SC"};
    for (size_t f = 0; f < fams.size(); ++f)
      for (int t = 1; t + in.j_max <= T; ++t) {
        std::vector<std::pair<int, double>> r;
        for (int k = t; k <= t + in.j_max; ++k) r.push_back({(*fams[f])[k - 1], 1});
        lp.add_row(r, Relation::LE, in.j_max, nm(names[f], t));
      }
  }
  return md;
}

Schedule extract_schedule(const LpSolution& sol, const TimeIndexedModel& md, const Instance& in) {
  if (sol.status != LpStatus::Optimal || int(sol.x.size()) != md.lp.num_vars())
    throw Error(ErrorKind::InvalidArgument, "solution does not belong to this model");
  for (int j = 0; j < md.lp.num_vars(); ++j) {
    if (!md.lp.vars[j].binary) continue;
    double v = sol.x[j];
    if (std::fabs(v - std::round(v)) > kIntTol)
      throw Error(ErrorKind::FractionalBinaries, md.lp.var_name(j) + " = " + std::to_string(v));
  }
  const int T = in.T;
  Schedule s = empty_schedule(T);
  auto on = [&](int j) { return sol.x[j] > 0.5; };
  for (int t = 1; t <= T; ++t) {
    int i = t - 1;
    Mode x = Mode::O;
    if (on(md.yg[i]))
      x = Mode::G;
    else if (on(md.yp[i]))
      x = Mode::P;
    else if (in.hsc && on(md.ysc[i]))
      x = Mode::SC;
    s.mode[i] = x;
    s.h_out[i] = generates(x) ? sol.x[md.h_out[i]] : 0.0;
    s.h_in[i] = pumps(x) ? sol.x[md.h_in[i]] : 0.0;
  }
  for (int t = 1; t <= T + 1; ++t) s.level[t - 1] = sol.x[md.level[t - 1]];
  AuditOptions ao;
  ao.shutdown_cap = !md.strict;
  complete_schedule(s, in, ao);
  if (std::fabs(s.cost - sol.objective) > 1e-6 * std::max(1.0, std::fabs(sol.objective)))
    throw Error(ErrorKind::NumericalFailure, "audited cost " + std::to_string(s.cost) + " differs from objective " +
                                                 std::to_string(sol.objective));
  return s;
}

MilpResult solve_time_indexed(const Instance& inst, bool strict, const MipOptions& opt) {
  TimeIndexedModel md = build_time_indexed(inst, strict);
  MipResult r = solve_binary_mip(md.lp, opt);
  MilpResult out;
  out.status = r.status;
  out.nodes = r.nodes;
  out.seconds = r.seconds;
  out.bound = r.bound;
  out.gap = r.gap;
  if (r.has_solution()) {
    out.objective = r.solution.objective;
    out.schedule = extract_schedule(r.solution, md, inst);
    out.has_schedule = true;
  }
  return out;
}

}  // namespace psh
