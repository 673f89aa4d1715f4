#include "psh/oracle.hpp"

#include <cmath>

#include "psh/lp.hpp"

namespace psh {

bool sequence_admissible(const Instance& in, const std::vector<Mode>& x) {
  const int T = in.T;
  if (int(x.size()) != T) return false;
  for (int t = 1; t <= T; ++t) {
    if (x[t - 1] == Mode::SC && !in.hsc) return false;
    if (t <= in.tau_init && is_online(x[t - 1])) return false;
  }
  for (int t = 1; t <= T;) {
    int e = t;
    while (e < T && x[e] == x[t - 1]) ++e;
    if (is_online(x[t - 1]) && e - t + 1 > in.j_max) return false;
    t = e + 1;
  }
  for (int t = 1; t <= T;) {
    bool on = is_online(x[t - 1]);
    int e = t;
    while (e < T && is_online(x[e]) == on) ++e;
    if (e < T) {
      if (on && e - t + 1 < in.min_up) return false;
      if (!on && t > 1 && e - t + 1 < in.min_down) return false;
    }
    t = e + 1;
  }
  return true;
}

double sequence_cost(const Instance& in, const std::vector<Mode>& x, bool strict, Schedule* out) {
  const int T = in.T;
  LinearProgram lp;
  std::vector<int> ho(T, -1), hi(T, -1), lev(T + 1, -1);
  double konst = 0.0;
  for (int t = 1; t <= T; ++t) {
    int i = t - 1;
    Mode prev = t > 1 ? x[i - 1] : Mode::O;
    if (is_online(x[i]) && !is_online(prev)) konst += in.startup[i];
    if (!is_online(x[i]) && is_online(prev)) konst += in.shutdown[i];
    double lam = in.price[i];
    if (generates(x[i])) ho[i] = lp.add_var(in.gen_lo[i], in.gen_hi[i], in.water_value * in.mu[i] - lam);
    if (pumps(x[i])) hi[i] = lp.add_var(in.pump_lo[i], in.pump_hi[i], lam - in.water_value * in.alpha[i]);
    if (generates(x[i])) {
      int phi = lp.add_var(-kInf, kInf, 1);
      for (auto& p : in.gen_pieces[i]) lp.add_row({{phi, 1}, {ho[i], -p.a}}, Relation::GE, p.b);
    }
    if (pumps(x[i])) {
      int phi = lp.add_var(-kInf, kInf, 1);
      for (auto& p : in.pump_pieces[i]) lp.add_row({{phi, 1}, {hi[i], -p.a}}, Relation::GE, p.b);
    }
  }
  for (int t = 2; t <= T + 1; ++t) {
    double lo = 0.0, hi_ = in.capacity;
    if (t == T + 1 && in.m_term) lo = hi_ = *in.m_term;
    lev[t - 1] = lp.add_var(lo, hi_, 0);
  }
  for (int t = 1; t <= T; ++t) {
    int i = t - 1;
    // M_{t+1} - M_t + mu H_out - alpha H_in = inflow - spill
    std::vector<std::pair<int, double>> r{{lev[i + 1], 1}};
    double rhs = in.inflow[i] - in.spill[i];
    if (t == 1)
      rhs += in.m_init;
    else
      r.push_back({lev[i], -1});
    if (ho[i] >= 0) r.push_back({ho[i], in.mu[i]});
    if (hi[i] >= 0) r.push_back({hi[i], -in.alpha[i]});
    lp.add_row(r, Relation::EQ, rhs);

    bool g = generates(x[i]), gp = t > 1 && generates(x[i - 1]);
    if (g && gp) {
      lp.add_row({{ho[i], 1}, {ho[i - 1], -1}}, Relation::LE, in.ramp);
      lp.add_row({{ho[i - 1], 1}, {ho[i], -1}}, Relation::LE, in.ramp);
    } else if (g) {
      lp.add_row({{ho[i], 1}}, Relation::LE, in.ramp);
    } else if (gp && !strict) {
      lp.add_row({{ho[i - 1], 1}}, Relation::LE, in.ramp);
    }
  }
  if (in.terminal_offline && !strict && generates(x[T - 1])) lp.add_row({{ho[T - 1], 1}}, Relation::LE, in.ramp);

  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Unbounded) throw Error(ErrorKind::NumericalFailure, "sequence LP is unbounded");
  if (sol.status != LpStatus::Optimal) return kInf;
  if (out) {
    Schedule s = empty_schedule(T);
    s.mode = x;
    s.level[0] = in.m_init;
    for (int i = 0; i < T; ++i) {
      s.h_out[i] = ho[i] >= 0 ? sol.x[ho[i]] : 0.0;
      s.h_in[i] = hi[i] >= 0 ? sol.x[hi[i]] : 0.0;
      s.level[i + 1] = sol.x[lev[i + 1]];
    }
    AuditOptions ao;
    ao.shutdown_cap = !strict;
    complete_schedule(s, in, ao);
    *out = std::move(s);
  }
  return sol.objective + konst;
}

std::vector<SequenceValue> enumerate_sequences(const Instance& in, const OracleLimits& lim) {
  if (in.T > lim.T_max)
    throw Error(ErrorKind::LimitsExceeded, "horizon " + std::to_string(in.T) + " exceeds " + std::to_string(lim.T_max));
  std::vector<Mode> modes{Mode::G, Mode::P};
  if (in.hsc) modes.push_back(Mode::SC);
  modes.push_back(Mode::O);
  const int T = in.T, k = int(modes.size());
  std::vector<SequenceValue> table;
  std::vector<int> digit(T, 0);
  std::vector<Mode> x(T);
  while (true) {
    for (int i = 0; i < T; ++i) x[i] = modes[digit[i]];
    if (sequence_admissible(in, x)) {
      if (long(table.size()) >= lim.seq_max)
        throw Error(ErrorKind::LimitsExceeded, "more than " + std::to_string(lim.seq_max) + " sequences");
      table.push_back({x, 0.0});
    }
    int p = T - 1;
    while (p >= 0 && ++digit[p] == k) digit[p--] = 0;
    if (p < 0) break;
  }
  for (auto& sv : table) sv.value = sequence_cost(in, sv.modes, lim.strict);
  return table;
}

double best_completion(const std::vector<SequenceValue>& table, const std::vector<Mode>& prefix) {
  double best = kInf;
  for (auto& sv : table) {
    if (sv.modes.size() < prefix.size()) continue;
    bool match = true;
    for (size_t i = 0; i < prefix.size() && match; ++i) match = sv.modes[i] == prefix[i];
    if (match) best = std::min(best, sv.value);
  }
  return best;
}

OracleResult brute_force_oracle(const Instance& in, const OracleLimits& lim) {
  std::vector<SequenceValue> table = enumerate_sequences(in, lim);
  OracleResult r;
  r.sequences = long(table.size());
  int best = -1;
  for (int k = 0; k < int(table.size()); ++k) {
    if (std::isinf(table[k].value)) continue;
    ++r.feasible;
    if (best < 0 || table[k].value < table[best].value - 1e-9) best = k;
  }
  if (best < 0) throw Error(ErrorKind::Infeasible, "no admissible sequence has a feasible dispatch");
  r.modes = table[best].modes;
  r.value = sequence_cost(in, r.modes, lim.strict, &r.schedule);
  return r;
}

}  // namespace psh
