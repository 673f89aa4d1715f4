#include "psh/schedule.hpp"

#include "psh/lp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace psh {

int Schedule::switches() const {
  int n = 0;
  Mode prev = Mode::O;
  for (Mode m : mode) {
    if (m != prev) ++n;
    prev = m;
  }
  return n;
}

bool Schedule::same_dispatch(const Schedule& o, double tol) const {
  if (mode != o.mode) return false;
  for (size_t i = 0; i < h_out.size(); ++i)
    if (std::fabs(h_out[i] - o.h_out[i]) > tol || std::fabs(h_in[i] - o.h_in[i]) > tol) return false;
  for (size_t i = 0; i < level.size(); ++i)
    if (std::fabs(level[i] - o.level[i]) > tol) return false;
  return true;
}

Schedule empty_schedule(int T) {
  Schedule s;
  s.mode.assign(T, Mode::O);
  s.h_out.assign(T, 0.0);
  s.h_in.assign(T, 0.0);
  s.level.assign(T + 1, 0.0);
  s.u.assign(T, 0);
  s.d.assign(T, 0);
  s.stage_cost.assign(T, 0.0);
  return s;
}

namespace {

[[noreturn]] void fail(const std::string& what, int t) {
  throw Error(ErrorKind::InfeasibleSchedule, what + " at t=" + std::to_string(t));
}

double piece_max(const std::vector<CostPiece>& pcs, double h) {
  double v = -kInf;
  for (auto& p : pcs) v = std::max(v, p.a * h + p.b);
  return v;
}

struct Detail {
  std::vector<int> u, d;
  std::vector<double> stage;
  CostBreakdown br;
};

Detail audit(const Schedule& s, const Instance& in, const AuditOptions& opt) {
  const int T = in.T;
  if (s.horizon() != T || int(s.h_out.size()) != T || int(s.h_in.size()) != T || int(s.level.size()) != T + 1)
    throw Error(ErrorKind::InfeasibleSchedule, "schedule length does not match the horizon");
  const double tol = opt.tol;
  auto near = [&](double a, double b) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); };

  if (!near(s.level[0], in.m_init)) fail("initial level", 1);
  if (in.m_term && !near(s.level[T], *in.m_term)) fail("terminal level", T + 1);

  Detail out;
  out.u.assign(T, 0);
  out.d.assign(T, 0);
  out.stage.assign(T, 0.0);
  for (int t = 1; t <= T; ++t) {
    const int i = t - 1;
    Mode x = s.mode[i];
    Mode prev = t > 1 ? s.mode[i - 1] : Mode::O;
    double ho = s.h_out[i], hi = s.h_in[i];
    if (x == Mode::SC && !in.hsc) fail("short-circuit mode disabled", t);
    if (is_online(x) && t <= in.tau_init) fail("initial down time", t);
    if (generates(x)) {
      if (ho < in.gen_lo[i] - tol || ho > in.gen_hi[i] + tol) fail("generation bound", t);
    } else if (std::fabs(ho) > tol) {
      fail("generation outside a generating mode", t);
    }
    if (pumps(x)) {
      if (hi < in.pump_lo[i] - tol || hi > in.pump_hi[i] + tol) fail("pumping bound", t);
    } else if (std::fabs(hi) > tol) {
      fail("pumping outside a pumping mode", t);
    }
    double hprev = t > 1 && generates(prev) ? s.h_out[i - 1] : 0.0;
    if (generates(x) && ho - hprev > in.ramp + tol) fail("ramp-up", t);
    if (generates(x) && generates(prev) && hprev - ho > in.ramp + tol) fail("ramp-down", t);
    if (!generates(x) && generates(prev) && opt.shutdown_cap && hprev > in.ramp + tol) fail("shutdown ramp", t);

    double expect = s.level[i] - in.mu[i] * ho - in.spill[i] + in.inflow[i] + in.alpha[i] * hi;
    if (!near(s.level[i + 1], expect)) fail("mass balance", t);
    if (s.level[i + 1] < -tol || s.level[i + 1] > in.capacity + tol) fail("reservoir bounds", t + 1);

    out.u[i] = is_online(x) && !is_online(prev);
    out.d[i] = !is_online(x) && is_online(prev);
    double lam = in.price[i];
    double energy = lam * (hi - ho);
    double water = in.water_value * (in.mu[i] * ho - in.alpha[i] * hi);
    double phys = 0.0;
    if (generates(x)) phys += piece_max(in.gen_pieces[i], ho);
    if (pumps(x)) phys += piece_max(in.pump_pieces[i], hi);
    double su = out.u[i] ? in.startup[i] : 0.0;
    double sd = out.d[i] ? in.shutdown[i] : 0.0;
    out.br.energy += energy;
    out.br.water += water;
    out.br.physical += phys;
    out.br.startup += su;
    out.br.shutdown += sd;
    out.stage[i] = energy + water + phys + su + sd;
  }
  if (in.terminal_offline && opt.shutdown_cap && generates(s.mode[T - 1]) && s.h_out[T - 1] > in.ramp + tol)
    fail("shutdown ramp", T + 1);

  // run-length rules
  int t = 1;
  while (t <= T) {
    Mode x = s.mode[t - 1];
    int e = t;
    while (e + 1 <= T && s.mode[e] == x) ++e;
    if (is_online(x) && e - t + 1 > in.j_max) fail("event length", t);
    t = e + 1;
  }
  t = 1;
  while (t <= T) {
    bool on = is_online(s.mode[t - 1]);
    int e = t;
    while (e + 1 <= T && is_online(s.mode[e]) == on) ++e;
    bool reaches_end = e == T;
    if (on && !reaches_end && e - t + 1 < in.min_up) fail("min-up", t);
    if (!on && t > 1 && !reaches_end && e - t + 1 < in.min_down) fail("min-down", t);
    t = e + 1;
  }
  return out;
}

}  // namespace

double evaluate_schedule_cost(const Schedule& s, const Instance& inst, const AuditOptions& opt) {
  return audit(s, inst, opt).br.total();
}

void complete_schedule(Schedule& s, const Instance& inst, const AuditOptions& opt) {
  Detail d = audit(s, inst, opt);
  s.u = std::move(d.u);
  s.d = std::move(d.d);
  s.stage_cost = std::move(d.stage);
  s.breakdown = d.br;
  s.cost = d.br.total();
}

std::string schedule_csv(const Schedule& s) {
  std::ostringstream os;
  os << "t,mode,H_out_MW,H_in_MW,M_MWh,u,d,stage_cost\n";
  char buf[256];
  const int T = s.horizon();
  for (int t = 1; t <= T; ++t) {
    int i = t - 1;
    std::snprintf(buf, sizeof buf, "%d,%s,%.6f,%.6f,%.6f,%d,%d,%.6f\n", t, mode_name(s.mode[i]), s.h_out[i], s.h_in[i],
                  s.level[i], i < int(s.u.size()) ? s.u[i] : 0, i < int(s.d.size()) ? s.d[i] : 0,
                  i < int(s.stage_cost.size()) ? s.stage_cost[i] : 0.0);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%d,end,0,0,%.6f,0,0,0\n", T + 1, s.level[T]);
  os << buf;
  return os.str();
}

void write_schedule_csv(const Schedule& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  f << schedule_csv(s);
}

}  // namespace psh
