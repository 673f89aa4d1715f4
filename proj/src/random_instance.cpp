#include "psh/random_instance.hpp"

#include <cmath>
#include <random>

#include "psh/event_network.hpp"
#include "psh/oracle.hpp"

namespace psh {

Instance draw_instance(std::uint64_t seed, const RandomOptions& opt) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  auto coin = [&](double p) { return uni(0.0, 1.0) < p; };
  auto round1 = [](double x) { return std::round(x * 10.0) / 10.0; };

  Instance in;
  in.T = pick(opt.T_min, opt.T_max);
  const int T = in.T;
  in.j_max = pick(1, opt.jmax_max);
  in.min_up = pick(1, 3);
  in.min_down = pick(1, 3);
  in.tau_init = pick(0, in.tau_max());
  in.ramp = std::round(uni(20, 80));
  in.capacity = std::round(uni(200, 1000));
  in.m_init = std::round(in.capacity * uni(0.3, 0.7));
  if (coin(0.5)) in.m_term = coin(0.5) ? in.m_init : std::round(in.capacity * uni(0.3, 0.7));
  in.terminal_offline = coin(0.5);
  in.water_value = std::round(uni(0, 50));
  in.hsc = coin(opt.hsc_probability);
  double glo = std::round(uni(0, in.ramp)), ghi = std::round(uni(std::max(glo, in.ramp), 150));
  double plo = std::round(uni(0, 40)), phi = std::round(uni(std::max(plo, 40.0), 150));
  double mu = round1(uni(0.8, 1.2)), alpha = round1(uni(0.6, 1.0));
  double inflow = coin(0.3) ? std::round(uni(0, 20)) : 0.0;
  double su = std::round(uni(0, 500)), sd = std::round(uni(0, 500));
  auto pieces = [&](double hi) {
    std::vector<CostPiece> p{{round1(uni(0, 10)), 0.0}};
    if (coin(0.5)) {
      double a2 = p[0].a + round1(uni(1, 15)), brk = std::round(uni(0.2, 0.8) * hi);
      p.push_back({a2, -(a2 - p[0].a) * brk});
    }
    return p;
  };
  auto gp = pieces(ghi);
  auto pp = pieces(phi);
  for (int t = 0; t < T; ++t) {
    in.price.push_back(std::round(uni(0, 300)));
    in.gen_lo.push_back(glo);
    in.gen_hi.push_back(ghi);
    in.pump_lo.push_back(plo);
    in.pump_hi.push_back(phi);
    in.mu.push_back(mu);
    in.alpha.push_back(alpha);
    in.inflow.push_back(inflow);
    in.spill.push_back(0.0);
    in.startup.push_back(su);
    in.shutdown.push_back(sd);
    in.gen_pieces.push_back(gp);
    in.pump_pieces.push_back(pp);
  }
  return in;
}

namespace {

bool grid_path_exists(const Instance& in) {
  PrecomputeOptions po;
  po.use_cache = false;
  try {
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    solve_dp(net, precompute_arc_costs(net, in, po), in);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoFeasiblePath) return false;
    throw;
  }
  return true;
}

}  // namespace

Instance random_instance(std::uint64_t seed, const RandomOptions& opt) {
  for (int k = 0; k <= opt.max_rerolls; ++k) {
    Instance in = draw_instance(seed + 1000003ULL * std::uint64_t(k), opt);
    if (!validate(in).empty()) continue;
    try {
      brute_force_oracle(in, {in.T, 1000000, false});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Infeasible) continue;
      throw;
    }
    if (opt.require_grid_path && !grid_path_exists(in)) continue;
    return in;
  }
  throw Error(ErrorKind::LimitsExceeded, "no feasible random instance within the re-roll budget");
}

}  // namespace psh
