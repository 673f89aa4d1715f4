#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "psh/netflow_lp.hpp"

using namespace psh;
using namespace testdata;
namespace fs = std::filesystem;

namespace {

NetworkLpOptions opts(long max_size) {
  NetworkLpOptions o;
  o.max_size = max_size;
  return o;
}

}  // namespace

TEST_SUITE("netflow_lp") {
  TEST_CASE("network LP matches the DP on the baseline") {
    Instance in = baseline();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    PathResult dp = solve_dp(net, precompute_arc_costs(net, in, {1, false, ""}), in);
    GridLpResult lp = solve_network_lp(net, in, opts(-1));
    CHECK_FALSE(lp.projected);
    CHECK(lp.crashed);
    CHECK(near(lp.objective, dp.value, 1e-6));
    CHECK(dp.value == doctest::Approx(-37200));
    CHECK(lp.path.integral);
    CHECK(near(lp.path.cost, lp.objective, 1e-6));
    CHECK(near(evaluate_schedule_cost(lp.path.schedule, in), lp.objective, 1e-6));
  }

  TEST_CASE("projected form gives the same optimum") {
    Instance in = baseline();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    GridLpResult full = solve_network_lp(net, in, opts(-1));
    GridLpResult proj = solve_network_lp(net, in, opts(0));
    CHECK(proj.projected);
    CHECK(proj.vars < full.vars);
    CHECK(near(proj.objective, full.objective, 1e-9));
    CHECK(near(proj.path.cost, full.path.cost, 1e-9));
  }

  TEST_CASE("single arc forces unit flow") {
    Instance in = load_instance(R"({"horizon": 1, "prices": [100], "gen_bounds": [40, 130], "pump_bounds": [0, 130],
      "ramp_limit": 50, "efficiency_gen": 1, "efficiency_pump": 0.75, "reservoir": {"capacity": 900, "initial": 450},
      "min_up": 2, "min_down": 2, "initial_counter": 1, "shutdown": 0})");
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    NetworkLp md = build_network_lp(net, in);
    LpSolution s = solve_lp(md.lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[md.index.flow[0]] == doctest::Approx(1));
    CHECK(s.objective == doctest::Approx(net.arcs[0].gamma));
  }

  TEST_CASE("zero flow empties the scaled block") {
    Instance in = toy();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    NetworkLp md = build_network_lp(net, in);
    int checked = 0;
    for (int e = 0; e < int(net.arcs.size()); ++e) {
      if (net.arcs[e].block.mode == Mode::O || md.index.col_count[e] == 0) continue;
      LinearProgram lp = md.lp;
      lp.vars[md.index.flow[e]].ub = 0;
      LpSolution s = solve_lp(lp);
      REQUIRE(s.status == LpStatus::Optimal);
      const TrajectoryVars& tv = md.index.blocks[e];
      for (int j : tv.h_out)
        if (j >= 0) CHECK(std::fabs(s.x[j]) <= 1e-9);
      for (int j : tv.h_in)
        if (j >= 0) CHECK(std::fabs(s.x[j]) <= 1e-9);
      for (int j : tv.level) CHECK(std::fabs(s.x[j]) <= 1e-9);
      if (++checked == 5) break;
    }
    CHECK(checked > 0);
  }

  TEST_CASE("half and half flow over two equal paths") {
    Instance in = zero_prices(2);
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    NetworkLp md = build_network_lp(net, in);
    int direct = -1, first = -1, second = -1;
    for (int e : net.out[net.source]) {
      const NetArc& a = net.arcs[e];
      if (a.to == net.sink) direct = e;
      if (a.action.j == 1 && a.action.next == Mode::P)
        for (int f : net.out[a.to])
          if (net.arcs[f].to == net.sink) {
            first = e;
            second = f;
          }
    }
    REQUIRE(direct >= 0);
    REQUIRE(first >= 0);
    LpSolution s;
    s.status = LpStatus::Optimal;
    s.x.assign(md.lp.num_vars(), 0.0);
    s.x[md.index.flow[direct]] = 0.5;
    s.x[md.index.flow[first]] = 0.5;
    s.x[md.index.flow[second]] = 0.5;
    s.objective = 0.0;
    ExtractedPath p = extract_path(s, md, net, in);
    CHECK_FALSE(p.integral);
    CHECK(p.paths_considered == 2);
    CHECK(p.cost == doctest::Approx(0).epsilon(1e-9));

    s.status = LpStatus::Infeasible;
    CHECK_THROWS_AS(extract_path(s, md, net, in), Error);
  }

  TEST_CASE("LP dump") {
    Instance in = toy();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    fs::path f = fs::temp_directory_path() / "psh_network_dump.lp";
    NetworkLpOptions o;
    o.dump_path = f.string();
    GridLpResult r = solve_network_lp(net, in, o);
    CHECK(r.objective == doctest::Approx(-25000));
    std::ifstream is(f);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str().find("Minimize") != std::string::npos);
    CHECK(ss.str().find("node_0") != std::string::npos);
    fs::remove(f);
  }

  TEST_CASE("crash basis and slack start agree") {
    Instance in = toy();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    NetworkLpOptions cold;
    cold.crash = false;
    GridLpResult a = solve_network_lp(net, in), b = solve_network_lp(net, in, cold);
    CHECK(a.crashed);
    CHECK_FALSE(b.crashed);
    CHECK(near(a.objective, b.objective, 1e-9));
  }
}
