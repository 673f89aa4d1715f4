#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "psh/event_network.hpp"
#include "psh/oracle.hpp"
#include "psh/random_instance.hpp"

using namespace psh;
using namespace testdata;
namespace fs = std::filesystem;

TEST_SUITE("event_network") {
  TEST_CASE("min-down counter delays online entries") {
    Instance in = baseline();
    EventState s;
    s.t = 5;
    s.mode = Mode::O;
    s.m = 450;
    s.tau = 2;
    auto acts = enumerate_events(s, in, nullptr);
    REQUIRE(!acts.empty());
    for (auto& a : acts)
      if (is_online(a.next)) CHECK(a.j >= 8);
  }

  TEST_CASE("event length cap") {
    Instance in = baseline();
    EventState s;
    s.t = 10;
    s.mode = Mode::G;
    s.m = 450;
    s.h = 90;
    for (auto& a : enumerate_events(s, in, nullptr)) CHECK(a.j <= 14);
    s.t = 22;
    auto acts = enumerate_events(s, in, nullptr);
    CHECK(std::any_of(acts.begin(), acts.end(), [](const EventAction& a) { return a.j == 25; }));
  }

  TEST_CASE("ramp boundary values on the grid") {
    Instance in = baseline();
    GridSpec g = build_grid(in, 1);
    EventState s;
    s.t = 3;
    s.mode = Mode::G;
    s.m = 450;
    s.h = 90;
    s.mi = g.index_of_reservoir(450);
    s.hi = g.index_of_ramp(90);
    // G cannot follow G, so the generating successor is SC on an HSC copy
    std::vector<double> to_p;
    for (auto& a : enumerate_events(s, in, &g))
      if (a.next == Mode::P && a.j == 5 && a.mi == s.mi) to_p.push_back(a.h_end);
    CHECK(to_p == std::vector<double>{0});

    Instance h = in;
    h.hsc = true;
    std::vector<double> to_sc;
    for (auto& a : enumerate_events(s, h, &g))
      if (a.next == Mode::SC && a.j == 5 && a.mi == s.mi) to_sc.push_back(a.h_end);
    CHECK(to_sc == std::vector<double>{0, 40, 90, 130});
  }

  TEST_CASE("counter update") {
    Instance in = baseline();
    in.min_up = 3;
    in.min_down = 2;
    CHECK(next_counter(in, Mode::O, Mode::G, 0, 4, 6) == 2);
    CHECK(next_counter(in, Mode::G, Mode::O, 0, 4, 6) == 1);
    CHECK(next_counter(in, Mode::G, Mode::P, 2, 4, 5) == 1);
    CHECK(next_counter(in, Mode::G, Mode::P, 2, 4, 8) == 0);
  }

  TEST_CASE("boundary cost") {
    Instance in = baseline();
    in.startup.assign(24, 0.0);
    in.startup[4] = 100;
    CHECK(boundary_cost(Mode::O, Mode::G, 5, in) == 100);
    CHECK(boundary_cost(Mode::G, Mode::P, 9, in) == 0);
    CHECK(boundary_cost(Mode::G, Mode::O, 25, in) == 0);
    CHECK(boundary_cost(Mode::P, Mode::O, 7, in) == 200);
  }

  TEST_CASE("exit rules") {
    Instance in = baseline();
    EventRules plain, strict{true};
    CHECK(exit_rule(in, Mode::G, Mode::SC, 5, plain) == ExitRule::Pin);
    CHECK(exit_rule(in, Mode::G, Mode::O, 5, plain) == ExitRule::Cap);
    CHECK(exit_rule(in, Mode::G, Mode::O, 5, strict) == ExitRule::Free);
    CHECK(exit_rule(in, Mode::G, Mode::O, 25, plain) == ExitRule::Cap);
    CHECK(exit_rule(in, Mode::G, Mode::O, 25, strict) == ExitRule::Free);
    CHECK(exit_rule(in, Mode::P, Mode::G, 5, plain) == ExitRule::Free);
  }

  TEST_CASE("one-stage horizon with online entry blocked") {
    Instance in = load_instance(R"({"horizon": 1, "prices": [100], "gen_bounds": [40, 130], "pump_bounds": [0, 130],
      "ramp_limit": 50, "efficiency_gen": 1, "efficiency_pump": 0.75, "reservoir": {"capacity": 900, "initial": 450},
      "min_up": 2, "min_down": 2, "initial_counter": 1})");
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    CHECK(net.nodes.size() == 2);
    REQUIRE(net.arcs.size() == 1);
    CHECK(net.arcs[0].from == net.source);
    CHECK(net.arcs[0].to == net.sink);
    CHECK(net.arcs[0].block.mode == Mode::O);
  }

  TEST_CASE("baseline network size") {
    Instance in = baseline();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    int tau_bar = in.tau_max() + 1;
    CHECK(net.nodes.size() <= size_t(24 * 3 * 11 * 4 * tau_bar + 2));
    CHECK(net.nodes[net.source].t == 0);
    CHECK(net.nodes[net.sink].t == 25);
    for (auto& a : net.arcs) {
      CHECK(net.nodes[a.from].t < net.nodes[a.to].t);
      if (is_online(a.block.mode)) CHECK(a.block.j - a.block.t <= in.j_max);
    }
  }

  TEST_CASE("short-circuit states appear with HSC") {
    Instance in = hsc_instance();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    bool seen[4] = {false, false, false, false};
    for (auto& n : net.nodes) seen[int(n.mode)] = true;
    CHECK(seen[int(Mode::G)]);
    CHECK(seen[int(Mode::P)]);
    CHECK(seen[int(Mode::SC)]);
    CHECK(seen[int(Mode::O)]);
  }

  TEST_CASE("arc costs") {
    Instance in = baseline();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    ArcCosts c = precompute_arc_costs(net, in, {1, false, ""});
    for (auto& a : net.arcs)
      if (a.block.mode == Mode::O) {
        CHECK(c.feasible[a.key]);
        CHECK(c.cost[a.key] == 0);
      }

    // this draw keeps two blocks that pass the cheap screen but have no dispatch
    Instance r = draw_instance(19);
    EventNetwork rn = build_grid_network(r, build_grid(r, 1));
    ArcCosts rc = precompute_arc_costs(rn, r, {1, false, ""});
    CHECK(std::count(rc.feasible.begin(), rc.feasible.end(), 0) == 2);
    PathResult p = solve_dp(rn, rc, r);
    for (int e : p.arcs) CHECK(rc.feasible[rn.arcs[e].key]);
    for (size_t k = 0; k < rn.blocks.size(); ++k) CHECK(bool(rc.feasible[k]) == solve_block(rn.blocks[k], r).feasible);
  }

  TEST_CASE("dynamic program") {
    Instance z = zero_prices(4);
    EventNetwork nz = build_grid_network(z, build_grid(z, 1));
    PathResult pz = solve_dp(nz, precompute_arc_costs(nz, z, {1, false, ""}), z);
    CHECK(pz.value == doctest::Approx(0).epsilon(1e-9));

    Instance in = toy();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    PathResult p = solve_dp(net, precompute_arc_costs(net, in, {1, false, ""}), in);
    CHECK(p.value == doctest::Approx(-25000));
    CHECK(p.value == doctest::Approx(brute_force_oracle(in).value));
    CHECK(p.schedule.cost == doctest::Approx(p.value));
    CHECK(p.schedule.mode == std::vector<Mode>{Mode::G, Mode::G});
  }

  TEST_CASE("unreachable terminal level") {
    Instance in = load_instance(R"({"horizon": 1, "prices": [100], "gen_bounds": [40, 130], "pump_bounds": [0, 130],
      "ramp_limit": 50, "efficiency_gen": 1, "efficiency_pump": 0.75,
      "reservoir": {"capacity": 900, "initial": 450, "terminal": 300}})");
    try {
      EventNetwork net = build_grid_network(in, build_grid(in, 1));
      solve_dp(net, precompute_arc_costs(net, in, {1, false, ""}), in);
      FAIL("expected NoFeasiblePath");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoFeasiblePath);
    }
  }

  TEST_CASE("thread count does not change the costs") {
    Instance in = baseline();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    ArcCosts a = precompute_arc_costs(net, in, {1, false, ""});
    ArcCosts b = precompute_arc_costs(net, in, {4, false, ""});
    CHECK(a.feasible == b.feasible);
    CHECK(a.cost == b.cost);
    PathResult pa = solve_dp(net, a, in), pb = solve_dp(net, b, in);
    CHECK(pa.arcs == pb.arcs);
    CHECK(pa.value == pb.value);
  }

  TEST_CASE("arc cost cache") {
    fs::path dir = fs::temp_directory_path() / "psh_arc_cache_test";
    fs::remove_all(dir);
    Instance in = toy();
    EventNetwork net = build_grid_network(in, build_grid(in, 1));
    ArcCosts first = precompute_arc_costs(net, in, {1, true, dir.string()});
    CHECK_FALSE(first.from_cache);
    CHECK(first.solved == int(net.blocks.size()));
    ArcCosts second = precompute_arc_costs(net, in, {1, true, dir.string()});
    CHECK(second.from_cache);
    CHECK(second.solved == 0);
    CHECK(second.cost == first.cost);
    CHECK(second.feasible == first.feasible);

    Instance other = in;
    other.price[1] = 210;
    EventNetwork n2 = build_grid_network(other, build_grid(other, 1));
    CHECK_FALSE(precompute_arc_costs(n2, other, {1, true, dir.string()}).from_cache);
    fs::remove_all(dir);
  }
}
