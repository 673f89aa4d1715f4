#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "psh/event_bnb.hpp"
#include "psh/oracle.hpp"
#include "psh/random_instance.hpp"
#include "psh/time_indexed.hpp"

using namespace psh;
using namespace testdata;
namespace fs = std::filesystem;

namespace {

BnbNode with_skeleton(const Instance& in, std::vector<SkeletonStep> steps) {
  BnbNode n = make_root(in);
  for (auto& st : steps) {
    bool found = false;
    for (BnbNode& c : branch(n, in))
      if (c.skeleton.back().j == st.j && c.skeleton.back().next == st.next) {
        n = c;
        found = true;
        break;
      }
    REQUIRE(found);
  }
  return n;
}

}  // namespace

TEST_SUITE("event_bnb") {
  TEST_CASE("root node") {
    BnbNode r = make_root(baseline());
    CHECK(r.frontier == ReducedState{0, Mode::O, 0});
    CHECK(r.skeleton.empty());
    CHECK(make_root(hsc_instance()).frontier == ReducedState{0, Mode::O, 0});
    Instance in = baseline();
    in.tau_init = 1;
    CHECK(make_root(in).frontier.tau == 1);
  }

  TEST_CASE("branching from the root") {
    Instance in = baseline();
    auto kids = branch(make_root(in), in);
    for (int j = 1; j <= 24; ++j)
      for (Mode m : {Mode::G, Mode::P}) {
        bool found = false;
        for (auto& c : kids)
          if (c.skeleton.back().j == j && c.skeleton.back().next == m) found = true;
        CHECK(found);
      }
    for (auto& c : kids) CHECK(c.skeleton.back().next != Mode::SC);
  }

  TEST_CASE("branching respects the event length cap and the horizon end") {
    Instance in = baseline();
    BnbNode g = with_skeleton(in, {{3, Mode::G}});
    REQUIRE(g.frontier.mode == Mode::G);
    for (auto& c : branch(g, in)) CHECK(c.skeleton.back().j - 3 <= 4);

    Instance t = toy();
    BnbNode last = with_skeleton(t, {{1, Mode::G}, {2, Mode::P}});
    auto kids = branch(last, t);
    REQUIRE(!kids.empty());
    for (auto& c : kids) {
      CHECK(c.skeleton.back().j == 3);
      CHECK(c.status == NodeStatus::Leaf);
    }
  }

  TEST_CASE("lower bounds") {
    Instance t = toy();
    CHECK(relax_lower_bound(make_root(t), t) <= -25000 + 1e-6);

    Instance z = zero_prices(3);
    BnbNode off = with_skeleton(z, {{4, Mode::O}});
    CHECK(relax_lower_bound(off, z) == doctest::Approx(0).epsilon(1e-9));

    BnbNode last = with_skeleton(t, {{1, Mode::G}, {2, Mode::P}});
    auto exact = evaluate_skeleton({Mode::G, Mode::P}, t);
    REQUIRE(exact);
    CHECK(relax_lower_bound(last, t) == doctest::Approx(exact->value));
  }

  TEST_CASE("lower bound never exceeds the best completion") {
    Instance in = random_instance(11);
    auto table = enumerate_sequences(in);
    BnbConfig cfg;
    cfg.record_bounds = true;
    BnbResult r = solve_bnb(in, cfg);
    REQUIRE(!r.bounds.empty());
    for (auto& b : r.bounds) CHECK(b.lb <= best_completion(table, b.prefix) + 1e-6 * std::max(1.0, std::fabs(b.lb)));
  }

  TEST_CASE("greedy completion") {
    Instance z = zero_prices(3);
    auto cz = upper_bound_completion(make_root(z), z);
    REQUIRE(cz);
    CHECK(cz->value == doctest::Approx(0).epsilon(1e-9));

    Instance t = toy();
    auto ct = upper_bound_completion(make_root(t), t);
    REQUIRE(ct);
    CHECK(ct->value == doctest::Approx(-25000));

    Instance fixed = toy();
    fixed.m_term = 450;
    CHECK_FALSE(upper_bound_completion(with_skeleton(fixed, {{1, Mode::G}, {3, Mode::O}}), fixed));
  }

  TEST_CASE("solve small instances") {
    Instance t = toy();
    BnbResult r = solve_bnb(t);
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(r.value == doctest::Approx(-25000));
    CHECK(r.value == doctest::Approx(solve_time_indexed(t).objective));
    CHECK(evaluate_schedule_cost(r.schedule, t) == doctest::Approx(r.value));

    Instance z = zero_prices(4);
    BnbResult rz = solve_bnb(z);
    REQUIRE(rz.status == MipStatus::Optimal);
    CHECK(rz.value == doctest::Approx(0).epsilon(1e-9));
    CHECK(rz.stats.expanded <= 1);
  }

  TEST_CASE("random instances against the MIP") {
    for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
      Instance in = random_instance(seed);
      BnbResult b = solve_bnb(in);
      MilpResult m = solve_time_indexed(in);
      REQUIRE(b.status == MipStatus::Optimal);
      REQUIRE(m.status == MipStatus::Optimal);
      CHECK(near(b.value, m.objective, 1e-6));
    }
  }

  TEST_CASE("grid-restricted search") {
    Instance t = toy();
    BnbConfig cfg;
    cfg.grid = build_grid(t, 1);
    BnbResult r = solve_bnb(t, cfg);
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(r.value == doctest::Approx(-25000));
  }

  TEST_CASE("node log") {
    fs::path f = fs::temp_directory_path() / "psh_bnb_log.csv";
    BnbConfig cfg;
    cfg.log_path = f.string();
    solve_bnb(toy(), cfg);
    std::ifstream is(f);
    std::string head;
    std::getline(is, head);
    CHECK(head == "node,parent,skeleton,lb,ub,action");
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows >= 1);
    fs::remove(f);
  }

  TEST_CASE("thread count does not change the answer") {
    Instance in = random_instance(31);
    BnbConfig one, four;
    four.threads = 4;
    BnbResult a = solve_bnb(in, one), b = solve_bnb(in, four);
    CHECK(a.value == b.value);
    CHECK(a.modes == b.modes);
  }

  TEST_CASE("tiny time budget stops early with a valid bound") {
    Instance in = baseline();
    BnbConfig cfg;
    cfg.time_budget = 0.01;
    auto t0 = std::chrono::steady_clock::now();
    BnbResult r = solve_bnb(in, cfg);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(r.status == MipStatus::BudgetExceeded);
    CHECK(secs < 5.0);
    CHECK(r.bound <= -37750.0 + 1e-6);
    if (r.value < kInf) CHECK(r.value >= -37750.0 - 1e-6);
  }
}
