#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "psh/errors.hpp"
#include "psh/instance.hpp"

using namespace psh;
using namespace testdata;

TEST_SUITE("instance") {
  TEST_CASE("baseline prices and broadcast bounds") {
    Instance in = baseline();
    CHECK(in.T == 24);
    CHECK(in.lam(1) == 130);
    CHECK(in.lam(17) == 260);
    REQUIRE(in.gen_lo.size() == 24);
    for (int t = 0; t < 24; ++t) {
      CHECK(in.gen_lo[t] == 40);
      CHECK(in.gen_hi[t] == 130);
    }
    CHECK(in.capacity == 900);
    CHECK(in.m_init == 450);
    REQUIRE(in.m_term);
    CHECK(*in.m_term == 450);
    CHECK(in.j_max == 4);
    CHECK(in.tau_init == 0);
  }

  TEST_CASE("missing prices") {
    try {
      load_instance(R"({"horizon": 2, "gen_bounds": [0, 1], "pump_bounds": [0, 1], "ramp_limit": 1,
                        "efficiency_gen": 1, "efficiency_pump": 1, "reservoir": {"capacity": 1, "initial": 0}})");
      FAIL("expected MissingField");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingField);
      CHECK(e.detail() == "prices");
    }
  }

  TEST_CASE("malformed text") {
    CHECK_THROWS_AS(load_instance("{not json"), Error);
    try {
      load_instance("[1, 2]");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MalformedDocument);
    }
  }

  TEST_CASE("defaults for optional cost data") {
    Instance in = toy();
    CHECK(in.startup == std::vector<double>{0, 0});
    CHECK(in.water_value == 0);
    REQUIRE(in.gen_pieces[0].size() == 1);
    CHECK(in.gen_pieces[0][0] == CostPiece{0, 0});
    CHECK(!in.m_term);
  }

  TEST_CASE("validation report") {
    CHECK(validate(baseline()).empty());
    Instance a = baseline();
    a.m_init = 1000;
    auto v = validate(a);
    CHECK(std::find(v.begin(), v.end(), "initial level exceeds capacity") != v.end());
    Instance b = baseline();
    b.min_up = 0;
    v = validate(b);
    CHECK(std::find(v.begin(), v.end(), "min-up must be ≥ 1") != v.end());
    CHECK_THROWS_AS(require_valid(b), Error);
  }

  TEST_CASE("baseline grids") {
    GridSpec g = build_grid(baseline(), 1);
    CHECK(g.reservoir == std::vector<double>{0, 100, 200, 300, 400, 450, 500, 600, 700, 800, 900});
    CHECK(g.ramp == std::vector<double>{0, 40, 90, 130});
  }

  TEST_CASE("refinement subdivides and nests") {
    Instance in = baseline();
    GridSpec g2 = build_grid(in, 2);
    CHECK(g2.index_of_reservoir(50) >= 0);
    CHECK(g2.index_of_reservoir(450) >= 0);
    for (auto [lo, hi] : {std::pair{1, 2}, {2, 10}, {5, 10}, {10, 20}, {1, 20}}) {
      GridSpec a = build_grid(in, lo), b = build_grid(in, hi);
      for (double x : a.reservoir) CHECK(b.index_of_reservoir(x) >= 0);
    }
    CHECK_THROWS_AS(build_grid(in, 0), Error);
  }

  TEST_CASE("explicit grid must hold the boundary levels") {
    Instance in = baseline();
    in.grid_reservoir = std::vector<double>{0, 100, 200, 300, 400, 500, 600, 700, 800, 900};
    try {
      build_grid(in, 1);
      FAIL("expected GridExcludesBoundary");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::GridExcludesBoundary);
    }
    Instance h = baseline();
    h.grid_ramp = std::vector<double>{40, 90, 130};
    CHECK_THROWS_AS(build_grid(h, 1), Error);
  }

  TEST_CASE("serialize round trip") {
    for (Instance in : {baseline(), hsc_instance(), toy()}) {
      Instance back = load_instance(serialize_instance(in));
      CHECK(back == in);
    }
  }
}
