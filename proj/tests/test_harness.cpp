#include <algorithm>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "psh/experiments.hpp"
#include "psh/oracle.hpp"
#include "psh/random_instance.hpp"

using namespace psh;
using namespace testdata;
namespace fs = std::filesystem;

namespace {

int column(const ExperimentReport& r, const std::string& name) {
  auto it = std::find(r.header.begin(), r.header.end(), name);
  REQUIRE(it != r.header.end());
  return int(it - r.header.begin());
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("oracle on small instances") {
    OracleResult t = brute_force_oracle(toy());
    CHECK(t.value == doctest::Approx(-25000));
    CHECK(t.modes == std::vector<Mode>{Mode::G, Mode::G});
    CHECK(t.sequences <= 9);
    CHECK(brute_force_oracle(zero_prices(4)).value == doctest::Approx(0).epsilon(1e-9));
    try {
      brute_force_oracle(zero_prices(30));
      FAIL("expected LimitsExceeded");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::LimitsExceeded);
    }
  }

  TEST_CASE("sequence rules") {
    CHECK_FALSE(sequence_admissible(baseline(), std::vector<Mode>(24, Mode::G)));
    Instance t = toy();
    CHECK(sequence_admissible(t, {Mode::G, Mode::P}));
    CHECK_FALSE(sequence_admissible(t, {Mode::SC, Mode::O}));
    CHECK(sequence_cost(t, {Mode::G, Mode::G}, false) == doctest::Approx(-25000));
  }

  TEST_CASE("price volatility scaling") {
    Instance in = toy();
    Instance s = scale_volatility(in, 2.0);
    CHECK(s.price == std::vector<double>{50, 250});
    CHECK(scale_volatility(in, 1.0).price == in.price);
  }

  TEST_CASE("horizon tiling") {
    Instance in = baseline();
    Instance t = tile_horizon(in, 48);
    CHECK(t.T == 48);
    CHECK(t.price.size() == 48);
    CHECK(t.lam(25) == in.lam(1));
    CHECK(t.lam(48) == in.lam(24));
    CHECK(t.gen_pieces.size() == 48);
    CHECK(validate(t).empty());
  }

  TEST_CASE("experiment spec parsing") {
    ExperimentSpec s = parse_experiment_spec(R"({"kind": "grid_refinement", "instance": "b.json", "out": "res"})", "/x");
    CHECK(s.instance == "/x/b.json");
    CHECK(s.out == "/x/res");
    CHECK(s.refinements == std::vector<int>{1, 2, 5, 10, 20});
    auto kind_of = [](const std::string& text) {
      try {
        parse_experiment_spec(text);
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::NumericalFailure;
    };
    CHECK(kind_of(R"({"kind": "nope", "instance": "a"})") == ErrorKind::ValidationFailed);
    CHECK(kind_of(R"({"instance": "a"})") == ErrorKind::MissingField);
    CHECK(kind_of(R"({"kind": "exactness"})") == ErrorKind::MissingField);
    CHECK(kind_of(R"({"kind": "grid_refinement", "instance": "a", "refinements": [0]})") == ErrorKind::ValidationFailed);
    CHECK(kind_of("{") == ErrorKind::MalformedDocument);
  }

  TEST_CASE("exactness experiment on the toy") {
    fs::path dir = scratch("psh_harness_exact");
    std::ofstream(dir / "toy.json") << serialize_instance(toy());
    ExperimentSpec s;
    s.kind = "exactness";
    s.instance = (dir / "toy.json").string();
    s.out = (dir / "out").string();
    ExperimentReport r = run_experiment(s);
    REQUIRE(r.rows.size() == 5);
    CHECK(fs::exists(dir / "out" / "exactness.csv"));
    int obj = column(r, "objective"), st = column(r, "status");
    for (auto& row : r.rows) {
      CHECK(row[st] == "ok");
      CHECK(std::stod(row[obj]) == doctest::Approx(-25000));
    }
    fs::remove_all(dir);
  }

  TEST_CASE("method runner audits schedules") {
    Instance t = toy();
    for (Method m : {Method::Milp, Method::Dp, Method::GridLp, Method::Bnb, Method::BnbGrid}) {
      RunOutcome r = run_method(t, m);
      CHECK(r.status == RunStatus::Ok);
      CHECK(r.has_schedule);
      CHECK(r.objective == doctest::Approx(-25000));
      CHECK(method_from_name(method_name(m)) == m);
    }
    CHECK_THROWS_AS(method_from_name("simplex"), Error);
  }

  TEST_CASE("svg plot") {
    std::string svg = svg_plot({{"gridlp", {24, 48}, {0.5, 2.0}}}, "runtime", "T", "s");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("gridlp") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
  }

  TEST_CASE("random instances are reproducible") {
    Instance a = random_instance(5), b = random_instance(5);
    CHECK(a == b);
    CHECK(validate(a).empty());
    CHECK(a.T >= 2);
    CHECK(a.T <= 6);
    CHECK(a.j_max <= 3);
    CHECK(draw_instance(6) == draw_instance(6));
    CHECK_FALSE(draw_instance(6) == draw_instance(7));
  }

  TEST_CASE("small oracle fuzz") {
    fs::path dir = scratch("psh_harness_fuzz");
    ExperimentSpec s;
    s.kind = "oracle_fuzz";
    s.seed = 500;
    s.count = 4;
    s.out = dir.string();
    ExperimentReport r = run_experiment(s);
    REQUIRE(r.rows.size() == 4);
    int st = column(r, "status"), orc = column(r, "oracle"), milp = column(r, "milp"), bnb = column(r, "bnb");
    for (auto& row : r.rows) {
      CHECK(row[st] == "ok");
      CHECK(near(std::stod(row[orc]), std::stod(row[milp]), 1e-6));
      CHECK(near(std::stod(row[orc]), std::stod(row[bnb]), 1e-6));
    }
    fs::remove_all(dir);
  }
}
