#include "doctest.h"
#include "helpers.hpp"
#include "psh/time_indexed.hpp"

using namespace psh;
using namespace testdata;

namespace {

int rows_with_prefix(const LinearProgram& lp, const std::string& p) {
  int n = 0;
  for (int i = 0; i < lp.num_rows(); ++i)
    if (lp.row_name(i).rfind(p, 0) == 0) ++n;
  return n;
}

Schedule toy_optimum() {
  Schedule s = empty_schedule(2);
  s.mode = {Mode::G, Mode::G};
  s.h_out = {50, 100};
  s.level = {450, 400, 300};
  return s;
}

}  // namespace

TEST_SUITE("time_indexed") {
  TEST_CASE("variable and row families of the baseline") {
    TimeIndexedModel md = build_time_indexed(baseline());
    CHECK(md.lp.num_binaries() == 120);
    CHECK(rows_with_prefix(md.lp, "mass_") == 24);
    CHECK(md.ysc.empty());
    CHECK(md.level.size() == 25);
  }

  TEST_CASE("HSC adds a third mode binary") {
    Instance in = hsc_instance();
    TimeIndexedModel md = build_time_indexed(in);
    CHECK(md.ysc.size() == size_t(in.T));
    CHECK(md.lp.num_binaries() == 6 * in.T);
  }

  TEST_CASE("zero-cost instance stays offline") {
    MilpResult r = solve_time_indexed(zero_prices(4));
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(r.objective == doctest::Approx(0).epsilon(1e-9));
  }

  TEST_CASE("two-stage toy") {
    Instance in = toy();
    MilpResult r = solve_time_indexed(in);
    REQUIRE(r.status == MipStatus::Optimal);
    REQUIRE(r.has_schedule);
    CHECK(r.objective == doctest::Approx(-25000));
    CHECK(r.schedule.mode == std::vector<Mode>{Mode::G, Mode::G});
    CHECK(r.schedule.h_out[0] == doctest::Approx(50));
    CHECK(r.schedule.h_out[1] == doctest::Approx(100));
    CHECK(r.schedule.level[1] == doctest::Approx(400));
    CHECK(r.schedule.level[2] == doctest::Approx(300));
    CHECK(evaluate_schedule_cost(r.schedule, in) == doctest::Approx(-25000));
  }

  TEST_CASE("extracting all-offline and fractional solutions") {
    Instance in = zero_prices(3);
    TimeIndexedModel md = build_time_indexed(in);
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.assign(md.lp.num_vars(), 0.0);
    for (int i = 0; i < 3; ++i) sol.x[md.y[i]] = 0;
    for (int k = 0; k <= 3; ++k) sol.x[md.level[k]] = 450;
    Schedule s = extract_schedule(sol, md, in);
    CHECK(s.mode == std::vector<Mode>(3, Mode::O));
    CHECK(s.cost == doctest::Approx(0));
    sol.x[md.yg[0]] = 0.5;
    try {
      extract_schedule(sol, md, in);
      FAIL("expected FractionalBinaries");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::FractionalBinaries);
    }
  }

  TEST_CASE("audit") {
    Instance in = toy();
    CHECK(evaluate_schedule_cost(toy_optimum(), in) == doctest::Approx(-25000));
    Schedule off = empty_schedule(2);
    off.level = {450, 450, 450};
    CHECK(evaluate_schedule_cost(off, in) == 0);

    Schedule s = toy_optimum();
    s.h_out = {0, 0};
    s.mode = {Mode::O, Mode::G};
    s.h_out[1] = 130;
    s.level = {450, 450, 320};
    try {
      evaluate_schedule_cost(s, in);
      FAIL("expected InfeasibleSchedule");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InfeasibleSchedule);
      CHECK(e.detail() == "ramp-up at t=2");
    }
  }

  TEST_CASE("schedule CSV") {
    Schedule s = toy_optimum();
    complete_schedule(s, toy());
    std::string csv = schedule_csv(s);
    CHECK(csv.rfind("t,mode,H_out_MW,H_in_MW,M_MWh,u,d,stage_cost\n", 0) == 0);
    CHECK(csv.find("1,G,50.000000,0.000000,450.000000,1,0,-5000.000000") != std::string::npos);
    CHECK(s.switches() == 1);
  }
}
