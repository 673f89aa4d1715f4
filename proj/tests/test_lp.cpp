#include <cmath>
#include <random>

#include "doctest.h"
#include "psh/lp.hpp"
#include "psh/simplex.hpp"

using namespace psh;

TEST_SUITE("lp") {
  TEST_CASE("bound-active minimum") {
    LinearProgram lp;
    lp.add_var(1, 5, 1);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[0] == doctest::Approx(1));
    CHECK(s.objective == doctest::Approx(1));
  }

  TEST_CASE("infeasible and unbounded") {
    LinearProgram a;
    int x = a.add_var(-kInf, kInf, 0);
    a.add_row({{x, 1}}, Relation::LE, 0);
    a.add_row({{x, 1}}, Relation::GE, 1);
    CHECK(solve_lp(a).status == LpStatus::Infeasible);

    LinearProgram b;
    b.add_var(0, kInf, -1);
    CHECK(solve_lp(b).status == LpStatus::Unbounded);
  }

  TEST_CASE("small LP with equality and duals") {
    // min -x - 2y, x + y <= 4, x + 3y <= 6, x, y >= 0 -> x = 3, y = 1
    LinearProgram lp;
    int x = lp.add_var(0, kInf, -1), y = lp.add_var(0, kInf, -2);
    lp.add_row({{x, 1}, {y, 1}}, Relation::LE, 4);
    lp.add_row({{x, 1}, {y, 3}}, Relation::LE, 6);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[x] == doctest::Approx(3));
    CHECK(s.x[y] == doctest::Approx(1));
    CHECK(s.objective == doctest::Approx(-5));
    CHECK(max_violation(lp, s.x) <= 1e-7);
  }

  TEST_CASE("two-candidate binary program") {
    LinearProgram lp;
    int a = lp.add_binary(-3), b = lp.add_binary(-2);
    lp.add_row({{a, 1}, {b, 1}}, Relation::LE, 1);
    MipResult r = solve_binary_mip(lp);
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(r.solution.objective == doctest::Approx(-3));
    CHECK(r.solution.x[a] == doctest::Approx(1));
    CHECK(r.solution.x[b] == doctest::Approx(0));
  }

  TEST_CASE("binaries fixed by bounds") {
    LinearProgram lp;
    int a = lp.add_var(1, 1, 2, true), b = lp.add_var(0, 0, -7, true), c = lp.add_var(0, 10, 1);
    lp.add_row({{a, 1}, {b, 1}, {c, 1}}, Relation::GE, 3.5);
    MipResult r = solve_binary_mip(lp);
    LpSolution s = solve_lp(lp);
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(r.solution.objective == doctest::Approx(s.objective));
    CHECK(r.solution.objective == doctest::Approx(4.5));
  }

  TEST_CASE("random 5-binary programs against enumeration") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-10, 10);
    for (int rep = 0; rep < 20; ++rep) {
      LinearProgram lp;
      std::vector<double> c(5);
      for (int j = 0; j < 5; ++j) lp.add_binary(c[j] = std::round(U(rng)));
      int z = lp.add_var(0, 4, 0.5);
      std::vector<std::vector<double>> A(3, std::vector<double>(5));
      std::vector<double> rhs(3);
      for (int i = 0; i < 3; ++i) {
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < 5; ++j) row.push_back({j, A[i][j] = std::round(U(rng))});
        row.push_back({z, -1});
        rhs[i] = std::round(U(rng)) + 5;
        lp.add_row(row, Relation::LE, rhs[i]);
      }
      double best = kInf;
      for (int mask = 0; mask < 32; ++mask) {
        // smallest z >= 0 making every row hold
        double need = 0;
        for (int i = 0; i < 3; ++i) {
          double s = 0;
          for (int j = 0; j < 5; ++j) s += A[i][j] * ((mask >> j) & 1);
          need = std::max(need, s - rhs[i]);
        }
        if (need > 4) continue;
        double v = 0.5 * need;
        for (int j = 0; j < 5; ++j) v += c[j] * ((mask >> j) & 1);
        best = std::min(best, v);
      }
      MipResult r = solve_binary_mip(lp);
      if (std::isinf(best)) {
        CHECK(r.status == MipStatus::Infeasible);
        continue;
      }
      REQUIRE(r.status == MipStatus::Optimal);
      CHECK(r.solution.objective == doctest::Approx(best).epsilon(1e-9));
      LpSolution relax = solve_lp(lp);
      CHECK(relax.objective <= r.solution.objective + 1e-9);
    }
  }

  TEST_CASE("repeated solves are identical") {
    LinearProgram lp;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    for (int j = 0; j < 30; ++j) lp.add_var(0, 1 + U(rng), -U(rng));
    for (int i = 0; i < 20; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < 30; ++j)
        if (U(rng) < 0.3) row.push_back({j, U(rng)});
      lp.add_row(row, Relation::LE, 1 + U(rng));
    }
    LpSolution a = solve_lp(lp), b = solve_lp(lp);
    CHECK(a.status == b.status);
    CHECK(a.objective == b.objective);
    CHECK(a.x == b.x);
  }

  TEST_CASE("warm start from a basis") {
    LinearProgram lp;
    int x = lp.add_var(0, kInf, -1), y = lp.add_var(0, kInf, -2);
    lp.add_row({{x, 1}, {y, 1}}, Relation::LE, 4);
    lp.add_row({{x, 1}, {y, 3}}, Relation::LE, 6);
    SimplexSolver s(lp);
    REQUIRE(s.solve() == LpStatus::Optimal);
    auto basis = s.basis();
    SimplexSolver t(lp);
    t.set_basis(basis);
    REQUIRE(t.solve() == LpStatus::Optimal);
    CHECK(t.iterations() == 0);
    CHECK(t.objective() == doctest::Approx(-5));
  }

  TEST_CASE("deadline in the past") {
    LinearProgram lp;
    int x = lp.add_var(0, kInf, -1), y = lp.add_var(0, kInf, -2);
    lp.add_row({{x, 1}, {y, 1}}, Relation::LE, 4);
    SimplexOptions opt;
    opt.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    try {
      solve_lp(lp, opt);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BudgetExceeded);
    }
  }

  TEST_CASE("model checks and LP format") {
    LinearProgram lp;
    int x = lp.add_var(0, 1, 1, false, "x");
    lp.add_row({{x, 1}}, Relation::GE, 0.5, "lower");
    std::string text = to_lp_format(lp);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("lower") != std::string::npos);
    lp.add_row({{5, 1}}, Relation::LE, 1);
    CHECK_THROWS_AS(lp.check(), Error);
  }
}
