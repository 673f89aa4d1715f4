#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "psh/errors.hpp"

namespace psh {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;
constexpr double kOptTol = 1e-7;
constexpr double kIntTol = 1e-6;

enum class Relation { LE, EQ, GE };

class LinearProgram {
 public:
  struct Var {
    double lb = 0.0;
    double ub = kInf;
    double cost = 0.0;
    bool binary = false;
  };
  struct Row {
    std::vector<std::pair<int, double>> coefs;
    Relation rel = Relation::LE;
    double rhs = 0.0;
  };

  int add_var(double lb, double ub, double cost, bool binary = false, std::string name = {});
  int add_binary(double cost, std::string name = {}) { return add_var(0.0, 1.0, cost, true, std::move(name)); }
  int add_row(std::vector<std::pair<int, double>> coefs, Relation rel, double rhs, std::string name = {});

  int num_vars() const { return int(vars.size()); }
  int num_rows() const { return int(rows.size()); }
  int num_binaries() const;
  std::string var_name(int j) const;
  std::string row_name(int i) const;
  // throws InvalidArgument on broken references or bounds
  void check() const;

  std::vector<Var> vars;
  std::vector<Row> rows;
  double objective_offset = 0.0;

 private:
  std::vector<std::pair<int, std::string>> var_names_, row_names_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
const char* lp_status_name(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;
  long iterations = 0;
};

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  long iteration_limit = 50'000'000;
  int refactor_interval = 100;
  bool perturb = true;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  // solve() throws BudgetExceeded once this passes
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {});

// worst violation of rows and bounds for x
double max_violation(const LinearProgram& lp, const std::vector<double>& x);
double evaluate_objective(const LinearProgram& lp, const std::vector<double>& x);

enum class MipStatus { Optimal, Infeasible, BudgetExceeded };
const char* mip_status_name(MipStatus s);

struct MipOptions {
  double time_budget = 600.0;
  double rel_gap = 1e-9;
  double abs_gap = 1e-9;
  long node_limit = -1;
  SimplexOptions lp;
};

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  LpSolution solution;  // best integral solution, empty x when none
  double bound = -kInf;
  double gap = kInf;  // relative
  long nodes = 0;
  double seconds = 0.0;
  bool has_solution() const { return !solution.x.empty(); }
};

MipResult solve_binary_mip(const LinearProgram& lp, const MipOptions& opt = {});

// CPLEX LP-format text of the model
std::string to_lp_format(const LinearProgram& lp);
void write_lp_format(const LinearProgram& lp, const std::string& path);

}  // namespace psh
