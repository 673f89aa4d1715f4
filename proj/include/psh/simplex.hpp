#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "psh/lp.hpp"

namespace psh {

namespace lp {
struct Engine;
}

// bounded revised simplex over one LinearProgram; keeps its basis between solves so callers can change
// column bounds and re-solve warm (dual simplex from the previous basis)
class SimplexSolver {
 public:
  enum class VarState : std::uint8_t { Basic = 0, AtLower = 1, AtUpper = 2, AtZero = 3 };
  using Basis = std::vector<VarState>;  // structural columns then one logical per row

  explicit SimplexSolver(const LinearProgram& lp, SimplexOptions opt = {});
  ~SimplexSolver();
  SimplexSolver(const SimplexSolver&) = delete;
  SimplexSolver& operator=(const SimplexSolver&) = delete;

  LpStatus solve();

  int num_vars() const;
  int num_rows() const;
  void set_col_bounds(int j, double lb, double ub);
  double col_lower(int j) const;
  double col_upper(int j) const;

  double objective() const;
  std::vector<double> primal() const;
  double value(int j) const;
  std::vector<double> row_duals() const;
  long iterations() const;
  LpSolution solution() const;

  Basis basis() const;
  void set_basis(const Basis& b);

 private:
  std::unique_ptr<lp::Engine> e_;
};

}  // namespace psh
