#pragma once

#include <vector>

namespace psh::lp {

// dense values plus the list of possibly nonzero slots
struct HVector {
  std::vector<double> array;
  std::vector<int> index;
  int count = 0;

  void setup(int n) {
    array.assign(n, 0.0);
    index.assign(n, 0);
    count = 0;
  }
  void clear() {
    if (count * 4 > int(array.size())) {
      std::fill(array.begin(), array.end(), 0.0);
    } else {
      for (int k = 0; k < count; ++k) array[index[k]] = 0.0;
    }
    count = 0;
  }
  void set(int i, double v) {
    array[i] = v;
    index[count++] = i;
  }
  // drop exact and tiny zeros from the index
  void tidy(double tiny = 1e-14);
  // rebuild index from a dense scan
  void rescan(double tiny = 1e-14);
};

// basis columns in compressed sparse column form, one column per basis position
struct BasisColumns {
  std::vector<int> start;
  std::vector<int> index;
  std::vector<double> value;
};

class LuFactor {
 public:
  // factors B, returns basis positions that had to be replaced by a unit column, paired with the row it now covers
  std::vector<std::pair<int, int>> build(int m, const BasisColumns& cols);

  // solve B x = b: in, values by row; out, values by basis position
  void ftran(HVector& v) const;
  // solve B^T y = e: in, values by basis position; out, values by row
  void btran(HVector& v) const;

  // product-form update after the column at position r was replaced; alpha = B^{-1} a_q by position
  void update(const HVector& alpha, int r);
  int updates() const { return int(eta_pivot_.size()); }
  long eta_nonzeros() const { return long(eta_index_.size()); }
  long factor_nonzeros() const { return long(l_index_.size() + u_index_.size()); }

 private:
  int m_ = 0;
  std::vector<int> prow_, pcol_;      // pivot k -> row, position
  std::vector<int> row_k_, pos_k_;    // row -> k, position -> k
  std::vector<double> diag_;          // U diagonal by k
  // L column-wise by k: entries are pivot indices > k
  std::vector<int> l_start_, l_index_;
  std::vector<double> l_value_;
  // L row-wise: for node k2, the earlier pivots k with an L entry in row prow_[k2]
  std::vector<int> lr_start_, lr_index_;
  std::vector<double> lr_value_;
  // U row-wise by k: entries are pivot indices > k
  std::vector<int> u_start_, u_index_;
  std::vector<double> u_value_;
  // U column-wise by k: entries are pivot indices < k
  std::vector<int> uc_start_, uc_index_;
  std::vector<double> uc_value_;
  bool has_l_ = false;

  std::vector<int> eta_start_{0}, eta_index_, eta_pivot_;
  std::vector<double> eta_value_, eta_pivot_value_;

  // scratch for solves
  mutable std::vector<double> work_;
  mutable std::vector<int> stack_, order_, mark_;
  mutable int stamp_ = 0;

  void solve_forward(std::vector<double>& w, std::vector<int>& nz, int& nnz, const std::vector<int>& start,
                     const std::vector<int>& index, const std::vector<double>& value, bool ascending, bool divide) const;
  int reach(const std::vector<int>& seeds, int nseeds, const std::vector<int>& start, const std::vector<int>& index) const;
};

}  // namespace psh::lp
