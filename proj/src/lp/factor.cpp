#include "factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace psh::lp {

namespace {
constexpr double kTiny = 1e-14;
constexpr double kPivotAbs = 1e-11;
constexpr double kThreshold = 0.1;
constexpr double kSparseRatio = 0.10;
}  // namespace

void HVector::tidy(double tiny) {
  int out = 0;
  for (int k = 0; k < count; ++k) {
    int i = index[k];
    if (std::fabs(array[i]) > tiny)
      index[out++] = i;
    else
      array[i] = 0.0;
  }
  count = out;
}

void HVector::rescan(double tiny) {
  count = 0;
  for (int i = 0; i < int(array.size()); ++i) {
    if (std::fabs(array[i]) > tiny)
      index[count++] = i;
    else
      array[i] = 0.0;
  }
}

std::vector<std::pair<int, int>> LuFactor::build(int m, const BasisColumns& cols) {
  m_ = m;
  prow_.assign(m, -1);
  pcol_.assign(m, -1);
  row_k_.assign(m, -1);
  pos_k_.assign(m, -1);
  diag_.assign(m, 0.0);
  eta_start_.assign(1, 0);
  eta_index_.clear();
  eta_value_.clear();
  eta_pivot_.clear();
  eta_pivot_value_.clear();
  work_.assign(m, 0.0);
  stack_.assign(m, 0);
  order_.assign(m, 0);
  mark_.assign(2 * m + 2, 0);
  stamp_ = 0;

  // row-wise copy of B
  std::vector<int> rstart(m + 1, 0);
  for (int p = 0; p < cols.start[m]; ++p) rstart[cols.index[p] + 1]++;
  for (int i = 0; i < m; ++i) rstart[i + 1] += rstart[i];
  std::vector<int> rindex(cols.start[m]);
  std::vector<double> rvalue(cols.start[m]);
  {
    std::vector<int> fill(rstart.begin(), rstart.end() - 1);
    for (int j = 0; j < m; ++j)
      for (int p = cols.start[j]; p < cols.start[j + 1]; ++p) {
        int q = fill[cols.index[p]]++;
        rindex[q] = j;
        rvalue[q] = cols.value[p];
      }
  }

  std::vector<int> col_count(m), row_count(m);
  std::vector<char> col_active(m, 1), row_active(m, 1);
  for (int j = 0; j < m; ++j) col_count[j] = cols.start[j + 1] - cols.start[j];
  for (int i = 0; i < m; ++i) row_count[i] = rstart[i + 1] - rstart[i];

  std::vector<int> u_start{0}, u_pos;
  std::vector<double> u_val;
  std::vector<int> l_start{0}, l_row;
  std::vector<double> l_val;
  u_start.reserve(m + 1);
  l_start.reserve(m + 1);
  int k = 0;

  auto commit = [&](int row, int pos, double piv) {
    prow_[k] = row;
    pcol_[k] = pos;
    row_k_[row] = k;
    pos_k_[pos] = k;
    diag_[k] = piv;
    row_active[row] = 0;
    col_active[pos] = 0;
    u_start.push_back(int(u_pos.size()));
    l_start.push_back(int(l_row.size()));
    ++k;
  };

  // column singletons
  std::vector<int> queue;
  for (int j = 0; j < m; ++j)
    if (col_count[j] == 1) queue.push_back(j);
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int j = queue[qi];
    if (!col_active[j] || col_count[j] != 1) continue;
    int p = -1;
    double piv = 0.0;
    for (int e = cols.start[j]; e < cols.start[j + 1]; ++e)
      if (row_active[cols.index[e]]) {
        p = cols.index[e];
        piv = cols.value[e];
        break;
      }
    if (p < 0 || std::fabs(piv) < kPivotAbs) continue;
    for (int e = rstart[p]; e < rstart[p + 1]; ++e) {
      int j2 = rindex[e];
      if (j2 == j || !col_active[j2]) continue;
      u_pos.push_back(j2);
      u_val.push_back(rvalue[e]);
      if (--col_count[j2] == 1) queue.push_back(j2);
    }
    for (int e = cols.start[j]; e < cols.start[j + 1]; ++e) row_count[cols.index[e]]--;
    commit(p, j, piv);
  }

  // row singletons
  queue.clear();
  for (int i = 0; i < m; ++i)
    if (row_active[i]) {
      int c = 0;
      for (int e = rstart[i]; e < rstart[i + 1]; ++e) c += col_active[rindex[e]];
      row_count[i] = c;
      if (c == 1) queue.push_back(i);
    }
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int r = queue[qi];
    if (!row_active[r] || row_count[r] != 1) continue;
    int c = -1;
    double piv = 0.0;
    for (int e = rstart[r]; e < rstart[r + 1]; ++e)
      if (col_active[rindex[e]]) {
        c = rindex[e];
        piv = rvalue[e];
        break;
      }
    if (c < 0) continue;
    double cmax = 0.0;
    for (int e = cols.start[c]; e < cols.start[c + 1]; ++e)
      if (row_active[cols.index[e]]) cmax = std::max(cmax, std::fabs(cols.value[e]));
    if (std::fabs(piv) < kPivotAbs || std::fabs(piv) < kThreshold * cmax) continue;
    for (int e = cols.start[c]; e < cols.start[c + 1]; ++e) {
      int i = cols.index[e];
      if (i == r || !row_active[i]) continue;
      l_row.push_back(i);
      l_val.push_back(cols.value[e] / piv);
      if (--row_count[i] == 1) queue.push_back(i);
    }
    col_count[c] = 0;
    commit(r, c, piv);
  }

  std::vector<std::pair<int, int>> singular;

  // kernel: Markowitz with threshold pivoting
  if (k < m) {
    std::vector<int> krows, kcols;
    for (int i = 0; i < m; ++i)
      if (row_active[i]) krows.push_back(i);
    for (int j = 0; j < m; ++j)
      if (col_active[j]) kcols.push_back(j);
    int nk = int(kcols.size());
    std::vector<std::vector<std::pair<int, double>>> kc(m);
    std::vector<std::vector<int>> kr(m);
    for (int j : kcols)
      for (int e = cols.start[j]; e < cols.start[j + 1]; ++e) {
        int i = cols.index[e];
        if (!row_active[i]) continue;
        kc[j].push_back({i, cols.value[e]});
        kr[i].push_back(j);
      }
    for (int j : kcols) col_count[j] = int(kc[j].size());
    for (int i : krows) row_count[i] = int(kr[i].size());

    // count buckets, rows live at offset m in the link arrays
    std::vector<int> head_c(m + 2, -1), head_r(m + 2, -1), nxt(2 * m, -1), prv(2 * m, -1), where(2 * m, -1);
    auto unlink = [&](int node, std::vector<int>& head) {
      int b = where[node];
      if (b < 0) return;
      if (prv[node] >= 0)
        nxt[prv[node]] = nxt[node];
      else
        head[b] = nxt[node];
      if (nxt[node] >= 0) prv[nxt[node]] = prv[node];
      where[node] = -1;
    };
    auto link = [&](int node, int b, std::vector<int>& head) {
      b = std::min(b, m + 1);
      where[node] = b;
      prv[node] = -1;
      nxt[node] = head[b];
      if (head[b] >= 0) prv[head[b]] = node;
      head[b] = node;
    };
    for (int j : kcols) link(j, col_count[j], head_c);
    for (int i : krows) link(m + i, row_count[i], head_r);

    std::vector<int> marker(m, -1);
    std::vector<int> lrows;
    std::vector<double> lvals;
    for (int step = 0; step < nk; ++step) {
      int bp = -1, bq = -1;
      double bcost = std::numeric_limits<double>::infinity(), bval = 0.0;
      int searched = 0;
      const int want = std::min(4, 2 * (nk - step));
      for (int cnt = 1; cnt <= std::min(nk + 1, m + 1) && !(bp >= 0 && searched >= want); ++cnt) {
        for (int j = head_c[cnt]; j >= 0 && !(bp >= 0 && searched >= want); j = nxt[j]) {
          double cmax = 0.0;
          for (auto& [i, a] : kc[j]) cmax = std::max(cmax, std::fabs(a));
          for (auto& [i, a] : kc[j]) {
            double aa = std::fabs(a);
            if (aa < kPivotAbs || aa < kThreshold * cmax) continue;
            double cost = double(row_count[i] - 1) * double(cnt - 1);
            if (cost < bcost || (cost == bcost && aa > std::fabs(bval))) {
              bcost = cost;
              bp = i;
              bq = j;
              bval = a;
            }
          }
          ++searched;
        }
        for (int node = head_r[cnt]; node >= 0 && !(bp >= 0 && searched >= want); node = nxt[node]) {
          int i = node - m;
          for (int j : kr[i]) {
            double a = 0.0, cmax = 0.0;
            for (auto& [i2, a2] : kc[j]) {
              cmax = std::max(cmax, std::fabs(a2));
              if (i2 == i) a = a2;
            }
            double aa = std::fabs(a);
            if (aa < kPivotAbs || aa < kThreshold * cmax) continue;
            double cost = double(cnt - 1) * double(col_count[j] - 1);
            if (cost < bcost || (cost == bcost && aa > std::fabs(bval))) {
              bcost = cost;
              bp = i;
              bq = j;
              bval = a;
            }
          }
          ++searched;
        }
      }
      if (bp < 0) break;

      // L part of the pivot column
      lrows.clear();
      lvals.clear();
      for (auto& [i, a] : kc[bq]) {
        if (i == bp) continue;
        lrows.push_back(i);
        lvals.push_back(a / bval);
        l_row.push_back(i);
        l_val.push_back(a / bval);
      }
      // remove pivot column from its rows
      for (int i : lrows) {
        auto& r = kr[i];
        r.erase(std::find(r.begin(), r.end(), bq));
        row_count[i]--;
      }
      unlink(bq, head_c);
      kc[bq].clear();
      col_count[bq] = 0;

      // pivot row: record U, eliminate
      for (int j : kr[bp]) {
        if (j == bq) continue;
        auto& cj = kc[j];
        double apj = 0.0;
        for (size_t e = 0; e < cj.size(); ++e)
          if (cj[e].first == bp) {
            apj = cj[e].second;
            cj[e] = cj.back();
            cj.pop_back();
            break;
          }
        u_pos.push_back(j);
        u_val.push_back(apj);
        if (apj != 0.0 && !lrows.empty()) {
          for (size_t e = 0; e < cj.size(); ++e) marker[cj[e].first] = int(e);
          for (size_t t = 0; t < lrows.size(); ++t) {
            int i = lrows[t];
            double delta = -lvals[t] * apj;
            if (marker[i] >= 0) {
              cj[marker[i]].second += delta;
            } else {
              marker[i] = int(cj.size());
              cj.push_back({i, delta});
              kr[i].push_back(j);
              row_count[i]++;
            }
          }
          for (auto& e : cj) marker[e.first] = -1;
        }
        col_count[j] = int(cj.size());
        unlink(j, head_c);
        link(j, col_count[j], head_c);
      }
      for (int i : lrows) {
        unlink(m + i, head_r);
        link(m + i, row_count[i], head_r);
      }
      unlink(m + bp, head_r);
      kr[bp].clear();
      commit(bp, bq, bval);
    }
    if (k < m) {
      std::vector<int> rr, cc;
      for (int i = 0; i < m; ++i)
        if (row_active[i]) rr.push_back(i);
      for (int j = 0; j < m; ++j)
        if (col_active[j]) cc.push_back(j);
      for (size_t t = 0; t < cc.size(); ++t) singular.push_back({cc[t], rr[t]});
      return singular;
    }
  }

  // translate to pivot-index space
  u_start_ = std::move(u_start);
  u_index_.resize(u_pos.size());
  for (size_t e = 0; e < u_pos.size(); ++e) u_index_[e] = pos_k_[u_pos[e]];
  u_value_ = std::move(u_val);
  l_start_ = std::move(l_start);
  l_index_.resize(l_row.size());
  for (size_t e = 0; e < l_row.size(); ++e) l_index_[e] = row_k_[l_row[e]];
  l_value_ = std::move(l_val);
  has_l_ = !l_index_.empty();

  auto transpose = [m](const std::vector<int>& st, const std::vector<int>& ix, const std::vector<double>& vx,
                       std::vector<int>& ost, std::vector<int>& oix, std::vector<double>& ovx) {
    ost.assign(m + 1, 0);
    for (int e : ix) ost[e + 1]++;
    for (int i = 0; i < m; ++i) ost[i + 1] += ost[i];
    oix.resize(ix.size());
    ovx.resize(ix.size());
    std::vector<int> fill(ost.begin(), ost.end() - 1);
    for (int a = 0; a < m; ++a)
      for (int e = st[a]; e < st[a + 1]; ++e) {
        int q = fill[ix[e]]++;
        oix[q] = a;
        ovx[q] = vx[e];
      }
  };
  transpose(u_start_, u_index_, u_value_, uc_start_, uc_index_, uc_value_);
  transpose(l_start_, l_index_, l_value_, lr_start_, lr_index_, lr_value_);
  return singular;
}

int LuFactor::reach(const std::vector<int>& seeds, int nseeds, const std::vector<int>& start,
                    const std::vector<int>& index) const {
  if (++stamp_ == std::numeric_limits<int>::max()) {
    std::fill(mark_.begin(), mark_.end(), 0);
    stamp_ = 1;
  }
  int* posv = mark_.data() + m_ + 1;  // second half holds edge cursors
  int nout = 0;
  for (int s = 0; s < nseeds; ++s) {
    int seed = seeds[s];
    if (mark_[seed] == stamp_) continue;
    int sp = 0;
    stack_[0] = seed;
    mark_[seed] = stamp_;
    posv[seed] = start[seed];
    while (sp >= 0) {
      int node = stack_[sp];
      int p = posv[node];
      int end = start[node + 1];
      bool pushed = false;
      while (p < end) {
        int nb = index[p++];
        if (mark_[nb] != stamp_) {
          posv[node] = p;
          mark_[nb] = stamp_;
          posv[nb] = start[nb];
          stack_[++sp] = nb;
          pushed = true;
          break;
        }
      }
      if (!pushed) {
        posv[node] = p;
        order_[nout++] = node;
        --sp;
      }
    }
  }
  return nout;
}

// push solve on pivot-index space; nz holds the nonzero nodes on entry and on exit
void LuFactor::solve_forward(std::vector<double>& w, std::vector<int>& nz, int& nnz, const std::vector<int>& start,
                             const std::vector<int>& index, const std::vector<double>& value, bool ascending,
                             bool divide) const {
  auto visit = [&](int k) {
    double x = w[k];
    if (x == 0.0) return;
    if (divide) {
      x /= diag_[k];
      w[k] = x;
    }
    for (int e = start[k]; e < start[k + 1]; ++e) w[index[e]] -= value[e] * x;
  };
  if (nnz < kSparseRatio * m_) {
    int n = reach(nz, nnz, start, index);
    for (int t = n - 1; t >= 0; --t) visit(order_[t]);
    nnz = n;
    for (int t = 0; t < n; ++t) nz[t] = order_[t];
  } else {
    if (ascending)
      for (int k = 0; k < m_; ++k) visit(k);
    else
      for (int k = m_ - 1; k >= 0; --k) visit(k);
    nnz = 0;
    for (int k = 0; k < m_; ++k)
      if (w[k] != 0.0) nz[nnz++] = k;
  }
}

void LuFactor::ftran(HVector& v) const {
  std::vector<double>& w = work_;
  std::vector<int>& nz = v.index;
  int nnz = 0;
  for (int t = 0; t < v.count; ++t) {
    int i = v.index[t];
    double x = v.array[i];
    v.array[i] = 0.0;
    if (x == 0.0) continue;
    int k = row_k_[i];
    w[k] = x;
    nz[nnz++] = k;
  }
  if (has_l_) solve_forward(w, nz, nnz, l_start_, l_index_, l_value_, true, false);
  solve_forward(w, nz, nnz, uc_start_, uc_index_, uc_value_, false, true);
  int out = 0;
  for (int t = 0; t < nnz; ++t) {
    int k = nz[t];
    double x = w[k];
    w[k] = 0.0;
    if (std::fabs(x) <= kTiny) continue;
    v.array[pcol_[k]] = x;
    nz[out++] = pcol_[k];
  }
  v.count = out;

  // eta file
  for (size_t e = 0; e < eta_pivot_.size(); ++e) {
    int r = eta_pivot_[e];
    double xr = v.array[r];
    if (xr == 0.0) continue;
    xr /= eta_pivot_value_[e];
    v.array[r] = xr;
    for (int p = eta_start_[e]; p < eta_start_[e + 1]; ++p) {
      int i = eta_index_[p];
      double before = v.array[i];
      double after = before - eta_value_[p] * xr;
      if (before == 0.0) v.index[v.count++] = i;
      v.array[i] = after == 0.0 ? 1e-300 : after;
    }
  }
  if (!eta_pivot_.empty()) v.tidy(kTiny);
}

void LuFactor::btran(HVector& v) const {
  // eta file in reverse
  for (int e = int(eta_pivot_.size()) - 1; e >= 0; --e) {
    int r = eta_pivot_[e];
    double s = v.array[r];
    for (int p = eta_start_[e]; p < eta_start_[e + 1]; ++p) s -= eta_value_[p] * v.array[eta_index_[p]];
    s /= eta_pivot_value_[e];
    if (v.array[r] == 0.0 && s != 0.0) v.index[v.count++] = r;
    v.array[r] = s == 0.0 && v.array[r] != 0.0 ? 1e-300 : s;
  }
  std::vector<double>& w = work_;
  std::vector<int>& nz = v.index;
  int nnz = 0;
  for (int t = 0; t < v.count; ++t) {
    int j = v.index[t];
    double x = v.array[j];
    v.array[j] = 0.0;
    if (std::fabs(x) <= kTiny) continue;
    int k = pos_k_[j];
    w[k] = x;
    nz[nnz++] = k;
  }
  solve_forward(w, nz, nnz, u_start_, u_index_, u_value_, true, true);
  if (has_l_) solve_forward(w, nz, nnz, lr_start_, lr_index_, lr_value_, false, false);
  int out = 0;
  for (int t = 0; t < nnz; ++t) {
    int k = nz[t];
    double x = w[k];
    w[k] = 0.0;
    if (std::fabs(x) <= kTiny) continue;
    v.array[prow_[k]] = x;
    nz[out++] = prow_[k];
  }
  v.count = out;
}

void LuFactor::update(const HVector& alpha, int r) {
  double piv = alpha.array[r];
  for (int t = 0; t < alpha.count; ++t) {
    int i = alpha.index[t];
    if (i == r) continue;
    double a = alpha.array[i];
    if (std::fabs(a) <= kTiny) continue;
    eta_index_.push_back(i);
    eta_value_.push_back(a);
  }
  eta_start_.push_back(int(eta_index_.size()));
  eta_pivot_.push_back(r);
  eta_pivot_value_.push_back(piv);
}

}  // namespace psh::lp
