#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "psh/lp.hpp"

namespace psh {

int LinearProgram::add_var(double lb, double ub, double cost, bool binary, std::string name) {
  vars.push_back({lb, ub, cost, binary});
  int j = int(vars.size()) - 1;
  if (!name.empty()) var_names_.push_back({j, std::move(name)});
  return j;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coefs, Relation rel, double rhs, std::string name) {
  rows.push_back({std::move(coefs), rel, rhs});
  int i = int(rows.size()) - 1;
  if (!name.empty()) row_names_.push_back({i, std::move(name)});
  return i;
}

int LinearProgram::num_binaries() const {
  int c = 0;
  for (auto& v : vars) c += v.binary;
  return c;
}

namespace {
std::string lookup(const std::vector<std::pair<int, std::string>>& names, int i, char prefix) {
  auto it = std::lower_bound(names.begin(), names.end(), i, [](const auto& p, int k) { return p.first < k; });
  if (it != names.end() && it->first == i) return it->second;
  return prefix + std::to_string(i);
}
}  // namespace

std::string LinearProgram::var_name(int j) const { return lookup(var_names_, j, 'x'); }
std::string LinearProgram::row_name(int i) const { return lookup(row_names_, i, 'c'); }

void LinearProgram::check() const {
  const int n = num_vars();
  for (int j = 0; j < n; ++j) {
    const Var& v = vars[j];
    if (std::isnan(v.lb) || std::isnan(v.ub) || !(v.lb <= v.ub) || v.lb == kInf || v.ub == -kInf)
      throw Error(ErrorKind::InvalidArgument, "variable " + var_name(j) + " has inconsistent bounds");
    if (!std::isfinite(v.cost)) throw Error(ErrorKind::InvalidArgument, "variable " + var_name(j) + " has a non-finite cost");
    if (v.binary && (v.lb < 0.0 || v.ub > 1.0))
      throw Error(ErrorKind::InvalidArgument, "binary variable " + var_name(j) + " has bounds outside [0,1]");
  }
  for (int i = 0; i < num_rows(); ++i) {
    for (auto& [j, a] : rows[i].coefs) {
      if (j < 0 || j >= n) throw Error(ErrorKind::InvalidArgument, "row " + row_name(i) + " references an undeclared variable");
      if (!std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "row " + row_name(i) + " has a non-finite coefficient");
    }
    if (std::isnan(rows[i].rhs)) throw Error(ErrorKind::InvalidArgument, "row " + row_name(i) + " has a NaN right-hand side");
  }
}

const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

const char* mip_status_name(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "Optimal";
    case MipStatus::Infeasible: return "Infeasible";
    case MipStatus::BudgetExceeded: return "BudgetExceeded";
  }
  return "?";
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j) {
    worst = std::max(worst, lp.vars[j].lb - x[j]);
    worst = std::max(worst, x[j] - lp.vars[j].ub);
  }
  for (auto& r : lp.rows) {
    double act = 0.0;
    for (auto& [j, a] : r.coefs) act += a * x[j];
    if (r.rel != Relation::GE) worst = std::max(worst, act - r.rhs);
    if (r.rel != Relation::LE) worst = std::max(worst, r.rhs - act);
  }
  return worst;
}

double evaluate_objective(const LinearProgram& lp, const std::vector<double>& x) {
  double s = lp.objective_offset;
  for (int j = 0; j < lp.num_vars(); ++j) s += lp.vars[j].cost * x[j];
  return s;
}

namespace {
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string to_lp_format(const LinearProgram& lp) {
  std::ostringstream os;
  os << "\\ generated model: " << lp.num_vars() << " variables, " << lp.num_rows() << " constraints\n";
  os << "Minimize\n obj:";
  int on_line = 0;
  bool any = false;
  for (int j = 0; j < lp.num_vars(); ++j) {
    double c = lp.vars[j].cost;
    if (c == 0.0) continue;
    os << (c < 0 ? " - " : " + ") << num(std::fabs(c)) << " " << lp.var_name(j);
    any = true;
    if (++on_line % 6 == 0) os << "\n ";
  }
  if (lp.objective_offset != 0.0) {
    os << (lp.objective_offset < 0 ? " - " : " + ") << num(std::fabs(lp.objective_offset));
    any = true;
  }
  if (!any) os << " 0 " << (lp.num_vars() ? lp.var_name(0) : "x0");
  os << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    os << " " << lp.row_name(i) << ":";
    if (r.coefs.empty()) os << " 0 " << (lp.num_vars() ? lp.var_name(0) : "x0");
    int k = 0;
    for (auto& [j, a] : r.coefs) {
      os << (a < 0 ? " - " : " + ") << num(std::fabs(a)) << " " << lp.var_name(j);
      if (++k % 6 == 0) os << "\n  ";
    }
    os << (r.rel == Relation::LE ? " <= " : r.rel == Relation::GE ? " >= " : " = ") << num(r.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    const auto& v = lp.vars[j];
    if (v.binary && v.lb == 0.0 && v.ub == 1.0) continue;
    std::string nm = lp.var_name(j);
    if (std::isinf(v.lb) && std::isinf(v.ub))
      os << " " << nm << " free\n";
    else if (v.lb == v.ub)
      os << " " << nm << " = " << num(v.lb) << "\n";
    else {
      os << " " << (std::isinf(v.lb) ? std::string("-inf") : num(v.lb)) << " <= " << nm;
      if (!std::isinf(v.ub)) os << " <= " << num(v.ub);
      os << "\n";
    }
  }
  bool header = false;
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (!lp.vars[j].binary) continue;
    if (!header) os << "Binaries\n";
    header = true;
    os << " " << lp.var_name(j) << "\n";
  }
  os << "End\n";
  return os.str();
}

void write_lp_format(const LinearProgram& lp, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  f << to_lp_format(lp);
}

}  // namespace psh
