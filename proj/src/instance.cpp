#include "psh/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace psh {

using json = nlohmann::json;

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::G: return "G";
    case Mode::P: return "P";
    case Mode::SC: return "SC";
    case Mode::O: return "O";
  }
  return "?";
}

Mode mode_from_name(const std::string& s) {
  if (s == "G") return Mode::G;
  if (s == "P") return Mode::P;
  if (s == "SC") return Mode::SC;
  if (s == "O") return Mode::O;
  throw Error(ErrorKind::MalformedDocument, "unknown mode '" + s + "'");
}

double Instance::gen_cap() const {
  double h = 0.0;
  for (double v : gen_hi) h = std::max(h, v);
  return h;
}

int GridSpec::index_of_reservoir(double v, double tol) const {
  auto it = std::lower_bound(reservoir.begin(), reservoir.end(), v - tol);
  if (it != reservoir.end() && std::fabs(*it - v) <= tol) return int(it - reservoir.begin());
  return -1;
}

int GridSpec::index_of_ramp(double v, double tol) const {
  auto it = std::lower_bound(ramp.begin(), ramp.end(), v - tol);
  if (it != ramp.end() && std::fabs(*it - v) <= tol) return int(it - ramp.begin());
  return -1;
}

namespace {

const json& need(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw Error(ErrorKind::MissingField, key);
  return *it;
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw Error(ErrorKind::MalformedDocument, what + " must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw Error(ErrorKind::MalformedDocument, what + " must be an integer");
  return v.get<int>();
}

std::vector<double> stage_vector(const json& v, int T, const std::string& what) {
  if (v.is_number()) return std::vector<double>(T, v.get<double>());
  if (!v.is_array()) throw Error(ErrorKind::MalformedDocument, what + " must be a number or an array");
  if (int(v.size()) != T)
    throw Error(ErrorKind::MalformedDocument, what + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(T));
  std::vector<double> out;
  for (auto& x : v) out.push_back(as_number(x, what));
  return out;
}

std::vector<double> stage_vector_or(const json& doc, const char* key, int T, double dflt) {
  auto it = doc.find(key);
  if (it == doc.end()) return std::vector<double>(T, dflt);
  return stage_vector(*it, T, key);
}

void stage_bounds(const json& v, int T, const std::string& what, std::vector<double>& lo, std::vector<double>& hi) {
  if (!v.is_array() || v.empty()) throw Error(ErrorKind::MalformedDocument, what + " must be [lo, hi] or a list of pairs");
  lo.clear();
  hi.clear();
  if (v[0].is_number()) {
    if (v.size() != 2) throw Error(ErrorKind::MalformedDocument, what + " must be a pair");
    lo.assign(T, as_number(v[0], what));
    hi.assign(T, as_number(v[1], what));
    return;
  }
  if (int(v.size()) != T) throw Error(ErrorKind::MalformedDocument, what + " needs one pair per stage");
  for (auto& p : v) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::MalformedDocument, what + " entries must be pairs");
    lo.push_back(as_number(p[0], what));
    hi.push_back(as_number(p[1], what));
  }
}

std::vector<CostPiece> piece_list(const json& v, const std::string& what) {
  std::vector<CostPiece> out;
  for (auto& p : v) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::MalformedDocument, what + " pieces must be [a, b]");
    out.push_back({as_number(p[0], what), as_number(p[1], what)});
  }
  return out;
}

std::vector<std::vector<CostPiece>> stage_pieces(const json& doc, const char* key, int T) {
  auto it = doc.find(key);
  if (it == doc.end()) return std::vector<std::vector<CostPiece>>(T, {CostPiece{}});
  const json& v = *it;
  if (!v.is_array()) throw Error(ErrorKind::MalformedDocument, std::string(key) + " must be an array");
  if (v.empty()) return std::vector<std::vector<CostPiece>>(T);
  // depth 2: one list for every stage, depth 3: per-stage lists
  if (v[0].is_array() && !v[0].empty() && v[0][0].is_array()) {
    if (int(v.size()) != T) throw Error(ErrorKind::MalformedDocument, std::string(key) + " needs one list per stage");
    std::vector<std::vector<CostPiece>> out;
    for (auto& s : v) out.push_back(piece_list(s, key));
    return out;
  }
  return std::vector<std::vector<CostPiece>>(T, piece_list(v, key));
}

template <class T>
bool uniform(const std::vector<T>& v) {
  for (auto& x : v)
    if (!(x == v.front())) return false;
  return true;
}

json vec_json(const std::vector<double>& v) {
  if (!v.empty() && uniform(v)) return v.front();
  return json(v);
}

json pieces_json(const std::vector<std::vector<CostPiece>>& pcs) {
  auto one = [](const std::vector<CostPiece>& list) {
    json a = json::array();
    for (auto& p : list) a.push_back({p.a, p.b});
    return a;
  };
  if (!pcs.empty() && uniform(pcs)) return one(pcs.front());
  json a = json::array();
  for (auto& l : pcs) a.push_back(one(l));
  return a;
}

json bounds_json(const std::vector<double>& lo, const std::vector<double>& hi) {
  if (uniform(lo) && uniform(hi) && !lo.empty()) return json::array({lo.front(), hi.front()});
  json a = json::array();
  for (size_t i = 0; i < lo.size(); ++i) a.push_back({lo[i], hi[i]});
  return a;
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-9) out.push_back(x);
  v.swap(out);
}

bool contains(const std::vector<double>& v, double x) {
  for (double y : v)
    if (std::fabs(x - y) <= 1e-9) return true;
  return false;
}

double convex_min(const std::vector<CostPiece>& pcs, double slope_shift, double lo, double hi) {
  auto f = [&](double h) {
    double best = -HUGE_VAL;
    for (auto& p : pcs) best = std::max(best, (p.a + slope_shift) * h + p.b);
    return best;
  };
  double m = std::min(f(lo), f(hi));
  for (size_t i = 0; i < pcs.size(); ++i)
    for (size_t k = i + 1; k < pcs.size(); ++k) {
      double da = pcs[i].a - pcs[k].a;
      if (std::fabs(da) < 1e-15) continue;
      double h = (pcs[k].b - pcs[i].b) / da;
      if (h > lo && h < hi) m = std::min(m, f(h));
    }
  return m;
}

}  // namespace

Instance load_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedDocument, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::MalformedDocument, "top level must be an object");

  Instance in;
  in.T = as_int(need(doc, "horizon"), "horizon");
  if (in.T < 1) throw Error(ErrorKind::MalformedDocument, "horizon must be >= 1");
  const int T = in.T;
  in.price = stage_vector(need(doc, "prices"), T, "prices");
  stage_bounds(need(doc, "gen_bounds"), T, "gen_bounds", in.gen_lo, in.gen_hi);
  stage_bounds(need(doc, "pump_bounds"), T, "pump_bounds", in.pump_lo, in.pump_hi);
  in.ramp = as_number(need(doc, "ramp_limit"), "ramp_limit");
  in.mu = stage_vector(need(doc, "efficiency_gen"), T, "efficiency_gen");
  in.alpha = stage_vector(need(doc, "efficiency_pump"), T, "efficiency_pump");

  const json& res = need(doc, "reservoir");
  if (!res.is_object()) throw Error(ErrorKind::MalformedDocument, "reservoir must be an object");
  in.capacity = as_number(need(res, "capacity"), "reservoir.capacity");
  in.m_init = as_number(need(res, "initial"), "reservoir.initial");
  if (res.contains("terminal") && !res["terminal"].is_null()) in.m_term = as_number(res["terminal"], "reservoir.terminal");

  in.inflow = stage_vector_or(doc, "inflow", T, 0.0);
  in.spill = stage_vector_or(doc, "spillage", T, 0.0);
  if (doc.contains("min_up")) in.min_up = as_int(doc["min_up"], "min_up");
  if (doc.contains("min_down")) in.min_down = as_int(doc["min_down"], "min_down");
  if (doc.contains("initial_counter")) in.tau_init = as_int(doc["initial_counter"], "initial_counter");
  if (doc.contains("terminal_offline")) {
    if (!doc["terminal_offline"].is_boolean()) throw Error(ErrorKind::MalformedDocument, "terminal_offline must be a boolean");
    in.terminal_offline = doc["terminal_offline"].get<bool>();
  }
  in.startup = stage_vector_or(doc, "startup", T, 0.0);
  in.shutdown = stage_vector_or(doc, "shutdown", T, 0.0);
  if (doc.contains("water_value")) in.water_value = as_number(doc["water_value"], "water_value");
  in.gen_pieces = stage_pieces(doc, "gen_cost_pieces", T);
  in.pump_pieces = stage_pieces(doc, "pump_cost_pieces", T);
  in.j_max = doc.contains("j_max") ? as_int(doc["j_max"], "j_max") : T;
  if (doc.contains("hsc")) {
    if (!doc["hsc"].is_boolean()) throw Error(ErrorKind::MalformedDocument, "hsc must be a boolean");
    in.hsc = doc["hsc"].get<bool>();
  }
  if (doc.contains("grids") && !doc["grids"].is_null()) {
    const json& g = doc["grids"];
    auto list = [](const json& v, const char* what) {
      if (!v.is_array()) throw Error(ErrorKind::MalformedDocument, std::string("grids.") + what + " must be an array");
      std::vector<double> out;
      for (auto& x : v) out.push_back(as_number(x, what));
      return out;
    };
    if (g.contains("reservoir")) in.grid_reservoir = list(g["reservoir"], "reservoir");
    if (g.contains("ramp")) in.grid_ramp = list(g["ramp"], "ramp");
  }
  return in;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::MalformedDocument, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_instance(ss.str());
}

std::string serialize_instance(const Instance& in) {
  json doc;
  doc["horizon"] = in.T;
  doc["prices"] = in.price;
  doc["gen_bounds"] = bounds_json(in.gen_lo, in.gen_hi);
  doc["pump_bounds"] = bounds_json(in.pump_lo, in.pump_hi);
  doc["ramp_limit"] = in.ramp;
  doc["efficiency_gen"] = vec_json(in.mu);
  doc["efficiency_pump"] = vec_json(in.alpha);
  json res;
  res["capacity"] = in.capacity;
  res["initial"] = in.m_init;
  if (in.m_term) res["terminal"] = *in.m_term;
  doc["reservoir"] = res;
  doc["terminal_offline"] = in.terminal_offline;
  doc["inflow"] = vec_json(in.inflow);
  doc["spillage"] = vec_json(in.spill);
  doc["min_up"] = in.min_up;
  doc["min_down"] = in.min_down;
  doc["initial_counter"] = in.tau_init;
  doc["startup"] = vec_json(in.startup);
  doc["shutdown"] = vec_json(in.shutdown);
  doc["water_value"] = in.water_value;
  doc["gen_cost_pieces"] = pieces_json(in.gen_pieces);
  doc["pump_cost_pieces"] = pieces_json(in.pump_pieces);
  doc["j_max"] = in.j_max;
  doc["hsc"] = in.hsc;
  if (in.grid_reservoir || in.grid_ramp) {
    json g;
    if (in.grid_reservoir) g["reservoir"] = *in.grid_reservoir;
    if (in.grid_ramp) g["ramp"] = *in.grid_ramp;
    doc["grids"] = g;
  }
  return doc.dump(2);
}

std::vector<std::string> validate(const Instance& in) {
  std::vector<std::string> v;
  auto bad = [&](const std::string& s) { v.push_back(s); };
  if (in.T < 1) {
    bad("horizon must be >= 1");
    return v;
  }
  const size_t T = size_t(in.T);
  auto len = [&](const auto& vec, const char* name) {
    if (vec.size() != T) bad(std::string(name) + " must have one entry per stage");
    return vec.size() == T;
  };
  bool ok = len(in.price, "prices") & len(in.gen_lo, "gen_bounds") & len(in.gen_hi, "gen_bounds") &
            len(in.pump_lo, "pump_bounds") & len(in.pump_hi, "pump_bounds") & len(in.mu, "efficiency_gen") &
            len(in.alpha, "efficiency_pump") & len(in.inflow, "inflow") & len(in.spill, "spillage") &
            len(in.startup, "startup") & len(in.shutdown, "shutdown") & len(in.gen_pieces, "gen_cost_pieces") &
            len(in.pump_pieces, "pump_cost_pieces");
  if (!ok) return v;
  for (size_t t = 0; t < T; ++t) {
    std::string st = " at stage " + std::to_string(t + 1);
    if (!(in.gen_lo[t] >= 0.0)) bad("generation lower bound must be >= 0" + st);
    if (!(in.gen_lo[t] <= in.gen_hi[t])) bad("generation lower bound exceeds upper bound" + st);
    if (!(in.pump_lo[t] >= 0.0)) bad("pumping lower bound must be >= 0" + st);
    if (!(in.pump_lo[t] <= in.pump_hi[t])) bad("pumping lower bound exceeds upper bound" + st);
    if (!(in.mu[t] > 0.0)) bad("generation efficiency must be > 0" + st);
    if (!(in.alpha[t] > 0.0)) bad("pumping efficiency must be > 0" + st);
    if (!(in.startup[t] >= 0.0)) bad("startup cost must be >= 0" + st);
    if (!(in.shutdown[t] >= 0.0)) bad("shutdown cost must be >= 0" + st);
    if (in.gen_pieces[t].empty()) bad("generation cost needs at least one piece" + st);
    if (in.pump_pieces[t].empty()) bad("pumping cost needs at least one piece" + st);
    if (!std::isfinite(in.price[t]) || !std::isfinite(in.inflow[t]) || !std::isfinite(in.spill[t]))
      bad("non-finite stage data" + st);
  }
  if (!(in.ramp > 0.0)) bad("ramp limit must be > 0");
  if (!(in.capacity > 0.0)) bad("capacity must be > 0");
  if (!(in.m_init >= 0.0)) bad("initial level must be >= 0");
  if (in.m_init > in.capacity) bad("initial level exceeds capacity");
  if (in.m_term) {
    if (!(*in.m_term >= 0.0)) bad("terminal level must be >= 0");
    if (*in.m_term > in.capacity) bad("terminal level exceeds capacity");
  }
  if (in.min_up < 1) bad("min-up must be ≥ 1");
  if (in.min_down < 1) bad("min-down must be ≥ 1");
  if (in.j_max < 1) bad("j_max must be ≥ 1");
  if (in.tau_init < 0 || in.tau_init > in.tau_max()) bad("initial counter must lie in [0, tau_max]");
  if (!std::isfinite(in.water_value)) bad("water value must be finite");
  if (in.grid_reservoir) {
    for (double x : *in.grid_reservoir)
      if (x < -1e-9 || x > in.capacity + 1e-9) bad("reservoir grid point outside [0, capacity]");
  }
  if (in.grid_ramp) {
    for (double x : *in.grid_ramp)
      if (x < -1e-9 || x > in.gen_cap() + 1e-9) bad("ramp grid point outside [0, max generation]");
  }
  return v;
}

void require_valid(const Instance& inst) {
  auto v = validate(inst);
  if (v.empty()) return;
  std::string msg;
  for (auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorKind::ValidationFailed, msg);
}

GridSpec build_grid(const Instance& in, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "refinement must be >= 1");
  GridSpec g;
  if (in.grid_reservoir) {
    g.reservoir = *in.grid_reservoir;
    sort_unique(g.reservoir);
    if (!contains(g.reservoir, in.m_init)) throw Error(ErrorKind::GridExcludesBoundary, "reservoir grid omits the initial level");
    if (in.m_term && !contains(g.reservoir, *in.m_term))
      throw Error(ErrorKind::GridExcludesBoundary, "reservoir grid omits the terminal level");
  } else {
    for (int i = 0; i <= 10; ++i) g.reservoir.push_back(in.capacity * i / 10.0);
  }
  if (in.grid_ramp) {
    g.ramp = *in.grid_ramp;
    sort_unique(g.ramp);
    if (!contains(g.ramp, 0.0)) throw Error(ErrorKind::GridExcludesBoundary, "ramp grid omits 0");
  } else {
    double h = in.gen_cap();
    g.ramp = {0.0, h / 3.0, 2.0 * h / 3.0, h};
  }
  if (k > 1) {
    std::vector<double> fine;
    for (size_t i = 0; i + 1 < g.reservoir.size(); ++i) {
      double a = g.reservoir[i], b = g.reservoir[i + 1];
      for (int s = 0; s < k; ++s) fine.push_back(a + (b - a) * s / k);
    }
    fine.push_back(g.reservoir.back());
    g.reservoir.swap(fine);
  }
  g.reservoir.push_back(in.m_init);
  if (in.m_term) g.reservoir.push_back(*in.m_term);
  sort_unique(g.reservoir);
  sort_unique(g.ramp);
  return g;
}

double gen_cost_floor(const Instance& in, int t) {
  double shift = in.water_value * in.mu[t - 1] - in.price[t - 1];
  return std::min(0.0, convex_min(in.gen_pieces[t - 1], shift, 0.0, in.gen_hi[t - 1]));
}

double pump_cost_floor(const Instance& in, int t) {
  double shift = in.price[t - 1] - in.water_value * in.alpha[t - 1];
  return std::min(0.0, convex_min(in.pump_pieces[t - 1], shift, 0.0, in.pump_hi[t - 1]));
}

}  // namespace psh
