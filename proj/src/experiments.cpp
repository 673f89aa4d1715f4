#include "psh/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "psh/event_bnb.hpp"
#include "psh/event_network.hpp"
#include "psh/netflow_lp.hpp"
#include "psh/oracle.hpp"
#include "psh/random_instance.hpp"
#include "psh/time_indexed.hpp"

namespace psh {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* method_name(Method m) {
  switch (m) {
    case Method::Milp: return "milp";
    case Method::Dp: return "dp";
    case Method::GridLp: return "gridlp";
    case Method::Bnb: return "bnb";
    case Method::BnbGrid: return "bnb_grid";
  }
  return "?";
}

Method method_from_name(const std::string& s) {
  for (Method m : {Method::Milp, Method::Dp, Method::GridLp, Method::Bnb, Method::BnbGrid})
    if (s == method_name(m)) return m;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + s + "'");
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Infeasible: return "infeasible";
    case RunStatus::Budget: return "budget";
    case RunStatus::Error: return "error";
  }
  return "?";
}

namespace {

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

RunStatus from_mip(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return RunStatus::Ok;
    case MipStatus::Infeasible: return RunStatus::Infeasible;
    case MipStatus::BudgetExceeded: return RunStatus::Budget;
  }
  return RunStatus::Error;
}

}  // namespace

RunOutcome run_method(const Instance& in, Method m, const SolveOptions& opt) {
  RunOutcome o;
  o.method = m;
  auto t0 = std::chrono::steady_clock::now();
  EventRules rules;
  rules.strict = opt.strict;
  try {
    require_valid(in);
    switch (m) {
      case Method::Milp: {
        MipOptions mo;
        mo.time_budget = opt.time_budget;
        MilpResult r = solve_time_indexed(in, opt.strict, mo);
        o.status = from_mip(r.status);
        o.nodes = r.nodes;
        o.reported = r.objective;
        o.has_schedule = r.has_schedule;
        if (r.has_schedule) o.schedule = r.schedule;
        break;
      }
      case Method::Dp: {
        EventNetwork net = build_grid_network(in, build_grid(in, opt.grid_refine), rules);
        PrecomputeOptions po;
        po.threads = opt.threads;
        po.use_cache = opt.use_cache;
        ArcCosts ac = precompute_arc_costs(net, in, po);
        PathResult p = solve_dp(net, ac, in);
        o.status = RunStatus::Ok;
        o.reported = p.value;
        o.schedule = p.schedule;
        o.has_schedule = true;
        o.nodes = long(net.arcs.size());
        if (ac.from_cache) o.note = "cached arc costs";
        break;
      }
      case Method::GridLp: {
        EventNetwork net = build_grid_network(in, build_grid(in, opt.grid_refine), rules);
        NetworkLpOptions lo;
        lo.dump_path = opt.dump_lp;
        lo.threads = opt.threads;
        lo.max_size = opt.lp_max_size;
        GridLpResult r = solve_network_lp(net, in, lo);
        o.status = RunStatus::Ok;
        o.reported = r.objective;
        o.schedule = r.path.schedule;
        o.has_schedule = true;
        o.nodes = r.iterations;
        o.note = std::string(r.projected ? "projected" : "monolithic") + " lp " + std::to_string(r.vars) + "x" +
                 std::to_string(r.rows);
        break;
      }
      case Method::Bnb:
      case Method::BnbGrid: {
        BnbConfig c;
        c.strict = opt.strict;
        c.threads = opt.threads;
        c.time_budget = opt.time_budget;
        c.log_path = opt.bnb_log;
        if (m == Method::BnbGrid) c.grid = build_grid(in, opt.grid_refine);
        BnbResult r = solve_bnb(in, c);
        o.status = from_mip(r.status);
        o.nodes = r.stats.created;
        o.reported = r.value;
        o.has_schedule = !r.modes.empty();
        if (o.has_schedule) o.schedule = r.schedule;
        break;
      }
    }
  } catch (const Error& e) {
    o.has_schedule = false;
    o.note = e.what();
    o.error = e.kind();
    switch (e.kind()) {
      case ErrorKind::Infeasible:
      case ErrorKind::NoFeasiblePath: o.status = RunStatus::Infeasible; break;
      case ErrorKind::BudgetExceeded: o.status = RunStatus::Budget; break;
      default: o.status = RunStatus::Error;
    }
  } catch (const std::exception& e) {
    o.has_schedule = false;
    o.status = RunStatus::Error;
    o.note = e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.has_schedule) {
    AuditOptions ao;
    ao.shutdown_cap = !opt.strict;
    try {
      o.objective = evaluate_schedule_cost(o.schedule, in, ao);
      if (rel_diff(o.objective, o.reported) > 1e-6) {
        o.status = RunStatus::Error;
        o.note = "audited cost differs from the solver value";
      }
    } catch (const Error& e) {
      o.status = RunStatus::Error;
      o.note = std::string("audit: ") + e.what();
    }
  }
  return o;
}

Instance scale_volatility(const Instance& in, double scale) {
  Instance out = in;
  double mean = std::accumulate(in.price.begin(), in.price.end(), 0.0) / double(in.price.size());
  for (double& p : out.price) p = mean + scale * (p - mean);
  return out;
}

Instance tile_horizon(const Instance& in, int T) {
  if (T < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
  Instance out = in;
  out.T = T;
  auto tile = [&](auto& v) {
    auto src = v;
    v.resize(T);
    for (int t = 0; t < T; ++t) v[t] = src[t % src.size()];
  };
  tile(out.price);
  tile(out.gen_lo);
  tile(out.gen_hi);
  tile(out.pump_lo);
  tile(out.pump_hi);
  tile(out.mu);
  tile(out.alpha);
  tile(out.inflow);
  tile(out.spill);
  tile(out.startup);
  tile(out.shutdown);
  tile(out.gen_pieces);
  tile(out.pump_pieces);
  return out;
}

namespace {

const char* const kKinds[] = {"exactness", "grid_refinement", "volatility", "jmax_sweep",
                              "horizon_scaling", "hsc", "oracle_fuzz"};

std::string resolve(const std::string& p, const std::string& base) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedDocument, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::MalformedDocument, "experiment spec must be an object");
  ExperimentSpec s;
  try {
    if (!doc.contains("kind")) throw Error(ErrorKind::MissingField, "kind");
    s.kind = doc["kind"].get<std::string>();
    if (doc.contains("instance")) s.instance = resolve(doc["instance"].get<std::string>(), base_dir);
    if (doc.contains("methods")) s.methods = doc["methods"].get<std::vector<std::string>>();
    if (doc.contains("refinements")) s.refinements = doc["refinements"].get<std::vector<int>>();
    if (doc.contains("scales")) s.scales = doc["scales"].get<std::vector<double>>();
    if (doc.contains("jmax")) s.jmax = doc["jmax"].get<std::vector<int>>();
    if (doc.contains("horizons")) s.horizons = doc["horizons"].get<std::vector<int>>();
    if (doc.contains("seed")) s.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("count")) s.count = doc["count"].get<int>();
    s.out = resolve(doc.value("out", std::string("results")), base_dir);
    s.threads = doc.value("threads", 1);
    s.workers = doc.value("workers", 1);
    s.time_budget = doc.value("time_budget", 600.0);
    s.strict = doc.value("strict", false);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedDocument, e.what());
  }
  bool known = false;
  for (const char* k : kKinds) known |= s.kind == k;
  if (!known) throw Error(ErrorKind::ValidationFailed, "unknown experiment kind '" + s.kind + "'");
  for (auto& m : s.methods) method_from_name(m);
  for (int v : s.refinements)
    if (v < 1) throw Error(ErrorKind::ValidationFailed, "refinements must be positive");
  for (double v : s.scales)
    if (!(v > 0)) throw Error(ErrorKind::ValidationFailed, "volatility scales must be positive");
  for (int v : s.jmax)
    if (v < 1) throw Error(ErrorKind::ValidationFailed, "j_max values must be positive");
  for (int v : s.horizons)
    if (v < 1) throw Error(ErrorKind::ValidationFailed, "horizons must be positive");
  if (s.count < 1) throw Error(ErrorKind::ValidationFailed, "count must be positive");
  if (s.kind != "oracle_fuzz" && s.instance.empty()) throw Error(ErrorKind::MissingField, "instance");
  return s;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_experiment_spec(ss.str(), fs::path(path).parent_path().string());
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char b[64];
  std::snprintf(b, sizeof b, "%.6f", v);
  return b;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_csv(const std::string& path, const std::vector<std::string>& comments, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  for (auto& c : comments) f << "# " << c << "\n";
  for (size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << "\n";
  for (auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << csv_cell(r[i]);
    f << "\n";
  }
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (int i; (i = next++) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::vector<Method> methods_or(const ExperimentSpec& s, std::vector<Method> dflt) {
  if (s.methods.empty()) return dflt;
  std::vector<Method> out;
  for (auto& m : s.methods) out.push_back(method_from_name(m));
  return out;
}

SolveOptions options_of(const ExperimentSpec& s) {
  SolveOptions o;
  o.strict = s.strict;
  o.threads = s.threads;
  o.time_budget = s.time_budget;
  return o;
}

double value_of(const RunOutcome& r) { return r.has_schedule && r.status != RunStatus::Error ? r.objective : NAN; }

// exact continuous reference: B&B, falling back to the MILP
RunOutcome reference_run(const Instance& in, const SolveOptions& so) {
  RunOutcome r = run_method(in, Method::Bnb, so);
  if (r.status == RunStatus::Ok) return r;
  RunOutcome m = run_method(in, Method::Milp, so);
  return m.status == RunStatus::Ok ? m : r;
}

double gap_pct(double v, double ref) {
  if (std::isnan(v) || std::isnan(ref)) return NAN;
  return 100.0 * (v - ref) / std::max(1.0, std::fabs(ref));
}

std::vector<std::string> outcome_cells(const RunOutcome& r, double ref_value, double ref_seconds) {
  double v = value_of(r);
  return {method_name(r.method),
          run_status_name(r.status),
          num(v),
          num(gap_pct(v, ref_value)),
          num(r.seconds),
          r.has_schedule ? std::to_string(r.schedule.switches()) : "",
          ref_seconds > 0 ? num(100.0 * r.seconds / ref_seconds) : "",
          r.note};
}

const std::vector<std::string> kOutcomeHeader{"method", "status", "objective", "gap_pct",
                                              "wall_s", "switches", "time_ratio_pct", "note"};

std::vector<std::string> with_prefix(std::vector<std::string> prefix, const std::vector<std::string>& rest) {
  prefix.insert(prefix.end(), rest.begin(), rest.end());
  return prefix;
}

// one sweep over instances: reference run plus every method per point
void sweep(const ExperimentSpec& spec, const std::vector<Instance>& points, const std::vector<std::string>& labels,
           const std::vector<Method>& methods, ExperimentReport& rep) {
  SolveOptions so = options_of(spec);
  const int n = int(points.size()), k = int(methods.size());
  bool need_ref = true;
  for (Method m : methods) need_ref &= m != Method::Bnb && m != Method::Milp;
  std::vector<RunOutcome> ref(n);
  std::vector<std::vector<RunOutcome>> out(n, std::vector<RunOutcome>(k));
  parallel_for(n * (k + 1), spec.workers, [&](int idx) {
    int p = idx / (k + 1), q = idx % (k + 1);
    if (q > 0)
      out[p][q - 1] = run_method(points[p], methods[q - 1], so);
    else if (need_ref)
      ref[p] = reference_run(points[p], so);
  });
  for (int p = 0; p < n; ++p) {
    const RunOutcome* r = nullptr;
    if (need_ref) {
      if (ref[p].status == RunStatus::Ok) r = &ref[p];
    } else {
      for (Method want : {Method::Bnb, Method::Milp})
        for (int q = 0; q < k && !r; ++q)
          if (methods[q] == want && out[p][q].status == RunStatus::Ok) r = &out[p][q];
    }
    double rv = r ? r->objective : NAN, rs = r ? r->seconds : 0.0;
    if (need_ref) rep.rows.push_back(with_prefix({labels[p]}, outcome_cells(ref[p], rv, rs)));
    for (int q = 0; q < k; ++q) rep.rows.push_back(with_prefix({labels[p]}, outcome_cells(out[p][q], rv, rs)));
  }
}

}  // namespace

std::string svg_plot(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel) {
  const double W = 720, H = 440, L = 80, R = 160, Tm = 40, B = 60;
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmin > xmax) xmin = 0, xmax = 1, ymin = 1, ymax = 10;
  if (xmax == xmin) xmax = xmin + 1;
  double lo = std::floor(std::log10(ymin)), hi = std::ceil(std::log10(ymax));
  if (hi == lo) hi = lo + 1;
  auto px = [&](double x) { return L + (W - L - R) * (x - xmin) / (xmax - xmin); };
  auto py = [&](double y) { return H - B - (H - Tm - B) * (std::log10(y) - lo) / (hi - lo); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream os;
  char b[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(b, sizeof b, "<text x=\"%g\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">%s</text>\n",
                (W - R + L) / 2, title.c_str());
  os << b;
  std::snprintf(b, sizeof b,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                L, H - B, W - R, H - B, L, Tm, L, H - B);
  os << b;
  for (int e = int(lo); e <= int(hi); ++e) {
    double y = py(std::pow(10.0, e));
    std::snprintf(b, sizeof b,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ddd\"/>"
                  "<text x=\"%g\" y=\"%g\" font-size=\"12\" text-anchor=\"end\">1e%d</text>\n",
                  L, y, W - R, y, L - 6, y + 4, e);
    os << b;
  }
  std::vector<double> xt;
  for (auto& s : series) xt.insert(xt.end(), s.x.begin(), s.x.end());
  std::sort(xt.begin(), xt.end());
  xt.erase(std::unique(xt.begin(), xt.end()), xt.end());
  for (double x : xt) {
    std::snprintf(b, sizeof b, "<text x=\"%g\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\">%g</text>\n", px(x),
                  H - B + 18, x);
    os << b;
  }
  std::snprintf(b, sizeof b, "<text x=\"%g\" y=\"%g\" font-size=\"13\" text-anchor=\"middle\">%s</text>\n",
                (W - R + L) / 2, H - 16, xlabel.c_str());
  os << b;
  std::snprintf(b, sizeof b,
                "<text x=\"18\" y=\"%g\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 %g)\">%s</text>\n",
                (H - B + Tm) / 2, (H - B + Tm) / 2, ylabel.c_str());
  os << b;
  for (size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % 6];
    std::string pts;
    for (size_t i = 0; i < series[k].x.size(); ++i) {
      if (!(series[k].y[i] > 0)) continue;
      std::snprintf(b, sizeof b, "%.2f,%.2f ", px(series[k].x[i]), py(series[k].y[i]));
      pts += b;
      std::snprintf(b, sizeof b, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(series[k].x[i]),
                    py(series[k].y[i]), c);
      os << b;
    }
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    std::snprintf(b, sizeof b,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%g\" y=\"%g\" font-size=\"12\">%s</text>\n",
                  W - R + 16, Tm + 20.0 * k, W - R + 40, Tm + 20.0 * k, c, W - R + 46, Tm + 20.0 * k + 4,
                  series[k].name.c_str());
    os << b;
  }
  os << "</svg>\n";
  return os.str();
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  ExperimentReport rep;
  fs::create_directories(spec.out);
  std::vector<std::string> comments;
  const std::string csv = (fs::path(spec.out) / (spec.kind + ".csv")).string();
  SolveOptions so = options_of(spec);
  Instance base;
  if (!spec.instance.empty()) base = load_instance_file(spec.instance);

  if (spec.kind == "exactness") {
    auto methods = methods_or(spec, {Method::Dp, Method::GridLp, Method::BnbGrid, Method::Bnb, Method::Milp});
    std::vector<RunOutcome> out(methods.size());
    parallel_for(int(methods.size()), spec.workers, [&](int i) { out[i] = run_method(base, methods[i], so); });
    const RunOutcome* r = nullptr;
    for (Method want : {Method::Bnb, Method::Milp})
      for (auto& o : out)
        if (!r && o.method == want && o.status == RunStatus::Ok) r = &o;
    rep.header = kOutcomeHeader;
    for (auto& o : out) rep.rows.push_back(outcome_cells(o, r ? r->objective : NAN, r ? r->seconds : 0.0));
  } else if (spec.kind == "grid_refinement") {
    auto methods = methods_or(spec, {Method::GridLp});
    RunOutcome ref = reference_run(base, so);
    double rv = value_of(ref);
    rep.header = with_prefix({"refinement", "reservoir_points"}, kOutcomeHeader);
    rep.rows.push_back(with_prefix({"continuous", ""}, outcome_cells(ref, rv, ref.seconds)));
    const int n = int(spec.refinements.size()), k = int(methods.size());
    std::vector<RunOutcome> out(n * k);
    parallel_for(n * k, spec.workers, [&](int i) {
      SolveOptions o = so;
      o.grid_refine = spec.refinements[i / k];
      out[i] = run_method(base, methods[i % k], o);
    });
    for (int i = 0; i < n * k; ++i) {
      int g = spec.refinements[i / k];
      rep.rows.push_back(with_prefix({std::to_string(g), std::to_string(build_grid(base, g).reservoir.size())},
                                     outcome_cells(out[i], rv, ref.seconds)));
    }
  } else if (spec.kind == "volatility" || spec.kind == "jmax_sweep") {
    bool vol = spec.kind == "volatility";
    std::vector<Instance> pts;
    std::vector<std::string> labels;
    if (vol) {
      comments.push_back("price_t = mean + scale * (price_t - mean)");
      for (double s : spec.scales) {
        pts.push_back(scale_volatility(base, s));
        labels.push_back(num(s));
      }
    } else {
      for (int j : spec.jmax) {
        Instance in = base;
        in.j_max = j;
        pts.push_back(in);
        labels.push_back(std::to_string(j));
      }
    }
    rep.header = with_prefix({vol ? "scale" : "jmax"}, kOutcomeHeader);
    sweep(spec, pts, labels, methods_or(spec, {Method::GridLp, Method::Bnb, Method::Milp}), rep);
  } else if (spec.kind == "horizon_scaling") {
    comments.push_back("per-stage data tiled from the base horizon; terminal rules re-imposed at the new horizon");
    std::vector<Instance> pts;
    std::vector<std::string> labels;
    for (int T : spec.horizons) {
      pts.push_back(tile_horizon(base, T));
      labels.push_back(std::to_string(T));
    }
    auto methods = methods_or(spec, {Method::GridLp, Method::Bnb, Method::Milp});
    rep.header = with_prefix({"T"}, kOutcomeHeader);
    sweep(spec, pts, labels, methods, rep);
    std::vector<Series> series;
    for (Method m : methods) {
      Series s;
      s.name = method_name(m);
      for (auto& r : rep.rows)
        if (r[1] == s.name && r[2] == "ok") {
          s.x.push_back(std::stod(r[0]));
          s.y.push_back(std::max(1e-3, std::stod(r[5])));
        }
      series.push_back(s);
    }
    std::string svg = (fs::path(spec.out) / "horizon_scaling.svg").string();
    std::ofstream(svg) << svg_plot(series, "runtime vs horizon", "T (stages)", "wall time (s, log scale)");
    rep.files.push_back(svg);
  } else if (spec.kind == "hsc") {
    std::vector<Instance> pts;
    for (bool h : {false, true}) {
      Instance in = base;
      in.hsc = h;
      pts.push_back(in);
    }
    rep.header = with_prefix({"hsc"}, kOutcomeHeader);
    sweep(spec, pts, {"0", "1"}, methods_or(spec, {Method::Milp, Method::Bnb, Method::GridLp, Method::Dp}), rep);
  } else if (spec.kind == "oracle_fuzz") {
    rep.header = {"index", "seed", "T", "jmax", "hsc", "oracle", "milp", "bnb", "dp", "gridlp", "status"};
    const int n = spec.count;
    std::vector<std::vector<std::string>> rows(n);
    parallel_for(n, spec.workers, [&](int i) {
      std::uint64_t seed = spec.seed + std::uint64_t(i);
      std::vector<std::string>& row = rows[i];
      try {
        Instance in = random_instance(seed);
        OracleLimits lim;
        lim.strict = spec.strict;
        double orc = brute_force_oracle(in, lim).value;
        double v[4];
        Method ms[4] = {Method::Milp, Method::Bnb, Method::Dp, Method::GridLp};
        bool ok = true;
        for (int q = 0; q < 4; ++q) {
          RunOutcome r = run_method(in, ms[q], so);
          v[q] = r.status == RunStatus::Ok ? r.objective : r.status == RunStatus::Infeasible ? kInf : NAN;
          if (std::isnan(v[q])) ok = false;
        }
        ok = ok && rel_diff(v[0], orc) <= 1e-6 && rel_diff(v[1], orc) <= 1e-6;
        ok = ok && (std::isinf(v[2]) ? std::isinf(v[3]) : rel_diff(v[3], v[2]) <= 1e-6);
        ok = ok && v[3] >= orc - 1e-6 * std::max(1.0, std::fabs(orc));
        row = {std::to_string(i), std::to_string(seed), std::to_string(in.T), std::to_string(in.j_max),
               std::to_string(int(in.hsc)), num(orc), num(v[0]), num(v[1]), num(v[2]), num(v[3]), ok ? "ok" : "mismatch"};
      } catch (const std::exception& e) {
        row = {std::to_string(i), std::to_string(seed), "", "", "", "", "", "", "", "", std::string("error: ") + e.what()};
      }
    });
    rep.rows = rows;
  }
  write_csv(csv, comments, rep.header, rep.rows);
  rep.files.insert(rep.files.begin(), csv);
  return rep;
}

}  // namespace psh
