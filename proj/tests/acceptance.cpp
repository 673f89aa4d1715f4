// acceptance checks: one PASS/FAIL line per criterion, details indented below it
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psh/event_bnb.hpp"
#include "psh/experiments.hpp"
#include "psh/netflow_lp.hpp"
#include "psh/oracle.hpp"
#include "psh/random_instance.hpp"
#include "psh/time_indexed.hpp"

using namespace psh;
namespace fs = std::filesystem;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b))); }

double now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct Report {
  int failed = 0;
  void line(int k, bool ok, const std::string& what, double secs) {
    std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", k, what.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failed;
  }
};

void detail(const char* fmt, double a = 0, double b = 0, double c = 0) {
  std::printf("    ");
  std::printf(fmt, a, b, c);
  std::printf("\n");
}

std::string data(const std::string& name) { return std::string(PSH_DATA_DIR) + "/" + name; }

struct Exactness {
  RunOutcome dp, gridlp, bnb_grid, bnb, milp;
};

Exactness exactness(const Instance& in, int threads) {
  SolveOptions so;
  so.threads = threads;
  so.use_cache = false;
  Exactness e;
  e.dp = run_method(in, Method::Dp, so);
  e.gridlp = run_method(in, Method::GridLp, so);
  e.bnb_grid = run_method(in, Method::BnbGrid, so);
  e.bnb = run_method(in, Method::Bnb, so);
  e.milp = run_method(in, Method::Milp, so);
  return e;
}

bool all_ok(const Exactness& e) {
  for (const RunOutcome* r : {&e.dp, &e.gridlp, &e.bnb_grid, &e.bnb, &e.milp})
    if (r->status != RunStatus::Ok) return false;
  return true;
}

struct FuzzRow {
  std::uint64_t seed = 0;
  double oracle = 0, milp = 0, bnb = 0;
  std::vector<Mode> bnb_modes;
  long nodes = 0, violations = 0;
  bool ok = false;
  std::string error;
};

FuzzRow fuzz_one(std::uint64_t seed, int threads) {
  FuzzRow f;
  f.seed = seed;
  try {
    Instance in = random_instance(seed);
    auto table = enumerate_sequences(in);
    f.oracle = brute_force_oracle(in).value;
    MilpResult m = solve_time_indexed(in);
    BnbConfig cfg;
    cfg.threads = threads;
    cfg.record_bounds = true;
    BnbResult b = solve_bnb(in, cfg);
    if (m.status != MipStatus::Optimal || b.status != MipStatus::Optimal) {
      f.error = "solver did not finish";
      return f;
    }
    f.milp = evaluate_schedule_cost(m.schedule, in);
    f.bnb = evaluate_schedule_cost(b.schedule, in);
    f.bnb_modes = b.modes;
    f.nodes = long(b.bounds.size());
    for (auto& nb : b.bounds)
      if (nb.lb > best_completion(table, nb.prefix) + 1e-6 * std::max(1.0, std::fabs(nb.lb))) ++f.violations;
    f.ok = rel(f.oracle, f.milp) <= 1e-6 && rel(f.oracle, f.bnb) <= 1e-6;
  } catch (const std::exception& e) {
    f.error = e.what();
  }
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string out = "acceptance_out";
  int fuzz_count = 50, network_count = 20;
  double bnb_budget = 120.0;
  app.add_option("--out", out, "directory for experiment outputs");
  app.add_option("--fuzz", fuzz_count, "random instances for the oracle comparison");
  app.add_option("--networks", network_count, "random instances for the network LP comparison");
  app.add_option("--bnb-budget", bnb_budget, "B&B seconds per horizon in the scaling sweep");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out);

  Report rep;
  Instance base = load_instance_file(data("baseline.json"));
  Instance hsc = load_instance_file(data("hsc.json"));

  // 1
  double t0 = now();
  Exactness ex1 = exactness(base, 1);
  bool c1 = all_ok(ex1) && rel(ex1.dp.objective, ex1.gridlp.objective) <= 1e-6 &&
            rel(ex1.dp.objective, ex1.bnb_grid.objective) <= 1e-6 && rel(ex1.bnb.objective, ex1.milp.objective) <= 1e-6;
  rep.line(1, c1, "DP = gridLP = grid B&B and B&B = MILP on the baseline", now() - t0);
  detail("dp %.6f  gridlp %.6f  bnb_grid %.6f", ex1.dp.objective, ex1.gridlp.objective, ex1.bnb_grid.objective);
  detail("bnb %.6f  milp %.6f", ex1.bnb.objective, ex1.milp.objective);
  const double continuous = ex1.bnb.status == RunStatus::Ok ? ex1.bnb.objective : ex1.milp.objective;

  // 2
  t0 = now();
  {
    bool ok = true;
    double prev_obj = INFINITY, first_gap = NAN, prev_gap = INFINITY, last_gap = NAN;
    for (int k : {1, 2, 5, 10, 20}) {
      SolveOptions so;
      so.grid_refine = k;
      so.use_cache = false;
      RunOutcome r = run_method(base, Method::GridLp, so);
      if (r.status != RunStatus::Ok) {
        ok = false;
        detail("refinement %.0f failed", k);
        continue;
      }
      double gap = 100.0 * (r.objective - continuous) / std::fabs(continuous);
      detail("refinement %2.0f  objective %.6f  gap %.4f%%", k, r.objective, gap);
      if (r.objective > prev_obj + 1e-9 * std::fabs(prev_obj)) ok = false;
      if (gap > prev_gap + 1e-9) ok = false;
      if (std::isnan(first_gap)) first_gap = gap;
      prev_obj = r.objective;
      prev_gap = last_gap = gap;
    }
    ok = ok && last_gap < first_gap;
    rep.line(2, ok, "grid refinement ladder is monotone and closes the gap", now() - t0);
  }

  // 3
  t0 = now();
  {
    int pass = 0, total = 0;
    auto check_network = [&](const Instance& in, const char* label, double seed) {
      ++total;
      try {
        EventNetwork net = build_grid_network(in, build_grid(in, 1));
        PathResult dp = solve_dp(net, precompute_arc_costs(net, in, {1, false, ""}), in);
        NetworkLpOptions o;
        o.max_size = -1;
        GridLpResult lp = solve_network_lp(net, in, o);
        double audited = evaluate_schedule_cost(lp.path.schedule, in);
        bool ok = rel(lp.objective, dp.value) <= 1e-6 && rel(audited, lp.objective) <= 1e-6;
        if (ok) ++pass;
        else
          std::printf("    %s %.0f: lp %.6f dp %.6f audited %.6f\n", label, seed, lp.objective, dp.value, audited);
      } catch (const std::exception& e) {
        std::printf("    %s %.0f: %s\n", label, seed, e.what());
      }
    };
    check_network(base, "baseline", 0);
    RandomOptions ro;
    ro.require_grid_path = true;
    for (int k = 0; k < network_count; ++k) {
      std::uint64_t seed = 2000 + k;
      Instance in = random_instance(seed, ro);
      check_network(in, "seed", double(seed));
    }
    detail("%.0f of %.0f instances agree", pass, total);
    rep.line(3, pass == total, "network LP = DP and extracted path cost = LP optimum", now() - t0);
  }

  // 4 and 5
  t0 = now();
  std::vector<FuzzRow> fuzz1;
  long nodes = 0, violations = 0;
  int agree = 0;
  for (int k = 0; k < fuzz_count; ++k) {
    FuzzRow f = fuzz_one(1000 + k, 1);
    if (f.ok) ++agree;
    else
      std::printf("    seed %llu: oracle %.6f milp %.6f bnb %.6f %s\n", (unsigned long long)f.seed, f.oracle, f.milp,
                  f.bnb, f.error.c_str());
    nodes += f.nodes;
    violations += f.violations;
    fuzz1.push_back(f);
  }
  double t4 = now() - t0;
  detail("%.0f of %.0f random instances agree", agree, fuzz_count);
  rep.line(4, agree == fuzz_count, "oracle = MILP = B&B on random instances", t4);
  detail("%.0f node bounds checked, %.0f violations", nodes, violations);
  rep.line(5, violations == 0 && nodes > 0, "every B&B node bound is at most the best completion", t4);

  // 6
  t0 = now();
  {
    SolveOptions so;
    so.use_cache = false;
    RunOutcome b = run_method(hsc, Method::Bnb, so), m = run_method(hsc, Method::Milp, so),
               g = run_method(hsc, Method::GridLp, so);
    bool ok = b.status == RunStatus::Ok && m.status == RunStatus::Ok && g.status == RunStatus::Ok &&
              rel(b.objective, m.objective) <= 1e-6 && g.objective >= b.objective - 1e-6 * std::fabs(b.objective);
    detail("bnb %.6f  milp %.6f  gridlp %.6f", b.objective, m.objective, g.objective);
    rep.line(6, ok, "short-circuit B&B = MILP and gridLP is no better", now() - t0);
  }

  // 7
  t0 = now();
  {
    ExperimentSpec spec;
    spec.kind = "horizon_scaling";
    spec.instance = data("baseline.json");
    spec.methods = {"gridlp", "bnb"};
    spec.horizons = {24, 48, 96, 168, 240};
    spec.time_budget = bnb_budget;
    spec.out = out;
    ExperimentReport r = run_experiment(spec);
    double grid_time = 0;
    bool complete = true;
    double gap24 = NAN;
    bool stable = true;
    for (auto& row : r.rows) {
      // T, method, status, objective, gap_pct, wall_s, ...
      if (row[1] != "gridlp") continue;
      int T = std::stoi(row[0]);
      if (row[2] != "ok") complete = false;
      grid_time += row[5].empty() ? 0 : std::stod(row[5]);
      if (row[4].empty()) {
        detail("T %3.0f  gridlp %.6f  no B&B reference", T, std::stod(row[3]));
        continue;
      }
      double gap = std::stod(row[4]);
      detail("T %3.0f  gap %.4f%%  gridlp %.2f s", T, gap, std::stod(row[5]));
      if (T == 24) gap24 = gap;
      else if (!std::isnan(gap24) && gap > gap24 + 2.0) stable = false;
    }
    bool files = fs::exists(fs::path(out) / "horizon_scaling.csv") && fs::exists(fs::path(out) / "horizon_scaling.svg");
    bool ok = complete && grid_time < 600 && files && !std::isnan(gap24) && stable;
    detail("gridlp total %.1f s", grid_time);
    rep.line(7, ok, "horizon scaling sweep completes with a stable gap", now() - t0);
  }

  // 8
  t0 = now();
  {
    Exactness ex8 = exactness(base, 8);
    bool ok = all_ok(ex8);
    const RunOutcome* a[] = {&ex1.dp, &ex1.gridlp, &ex1.bnb_grid, &ex1.bnb, &ex1.milp};
    const RunOutcome* b[] = {&ex8.dp, &ex8.gridlp, &ex8.bnb_grid, &ex8.bnb, &ex8.milp};
    for (int i = 0; i < 5; ++i) {
      bool same = std::fabs(a[i]->objective - b[i]->objective) <= 1e-9 * std::max(1.0, std::fabs(a[i]->objective)) &&
                  a[i]->schedule.same_dispatch(b[i]->schedule, 1e-9);
      if (!same) {
        ok = false;
        std::printf("    %s differs between 1 and 8 threads\n", method_name(a[i]->method));
      }
    }
    int same_fuzz = 0;
    for (int k = 0; k < fuzz_count; ++k) {
      FuzzRow f = fuzz_one(1000 + k, 8);
      if (std::fabs(f.bnb - fuzz1[k].bnb) <= 1e-9 * std::max(1.0, std::fabs(f.bnb)) && f.bnb_modes == fuzz1[k].bnb_modes &&
          f.error == fuzz1[k].error)
        ++same_fuzz;
    }
    detail("%.0f of %.0f random B&B runs identical", same_fuzz, fuzz_count);
    ok = ok && same_fuzz == fuzz_count;
    rep.line(8, ok, "1 and 8 threads give identical objectives and schedules", now() - t0);
  }

  std::printf("%d of 8 criteria passed\n", 8 - rep.failed);
  return rep.failed == 0 ? 0 : 1;
}
