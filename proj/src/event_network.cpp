#include "psh/event_network.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <unistd.h>

namespace psh {

namespace {
constexpr double kSnapTol = 1e-9;

std::vector<Mode> modes_of(const Instance& in) {
  if (in.hsc) return {Mode::G, Mode::P, Mode::SC, Mode::O};
  return {Mode::G, Mode::P, Mode::O};
}
}  // namespace

EventState initial_state(const Instance& in, const GridSpec* grid) {
  EventState s;
  s.t = 0;
  s.mode = Mode::O;
  s.m = in.m_init;
  s.h = 0.0;
  s.tau = in.tau_init;
  if (grid) {
    s.mi = grid->index_of_reservoir(in.m_init);
    s.hi = grid->index_of_ramp(0.0);
  }
  return s;
}

int next_counter(const Instance& in, Mode from, Mode to, int tau, int t, int j) {
  if (j > in.T) return 0;
  if (!is_online(from) && is_online(to)) return in.min_up - 1;
  if (is_online(from) && !is_online(to)) return in.min_down - 1;
  return std::max(tau - (j - t), 0);
}

double boundary_cost(Mode from, Mode to, int j, const Instance& in) {
  if (j > in.T) return 0.0;
  if (!is_online(from) && is_online(to)) return in.startup[j - 1];
  if (is_online(from) && !is_online(to)) return in.shutdown[j - 1];
  return 0.0;
}

ExitRule exit_rule(const Instance& in, Mode from, Mode to, int j, const EventRules& rules) {
  if (!generates(from)) return ExitRule::Free;
  if (j > in.T) return in.terminal_offline && !rules.strict ? ExitRule::Cap : ExitRule::Free;
  if (generates(to)) return ExitRule::Pin;
  return rules.strict ? ExitRule::Free : ExitRule::Cap;
}

std::vector<EventAction> enumerate_events(const EventState& s, const Instance& in, const GridSpec* grid,
                                          const EventRules& rules) {
  std::vector<EventAction> out;
  const int T = in.T;
  const auto modes = modes_of(in);
  int zero_h = grid ? grid->index_of_ramp(0.0) : -1;
  for (int j = s.t + 1; j <= T + 1; ++j) {
    if (is_online(s.mode) && j - s.t > in.j_max) break;
    if (j == T + 1) {
      EventAction a;
      a.j = j;
      a.next = Mode::O;
      a.exit = exit_rule(in, s.mode, Mode::O, j, rules);
      if (in.m_term) {
        a.m_free = false;
        a.m_end = *in.m_term;
        if (grid) a.mi = grid->index_of_reservoir(*in.m_term);
      }
      a.hi = zero_h;
      out.push_back(a);
      break;
    }
    for (Mode nx : modes) {
      if (nx == s.mode) continue;
      if (is_online(s.mode) != is_online(nx) && j < s.t + s.tau + 1) continue;
      EventAction a;
      a.j = j;
      a.next = nx;
      a.exit = exit_rule(in, s.mode, nx, j, rules);
      bool carry_h = generates(s.mode) && generates(nx);
      if (!grid) {
        a.m_free = true;
        out.push_back(a);
        continue;
      }
      a.m_free = false;
      std::vector<int> mis;
      if (s.mode == Mode::O) {
        auto m = offline_drift(in, std::max(s.t, 1), j, s.m, kFeasTol);
        if (!m) continue;
        int k = grid->index_of_reservoir(*m, kSnapTol);
        if (k < 0) continue;
        mis.push_back(k);
      } else {
        for (int k = 0; k < int(grid->reservoir.size()); ++k) mis.push_back(k);
      }
      for (int k : mis) {
        if (carry_h) {
          for (int h = 0; h < int(grid->ramp.size()); ++h) {
            EventAction b = a;
            b.mi = k;
            b.m_end = grid->reservoir[k];
            b.hi = h;
            b.h_end = grid->ramp[h];
            out.push_back(b);
          }
        } else {
          EventAction b = a;
          b.mi = k;
          b.m_end = grid->reservoir[k];
          b.hi = zero_h;
          b.h_end = 0.0;
          out.push_back(b);
        }
      }
    }
  }
  return out;
}

EventState transition(const EventState& s, const EventAction& a, const Instance& in) {
  EventState n;
  n.t = a.j;
  n.mode = a.next;
  n.m = a.m_end;
  n.h = a.h_end;
  n.tau = next_counter(in, s.mode, a.next, s.tau, s.t, a.j);
  n.mi = a.mi;
  n.hi = a.hi;
  return n;
}

BlockBoundary block_of(const EventState& s, const EventAction& a, const Instance&) {
  BlockBoundary b;
  b.t = std::max(s.t, 1);
  b.j = a.j;
  b.mode = s.mode;
  b.m_start = s.m;
  b.h_start = s.h;
  if (!a.m_free) b.m_end = a.m_end;
  b.h_end = generates(s.mode) ? a.h_end : 0.0;
  b.exit = a.exit;
  return b;
}

namespace {

using BlockKey = std::tuple<int, int, int, double, double, int, double, int, double>;

BlockKey key_of(const BlockBoundary& b) {
  return {b.t, b.j, int(b.mode), b.m_start, b.h_start, b.m_end ? 1 : 0, b.m_end.value_or(0.0), int(b.exit), b.h_end};
}

using NodeKey = std::tuple<int, int, int, int>;  // mode, mi, hi, tau

}  // namespace

EventNetwork build_grid_network(const Instance& in, const GridSpec& grid, const EventRules& rules) {
  require_valid(in);
  const int T = in.T;
  EventNetwork net;
  net.grid = grid;
  net.rules = rules;
  if (grid.index_of_reservoir(in.m_init) < 0 || grid.index_of_ramp(0.0) < 0)
    throw Error(ErrorKind::GridExcludesBoundary, "grid misses the initial state");

  // forward construction, stage by stage
  std::vector<std::map<NodeKey, int>> table(T + 2);
  std::vector<EventState> raw;
  struct RawArc {
    int from, to;
    EventAction a;
  };
  std::vector<RawArc> raw_arcs;
  EventState src = initial_state(in, &grid);
  raw.push_back(src);
  table[0][{int(src.mode), src.mi, src.hi, src.tau}] = 0;
  EventState sink;
  sink.t = T + 1;
  sink.mode = Mode::O;
  int sink_id = -1;

  for (int t = 0; t <= T; ++t) {
    std::vector<int> ids;
    for (auto& [k, id] : table[t]) ids.push_back(id);
    for (int u : ids) {
      const EventState s = raw[u];
      for (const EventAction& a : enumerate_events(s, in, &grid, rules)) {
        BlockBoundary b = block_of(s, a, in);
        if (!block_may_be_feasible(b, in)) continue;
        int v;
        if (a.j == T + 1) {
          if (sink_id < 0) {
            sink_id = int(raw.size());
            raw.push_back(sink);
          }
          v = sink_id;
        } else {
          EventState n = transition(s, a, in);
          NodeKey k{int(n.mode), n.mi, n.hi, n.tau};
          auto it = table[a.j].find(k);
          if (it == table[a.j].end()) {
            v = int(raw.size());
            raw.push_back(n);
            table[a.j][k] = v;
          } else {
            v = it->second;
          }
        }
        raw_arcs.push_back({u, v, a});
      }
    }
  }
  if (sink_id < 0) throw Error(ErrorKind::NoFeasiblePath, "no event reaches the end of the horizon");

  // keep nodes that reach the sink
  std::vector<std::vector<int>> rout(raw.size());
  for (int k = 0; k < int(raw_arcs.size()); ++k) rout[raw_arcs[k].from].push_back(k);
  std::vector<char> alive(raw.size(), 0);
  alive[sink_id] = 1;
  for (int t = T; t >= 0; --t)
    for (auto& [k, id] : table[t])
      for (int e : rout[id])
        if (alive[raw_arcs[e].to]) {
          alive[id] = 1;
          break;
        }
  if (!alive[0]) throw Error(ErrorKind::NoFeasiblePath, "no event path reaches the end of the horizon");
  // and are reachable from the source
  std::vector<char> reach(raw.size(), 0);
  reach[0] = 1;
  for (int t = 0; t <= T; ++t)
    for (auto& [k, id] : table[t]) {
      if (!reach[id] || !alive[id]) continue;
      for (int e : rout[id])
        if (alive[raw_arcs[e].to]) reach[raw_arcs[e].to] = 1;
    }

  std::vector<int> newid(raw.size(), -1);
  for (int t = 0; t <= T; ++t)
    for (auto& [k, id] : table[t])
      if (alive[id] && reach[id]) {
        newid[id] = int(net.nodes.size());
        net.nodes.push_back(raw[id]);
      }
  newid[sink_id] = int(net.nodes.size());
  net.nodes.push_back(raw[sink_id]);
  net.source = 0;
  net.sink = newid[sink_id];
  net.out.assign(net.nodes.size(), {});
  net.in.assign(net.nodes.size(), {});

  std::map<BlockKey, int> bkeys;
  for (int t = 0; t <= T; ++t)
    for (auto& [k, id] : table[t]) {
      if (newid[id] < 0) continue;
      for (int e : rout[id]) {
        const RawArc& ra = raw_arcs[e];
        if (newid[ra.to] < 0) continue;
        NetArc arc;
        arc.from = newid[ra.from];
        arc.to = newid[ra.to];
        arc.action = ra.a;
        arc.block = block_of(raw[ra.from], ra.a, in);
        arc.gamma = boundary_cost(raw[ra.from].mode, ra.a.next, ra.a.j, in);
        auto bk = key_of(arc.block);
        auto it = bkeys.find(bk);
        if (it == bkeys.end()) {
          arc.key = int(net.blocks.size());
          bkeys[bk] = arc.key;
          net.blocks.push_back(arc.block);
        } else {
          arc.key = it->second;
        }
        int aid = int(net.arcs.size());
        net.arcs.push_back(arc);
        net.out[arc.from].push_back(aid);
        net.in[arc.to].push_back(aid);
      }
    }
  return net;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string blocks_signature(const EventNetwork& net) {
  std::ostringstream os;
  for (auto& b : net.blocks)
    os << b.t << ' ' << b.j << ' ' << int(b.mode) << ' ' << fmt17(b.m_start) << ' ' << fmt17(b.h_start) << ' '
       << (b.m_end ? fmt17(*b.m_end) : "-") << ' ' << int(b.exit) << ' ' << fmt17(b.h_end) << '\n';
  return os.str();
}

}  // namespace

std::string instance_fingerprint(const Instance& in, const GridSpec& grid, const EventRules& rules) {
  std::ostringstream os;
  os << serialize_instance(in) << "\nM";
  for (double v : grid.reservoir) os << ' ' << fmt17(v);
  os << "\nH";
  for (double v : grid.ramp) os << ' ' << fmt17(v);
  os << "\nstrict " << rules.strict << '\n';
  return os.str();
}

ArcCosts precompute_arc_costs(const EventNetwork& net, const Instance& in, const PrecomputeOptions& opt) {
  const int nb = int(net.blocks.size());
  ArcCosts ac;
  ac.feasible.assign(nb, 0);
  ac.cost.assign(nb, 0.0);

  std::string dir = opt.cache_dir;
  if (dir.empty())
    if (const char* e = std::getenv("PSHOPT_CACHE_DIR")) dir = e;
  std::string path;
  std::uint64_t sig = fnv1a(blocks_signature(net));
  if (opt.use_cache && !dir.empty()) {
    char name[64];
    std::snprintf(name, sizeof name, "arcs_%016llx.csv",
                  (unsigned long long)fnv1a(instance_fingerprint(in, net.grid, net.rules)));
    path = (std::filesystem::path(dir) / name).string();
    std::ifstream f(path);
    if (f) {
      std::string line;
      unsigned long long fsig = 0;
      int count = -1;
      if (std::getline(f, line) && std::sscanf(line.c_str(), "# blocks %d signature %llx", &count, &fsig) == 2 &&
          count == nb && fsig == sig) {
        int got = 0;
        while (std::getline(f, line)) {
          int k, feas;
          double c;
          if (std::sscanf(line.c_str(), "%d,%d,%lf", &k, &feas, &c) != 3 || k < 0 || k >= nb) break;
          ac.feasible[k] = char(feas);
          ac.cost[k] = c;
          ++got;
        }
        if (got == nb) {
          ac.from_cache = true;
          return ac;
        }
      }
    }
  }

  std::atomic<int> next{0};
  auto work = [&] {
    while (true) {
      int k = next.fetch_add(1);
      if (k >= nb) break;
      BlockResult r = solve_block(net.blocks[k], in);
      ac.feasible[k] = r.feasible;
      ac.cost[k] = r.feasible ? r.cost : 0.0;
    }
  };
  int nt = std::max(1, opt.threads);
  if (nt == 1 || nb < 64) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  ac.solved = nb;

  if (!path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::string tmp = path + ".tmp" + std::to_string(::getpid());
    std::ofstream f(tmp);
    if (f) {
      char head[96];
      std::snprintf(head, sizeof head, "# blocks %d signature %016llx\n", nb, (unsigned long long)sig);
      f << head;
      for (int k = 0; k < nb; ++k) f << k << ',' << int(ac.feasible[k]) << ',' << fmt17(ac.cost[k]) << '\n';
      f.close();
      std::filesystem::rename(tmp, path, ec);
    }
  }
  return ac;
}

Schedule path_schedule(const EventNetwork& net, const std::vector<int>& arcs, const Instance& in) {
  Schedule s = empty_schedule(in.T);
  s.level[0] = in.m_init;
  for (int e : arcs) {
    const NetArc& a = net.arcs[e];
    const BlockBoundary& b = a.block;
    BlockResult r = solve_block(b, in);
    if (!r.feasible) throw Error(ErrorKind::NumericalFailure, "block on the chosen path is infeasible");
    for (int t = b.t; t < b.j; ++t) {
      int k = t - b.t;
      s.mode[t - 1] = b.mode;
      s.h_out[t - 1] = r.h_out[k];
      s.h_in[t - 1] = r.h_in[k];
      s.level[t] = r.level[k + 1];
    }
  }
  AuditOptions ao;
  ao.shutdown_cap = !net.rules.strict;
  complete_schedule(s, in, ao);
  return s;
}

PathResult solve_dp(const EventNetwork& net, const ArcCosts& costs, const Instance& in) {
  const int n = int(net.nodes.size());
  std::vector<double> V(n, kInf);
  std::vector<int> choice(n, -1);
  V[net.sink] = 0.0;
  for (int u = n - 1; u >= 0; --u) {
    if (u == net.sink) continue;
    double best = kInf;
    int arg = -1;
    for (int e : net.out[u]) {
      const NetArc& a = net.arcs[e];
      if (!costs.feasible[a.key] || V[a.to] == kInf) continue;
      double c = costs.cost[a.key] + a.gamma + V[a.to];
      if (arg < 0 || c < best - 1e-9 * std::max(1.0, std::fabs(best))) {
        best = c;
        arg = e;
      }
    }
    V[u] = best;
    choice[u] = arg;
  }
  if (V[net.source] == kInf) throw Error(ErrorKind::NoFeasiblePath, "sink unreachable with feasible blocks");
  PathResult res;
  res.value = V[net.source];
  for (int u = net.source; u != net.sink; u = net.arcs[choice[u]].to) res.arcs.push_back(choice[u]);
  res.schedule = path_schedule(net, res.arcs, in);
  return res;
}

}  // namespace psh
