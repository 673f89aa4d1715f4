#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "psh/errors.hpp"

namespace psh {

enum class Mode { G = 0, P = 1, SC = 2, O = 3 };

inline bool is_online(Mode m) { return m != Mode::O; }
inline bool generates(Mode m) { return m == Mode::G || m == Mode::SC; }
inline bool pumps(Mode m) { return m == Mode::P || m == Mode::SC; }
const char* mode_name(Mode m);
Mode mode_from_name(const std::string& s);

struct CostPiece {
  double a = 0.0;
  double b = 0.0;
  bool operator==(const CostPiece&) const = default;
};

struct Instance {
  int T = 0;
  std::vector<double> price;
  std::vector<double> gen_lo, gen_hi;
  std::vector<double> pump_lo, pump_hi;
  double ramp = 0.0;
  std::vector<double> mu, alpha;
  double capacity = 0.0;
  double m_init = 0.0;
  std::optional<double> m_term;
  bool terminal_offline = false;
  std::vector<double> inflow, spill;
  int min_up = 1, min_down = 1;
  int tau_init = 0;
  std::vector<double> startup, shutdown;
  double water_value = 0.0;
  // per stage, at least one piece each
  std::vector<std::vector<CostPiece>> gen_pieces, pump_pieces;
  int j_max = 1;
  bool hsc = false;
  std::optional<std::vector<double>> grid_reservoir, grid_ramp;

  // stage accessors, t in 1..T
  double lam(int t) const { return price[t - 1]; }
  double drift(int t) const { return inflow[t - 1] - spill[t - 1]; }
  int tau_max() const { return std::max(min_up - 1, min_down - 1); }
  double gen_cap() const;  // max_t upper generation bound

  bool operator==(const Instance&) const = default;
};

struct GridSpec {
  std::vector<double> reservoir;
  std::vector<double> ramp;
  int index_of_reservoir(double v, double tol = 1e-9) const;
  int index_of_ramp(double v, double tol = 1e-9) const;
};

Instance load_instance(const std::string& text);
Instance load_instance_file(const std::string& path);
std::string serialize_instance(const Instance& inst);

std::vector<std::string> validate(const Instance& inst);
void require_valid(const Instance& inst);

GridSpec build_grid(const Instance& inst, int refinement);

// stage-t lower bound of the generating net cost, used to give epigraph variables finite boxes
double gen_cost_floor(const Instance& inst, int t);
double pump_cost_floor(const Instance& inst, int t);

}  // namespace psh
