#pragma once

#include <cstdint>

#include "psh/instance.hpp"

namespace psh {

struct RandomOptions {
  int T_min = 2, T_max = 6;
  int jmax_max = 3;
  double hsc_probability = 0.25;
  // re-roll until the default grid (refinement 1) admits a schedule too
  bool require_grid_path = false;
  int max_rerolls = 1000;
};

// seeded instance with feasibility checked by enumeration; infeasible draws move on to the next seed offset
Instance random_instance(std::uint64_t seed, const RandomOptions& opt = {});

// the raw draw for one seed, no feasibility check
Instance draw_instance(std::uint64_t seed, const RandomOptions& opt = {});

}  // namespace psh
