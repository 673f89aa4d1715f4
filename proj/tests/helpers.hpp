#pragma once

#include <string>

#include "psh/instance.hpp"

namespace testdata {

inline std::string data_path(const std::string& name) { return std::string(PSH_DATA_DIR) + "/" + name; }

inline psh::Instance baseline() { return psh::load_instance_file(data_path("baseline.json")); }
inline psh::Instance hsc_instance() { return psh::load_instance_file(data_path("hsc.json")); }

// two stages, prices 100 and 200, free terminal level, no costs
inline psh::Instance toy() {
  return psh::load_instance(R"({
    "horizon": 2, "prices": [100, 200], "gen_bounds": [40, 130], "pump_bounds": [0, 130],
    "ramp_limit": 50, "efficiency_gen": 1.0, "efficiency_pump": 0.75,
    "reservoir": {"capacity": 900, "initial": 450}, "min_up": 1, "min_down": 1,
    "grids": {"reservoir": [0, 100, 200, 300, 400, 450, 500, 600, 700, 800, 900], "ramp": [0, 50, 100]}
  })");
}

inline psh::Instance zero_prices(int T) {
  std::string doc = R"({"horizon": )" + std::to_string(T) + R"(, "prices": 0, "gen_bounds": [40, 130],
    "pump_bounds": [0, 130], "ramp_limit": 50, "efficiency_gen": 1.0, "efficiency_pump": 0.75,
    "reservoir": {"capacity": 900, "initial": 450}, "min_up": 1, "min_down": 1})";
  return psh::load_instance(doc);
}

inline bool near(double a, double b, double rel = 1e-6) {
  double s = std::max(1.0, std::max(a < 0 ? -a : a, b < 0 ? -b : b));
  double d = a - b;
  return (d < 0 ? -d : d) <= rel * s;
}

}  // namespace testdata
