#pragma once

#include <vector>

#include "psh/instance.hpp"
#include "psh/schedule.hpp"

namespace psh {

struct OracleLimits {
  int T_max = 8;
  long seq_max = 200000;
  bool strict = false;  // drop the ramp-down cap where generation stops
};

struct SequenceValue {
  std::vector<Mode> modes;
  double value = 0.0;  // +inf when the dispatch LP of the sequence is infeasible
};

// every admissible per-stage mode sequence with its exact cost; throws LimitsExceeded
std::vector<SequenceValue> enumerate_sequences(const Instance& inst, const OracleLimits& limits = {});

// cheapest sequence starting with prefix (+inf when none is feasible)
double best_completion(const std::vector<SequenceValue>& table, const std::vector<Mode>& prefix);

struct OracleResult {
  double value = 0.0;
  std::vector<Mode> modes;
  Schedule schedule;
  long sequences = 0;
  long feasible = 0;
};

// minimum over all admissible sequences; throws LimitsExceeded or Infeasible
OracleResult brute_force_oracle(const Instance& inst, const OracleLimits& limits = {});

// optimum of the dispatch LP of one fixed sequence plus its switching costs; +inf when infeasible
double sequence_cost(const Instance& inst, const std::vector<Mode>& modes, bool strict, Schedule* out = nullptr);

// run-length, initial-counter and mode-availability rules of a complete sequence
bool sequence_admissible(const Instance& inst, const std::vector<Mode>& modes);

}  // namespace psh
