#pragma once

#include "odmts/solve.hpp"

namespace odmts {

struct OracleOptions {
  FollowerMode mode = FollowerMode::Generalized;
  // Designs grow as 2^(undecided arcs); refuse beyond this many arcs.
  int max_undecided = 16;
  // Re-derive every follower answer by exhaustive path enumeration and
  // throw on any disagreement. Slow; meant for tests.
  bool paranoid = false;
};

struct OracleResult {
  std::vector<char> open_arcs;
  double objective = 0.0;        // plain units
  double model_objective = 0.0;  // ranking units: duration-folded under the
                                 // lexicographic mode, plain otherwise
  double invest_cost = 0.0;
  double core_cost = 0.0;
  double adoption_value = 0.0;
  std::vector<TripOutcome> trips;
  size_t designs_checked = 0;    // degree-balanced designs evaluated
};

// Ground truth by exhaustion: walks every degree-balanced design over the
// undecided arcs (depth-first, pruning branches that can no longer
// balance) and prices each rider with an exact follower solve on the raw
// instance. No preprocessing, no MIP; this is the reference the
// formulations are validated against. Ties between designs keep the first
// one in enumeration order.
OracleResult oracle_solve(const NetworkInstance& inst, const CostModel& costs,
                          const ChoiceModel& choice,
                          const OracleOptions& opt = {});

}  // namespace odmts
