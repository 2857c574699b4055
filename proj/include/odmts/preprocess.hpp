#pragma once

#include <optional>
#include <vector>

#include "odmts/choice.hpp"
#include "odmts/costs.hpp"
#include "odmts/trip_graph.hpp"

namespace odmts {

// Each reduction can be toggled independently; any combination leaves the
// optimal design and objective unchanged.
struct PreprocessOptions {
  bool reduce_shuttle_legs = true;  // drop shuttle legs costing more than
                                    // the trip's always-open bound
  bool assign_and_remove = true;    // settle riders whose outcome is fixed
  bool remove_hub_legs = true;      // drop per-trip hub-leg variables that
                                    // no improving path can use
  bool reduce_paths = true;         // keep only paths at or below the bound

  static PreprocessOptions none() { return {false, false, false, false}; }
};

// Per-trip reduction state. The exclusions narrow the trip's variable
// domain in the optimization models; enumerated path sets are filtered only
// by the weighted-cost bound (see reduce_paths), never by the exclusions,
// which keeps the model's path rows complete for every toggle combination.
struct TripReduction {
  double g_fixed = 0.0;  // best weighted cost using fixed arcs only
  double g_full = 0.0;   // best weighted cost with every candidate open

  bool removed = false;         // rider settled before optimization
  bool removed_adopts = false;  // settled as an adopter (latent only)
  double constant = 0.0;        // objective term contributed when settled
  double removed_duration = 0.0;  // duration of the settling path

  // Shuttle legs above this weighted cost are excluded from the trip's
  // variable domain (reduce_shuttle_legs).
  std::optional<double> shuttle_cap;
  // Per candidate arc: false = excluded from this trip's variable domain
  // (remove_hub_legs). Sized |Z|, all true when the step is off.
  std::vector<char> arc_ok;
};

struct PreprocessSummary {
  int riders_removed_adopt = 0;
  int riders_removed_reject = 0;
  int shuttle_legs_excluded = 0;  // summed over trips
  int hub_legs_excluded = 0;      // summed over trips
  double removed_constant = 0.0;  // objective contribution of settled riders
};

struct PreprocessResult {
  PreprocessOptions options;
  std::vector<TripReduction> trips;  // indexed like NetworkInstance::trips
  PreprocessSummary summary;

  // Weighted-cost cutoff for the trip's enumerated path sets, or nullopt
  // when path reduction is off.
  std::optional<double> path_cutoff(int trip) const {
    if (!options.reduce_paths) return std::nullopt;
    return trips[trip].g_fixed;
  }
};

// Computes per-trip bounds and applies the enabled reductions. The choice
// model drives rider settlement; costs must be untransformed.
PreprocessResult preprocess(const NetworkInstance& inst, const CostModel& costs,
                            const ChoiceModel& choice,
                            const PreprocessOptions& options = {});

}  // namespace odmts
