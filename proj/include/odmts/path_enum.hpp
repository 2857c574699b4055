#pragma once

#include <vector>

#include "odmts/choice.hpp"
#include "odmts/preprocess.hpp"

namespace odmts {

// Exhaustive builds the complete valid-path set and classifies it. The
// demand-driven method produces only the adopted and rejected-but-cheap
// sets via lazy shortest-path streams; both must agree on those sets.
enum class EnumMethod { Exhaustive, DemandDriven };

// How the demand-driven method finds the adopted set: stream paths by
// duration up to the rider's cutoff, or (transfer-bounded choice models
// only) enumerate paths with few enough legs and filter.
enum class AdoptingSetMode { KShortestDuration, BoundedLegs };

struct ClassifiedPath {
  Path path;
  PathMetrics metrics;
  bool adopts = false;
  bool profitable = false;  // weighted cost strictly under the fare weight
};

// Path sets for one latent trip, sorted by (weighted cost, legs, leg
// sequence) and unique. Index vectors partition the classification.
struct TripPathSets {
  int trip = -1;
  bool removed = false;   // settled by preprocessing; sets stay empty
  bool complete = true;   // false when the demand-driven method skipped the
                          // nonprofitable rejectors; such sets cannot feed
                          // the path-choice formulation
  std::vector<ClassifiedPath> paths;
  std::vector<int> adopting;
  std::vector<int> rejecting_profitable;
  std::vector<int> rejecting_nonprofitable;  // exhaustive only

  // A latent trip needs variables only if it may still adopt.
  bool latent_active() const { return !removed && !adopting.empty(); }
};

struct EnumOptions {
  size_t max_paths_per_trip = 1'000'000;
  AdoptingSetMode adopting_mode = AdoptingSetMode::KShortestDuration;
};

// Enumerates one latent trip. `pre` supplies the trip's settlement state
// and the path-cost cutoff; pass nullptr for raw, unreduced sets. The
// exhaustive method accepts an optional shared hub-sequence cache.
TripPathSets enumerate_trip(const NetworkInstance& inst, const CostModel& costs,
                            const ChoiceModel& choice, int trip_index,
                            EnumMethod method,
                            const PreprocessResult* pre = nullptr,
                            const EnumOptions& opt = {},
                            const HubPathCache* cache = nullptr);

// All latent trips; the result is indexed like NetworkInstance::trips with
// core entries left empty.
std::vector<TripPathSets> enumerate_latent(
    const NetworkInstance& inst, const CostModel& costs,
    const ChoiceModel& choice, EnumMethod method,
    const PreprocessResult* pre = nullptr, const EnumOptions& opt = {});

}  // namespace odmts
