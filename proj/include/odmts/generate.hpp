#pragma once

#include <cstdint>

#include "odmts/instance.hpp"

namespace odmts {

// Synthetic Euclidean instances. Stops are sampled in a square, car travel
// follows straight-line distance at a constant pace, and hub arcs are laid
// out as opposite-direction pairs so every design can balance. The same
// spec and seed always produce the same instance, byte for byte once
// serialized.
struct GenerateSpec {
  int n_stops = 10;
  int n_hubs = 4;
  // Directed arc counts; both must be even because arcs come in opposite
  // pairs. Fixed arcs are a subset of the candidates.
  int n_fixed_arcs = 4;
  int n_candidate_arcs = 12;
  int n_core = 6;
  int n_latent = 4;
  std::uint64_t seed = 1;
  // Output representation: derived-from-coordinates (true) or explicit
  // car matrices computed from the same coordinates (false).
  bool geometry = true;

  double theta = 0.25;
  CostBasis basis = CostBasis::Distance;
  ChoiceKind choice = ChoiceKind::DurationOnly;

  // Latent-rider sampling ranges.
  double alpha_min = 1.2;
  double alpha_max = 2.0;
  double t_current_factor_min = 0.9;  // times the door-to-door car time
  double t_current_factor_max = 1.7;
  int max_transfers_min = 1;  // transfer-bounded choice model only
  int max_transfers_max = 3;
};

// Throws std::invalid_argument when the spec is internally inconsistent
// (hub count above stop count, fixed arcs above candidates, odd arc
// counts, more candidates than hub pairs can host).
NetworkInstance generate_instance(const GenerateSpec& spec);

// A five-stop instance holding one trip whose two cheapest itineraries
// have exactly equal weighted cost but different durations. All data are
// integers or exact binary fractions, so the tie is exact in floating
// point. Used to pin down duration tie-breaking.
NetworkInstance engineered_tie_instance(std::uint64_t seed);

}  // namespace odmts
