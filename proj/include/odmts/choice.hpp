#pragma once

#include <functional>
#include <string>

#include "odmts/instance.hpp"
#include "odmts/path.hpp"

namespace odmts {

// Deterministic adoption predicate: given a latent trip and the metrics of
// a proposed path, decide whether the rider adopts. Pure; no randomness.
class ChoiceModel {
 public:
  using Fn = std::function<bool(const Trip&, const PathMetrics&)>;

  // Adopt iff duration <= alpha * t_current (inclusive, tolerance kEps).
  static ChoiceModel duration_only();
  // Additionally require transfers <= max_transfers.
  static ChoiceModel duration_and_transfers();
  // Arbitrary predicate; not expressible in instance files.
  static ChoiceModel custom(Fn fn, std::string name);

  static ChoiceModel from_kind(ChoiceKind kind);

  bool adopts(const Trip& trip, const PathMetrics& m) const { return fn_(trip, m); }
  const std::string& name() const { return name_; }
  // True for the named models whose structure the demand-driven enumerator
  // exploits (duration cutoff, optional transfer bound).
  bool structured() const { return structured_; }

 private:
  ChoiceModel(Fn fn, std::string name, bool structured)
      : fn_(std::move(fn)), name_(std::move(name)), structured_(structured) {}
  Fn fn_;
  std::string name_;
  bool structured_ = false;
};

// Evaluates the adoption decision for a latent trip.
// Core trips have no choice to make: throws std::invalid_argument.
bool evaluate_choice(const ChoiceModel& model, const Trip& trip,
                     const PathMetrics& metrics);

}  // namespace odmts
