#include "odmts/choice.hpp"

#include <stdexcept>

#include "odmts/common.hpp"

namespace odmts {

ChoiceModel ChoiceModel::duration_only() {
  return ChoiceModel(
      [](const Trip& t, const PathMetrics& m) {
        return leq_tol(m.duration, t.alpha * t.t_current);
      },
      "duration_only", true);
}

ChoiceModel ChoiceModel::duration_and_transfers() {
  return ChoiceModel(
      [](const Trip& t, const PathMetrics& m) {
        if (!leq_tol(m.duration, t.alpha * t.t_current)) return false;
        return t.max_transfers < 0 || m.transfers <= t.max_transfers;
      },
      "duration_and_transfers", true);
}

ChoiceModel ChoiceModel::custom(Fn fn, std::string name) {
  return ChoiceModel(std::move(fn), std::move(name), false);
}

ChoiceModel ChoiceModel::from_kind(ChoiceKind kind) {
  return kind == ChoiceKind::DurationOnly ? duration_only()
                                          : duration_and_transfers();
}

bool evaluate_choice(const ChoiceModel& model, const Trip& trip,
                     const PathMetrics& metrics) {
  if (trip.kind == TripKind::Core)
    throw std::invalid_argument(
        "evaluate_choice: core trips have no adoption decision");
  return model.adopts(trip, metrics);
}

}  // namespace odmts
