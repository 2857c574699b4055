#include "odmts/preprocess.hpp"

#include <cmath>
#include <limits>

#include "odmts/path.hpp"

namespace odmts {

namespace {

// Settlement for one latent rider whose served cost cannot move: the bound
// with fixed arcs alone already equals the bound with everything open, so
// every design's minimum-cost tie set lies inside the full graph's. Two
// design-invariant outcomes follow:
//   - If every minimum over the full graph is rejected, no design changes
//     the rider's mind; remove at zero.
//   - If an always-open minimum path realizes the tie set's shortest
//     duration, adopts, and runs under the fare weight, that offer stays
//     both attainable and unbeatable (in cost, then duration) under every
//     design, so the rider counts as an adopter at a constant value. The
//     duration condition keeps the removal exact for duration-aware
//     follower tie-breaking; without it an open arc could supply an
//     equally cheap but faster itinerary and shift the folded objective.
// Anything else, including overgrown tie sets, stays in the model.
void settle_rider(const NetworkInstance& inst, const CostModel& costs,
                  const ChoiceModel& choice, const Trip& trip,
                  TripReduction& red) {
  if (!approx_eq(red.g_fixed, red.g_full)) return;
  constexpr size_t kTieCap = 4096;

  auto gfull = build_trip_graph(inst, costs, trip);
  KShortestStream full_stream(gfull, Channel::WeightedCost);
  double t_best = std::numeric_limits<double>::infinity();
  bool any_full_adopts = false;
  size_t ties = 0;
  while (auto p = full_stream.next()) {
    if (!leq_tol(p->value, red.g_full)) break;
    if (++ties > kTieCap) return;
    auto m = graph_metrics(gfull, p->path);
    t_best = std::min(t_best, m.duration);
    if (choice.adopts(trip, m)) any_full_adopts = true;
  }

  if (!any_full_adopts) {
    red.removed = true;  // every attainable minimum is rejected
    return;
  }

  double phi_bar = costs.fare_weight();
  TripGraphOptions fixed_only;
  fixed_only.fixed_arcs_only = true;
  auto gf = build_trip_graph(inst, costs, trip, fixed_only);
  KShortestStream fixed_stream(gf, Channel::WeightedCost);
  while (auto p = fixed_stream.next()) {
    if (!leq_tol(p->value, red.g_fixed)) break;
    auto m = graph_metrics(gf, p->path);
    if (!approx_eq(m.duration, t_best)) continue;
    if (choice.adopts(trip, m) && definitely_less(m.weighted_cost, phi_bar)) {
      red.removed = true;
      red.removed_adopts = true;
      red.constant = trip.riders * (red.g_fixed - phi_bar);
      red.removed_duration = m.duration;
      return;
    }
  }
}

}  // namespace

PreprocessResult preprocess(const NetworkInstance& inst, const CostModel& costs,
                            const ChoiceModel& choice,
                            const PreprocessOptions& options) {
  PreprocessResult res;
  res.options = options;
  res.trips.resize(inst.trips.size());

  for (size_t t = 0; t < inst.trips.size(); ++t) {
    const Trip& trip = inst.trips[t];
    TripReduction& red = res.trips[t];
    red.arc_ok.assign(inst.arcs.size(), 1);

    TripGraphOptions fixed_only;
    fixed_only.fixed_arcs_only = true;
    auto gf = build_trip_graph(inst, costs, trip, fixed_only);
    auto best_fixed = shortest_path(gf, Channel::WeightedCost);
    red.g_fixed = best_fixed->value;  // the direct shuttle always exists

    auto gfull = build_trip_graph(inst, costs, trip);
    auto best_full = shortest_path(gfull, Channel::WeightedCost);
    red.g_full = best_full->value;

    if (options.assign_and_remove && trip.kind == TripKind::Latent) {
      settle_rider(inst, costs, choice, trip, red);
      if (red.removed) {
        res.summary.removed_constant += red.constant;
        (red.removed_adopts ? res.summary.riders_removed_adopt
                            : res.summary.riders_removed_reject)++;
        continue;  // no variables for this trip, masks are moot
      }
    }

    if (options.reduce_shuttle_legs) {
      red.shuttle_cap = red.g_fixed;
      for (const auto& a : gfull.arcs)
        if (a.kind == LegKind::Shuttle &&
            !leq_tol(a.weighted_cost, red.g_fixed))
          res.summary.shuttle_legs_excluded++;
    }

    if (options.remove_hub_legs) {
      auto prefix = prefix_costs(gfull, Channel::WeightedCost);
      auto suffix = suffix_costs(gfull, Channel::WeightedCost);
      for (size_t k = 0; k < inst.arcs.size(); ++k) {
        const HubArc& a = inst.arcs[k];
        double tau = costs.tau(a);
        double via = prefix[gfull.local(a.from)] + tau;
        double out = tau + suffix[gfull.local(a.to)];
        if (!leq_tol(via, red.g_fixed) || !leq_tol(out, red.g_fixed)) {
          red.arc_ok[k] = 0;
          res.summary.hub_legs_excluded++;
        }
      }
    }
  }
  return res;
}

}  // namespace odmts
