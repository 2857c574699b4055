#include "odmts/path.hpp"

#include <unordered_set>

#include "odmts/common.hpp"

namespace odmts {

PathMetrics path_metrics(const CostModel& costs, const Path& path) {
  PathMetrics m;
  m.transfers = path.transfers();
  const auto& inst = costs.instance();
  for (const auto& leg : path.legs) {
    if (leg.kind == LegKind::Hub) {
      int idx = -1;
      for (int i = 0; i < static_cast<int>(inst.arcs.size()); ++i) {
        if (inst.arcs[i].from == leg.from && inst.arcs[i].to == leg.to) {
          idx = i;
          break;
        }
      }
      if (idx < 0)
        throw ValidationError("path_metrics: hub leg is not a candidate arc");
      m.weighted_cost += costs.tau(inst.arcs[idx]);
      m.duration += costs.hub_duration(inst.arcs[idx]);
    } else {
      m.weighted_cost += costs.gamma(leg.from, leg.to);
      m.duration += costs.shuttle_duration(leg.from, leg.to);
    }
  }
  return m;
}

void validate_path(const NetworkInstance& inst, const Trip& trip,
                   const Path& path) {
  if (path.legs.empty()) throw ValidationError("path: no legs");
  if (path.origin() != trip.origin)
    throw ValidationError("path: does not start at trip origin");
  if (path.destination() != trip.destination)
    throw ValidationError("path: does not end at trip destination");

  std::unordered_set<int> seen;
  seen.insert(path.legs.front().from);
  for (size_t i = 0; i < path.legs.size(); ++i) {
    const Leg& leg = path.legs[i];
    if (i > 0 && path.legs[i - 1].to != leg.from)
      throw ValidationError("path: legs do not chain");
    if (!seen.insert(leg.to).second)
      throw ValidationError("path: vertex visited twice");

    if (leg.kind == LegKind::Hub) {
      bool found = false;
      for (const auto& a : inst.arcs)
        if (a.from == leg.from && a.to == leg.to) { found = true; break; }
      if (!found)
        throw ValidationError("path: hub leg is not a candidate arc");
    } else {
      bool first = i == 0, last = i + 1 == path.legs.size();
      if (!first && !last)
        throw ValidationError("path: shuttle leg in the middle");
      if (first && !last && !inst.is_hub(leg.to))
        throw ValidationError("path: first shuttle must reach a hub");
      if (last && !first && !inst.is_hub(leg.from))
        throw ValidationError("path: last shuttle must leave a hub");
    }
  }

  // A two-leg path with both legs on shuttles is not a valid shape.
  if (path.legs.size() == 2 && path.legs[0].kind == LegKind::Shuttle &&
      path.legs[1].kind == LegKind::Shuttle)
    throw ValidationError("path: two consecutive shuttle legs only");
}

}  // namespace odmts
