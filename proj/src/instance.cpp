#include "odmts/instance.hpp"

#include <map>
#include <set>
#include <string>

namespace odmts {

namespace {
std::string arc_str(const NetworkInstance& inst, const HubArc& a) {
  return inst.stops[a.from].id + "->" + inst.stops[a.to].id;
}
}  // namespace

void validate_instance(const NetworkInstance& inst) {
  const int n = inst.n_stops();
  if (n < 2) throw ValidationError("instance: needs at least two stops");

  std::set<std::string> ids;
  for (const auto& s : inst.stops)
    if (!ids.insert(s.id).second)
      throw ValidationError("instance: duplicate stop id '" + s.id + "'");

  // An empty hub set is a pure-shuttle network; arcs then cannot exist.
  std::set<int> hub_set;
  for (int h : inst.hubs) {
    if (h < 0 || h >= n) throw ValidationError("instance: hub index range");
    if (!hub_set.insert(h).second)
      throw ValidationError("instance: duplicate hub");
  }

  if (inst.geometry_mode()) {
    if (inst.pace <= 0.0)
      throw ValidationError("instance: geometry mode needs a positive pace");
    if (!inst.car_dist_matrix.empty())
      throw ValidationError(
          "instance: car_dist matrix without car_time matrix");
  } else {
    if (inst.car_time_matrix.size() != static_cast<size_t>(n) * n ||
        inst.car_dist_matrix.size() != static_cast<size_t>(n) * n)
      throw ValidationError("instance: car matrices must be n*n");
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (inst.car_time(i, j) < 0 || inst.car_dist(i, j) < 0)
          throw ValidationError("instance: negative car matrix entry");
      }
      if (inst.car_time(i, i) != 0 || inst.car_dist(i, i) != 0)
        throw ValidationError("instance: nonzero car matrix diagonal");
    }
  }

  std::set<std::pair<int, int>> arc_keys;
  std::map<int, int> imbalance;  // hub -> fixed out minus fixed in
  for (const auto& a : inst.arcs) {
    if (!hub_set.count(a.from) || !hub_set.count(a.to))
      throw ValidationError("instance: arc endpoints must be hubs (" +
                            arc_str(inst, a) + ")");
    if (a.from == a.to)
      throw ValidationError("instance: self-loop arc " + arc_str(inst, a));
    if (!arc_keys.insert({a.from, a.to}).second)
      throw ValidationError("instance: duplicate arc " + arc_str(inst, a));
    if (a.time < 0 || a.dist < 0 || a.wait < 0)
      throw ValidationError("instance: negative arc data " +
                            arc_str(inst, a));
    if (a.frequency <= 0)
      throw ValidationError("instance: arc frequency must be positive " +
                            arc_str(inst, a));
    if (a.fixed) {
      imbalance[a.from] += 1;
      imbalance[a.to] -= 1;
    }
  }
  // The backbone design with every undecided arc closed must satisfy the
  // per-hub in/out balance; otherwise the always-feasible base design and
  // the warm start are both infeasible.
  for (const auto& [hub, bal] : imbalance)
    if (bal != 0)
      throw ValidationError("instance: fixed arcs unbalanced at hub '" +
                            inst.stops[hub].id + "'");

  const auto& c = inst.cost;
  if (c.theta < 0.0 || c.theta > 1.0)
    throw ValidationError("instance: theta outside [0,1]");
  if (c.bus_cost_dist < 0 || c.bus_cost_time < 0 || c.shuttle_cost_dist < 0 ||
      c.shuttle_cost_time < 0 || c.fare < 0)
    throw ValidationError("instance: negative cost rate");

  std::set<std::string> trip_ids;
  for (const auto& t : inst.trips) {
    if (!trip_ids.insert(t.id).second)
      throw ValidationError("instance: duplicate trip id '" + t.id + "'");
    if (t.origin < 0 || t.origin >= n || t.destination < 0 ||
        t.destination >= n)
      throw ValidationError("instance: trip '" + t.id + "' stop index range");
    if (t.origin == t.destination)
      throw ValidationError("instance: trip '" + t.id +
                            "' origin equals destination");
    if (t.riders <= 0)
      throw ValidationError("instance: trip '" + t.id +
                            "' needs positive riders");
    if (t.kind == TripKind::Latent) {
      if (t.alpha <= 0 || t.t_current <= 0)
        throw ValidationError("instance: latent trip '" + t.id +
                              "' needs alpha and t_current");
      if (inst.choice == ChoiceKind::DurationAndTransfers &&
          t.max_transfers < 0)
        throw ValidationError("instance: latent trip '" + t.id +
                              "' needs max_transfers under the transfer "
                              "choice model");
    }
  }
}

}  // namespace odmts
