#include "odmts/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "odmts/trip_graph.hpp"

namespace odmts {

namespace {

struct Scored {
  Path path;
  PathMetrics m;
};

// Independent re-derivation of one follower answer from an exhaustive
// path listing. Representatives may differ between equally priced ties,
// so only the economics are compared.
void paranoid_check(const NetworkInstance& inst, const CostModel& costs,
                    const ChoiceModel& choice, const Trip& trip,
                    const TripOutcome& got, const std::vector<char>& open,
                    FollowerMode mode) {
  TripGraphOptions gopt;
  gopt.hub_arc_allowed = &open;
  TripGraph g = build_trip_graph(inst, costs, trip, gopt);

  std::vector<Scored> cands;
  double best = std::numeric_limits<double>::infinity();
  for (const Path& p : enumerate_simple_paths(g)) {
    PathMetrics m = graph_metrics(g, p);
    best = std::min(best, m.weighted_cost);
    cands.push_back({p, m});
  }
  if (cands.empty())
    throw Error("paranoid check: trip " + trip.id + " has no itinerary");
  std::erase_if(cands, [&](const Scored& c) {
    return !leq_tol(c.m.weighted_cost, best);
  });
  if (mode == FollowerMode::Lexicographic) {
    double t_best = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) t_best = std::min(t_best, c.m.duration);
    std::erase_if(cands, [&](const Scored& c) {
      return !approx_eq(c.m.duration, t_best);
    });
  }
  std::sort(cands.begin(), cands.end(), [](const Scored& a, const Scored& b) {
    if (a.m.weighted_cost != b.m.weighted_cost)
      return a.m.weighted_cost < b.m.weighted_cost;
    if (a.m.transfers != b.m.transfers) return a.m.transfers < b.m.transfers;
    return a.path < b.path;
  });

  bool served = false, adopted = false;
  double contribution = 0.0;
  if (trip.kind == TripKind::Core) {
    served = true;
    contribution = trip.riders * cands.front().m.weighted_cost;
  } else {
    const Scored* adopting = nullptr;
    const Scored* declining = nullptr;
    for (const auto& c : cands) {
      if (choice.adopts(trip, c.m)) {
        if (!adopting) adopting = &c;
      } else if (!declining) {
        declining = &c;
      }
    }
    double phi_bar = costs.fare_weight();
    adopted = adopting &&
              (!declining ||
               trip.riders * (adopting->m.weighted_cost - phi_bar) < 0.0);
    served = adopted;
    if (adopted)
      contribution = trip.riders * (adopting->m.weighted_cost - phi_bar);
  }

  if (served != got.served || adopted != got.adopted ||
      !rel_close(contribution, got.contribution, 1e-7))
    throw Error("paranoid check: follower disagreement on trip " + trip.id);
}

}  // namespace

OracleResult oracle_solve(const NetworkInstance& inst, const CostModel& costs,
                          const ChoiceModel& choice, const OracleOptions& opt) {
  if (costs.transformed())
    throw ValidationError("the oracle expects plain costs");

  std::vector<size_t> undecided;
  for (size_t k = 0; k < inst.arcs.size(); ++k)
    if (!inst.arcs[k].fixed) undecided.push_back(k);
  if (undecided.size() > static_cast<size_t>(std::max(opt.max_undecided, 0)))
    throw ResourceLimitError(
        "oracle refused: " + std::to_string(undecided.size()) +
        " undecided arcs exceed the cap of " +
        std::to_string(opt.max_undecided));

  // Per-stop out-minus-in surplus of open arcs and count of still
  // undecided incident arcs. A partial design is viable only while
  // |surplus| <= remaining at every stop.
  std::vector<int> surplus(inst.stops.size(), 0);
  std::vector<int> remaining(inst.stops.size(), 0);
  for (const HubArc& a : inst.arcs)
    if (a.fixed) {
      ++surplus[static_cast<size_t>(a.from)];
      --surplus[static_cast<size_t>(a.to)];
    }
  for (size_t k : undecided) {
    ++remaining[static_cast<size_t>(inst.arcs[k].from)];
    ++remaining[static_cast<size_t>(inst.arcs[k].to)];
  }
  auto viable = [&](int s) {
    return std::abs(surplus[static_cast<size_t>(s)]) <=
           remaining[static_cast<size_t>(s)];
  };
  for (size_t s = 0; s < inst.stops.size(); ++s)
    if (!viable(static_cast<int>(s)))
      throw ValidationError(
          "no degree-balanced design exists over the undecided arcs");

  std::vector<char> open(inst.arcs.size(), 0);
  for (size_t k = 0; k < inst.arcs.size(); ++k)
    if (inst.arcs[k].fixed) open[k] = 1;

  const bool lex = opt.mode == FollowerMode::Lexicographic;
  const double scale = lex ? lex_scale_for(inst) : 1.0;

  size_t checked = 0;
  bool have_best = false;
  double best_value = 0.0;
  std::vector<char> best_open;

  auto evaluate = [&]() {
    ++checked;
    double value = 0.0;
    for (size_t k : undecided)
      if (open[k]) value += scale * costs.beta(inst.arcs[k]);
    for (size_t t = 0; t < inst.trips.size(); ++t) {
      TripOutcome o = follower_outcome(inst, costs, choice,
                                       static_cast<int>(t), open, opt.mode);
      if (opt.paranoid)
        paranoid_check(inst, costs, choice, inst.trips[t], o, open, opt.mode);
      value += scale * o.contribution;
      if (lex && o.served)
        value += inst.trips[t].riders * o.metrics.duration;
    }
    if (!have_best || value < best_value) {
      have_best = true;
      best_value = value;
      best_open = open;
    }
  };

  std::function<void(size_t)> walk = [&](size_t i) {
    if (i == undecided.size()) {
      evaluate();
      return;
    }
    size_t k = undecided[i];
    int u = inst.arcs[k].from, v = inst.arcs[k].to;
    --remaining[static_cast<size_t>(u)];
    --remaining[static_cast<size_t>(v)];
    if (viable(u) && viable(v)) walk(i + 1);  // leave the arc closed
    open[k] = 1;
    ++surplus[static_cast<size_t>(u)];
    --surplus[static_cast<size_t>(v)];
    if (viable(u) && viable(v)) walk(i + 1);
    ++surplus[static_cast<size_t>(v)];
    --surplus[static_cast<size_t>(u)];
    open[k] = 0;
    ++remaining[static_cast<size_t>(u)];
    ++remaining[static_cast<size_t>(v)];
  };
  walk(0);

  if (!have_best)
    throw ValidationError(
        "no degree-balanced design exists over the undecided arcs");

  OracleResult res;
  res.open_arcs = best_open;
  res.designs_checked = checked;
  for (size_t k : undecided)
    if (best_open[k]) res.invest_cost += costs.beta(inst.arcs[k]);
  for (size_t t = 0; t < inst.trips.size(); ++t) {
    TripOutcome o = follower_outcome(inst, costs, choice, static_cast<int>(t),
                                     best_open, opt.mode);
    if (inst.trips[t].kind == TripKind::Core)
      res.core_cost += o.contribution;
    else
      res.adoption_value += o.contribution;
    res.trips.push_back(std::move(o));
  }
  res.objective = res.invest_cost + res.core_cost + res.adoption_value;
  res.model_objective = lex ? best_value : res.objective;
  return res;
}

}  // namespace odmts
