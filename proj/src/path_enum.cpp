#include "odmts/path_enum.hpp"

#include <algorithm>

namespace odmts {

namespace {

struct Classifier {
  const ChoiceModel& choice;
  const Trip& trip;
  double phi_bar;

  ClassifiedPath classify(Path path, const PathMetrics& m) const {
    ClassifiedPath c;
    c.path = std::move(path);
    c.metrics = m;
    c.adopts = choice.adopts(trip, m);
    c.profitable = definitely_less(m.weighted_cost, phi_bar);
    return c;
  }
};

void sort_and_index(TripPathSets& out) {
  std::sort(out.paths.begin(), out.paths.end(),
            [](const ClassifiedPath& a, const ClassifiedPath& b) {
              if (a.metrics.weighted_cost != b.metrics.weighted_cost)
                return a.metrics.weighted_cost < b.metrics.weighted_cost;
              if (a.path.legs.size() != b.path.legs.size())
                return a.path.legs.size() < b.path.legs.size();
              return a.path < b.path;
            });
  for (int i = 0; i < static_cast<int>(out.paths.size()); ++i) {
    const ClassifiedPath& c = out.paths[i];
    if (c.adopts)
      out.adopting.push_back(i);
    else if (c.profitable)
      out.rejecting_profitable.push_back(i);
    else
      out.rejecting_nonprofitable.push_back(i);
  }
}

// Splices cached hub sequences between every hub pair, with the optional
// access shuttles, and keeps the shapes that stay vertex-simple.
void exhaustive_paths(const NetworkInstance& inst, const TripGraph& g,
                      const Trip& trip, const HubPathCache& cache,
                      const std::optional<double>& cutoff,
                      const Classifier& cls, size_t cap, TripPathSets& out) {
  auto admit = [&](Path path) {
    auto m = graph_metrics(g, path);
    if (cutoff && !leq_tol(m.weighted_cost, *cutoff)) return;
    if (out.paths.size() >= cap)
      throw ResourceLimitError("path enumeration: per-trip cap exceeded (" +
                               std::to_string(cap) + ")");
    out.paths.push_back(cls.classify(std::move(path), m));
  };

  admit(Path{{{trip.origin, trip.destination, LegKind::Shuttle}}});

  for (int a : inst.hubs) {
    if (a == trip.destination) continue;
    for (int b : inst.hubs) {
      if (b == a || b == trip.origin) continue;
      for (const auto& seq : cache.sequences(a, b)) {
        bool clean = true;
        for (size_t i = 0; clean && i + 1 < seq.size(); ++i) {
          int mid = inst.arcs[seq[i]].to;
          clean = mid != trip.origin && mid != trip.destination;
        }
        if (!clean) continue;

        Path p;
        if (a != trip.origin)
          p.legs.push_back({trip.origin, a, LegKind::Shuttle});
        for (int k : seq) {
          const HubArc& arc = inst.arcs[k];
          p.legs.push_back({arc.from, arc.to, LegKind::Hub});
        }
        if (b != trip.destination)
          p.legs.push_back({b, trip.destination, LegKind::Shuttle});
        admit(std::move(p));
      }
    }
  }
}

void demand_driven_paths(const TripGraph& g, const Trip& trip,
                         const ChoiceModel& choice,
                         const std::optional<double>& cutoff,
                         const Classifier& cls, const EnumOptions& opt,
                         TripPathSets& out) {
  if (!choice.structured())
    throw ValidationError(
        "demand-driven enumeration needs a structured choice model; got " +
        choice.name());
  const double t_cut = trip.alpha * trip.t_current;
  const double phi_bar = cls.phi_bar;

  auto admit = [&](Path path, const PathMetrics& m) {
    if (cutoff && !leq_tol(m.weighted_cost, *cutoff)) return;
    if (out.paths.size() >= opt.max_paths_per_trip)
      throw ResourceLimitError("path enumeration: per-trip cap exceeded (" +
                               std::to_string(opt.max_paths_per_trip) + ")");
    out.paths.push_back(cls.classify(std::move(path), m));
  };

  // Adopted set: everything the rider would accept.
  if (opt.adopting_mode == AdoptingSetMode::KShortestDuration) {
    KShortestStream stream(g, Channel::Duration);
    while (auto p = stream.next()) {
      if (!leq_tol(p->value, t_cut)) break;  // durations are nondecreasing
      auto m = graph_metrics(g, p->path);
      if (cls.choice.adopts(trip, m)) admit(std::move(p->path), m);
    }
  } else {
    if (trip.max_transfers < 0)
      throw ValidationError(
          "bounded-legs enumeration needs a transfer-bounded trip");
    auto simple = enumerate_simple_paths(g, trip.max_transfers + 1,
                                         opt.max_paths_per_trip);
    for (auto& path : simple) {
      auto m = graph_metrics(g, path);
      if (cls.choice.adopts(trip, m)) admit(std::move(path), m);
    }
  }

  // Rejected-but-profitable set: cheap paths the rider turns down.
  KShortestStream stream(g, Channel::WeightedCost);
  while (auto p = stream.next()) {
    if (!definitely_less(p->value, phi_bar)) break;
    if (cutoff && !leq_tol(p->value, *cutoff)) break;
    auto m = graph_metrics(g, p->path);
    if (!cls.choice.adopts(trip, m)) admit(std::move(p->path), m);
  }
}

}  // namespace

TripPathSets enumerate_trip(const NetworkInstance& inst, const CostModel& costs,
                            const ChoiceModel& choice, int trip_index,
                            EnumMethod method, const PreprocessResult* pre,
                            const EnumOptions& opt, const HubPathCache* cache) {
  const Trip& trip = inst.trips[trip_index];
  if (trip.kind != TripKind::Latent)
    throw std::invalid_argument("enumerate_trip: trip is not latent");

  TripPathSets out;
  out.trip = trip_index;
  if (pre && pre->trips[trip_index].removed) {
    out.removed = true;
    return out;
  }
  std::optional<double> cutoff =
      pre ? pre->path_cutoff(trip_index) : std::nullopt;

  // Streams and splices run on the unrestricted graph: path sets depend
  // only on the cost cutoff, never on per-trip variable exclusions.
  auto g = build_trip_graph(inst, costs, trip);
  Classifier cls{choice, trip, costs.fare_weight()};

  if (method == EnumMethod::Exhaustive) {
    std::optional<HubPathCache> local;
    if (!cache) local.emplace(inst, nullptr, opt.max_paths_per_trip);
    exhaustive_paths(inst, g, trip, cache ? *cache : *local, cutoff, cls,
                     opt.max_paths_per_trip, out);
  } else {
    out.complete = false;  // nonprofitable rejectors are never materialized
    demand_driven_paths(g, trip, choice, cutoff, cls, opt, out);
  }
  sort_and_index(out);
  return out;
}

std::vector<TripPathSets> enumerate_latent(const NetworkInstance& inst,
                                           const CostModel& costs,
                                           const ChoiceModel& choice,
                                           EnumMethod method,
                                           const PreprocessResult* pre,
                                           const EnumOptions& opt) {
  std::vector<TripPathSets> out(inst.trips.size());
  std::optional<HubPathCache> cache;
  if (method == EnumMethod::Exhaustive)
    cache.emplace(inst, nullptr, opt.max_paths_per_trip);
  for (size_t t = 0; t < inst.trips.size(); ++t) {
    out[t].trip = static_cast<int>(t);
    if (inst.trips[t].kind != TripKind::Latent) continue;
    out[t] = enumerate_trip(inst, costs, choice, static_cast<int>(t), method,
                            pre, opt, cache ? &*cache : nullptr);
  }
  return out;
}

}  // namespace odmts
