#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "odmts/costs.hpp"
#include "odmts/instance.hpp"
#include "odmts/path.hpp"

namespace odmts {

// One directed arc of a per-trip routing graph. Hub arcs reference the
// instance's candidate arc; shuttle arcs are ad hoc. Both weight channels
// are cached so the same graph serves cost and duration queries.
struct TripArc {
  int from = -1;  // stop index
  int to = -1;
  LegKind kind = LegKind::Shuttle;
  int hub_arc_index = -1;  // into NetworkInstance::arcs, -1 for shuttles
  double weighted_cost = 0.0;
  double duration = 0.0;

  Leg leg() const { return Leg{from, to, kind}; }
};

enum class Channel { WeightedCost, Duration };

// Vertices are {origin, destination} plus every hub. Arcs: the candidate
// hub arcs (optionally restricted), the direct shuttle, first-mile
// shuttles origin->hub and last-mile shuttles hub->destination (optionally
// filtered). Parallel hub/shuttle arcs between the same stops may coexist;
// leg kind disambiguates.
struct TripGraph {
  int origin = -1;
  int destination = -1;
  std::vector<int> vertices;                // stop indices
  std::vector<TripArc> arcs;                // canonical order
  std::vector<std::vector<int>> out_arcs;   // per local vertex, arc indices
  std::vector<int> vertex_of_stop;          // stop index -> local id, -1

  int local(int stop) const { return vertex_of_stop[stop]; }
  size_t arc_count() const { return arcs.size(); }

  double arc_weight(const TripArc& a, Channel c) const {
    return c == Channel::WeightedCost ? a.weighted_cost : a.duration;
  }
};

struct TripGraphOptions {
  bool fixed_arcs_only = false;  // hub arcs restricted to the backbone
  // Per-candidate-arc availability, size |Z|; null = all available.
  const std::vector<char>* hub_arc_allowed = nullptr;
  // Shuttle legs (direct one included) with weighted cost strictly above
  // this are dropped. Callers pass a value no smaller than some feasible
  // path cost, which keeps the graph connected.
  std::optional<double> shuttle_cost_cap;
};

TripGraph build_trip_graph(const NetworkInstance& inst, const CostModel& costs,
                           const Trip& trip, const TripGraphOptions& opt = {});

// Deterministic composite path order: channel value, then fewer legs, then
// lexicographic leg sequence. Strict weak ordering; value compares exact.
struct PathOrder {
  double value;
  Path path;
  bool operator<(const PathOrder& o) const {
    if (value != o.value) return value < o.value;
    if (path.legs.size() != o.path.legs.size())
      return path.legs.size() < o.path.legs.size();
    return path < o.path;
  }
};

// Shortest valid path under the channel, or nullopt when the destination
// is unreachable. Ties resolve by the composite order above. The
// first-then-last-shuttle shape rule is enforced during the search.
std::optional<PathOrder> shortest_path(const TripGraph& g, Channel channel);

// Lazy loopless k-shortest stream in composite order. next() yields paths
// with nondecreasing channel value; the caller stops via its own cutoff.
class KShortestStream {
 public:
  KShortestStream(const TripGraph& g, Channel channel);
  ~KShortestStream();
  KShortestStream(KShortestStream&&) noexcept;
  std::optional<PathOrder> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Both-channel metrics summed from the graph's cached arc weights, in the
// same first-to-last order as path_metrics (bit-identical results, no
// instance scans). Throws ValidationError if a leg is not a graph arc.
PathMetrics graph_metrics(const TripGraph& g, const Path& path);

// Per-vertex bound helpers for arc-exclusion tests. prefix_costs[v] is the
// least channel value of a valid path start origin -> v (either arrival
// state); suffix_costs[v] is the least value of a valid continuation
// v -> destination entered after a hub leg (hub legs plus one last-mile
// shuttle). Unreachable entries are +infinity.
std::vector<double> prefix_costs(const TripGraph& g, Channel channel);
std::vector<double> suffix_costs(const TripGraph& g, Channel channel);

// All valid simple origin->destination paths, DFS order with the canonical
// adjacency order (deterministic). max_legs < 0 means unbounded. Throws
// ResourceLimitError when more than cap paths would be produced.
std::vector<Path> enumerate_simple_paths(const TripGraph& g, int max_legs = -1,
                                         size_t cap = 1'000'000);

// Simple hub-leg sequences over (H, Z), grouped by endpoint pair; computed
// once and spliced per trip by the exhaustive enumerator. kept[i] gates
// candidate arc i; null = all. Throws ResourceLimitError beyond cap.
class HubPathCache {
 public:
  HubPathCache(const NetworkInstance& inst,
               const std::vector<char>* arc_allowed = nullptr,
               size_t cap = 1'000'000);

  // Hub-leg sequences from hub a to hub b (stop indices). Sequences are in
  // DFS order; each entry lists candidate-arc indices.
  const std::vector<std::vector<int>>& sequences(int a, int b) const;
  size_t total_sequences() const { return total_; }

 private:
  int n_ = 0;
  std::vector<int> hub_pos_;  // stop -> hub ordinal
  // [a][b] -> list of sequences, each a list of candidate-arc indices.
  std::vector<std::vector<std::vector<std::vector<int>>>> by_pair_;
  std::vector<std::vector<int>> empty_;
  size_t total_ = 0;
};

}  // namespace odmts
