#pragma once

#include <cstdint>
#include <vector>

#include "odmts/costs.hpp"
#include "odmts/instance.hpp"

namespace odmts {

enum class LegKind : std::uint8_t { Hub = 0, Shuttle = 1 };

struct Leg {
  int from = -1;
  int to = -1;
  LegKind kind = LegKind::Shuttle;

  friend bool operator==(const Leg& a, const Leg& b) {
    return a.from == b.from && a.to == b.to && a.kind == b.kind;
  }
  friend bool operator!=(const Leg& a, const Leg& b) { return !(a == b); }
  // Canonical order: endpoints first, hub legs before shuttle legs.
  friend bool operator<(const Leg& a, const Leg& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  }
};

struct Path {
  std::vector<Leg> legs;

  int transfers() const { return static_cast<int>(legs.size()) - 1; }
  bool empty() const { return legs.empty(); }
  int origin() const { return legs.front().from; }
  int destination() const { return legs.back().to; }

  std::vector<Leg> hub_legs() const {
    std::vector<Leg> out;
    for (const auto& l : legs)
      if (l.kind == LegKind::Hub) out.push_back(l);
    return out;
  }

  friend bool operator==(const Path& a, const Path& b) {
    return a.legs == b.legs;
  }
  // Lexicographic by leg sequence; used as the last tie-break everywhere.
  friend bool operator<(const Path& a, const Path& b) {
    return std::lexicographical_compare(a.legs.begin(), a.legs.end(),
                                        b.legs.begin(), b.legs.end());
  }
};

struct PathMetrics {
  double weighted_cost = 0.0;  // g, in the cost model's channel
  double duration = 0.0;       // t, always untransformed
  int transfers = 0;           // number of legs minus one
};

// Sums legs first-to-last; every caller that compares costs across paths
// relies on this fixed association order.
PathMetrics path_metrics(const CostModel& costs, const Path& path);

// Shape rules: legs chain origin->destination, vertices are distinct, hub
// legs connect hubs via candidate arcs, shuttle legs appear only first,
// last, or alone, and the two-shuttle-only shape is rejected.
// Throws ValidationError naming the first violated rule.
void validate_path(const NetworkInstance& inst, const Trip& trip,
                   const Path& path);

}  // namespace odmts
