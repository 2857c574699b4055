#include "odmts/trip_graph.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

namespace odmts {

namespace {

// Search states per vertex. Start: at the origin, nothing taken yet.
// AfterShuttle: just arrived on a first-mile shuttle, a hub leg must
// follow. Normal: anything but a first-mile shuttle may follow.
enum Flag : int { kNormal = 0, kAfterShuttle = 1, kStart = 2 };

struct Label {
  double value = 0.0;
  int legs = 0;
  std::vector<int> seq;  // arc indices; canonical order equals index order

  bool better_than(const Label& o) const {
    if (value != o.value) return value < o.value;
    if (legs != o.legs) return legs < o.legs;
    return seq < o.seq;
  }
};

struct QueueItem {
  Label label;
  int state;
  bool operator>(const QueueItem& o) const { return o.label.better_than(label); }
};

struct SearchLimits {
  const std::vector<char>* banned_vertex = nullptr;  // by local vertex
  const std::vector<char>* banned_arc = nullptr;     // by arc index
};

// Composite-order Dijkstra over (vertex, flag) states. The composite key
// (value, legs, lex sequence) is prefix-monotone, so label-setting search
// stays optimal. State paths are vertex-simple except for one pattern: a
// first-mile shuttle's landing hub can be re-entered later by hub legs in
// the other flag. Searches that may take a first-mile shuttle must handle
// that case themselves (see loopless_from_origin).
std::optional<Label> dijkstra(const TripGraph& g, Channel channel,
                              int start_vertex, int start_flag,
                              const SearchLimits& lim) {
  const int n_states = static_cast<int>(g.vertices.size()) * 3;
  std::vector<Label> best(n_states);
  std::vector<char> has(n_states, 0), done(n_states, 0);
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> pq;

  const int start_local = g.local(start_vertex);
  const int de_local = g.local(g.destination);
  if (start_local < 0) return std::nullopt;
  const int s0 = start_local * 3 + start_flag;
  best[s0] = Label{};
  has[s0] = 1;
  pq.push({Label{}, s0});

  while (!pq.empty()) {
    auto [label, state] = pq.top();
    pq.pop();
    if (done[state]) continue;
    if (has[state] && best[state].better_than(label)) continue;
    done[state] = 1;
    const int v = state / 3;
    const int flag = state % 3;
    if (v == de_local) return label;

    for (int ai : g.out_arcs[v]) {
      if (lim.banned_arc && (*lim.banned_arc)[ai]) continue;
      const TripArc& a = g.arcs[ai];
      int next_flag;
      if (a.kind == LegKind::Hub) {
        next_flag = kNormal;
      } else if (a.to == g.destination) {
        if (flag == kAfterShuttle) continue;  // two-shuttle-only shape
        next_flag = kNormal;
      } else {
        if (flag != kStart) continue;  // first-mile shuttle only from start
        next_flag = kAfterShuttle;
      }
      const int w = g.local(a.to);
      if (lim.banned_vertex && (*lim.banned_vertex)[w]) continue;
      const int ns = w * 3 + next_flag;
      if (done[ns]) continue;
      Label cand;
      cand.value = label.value + g.arc_weight(a, channel);
      cand.legs = label.legs + 1;
      cand.seq = label.seq;
      cand.seq.push_back(ai);
      if (!has[ns] || cand.better_than(best[ns])) {
        best[ns] = cand;
        has[ns] = 1;
        pq.push({best[ns], ns});
      }
    }
  }
  return std::nullopt;
}

Path path_from_seq(const TripGraph& g, const std::vector<int>& seq) {
  Path p;
  p.legs.reserve(seq.size());
  for (int ai : seq) p.legs.push_back(g.arcs[ai].leg());
  return p;
}

// Channel value summed over legs first-to-last; the one association order
// used everywhere so equal paths always produce bit-equal values.
double canonical_value(const TripGraph& g, const std::vector<int>& seq,
                       Channel channel) {
  double v = 0.0;
  for (int ai : seq) v += g.arc_weight(g.arcs[ai], channel);
  return v;
}

int start_flag_for_root(const std::vector<int>& root, const TripGraph& g) {
  if (root.empty()) return kStart;
  const TripArc& last = g.arcs[root.back()];
  return last.kind == LegKind::Shuttle && last.to != g.destination
             ? kAfterShuttle
             : kNormal;
}

// Vertex-simple search from the origin. Branches on the first arc so a
// first-mile shuttle's landing hub can be banned for the rest of the walk;
// hub-first and single-arc paths cannot revisit anything (every later
// arrival shares the kNormal flag, and origin/destination have no in/out
// arcs). Deviation searches with a nonempty root never need this: the
// landing hub sits in the root, whose vertices are already banned.
std::optional<Label> loopless_from_origin(const TripGraph& g, Channel channel,
                                          const SearchLimits& lim) {
  const int or_local = g.local(g.origin);
  if (or_local < 0) return std::nullopt;
  std::vector<char> banned(g.vertices.size(), 0);
  if (lim.banned_vertex) banned = *lim.banned_vertex;

  std::optional<Label> best;
  auto consider = [&](Label cand) {
    if (!best || cand.better_than(*best)) best = std::move(cand);
  };
  auto assemble = [&](int first_arc, const Label& sub) {
    Label full;
    full.seq.reserve(sub.seq.size() + 1);
    full.seq.push_back(first_arc);
    full.seq.insert(full.seq.end(), sub.seq.begin(), sub.seq.end());
    full.value = canonical_value(g, full.seq, channel);
    full.legs = static_cast<int>(full.seq.size());
    consider(std::move(full));
  };

  for (int ai : g.out_arcs[or_local]) {
    if (lim.banned_arc && (*lim.banned_arc)[ai]) continue;
    const TripArc& a = g.arcs[ai];
    const int w = g.local(a.to);
    if (lim.banned_vertex && (*lim.banned_vertex)[w]) continue;
    if (a.to == g.destination) {
      Label one;
      one.value = g.arc_weight(a, channel);
      one.legs = 1;
      one.seq = {ai};
      consider(std::move(one));
    } else if (a.kind == LegKind::Shuttle) {
      banned[w] = 1;
      SearchLimits sub_lim;
      sub_lim.banned_vertex = &banned;
      sub_lim.banned_arc = lim.banned_arc;
      auto sub = dijkstra(g, channel, a.to, kAfterShuttle, sub_lim);
      banned[w] = 0;
      if (sub) assemble(ai, *sub);
    } else {
      auto sub = dijkstra(g, channel, a.to, kNormal, lim);
      if (sub) assemble(ai, *sub);
    }
  }
  return best;
}

}  // namespace

TripGraph build_trip_graph(const NetworkInstance& inst, const CostModel& costs,
                           const Trip& trip, const TripGraphOptions& opt) {
  TripGraph g;
  g.origin = trip.origin;
  g.destination = trip.destination;
  g.vertex_of_stop.assign(inst.stops.size(), -1);

  auto add_vertex = [&](int stop) {
    if (g.vertex_of_stop[stop] >= 0) return;
    g.vertex_of_stop[stop] = static_cast<int>(g.vertices.size());
    g.vertices.push_back(stop);
  };
  add_vertex(trip.origin);
  add_vertex(trip.destination);
  for (int h : inst.hubs) add_vertex(h);

  // Hub arcs. Arcs into the origin or out of the destination cannot lie on
  // a simple origin->destination path and are skipped.
  for (int i = 0; i < static_cast<int>(inst.arcs.size()); ++i) {
    const HubArc& a = inst.arcs[i];
    if (opt.fixed_arcs_only && !a.fixed) continue;
    if (opt.hub_arc_allowed && !(*opt.hub_arc_allowed)[i]) continue;
    if (a.to == trip.origin || a.from == trip.destination) continue;
    g.arcs.push_back(TripArc{a.from, a.to, LegKind::Hub, i, costs.tau(a),
                             costs.hub_duration(a)});
  }

  auto add_shuttle = [&](int from, int to) {
    if (from == to) return;
    double gamma = costs.gamma(from, to);
    if (opt.shuttle_cost_cap && !leq_tol(gamma, *opt.shuttle_cost_cap)) return;
    for (const auto& e : g.arcs)
      if (e.kind == LegKind::Shuttle && e.from == from && e.to == to) return;
    g.arcs.push_back(TripArc{from, to, LegKind::Shuttle, -1, gamma,
                             costs.shuttle_duration(from, to)});
  };
  add_shuttle(trip.origin, trip.destination);
  for (int h : inst.hubs) {
    if (h != trip.origin) add_shuttle(trip.origin, h);
    if (h != trip.destination) add_shuttle(h, trip.destination);
  }

  std::sort(g.arcs.begin(), g.arcs.end(),
            [](const TripArc& a, const TripArc& b) {
              if (a.from != b.from) return a.from < b.from;
              if (a.to != b.to) return a.to < b.to;
              return static_cast<int>(a.kind) < static_cast<int>(b.kind);
            });
  g.out_arcs.assign(g.vertices.size(), {});
  for (int i = 0; i < static_cast<int>(g.arcs.size()); ++i)
    g.out_arcs[g.local(g.arcs[i].from)].push_back(i);
  return g;
}

std::optional<PathOrder> shortest_path(const TripGraph& g, Channel channel) {
  auto label = loopless_from_origin(g, channel, {});
  if (!label) return std::nullopt;
  return PathOrder{label->value, path_from_seq(g, label->seq)};
}

// ---------------------------------------------------------------------------
// Loopless k-shortest stream (deviation search over the accepted list).

struct KShortestStream::Impl {
  const TripGraph& g;
  Channel channel;
  std::vector<std::vector<int>> accepted;  // arc sequences, emitted order
  struct Cand {
    double value;
    int legs;
    std::vector<int> seq;
    bool operator<(const Cand& o) const {
      if (value != o.value) return value < o.value;
      if (legs != o.legs) return legs < o.legs;
      return seq < o.seq;
    }
  };
  std::set<Cand> candidates;
  bool first = true;

  Impl(const TripGraph& graph, Channel c) : g(graph), channel(c) {}

  void push_candidate(std::vector<int> seq) {
    Cand c;
    c.value = canonical_value(g, seq, channel);
    c.legs = static_cast<int>(seq.size());
    c.seq = std::move(seq);
    candidates.insert(std::move(c));
  }

  void generate_deviations(const std::vector<int>& base) {
    std::vector<char> banned_vertex(g.vertices.size(), 0);
    for (size_t i = 0; i < base.size(); ++i) {
      // Spur at vertex i of the base path; root is base[0..i).
      std::vector<int> root(base.begin(), base.begin() + i);
      const int spur_stop =
          i == 0 ? g.origin : g.arcs[base[i - 1]].to;

      std::vector<char> banned_arc(g.arcs.size(), 0);
      for (const auto& acc : base_sharing_root(root))
        banned_arc[acc] = 1;

      // The spur stop is banned too: bans only block re-entry, not the
      // start, and this keeps flag-state revisits of the spur stop out.
      // It stays banned as part of the next iteration's root.
      banned_vertex[g.local(spur_stop)] = 1;

      SearchLimits lim;
      lim.banned_vertex = &banned_vertex;
      lim.banned_arc = &banned_arc;
      auto spur = root.empty()
                      ? loopless_from_origin(g, channel, lim)
                      : dijkstra(g, channel, spur_stop,
                                 start_flag_for_root(root, g), lim);
      if (spur) {
        std::vector<int> full = root;
        full.insert(full.end(), spur->seq.begin(), spur->seq.end());
        push_candidate(std::move(full));
      }
    }
  }

  // Next legs of accepted paths that share the given root prefix.
  std::vector<int> base_sharing_root(const std::vector<int>& root) {
    std::vector<int> out;
    for (const auto& acc : accepted) {
      if (acc.size() <= root.size()) continue;
      if (std::equal(root.begin(), root.end(), acc.begin()))
        out.push_back(acc[root.size()]);
    }
    return out;
  }

  std::optional<PathOrder> next() {
    if (first) {
      first = false;
      auto label = loopless_from_origin(g, channel, {});
      if (!label) return std::nullopt;
      accepted.push_back(label->seq);
      return PathOrder{canonical_value(g, label->seq, channel),
                       path_from_seq(g, label->seq)};
    }
    if (accepted.empty()) return std::nullopt;
    generate_deviations(accepted.back());
    while (!candidates.empty()) {
      Cand best = *candidates.begin();
      candidates.erase(candidates.begin());
      bool seen = false;
      for (const auto& acc : accepted)
        if (acc == best.seq) { seen = true; break; }
      if (seen) continue;
      accepted.push_back(best.seq);
      return PathOrder{best.value, path_from_seq(g, best.seq)};
    }
    accepted.clear();  // exhausted; stay exhausted
    return std::nullopt;
  }
};

KShortestStream::KShortestStream(const TripGraph& g, Channel channel)
    : impl_(std::make_unique<Impl>(g, channel)) {}
KShortestStream::~KShortestStream() = default;
KShortestStream::KShortestStream(KShortestStream&&) noexcept = default;
std::optional<PathOrder> KShortestStream::next() { return impl_->next(); }

// ---------------------------------------------------------------------------

PathMetrics graph_metrics(const TripGraph& g, const Path& path) {
  PathMetrics m;
  m.transfers = static_cast<int>(path.legs.size()) - 1;
  for (const auto& leg : path.legs) {
    // arcs are sorted by (from, to, kind): binary search by leg identity
    auto it = std::lower_bound(
        g.arcs.begin(), g.arcs.end(), leg,
        [](const TripArc& a, const Leg& l) {
          return std::tie(a.from, a.to, a.kind) < std::tie(l.from, l.to, l.kind);
        });
    if (it == g.arcs.end() || it->leg() != leg)
      throw ValidationError("graph_metrics: leg is not an arc of the graph");
    m.weighted_cost += it->weighted_cost;
    m.duration += it->duration;
  }
  return m;
}

std::vector<double> prefix_costs(const TripGraph& g, Channel channel) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(g.vertices.size());
  std::vector<double> dist(n * 3, kInf), out(n, kInf);
  using Item = std::pair<double, int>;  // (value, state)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

  const int s0 = g.local(g.origin) * 3 + kStart;
  dist[s0] = 0.0;
  pq.push({0.0, s0});
  while (!pq.empty()) {
    auto [d, state] = pq.top();
    pq.pop();
    if (d > dist[state]) continue;
    const int v = state / 3, flag = state % 3;
    if (v == g.local(g.destination)) continue;  // absorbing
    for (int ai : g.out_arcs[v]) {
      const TripArc& a = g.arcs[ai];
      int next_flag;
      if (a.kind == LegKind::Hub) {
        next_flag = kNormal;
      } else if (a.to == g.destination) {
        if (flag == kAfterShuttle) continue;
        next_flag = kNormal;
      } else {
        if (flag != kStart) continue;
        next_flag = kAfterShuttle;
      }
      const int ns = g.local(a.to) * 3 + next_flag;
      double nd = d + g.arc_weight(a, channel);
      if (nd < dist[ns]) {
        dist[ns] = nd;
        pq.push({nd, ns});
      }
    }
  }
  for (int v = 0; v < n; ++v)
    out[v] = std::min({dist[v * 3 + kNormal], dist[v * 3 + kAfterShuttle],
                       dist[v * 3 + kStart]});
  return out;
}

std::vector<double> suffix_costs(const TripGraph& g, Channel channel) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(g.vertices.size());
  // Continuations after a hub leg use hub arcs and at most one final
  // shuttle, so a plain reverse Dijkstra (no states) suffices.
  std::vector<std::vector<std::pair<int, double>>> rev(n);
  for (const auto& a : g.arcs) {
    double w = g.arc_weight(a, channel);
    if (a.kind == LegKind::Hub || a.to == g.destination)
      rev[g.local(a.to)].push_back({g.local(a.from), w});
  }
  std::vector<double> dist(n, kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const int de = g.local(g.destination);
  dist[de] = 0.0;
  pq.push({0.0, de});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (auto [w, c] : rev[v]) {
      if (w == de) continue;
      if (d + c < dist[w]) {
        dist[w] = d + c;
        pq.push({d + c, w});
      }
    }
  }
  return dist;
}

std::vector<Path> enumerate_simple_paths(const TripGraph& g, int max_legs,
                                         size_t cap) {
  std::vector<Path> out;
  std::vector<char> visited(g.vertices.size(), 0);
  std::vector<int> seq;
  const int de_local = g.local(g.destination);

  auto dfs = [&](auto&& self, int v_local, int flag) -> void {
    if (v_local == de_local) {
      if (out.size() >= cap)
        throw ResourceLimitError(
            "enumerate_simple_paths: path cap exceeded (" +
            std::to_string(cap) + ")");
      out.push_back(path_from_seq(g, seq));
      return;
    }
    if (max_legs >= 0 && static_cast<int>(seq.size()) >= max_legs) return;
    for (int ai : g.out_arcs[v_local]) {
      const TripArc& a = g.arcs[ai];
      int next_flag;
      if (a.kind == LegKind::Hub) {
        next_flag = kNormal;
      } else if (a.to == g.destination) {
        if (flag == kAfterShuttle) continue;
        next_flag = kNormal;
      } else {
        if (flag != kStart) continue;
        next_flag = kAfterShuttle;
      }
      const int w = g.local(a.to);
      if (visited[w]) continue;
      visited[w] = 1;
      seq.push_back(ai);
      self(self, w, next_flag);
      seq.pop_back();
      visited[w] = 0;
    }
  };

  const int or_local = g.local(g.origin);
  visited[or_local] = 1;
  dfs(dfs, or_local, kStart);
  return out;
}

// ---------------------------------------------------------------------------

HubPathCache::HubPathCache(const NetworkInstance& inst,
                           const std::vector<char>* arc_allowed, size_t cap) {
  n_ = static_cast<int>(inst.hubs.size());
  hub_pos_.assign(inst.stops.size(), -1);
  for (int i = 0; i < n_; ++i) hub_pos_[inst.hubs[i]] = i;
  by_pair_.assign(n_, std::vector<std::vector<std::vector<int>>>(n_));

  // Hub adjacency, neighbors ascending by destination stop.
  std::vector<std::vector<int>> out(n_);
  for (int i = 0; i < static_cast<int>(inst.arcs.size()); ++i) {
    if (arc_allowed && !(*arc_allowed)[i]) continue;
    out[hub_pos_[inst.arcs[i].from]].push_back(i);
  }
  for (auto& v : out)
    std::sort(v.begin(), v.end(), [&](int a, int b) {
      return inst.arcs[a].to < inst.arcs[b].to;
    });

  std::vector<char> visited(n_, 0);
  std::vector<int> seq;
  for (int s = 0; s < n_; ++s) {
    auto dfs = [&](auto&& self, int u) -> void {
      if (!seq.empty()) {
        if (++total_ > cap)
          throw ResourceLimitError("hub path cache: sequence cap exceeded (" +
                                   std::to_string(cap) + ")");
        by_pair_[s][u].push_back(seq);
      }
      for (int ai : out[u]) {
        int w = hub_pos_[inst.arcs[ai].to];
        if (visited[w]) continue;
        visited[w] = 1;
        seq.push_back(ai);
        self(self, w);
        seq.pop_back();
        visited[w] = 0;
      }
    };
    visited[s] = 1;
    dfs(dfs, s);
    visited[s] = 0;
  }
}

const std::vector<std::vector<int>>& HubPathCache::sequences(int a,
                                                             int b) const {
  int pa = hub_pos_[a], pb = hub_pos_[b];
  if (pa < 0 || pb < 0) return empty_;
  return by_pair_[pa][pb];
}

}  // namespace odmts
