#include "odmts/generate.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace odmts {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("generate: " + what);
}

double uni(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int pick(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

NetworkInstance generate_instance(const GenerateSpec& s) {
  require(s.n_stops >= 2, "need at least two stops");
  require(s.n_hubs >= 0 && s.n_hubs <= s.n_stops, "hubs must fit in stops");
  require(s.n_candidate_arcs >= 0 && s.n_fixed_arcs >= 0,
          "arc counts must be nonnegative");
  require(s.n_fixed_arcs <= s.n_candidate_arcs,
          "fixed arcs are a subset of the candidates");
  require(s.n_candidate_arcs % 2 == 0 && s.n_fixed_arcs % 2 == 0,
          "arc counts must be even; arcs come in opposite pairs");
  require(s.n_candidate_arcs <= s.n_hubs * (s.n_hubs - 1),
          "more candidate arcs than hub pairs can host");
  require(s.n_core >= 0 && s.n_latent >= 0 && s.n_core + s.n_latent >= 1,
          "need at least one trip");
  require(s.theta > 0.0 && s.theta < 1.0, "theta must lie strictly in (0,1)");
  require(s.alpha_min > 0 && s.alpha_min <= s.alpha_max, "alpha range");
  require(s.t_current_factor_min > 0 &&
              s.t_current_factor_min <= s.t_current_factor_max,
          "t_current factor range");
  require(s.max_transfers_min >= 0 &&
              s.max_transfers_min <= s.max_transfers_max,
          "max_transfers range");

  std::mt19937_64 rng(s.seed);
  NetworkInstance inst;
  inst.time_unit = TimeUnit::Minutes;
  inst.horizon = 120.0;
  inst.choice = s.choice;
  inst.pace = 1.0;  // car minutes per km

  inst.cost.theta = s.theta;
  inst.cost.basis = s.basis;
  if (s.basis == CostBasis::Distance) {
    inst.cost.bus_cost_dist = uni(rng, 1.5, 4.0);
    inst.cost.shuttle_cost_dist = uni(rng, 0.6, 1.4);
  } else {
    inst.cost.bus_cost_time = uni(rng, 0.3, 0.8);
    inst.cost.shuttle_cost_time = uni(rng, 0.6, 1.4);
  }
  inst.cost.fare = uni(rng, 1.5, 3.5);

  for (int i = 0; i < s.n_stops; ++i)
    inst.stops.push_back(
        {"s" + std::to_string(i), uni(rng, 0.0, 20.0), uni(rng, 0.0, 20.0)});

  std::vector<int> order(static_cast<size_t>(s.n_stops));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  inst.hubs.assign(order.begin(), order.begin() + s.n_hubs);
  std::sort(inst.hubs.begin(), inst.hubs.end());

  std::vector<std::pair<int, int>> pairs;
  for (size_t i = 0; i < inst.hubs.size(); ++i)
    for (size_t j = i + 1; j < inst.hubs.size(); ++j)
      pairs.push_back({inst.hubs[i], inst.hubs[j]});
  std::shuffle(pairs.begin(), pairs.end(), rng);

  const double kFrequencies[] = {2, 3, 4, 6, 8};
  for (int p = 0; p < s.n_candidate_arcs / 2; ++p) {
    auto [u, v] = pairs[static_cast<size_t>(p)];
    double road = uni(rng, 1.0, 1.25);  // detour over the straight line
    double dist = road * inst.car_dist(u, v);
    double bus_pace = uni(rng, 1.05, 1.35);  // buses run slower than cars
    double time = bus_pace * dist;
    double freq = kFrequencies[pick(rng, 0, 4)];
    double wait = default_wait(inst.horizon, freq);
    bool fixed = p < s.n_fixed_arcs / 2;
    inst.arcs.push_back({u, v, time, dist, freq, wait, fixed});
    inst.arcs.push_back({v, u, time, dist, freq, wait, fixed});
  }

  for (int i = 0; i < s.n_core + s.n_latent; ++i) {
    Trip t;
    bool core = i < s.n_core;
    t.kind = core ? TripKind::Core : TripKind::Latent;
    t.id = (core ? "c" : "l") + std::to_string(core ? i : i - s.n_core);
    t.origin = pick(rng, 0, s.n_stops - 1);
    do {
      t.destination = pick(rng, 0, s.n_stops - 1);
    } while (t.destination == t.origin);
    t.riders = uni(rng, 0.5, 4.0);
    if (!core) {
      t.alpha = uni(rng, s.alpha_min, s.alpha_max);
      t.t_current = inst.car_time(t.origin, t.destination) *
                    uni(rng, s.t_current_factor_min, s.t_current_factor_max);
      if (s.choice == ChoiceKind::DurationAndTransfers)
        t.max_transfers = pick(rng, s.max_transfers_min, s.max_transfers_max);
    }
    inst.trips.push_back(std::move(t));
  }

  if (!s.geometry) {
    size_t n = inst.stops.size();
    inst.car_time_matrix.reserve(n * n);
    inst.car_dist_matrix.reserve(n * n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        double d = i == j ? 0.0
                          : std::hypot(inst.stops[i].x - inst.stops[j].x,
                                       inst.stops[i].y - inst.stops[j].y);
        inst.car_dist_matrix.push_back(d);
        inst.car_time_matrix.push_back(inst.pace * d);
      }
    inst.pace = 0.0;
  }

  validate_instance(inst);
  return inst;
}

NetworkInstance engineered_tie_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto small = [&](int lo, int n) {
    return lo + 2 * static_cast<int>(rng() % static_cast<std::uint64_t>(n));
  };
  // Integer line positions. Two one-hub-leg itineraries o->h1->h3->d and
  // o->h2->h3->d get exactly equal weighted cost (all terms are multiples
  // of one half, so the tie is exact in binary) while their durations
  // differ by a - b.
  int b = small(2, 4);        // hub 2 position
  int a = b + small(2, 4);    // hub 1 position, further out
  int s1 = small(4, 5);       // in-vehicle plus wait on h1->h3
  int s2 = s1 + 3 * (a - b);  // balances the cheaper first shuttle leg
  int m = a + s1 + 4;         // hub 3; far enough that no shortcut ties
  int e = small(2, 4);        // destination offset past hub 3

  NetworkInstance inst;
  inst.time_unit = TimeUnit::Minutes;
  inst.horizon = 120.0;
  inst.choice = ChoiceKind::DurationOnly;
  inst.cost.theta = 0.5;
  inst.cost.basis = CostBasis::Distance;
  inst.cost.bus_cost_dist = 2.0;
  inst.cost.shuttle_cost_dist = 1.0;
  inst.cost.fare = 1.0;

  const int pos[5] = {0, a, b, m, m + e};
  const char* names[5] = {"o", "h1", "h2", "h3", "d"};
  for (int i = 0; i < 5; ++i)
    inst.stops.push_back({names[i], static_cast<double>(pos[i]), 0.0});
  inst.hubs = {1, 2, 3};

  size_t n = 5;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      double d = std::abs(pos[i] - pos[j]);
      inst.car_dist_matrix.push_back(d);
      inst.car_time_matrix.push_back(2.0 * d);
    }

  auto pair = [&](int u, int v, int in_vehicle_plus_wait) {
    double t = in_vehicle_plus_wait - 2.0, w = 2.0;
    double d = std::abs(pos[u] - pos[v]);
    inst.arcs.push_back({u, v, t, d, 4.0, w, true});
    inst.arcs.push_back({v, u, t, d, 4.0, w, true});
  };
  pair(1, 3, s1);
  pair(2, 3, s2);

  Trip t;
  t.id = "tie";
  t.origin = 0;
  t.destination = 4;
  t.riders = 1.0;
  t.kind = TripKind::Core;
  inst.trips.push_back(std::move(t));

  validate_instance(inst);
  return inst;
}

}  // namespace odmts
