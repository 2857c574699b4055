#pragma once

// Shared hand-built instances. Values are dyadic or small integers so
// expected costs below are exact in double arithmetic.

#include <cmath>
#include <random>

#include "odmts/instance.hpp"

namespace fixtures {

// Five stops on a line at km 0, 2, 5, 9, 12; hubs are stops 1, 2, 3.
// Minutes, pace 1 min/km, so car time equals distance numerically.
// theta 0.25, bus rate 2/km, shuttle rate 1/km, fare 4.
//
// Arcs (both directions each; 1<->3 trades a short explicit wait against
// its low frequency, the others use the half-headway default of 15):
//   1<->2 fixed,     t'=4, d'=3, n=4, wait=15  -> tau 4.75, beta 0
//   2<->3 candidate, t'=5, d'=4, n=4, wait=15  -> tau 5.00, beta 24
//   1<->3 candidate, t'=8, d'=7, n=2, wait=15  -> tau 5.75, beta 21
//
// Frozen leg costs: gamma(0,1)=2, gamma(3,4)=3, gamma(0,4)=12.
// Path [shuttle 0->1, hub 1->2, hub 2->3, shuttle 3->4]:
//   g = 2 + 4.75 + 5 + 3 = 14.75,  t = 2 + 19 + 20 + 3 = 44, 3 transfers.
inline odmts::NetworkInstance line_instance() {
  odmts::NetworkInstance inst;
  for (double x : {0.0, 2.0, 5.0, 9.0, 12.0})
    inst.stops.push_back({"s" + std::to_string(inst.stops.size()), x, 0.0});
  inst.hubs = {1, 2, 3};
  inst.time_unit = odmts::TimeUnit::Minutes;
  inst.pace = 1.0;
  inst.horizon = 120.0;
  inst.cost.theta = 0.25;
  inst.cost.bus_cost_dist = 2.0;
  inst.cost.shuttle_cost_dist = 1.0;
  inst.cost.fare = 4.0;
  inst.cost.basis = odmts::CostBasis::Distance;

  auto arc = [&](int a, int b, double t, double d, double n, double wait,
                 bool fixed) {
    inst.arcs.push_back({a, b, t, d, n, wait, fixed});
    inst.arcs.push_back({b, a, t, d, n, wait, fixed});
  };
  arc(1, 2, 4.0, 3.0, 4.0, odmts::default_wait(120.0, 4.0), true);
  arc(2, 3, 5.0, 4.0, 4.0, odmts::default_wait(120.0, 4.0), false);
  arc(1, 3, 8.0, 7.0, 2.0, 15.0, false);

  odmts::Trip core;
  core.id = "c0";
  core.origin = 0;
  core.destination = 4;
  core.riders = 2.0;
  core.kind = odmts::TripKind::Core;
  inst.trips.push_back(core);

  odmts::Trip latent;
  latent.id = "l0";
  latent.origin = 0;
  latent.destination = 4;
  latent.riders = 3.0;
  latent.kind = odmts::TripKind::Latent;
  latent.alpha = 2.0;
  latent.t_current = 15.0;
  inst.trips.push_back(latent);
  return inst;
}

// Same network but every candidate arc is fixed: for bound computations on
// a fully decided backbone.
inline odmts::NetworkInstance line_instance_all_fixed() {
  auto inst = line_instance();
  for (auto& a : inst.arcs) a.fixed = true;
  return inst;
}

// Small seeded random instance for property tests (the library generator
// is exercised separately). Euclidean plane, complete hub digraph with
// random rates, fixed arcs chosen as symmetric pairs so degrees balance.
inline odmts::NetworkInstance random_instance(unsigned seed, int n_stops = 8,
                                              int n_hubs = 4,
                                              int n_trips = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  odmts::NetworkInstance inst;
  inst.time_unit = odmts::TimeUnit::Minutes;
  inst.pace = 1.5;
  inst.horizon = 240.0;
  inst.cost.theta = 0.2 + 0.3 * unit(rng);
  inst.cost.bus_cost_dist = 1.0 + 2.0 * unit(rng);
  inst.cost.shuttle_cost_dist = 0.5 + unit(rng);
  inst.cost.fare = 2.0 + 2.0 * unit(rng);
  inst.cost.basis = odmts::CostBasis::Distance;

  for (int i = 0; i < n_stops; ++i)
    inst.stops.push_back({"s" + std::to_string(i), coord(rng), coord(rng)});
  for (int h = 0; h < n_hubs; ++h) inst.hubs.push_back(h);

  for (int a = 0; a < n_hubs; ++a)
    for (int b = a + 1; b < n_hubs; ++b) {
      double d = inst.car_dist(inst.hubs[a], inst.hubs[b]);
      double t = inst.pace * d * (0.6 + 0.2 * unit(rng));  // faster than car
      double n = 2.0 + std::floor(4.0 * unit(rng));
      bool fixed = unit(rng) < 0.3;
      double w = odmts::default_wait(inst.horizon, n);
      inst.arcs.push_back({inst.hubs[a], inst.hubs[b], t, d, n, w, fixed});
      inst.arcs.push_back({inst.hubs[b], inst.hubs[a], t, d, n, w, fixed});
    }

  for (int k = 0; k < n_trips; ++k) {
    odmts::Trip t;
    t.id = "t" + std::to_string(k);
    t.origin = static_cast<int>(unit(rng) * n_stops) % n_stops;
    do {
      t.destination = static_cast<int>(unit(rng) * n_stops) % n_stops;
    } while (t.destination == t.origin);
    t.riders = 1.0 + std::floor(5.0 * unit(rng));
    if (unit(rng) < 0.5) {
      t.kind = odmts::TripKind::Latent;
      t.alpha = 1.2 + 0.8 * unit(rng);
      t.t_current = inst.car_time(t.origin, t.destination) *
                    (0.9 + 0.8 * unit(rng));
    }
    inst.trips.push_back(t);
  }
  return inst;
}

}  // namespace fixtures
