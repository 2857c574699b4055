#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "odmts/common.hpp"

namespace odmts {

struct Stop {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

enum class CostBasis { Distance, Time };
enum class TimeUnit { Seconds, Minutes };

// Convex agency/rider weighting plus the unit rates. Rates are in the
// instance's declared units and are never converted.
struct CostParameters {
  double theta = 0.0;          // agency weight is (1-theta), rider weight theta
  double bus_cost_dist = 0.0;  // investment rate per km of hub leg
  double bus_cost_time = 0.0;  // investment rate per time unit of hub leg
  double shuttle_cost_dist = 0.0;  // operating rate per km of shuttle leg
  double shuttle_cost_time = 0.0;  // operating rate per time unit
  double fare = 0.0;               // flat fare collected per adopting rider
  CostBasis basis = CostBasis::Distance;
};

struct HubArc {
  int from = -1;  // stop index, must be a hub
  int to = -1;    // stop index, must be a hub
  double time = 0.0;  // in-vehicle travel time t'
  double dist = 0.0;  // travel distance d'
  double frequency = 0.0;  // vehicles over the horizon
  double wait = 0.0;       // expected wait; defaults to horizon / (2 frequency)
  bool fixed = false;      // backbone arc: always open, zero investment
};

enum class TripKind { Core, Latent };

struct Trip {
  std::string id;
  int origin = -1;
  int destination = -1;
  double riders = 1.0;  // p^r
  TripKind kind = TripKind::Core;
  // Latent-only choice inputs.
  double alpha = 0.0;      // tolerance multiplier on the current duration
  double t_current = 0.0;  // duration of the rider's current mode
  int max_transfers = -1;  // -1 = no transfer bound
};

enum class ChoiceKind { DurationOnly, DurationAndTransfers };

// A network instance. Car matrices are either stored densely or derived
// from stop coordinates and a constant pace (time per km).
struct NetworkInstance {
  std::vector<Stop> stops;
  std::vector<int> hubs;     // stop indices, ascending
  std::vector<HubArc> arcs;  // candidate set Z; fixed arcs flagged
  std::vector<Trip> trips;
  CostParameters cost;
  TimeUnit time_unit = TimeUnit::Seconds;
  ChoiceKind choice = ChoiceKind::DurationOnly;
  double horizon = 0.0;  // planning horizon, used for default waits

  // Exactly one representation is active.
  std::vector<double> car_time_matrix;  // n*n row-major, empty in geometry mode
  std::vector<double> car_dist_matrix;
  double pace = 0.0;  // geometry mode: time per km

  bool geometry_mode() const { return car_time_matrix.empty(); }

  int n_stops() const { return static_cast<int>(stops.size()); }
  int n_hubs() const { return static_cast<int>(hubs.size()); }

  double car_dist(int i, int j) const {
    if (!car_dist_matrix.empty())
      return car_dist_matrix[static_cast<size_t>(i) * stops.size() + j];
    double dx = stops[i].x - stops[j].x, dy = stops[i].y - stops[j].y;
    return std::hypot(dx, dy);
  }
  double car_time(int i, int j) const {
    if (!car_time_matrix.empty())
      return car_time_matrix[static_cast<size_t>(i) * stops.size() + j];
    return pace * car_dist(i, j);
  }

  bool is_hub(int stop) const {
    for (int h : hubs)
      if (h == stop) return true;
    return false;
  }

  int fixed_arc_count() const {
    int n = 0;
    for (const auto& a : arcs) n += a.fixed ? 1 : 0;
    return n;
  }
  int undecided_arc_count() const {
    return static_cast<int>(arcs.size()) - fixed_arc_count();
  }

  std::vector<int> core_trip_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(trips.size()); ++i)
      if (trips[i].kind == TripKind::Core) out.push_back(i);
    return out;
  }
  std::vector<int> latent_trip_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(trips.size()); ++i)
      if (trips[i].kind == TripKind::Latent) out.push_back(i);
    return out;
  }
};

// Expected wait for a leg served by `frequency` vehicles over the horizon:
// half the headway.
inline double default_wait(double horizon, double frequency) {
  return horizon / (2.0 * frequency);
}

// Structural validation shared by the loader and the generator.
// Throws ValidationError with a field-specific message.
void validate_instance(const NetworkInstance& inst);

}  // namespace odmts
