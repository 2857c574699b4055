#include "odmts/costs.hpp"

#include <algorithm>
#include <cmath>

namespace odmts {

double hub_leg_investment_cost(const CostParameters& p, const HubArc& arc) {
  if (arc.fixed) return 0.0;
  double rate = p.basis == CostBasis::Distance ? arc.dist * p.bus_cost_dist
                                               : arc.time * p.bus_cost_time;
  return (1.0 - p.theta) * arc.frequency * rate;
}

double hub_leg_rider_cost(const CostParameters& p, const HubArc& arc) {
  return p.theta * (arc.time + arc.wait);
}

double shuttle_leg_cost(const CostParameters& p, double dist, double time) {
  double agency = p.basis == CostBasis::Distance ? dist * p.shuttle_cost_dist
                                                 : time * p.shuttle_cost_time;
  return (1.0 - p.theta) * agency + p.theta * time;
}

double fare_revenue_weight(const CostParameters& p) {
  return (1.0 - p.theta) * p.fare;
}

CostModel CostModel::lexicographic(const NetworkInstance& inst,
                                   double m_scale) {
  CostModel c(inst);
  c.scale_ = m_scale;
  return c;
}

double lex_scale_for(const NetworkInstance& inst) {
  // Upper bound on any path duration: every hub leg once plus two shuttle
  // legs, each at the largest duration seen anywhere in the instance.
  double max_hub = 0.0;
  for (const auto& a : inst.arcs)
    max_hub = std::max(max_hub, a.time + a.wait);
  double max_shuttle = 0.0;
  for (const auto& t : inst.trips) {
    max_shuttle = std::max(
        max_shuttle, inst.car_time(t.origin, t.destination));
    for (int h : inst.hubs) {
      max_shuttle = std::max(max_shuttle, inst.car_time(t.origin, h));
      max_shuttle = std::max(max_shuttle, inst.car_time(h, t.destination));
    }
  }
  double t_max =
      (inst.n_hubs() + 1) * max_hub + 2.0 * max_shuttle;
  if (t_max <= 0.0) return 100.0;
  return std::pow(10.0, std::ceil(std::log10(t_max)) + 2.0);
}

}  // namespace odmts
