#pragma once

#include "odmts/instance.hpp"

namespace odmts {

// Raw per-leg formulas. beta is zero on fixed arcs; the basis picks the
// distance or time rate for agency-side terms.
double hub_leg_investment_cost(const CostParameters& p, const HubArc& arc);
double hub_leg_rider_cost(const CostParameters& p, const HubArc& arc);
double shuttle_leg_cost(const CostParameters& p, double dist, double time);
double fare_revenue_weight(const CostParameters& p);

// Weighted-cost and duration tables for one instance. The lexicographic
// variant folds durations into the weighted channel (w -> M*w + duration)
// so that cost ties resolve by duration; durations themselves are
// unchanged. All consumers (graphs, enumeration, preprocessing, model
// builders) read costs exclusively through this class.
class CostModel {
 public:
  explicit CostModel(const NetworkInstance& inst)
      : inst_(&inst), scale_(1.0) {}

  static CostModel lexicographic(const NetworkInstance& inst, double m_scale);

  const NetworkInstance& instance() const { return *inst_; }
  bool transformed() const { return scale_ != 1.0; }
  double scale() const { return scale_; }

  double beta(const HubArc& a) const {
    return scale_ * hub_leg_investment_cost(inst_->cost, a);
  }
  double tau(const HubArc& a) const {
    double w = hub_leg_rider_cost(inst_->cost, a);
    return transformed() ? scale_ * w + hub_duration(a) : w;
  }
  double gamma(int i, int j) const {
    double w = shuttle_leg_cost(inst_->cost, inst_->car_dist(i, j),
                                inst_->car_time(i, j));
    return transformed() ? scale_ * w + shuttle_duration(i, j) : w;
  }
  double fare_weight() const {
    return scale_ * fare_revenue_weight(inst_->cost);
  }

  double hub_duration(const HubArc& a) const { return a.time + a.wait; }
  double shuttle_duration(int i, int j) const { return inst_->car_time(i, j); }

 private:
  const NetworkInstance* inst_;
  double scale_;
};

// Scale for the lexicographic fold: the next power of ten at least two
// orders above an upper bound on any path duration.
double lex_scale_for(const NetworkInstance& inst);

}  // namespace odmts
