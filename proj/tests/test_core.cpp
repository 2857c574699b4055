#include <doctest.h>

#include <stdexcept>

#include "odmts/choice.hpp"
#include "odmts/costs.hpp"
#include "odmts/path.hpp"
#include "support/fixtures.hpp"
#include "support/reference.hpp"

using namespace odmts;

TEST_CASE("hub leg investment cost, distance basis") {
  CostParameters p;
  p.theta = 0.001;
  p.bus_cost_dist = 3.87;
  p.basis = CostBasis::Distance;
  HubArc a{0, 1, 300.0, 5.0, 16.0, 450.0, false};
  // 0.999 * 16 * 5 * 3.87
  CHECK(hub_leg_investment_cost(p, a) == doctest::Approx(309.2904).epsilon(1e-12));

  a.fixed = true;
  CHECK(hub_leg_investment_cost(p, a) == 0.0);
}

TEST_CASE("hub leg investment cost, time basis") {
  CostParameters p;
  p.theta = 7.25 / 67.25;
  p.bus_cost_time = 72.15 / 60.0;  // hourly rate, minutes as unit
  p.basis = CostBasis::Time;
  HubArc a{0, 1, 10.0, 8.0, 24.0, 5.0, false};
  double expect = (60.0 / 67.25) * 24.0 * 10.0 * (72.15 / 60.0);
  CHECK(hub_leg_investment_cost(p, a) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("fare revenue weight") {
  CostParameters p;
  p.theta = 0.001;
  p.fare = 2.5;
  CHECK(fare_revenue_weight(p) == doctest::Approx(2.4975).epsilon(1e-12));

  p.theta = 7.25 / 67.25;
  CHECK(fare_revenue_weight(p) ==
        doctest::Approx((60.0 / 67.25) * 2.5).epsilon(1e-12));
  CHECK(fare_revenue_weight(p) == doctest::Approx(2.2305).epsilon(1e-4));
}

TEST_CASE("default wait is half the headway") {
  CHECK(default_wait(14400.0, 16.0) == doctest::Approx(450.0));
  CHECK(default_wait(240.0, 24.0) == doctest::Approx(5.0));
}

TEST_CASE("line fixture frozen leg costs") {
  auto inst = fixtures::line_instance();
  CostModel costs(inst);

  CHECK(costs.tau(inst.arcs[0]) == doctest::Approx(4.75));   // fixed 1->2
  CHECK(costs.beta(inst.arcs[0]) == 0.0);
  CHECK(costs.tau(inst.arcs[2]) == doctest::Approx(5.0));    // 2->3
  CHECK(costs.beta(inst.arcs[2]) == doctest::Approx(24.0));
  CHECK(costs.tau(inst.arcs[4]) == doctest::Approx(5.75));   // 1->3
  CHECK(costs.beta(inst.arcs[4]) == doctest::Approx(21.0));
  CHECK(costs.gamma(0, 1) == doctest::Approx(2.0));
  CHECK(costs.gamma(3, 4) == doctest::Approx(3.0));
  CHECK(costs.gamma(0, 4) == doctest::Approx(12.0));
  CHECK(costs.fare_weight() == doctest::Approx(3.0));
}

TEST_CASE("cost model agrees with reference formulas") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto inst = fixtures::random_instance(seed);
    if (seed == 2) {  // exercise the time basis too
      inst.cost.basis = CostBasis::Time;
      inst.cost.bus_cost_time = 1.2;
      inst.cost.shuttle_cost_time = 0.8;
    }
    CostModel costs(inst);
    for (const auto& a : inst.arcs) {
      CHECK(costs.tau(a) == doctest::Approx(ref::tau(inst, a)).epsilon(1e-12));
      CHECK(costs.beta(a) == doctest::Approx(ref::beta(inst, a)).epsilon(1e-12));
    }
    for (int i = 0; i < inst.n_stops(); ++i)
      for (int j = 0; j < inst.n_stops(); ++j)
        if (i != j)
          CHECK(costs.gamma(i, j) ==
                doctest::Approx(ref::gamma(inst, i, j)).epsilon(1e-12));
    CHECK(costs.fare_weight() ==
          doctest::Approx(ref::fare_weight(inst)).epsilon(1e-12));
  }
}

TEST_CASE("path metrics on the four-leg line path") {
  auto inst = fixtures::line_instance();
  CostModel costs(inst);
  Path p{{{0, 1, LegKind::Shuttle},
          {1, 2, LegKind::Hub},
          {2, 3, LegKind::Hub},
          {3, 4, LegKind::Shuttle}}};
  auto m = path_metrics(costs, p);
  CHECK(m.weighted_cost == doctest::Approx(14.75));
  CHECK(m.duration == doctest::Approx(44.0));
  CHECK(m.transfers == 3);

  auto r = ref::metrics(inst, p);
  CHECK(m.weighted_cost == doctest::Approx(r.g).epsilon(1e-12));
  CHECK(m.duration == doctest::Approx(r.t).epsilon(1e-12));

  Path direct{{{0, 4, LegKind::Shuttle}}};
  auto md = path_metrics(costs, direct);
  CHECK(md.weighted_cost == doctest::Approx(12.0));
  CHECK(md.duration == doctest::Approx(12.0));
  CHECK(md.transfers == 0);
}

TEST_CASE("lexicographic transform folds duration into cost") {
  auto inst = fixtures::line_instance();
  double m = lex_scale_for(inst);
  CHECK(m >= 100.0);
  double l10 = std::log10(m);
  CHECK(l10 == doctest::Approx(std::round(l10)));  // a power of ten

  CostModel plain(inst), lex = CostModel::lexicographic(inst, m);
  CHECK(lex.transformed());
  for (const auto& a : inst.arcs) {
    CHECK(lex.tau(a) ==
          doctest::Approx(m * plain.tau(a) + plain.hub_duration(a)));
    CHECK(lex.beta(a) == doctest::Approx(m * plain.beta(a)));
  }
  CHECK(lex.gamma(0, 4) ==
        doctest::Approx(m * plain.gamma(0, 4) + plain.shuttle_duration(0, 4)));
  CHECK(lex.fare_weight() == doctest::Approx(m * plain.fare_weight()));

  // Durations stay untransformed, so any path's folded cost decomposes.
  Path p{{{0, 1, LegKind::Shuttle}, {1, 2, LegKind::Hub},
          {2, 4, LegKind::Shuttle}}};
  auto mp = path_metrics(plain, p);
  auto ml = path_metrics(lex, p);
  CHECK(ml.duration == doctest::Approx(mp.duration));
  CHECK(ml.weighted_cost ==
        doctest::Approx(m * mp.weighted_cost + mp.duration));
}

TEST_CASE("path validation accepts the legal shapes") {
  auto inst = fixtures::line_instance();
  const Trip& t = inst.trips[0];  // 0 -> 4

  CHECK_NOTHROW(validate_path(inst, t, Path{{{0, 4, LegKind::Shuttle}}}));
  CHECK_NOTHROW(validate_path(
      inst, t,
      Path{{{0, 1, LegKind::Shuttle}, {1, 2, LegKind::Hub},
            {2, 4, LegKind::Shuttle}}}));
  CHECK_NOTHROW(validate_path(
      inst, t,
      Path{{{0, 2, LegKind::Shuttle}, {2, 3, LegKind::Hub},
            {3, 4, LegKind::Shuttle}}}));

  Trip hub_trip;  // 1 -> 3: hub endpoints, hub-leg-only path is legal
  hub_trip.origin = 1;
  hub_trip.destination = 3;
  CHECK_NOTHROW(validate_path(inst, hub_trip, Path{{{1, 3, LegKind::Hub}}}));
  CHECK_NOTHROW(validate_path(
      inst, hub_trip, Path{{{1, 2, LegKind::Hub}, {2, 3, LegKind::Hub}}}));
}

TEST_CASE("path validation rejects the illegal shapes") {
  auto inst = fixtures::line_instance();
  const Trip& t = inst.trips[0];  // 0 -> 4

  CHECK_THROWS_AS(validate_path(inst, t, Path{}), ValidationError);
  // wrong endpoints
  CHECK_THROWS_AS(validate_path(inst, t, Path{{{0, 3, LegKind::Shuttle}}}),
                  ValidationError);
  // broken chain
  CHECK_THROWS_AS(
      validate_path(inst, t,
                    Path{{{0, 1, LegKind::Shuttle}, {2, 3, LegKind::Hub},
                          {3, 4, LegKind::Shuttle}}}),
      ValidationError);
  // two-shuttle-only shape
  CHECK_THROWS_AS(
      validate_path(inst, t,
                    Path{{{0, 2, LegKind::Shuttle}, {2, 4, LegKind::Shuttle}}}),
      ValidationError);
  // shuttle in the middle
  CHECK_THROWS_AS(
      validate_path(inst, t,
                    Path{{{0, 1, LegKind::Shuttle}, {1, 2, LegKind::Shuttle},
                          {2, 3, LegKind::Hub}, {3, 4, LegKind::Shuttle}}}),
      ValidationError);
  // hub leg that is not a candidate arc (2->4: stop 4 is not a hub)
  CHECK_THROWS_AS(
      validate_path(inst, t,
                    Path{{{0, 2, LegKind::Shuttle}, {2, 4, LegKind::Hub}}}),
      ValidationError);
  // revisits a vertex
  Trip loop_trip;
  loop_trip.origin = 0;
  loop_trip.destination = 4;
  CHECK_THROWS_AS(
      validate_path(inst, loop_trip,
                    Path{{{0, 2, LegKind::Shuttle}, {2, 3, LegKind::Hub},
                          {3, 2, LegKind::Hub}, {2, 1, LegKind::Hub},
                          {1, 4, LegKind::Shuttle}}}),
      ValidationError);
}

TEST_CASE("duration-only choice is an inclusive cutoff") {
  auto inst = fixtures::line_instance();
  const Trip& t = inst.trips[1];  // alpha 2, t_current 15 -> cutoff 30
  auto model = ChoiceModel::duration_only();

  PathMetrics m;
  m.duration = 30.0;
  CHECK(evaluate_choice(model, t, m));
  m.duration = 30.0 + 1e-12;  // inside tolerance
  CHECK(evaluate_choice(model, t, m));
  m.duration = 30.1;
  CHECK_FALSE(evaluate_choice(model, t, m));
  m.duration = 12.0;
  CHECK(evaluate_choice(model, t, m));
}

TEST_CASE("duration-and-transfers choice adds the leg bound") {
  auto inst = fixtures::line_instance();
  Trip t = inst.trips[1];
  t.max_transfers = 2;
  auto model = ChoiceModel::duration_and_transfers();

  PathMetrics m;
  m.duration = 20.0;
  m.transfers = 2;
  CHECK(evaluate_choice(model, t, m));
  m.transfers = 3;
  CHECK_FALSE(evaluate_choice(model, t, m));

  t.max_transfers = -1;  // unbounded
  CHECK(evaluate_choice(model, t, m));
}

TEST_CASE("core trips have no adoption decision") {
  auto inst = fixtures::line_instance();
  PathMetrics m;
  CHECK_THROWS_AS(
      evaluate_choice(ChoiceModel::duration_only(), inst.trips[0], m),
      std::invalid_argument);
}

TEST_CASE("instance validation accepts the fixtures") {
  CHECK_NOTHROW(validate_instance(fixtures::line_instance()));
  CHECK_NOTHROW(validate_instance(fixtures::line_instance_all_fixed()));
  for (unsigned seed = 1; seed <= 5; ++seed)
    CHECK_NOTHROW(validate_instance(fixtures::random_instance(seed)));
}

TEST_CASE("instance validation rejects structural defects") {
  auto base = fixtures::line_instance();

  auto inst = base;
  inst.hubs.clear();
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = base;
  inst.arcs.push_back({0, 2, 1.0, 1.0, 2.0, 30.0, false});  // 0 is not a hub
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = base;
  inst.arcs.push_back(inst.arcs[2]);  // duplicate (from, to)
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = base;
  inst.arcs[1].fixed = false;  // fixed 1->2 without its reverse
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = base;
  inst.cost.theta = 1.5;
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = base;
  inst.trips[0].destination = inst.trips[0].origin;
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = base;
  inst.trips[1].alpha = 0.0;  // latent trip without a usable cutoff
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = base;
  inst.pace = 0.0;  // geometry mode needs a pace
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = base;
  inst.choice = ChoiceKind::DurationAndTransfers;
  inst.trips[1].max_transfers = -1;  // bound required under this model
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);
}
