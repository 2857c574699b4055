#include <doctest.h>

#include <set>

#include "odmts/path_enum.hpp"
#include "support/fixtures.hpp"
#include "support/reference.hpp"

using namespace odmts;

namespace {

std::set<Path> pick(const TripPathSets& s, const std::vector<int>& idx) {
  std::set<Path> out;
  for (int i : idx) out.insert(s.paths[i].path);
  return out;
}

// Classified sets recomputed from first principles over the chain
// enumerator: adopt / reject-cheap / reject-expensive, optional cutoff.
struct RefSets {
  std::set<Path> adopt, reject_cheap, reject_dear;
};

RefSets ref_sets(const NetworkInstance& inst, const Trip& trip,
                 const ChoiceModel& choice, std::optional<double> cutoff) {
  RefSets out;
  double phi_bar = ref::fare_weight(inst);
  for (const auto& p : ref::enumerate_paths(inst, trip)) {
    auto m = ref::metrics(inst, p);
    if (cutoff && m.g > *cutoff + 1e-9) continue;
    PathMetrics pm{m.g, m.t, m.transfers};
    if (choice.adopts(trip, pm))
      out.adopt.insert(p);
    else if (m.g < phi_bar - 1e-9)
      out.reject_cheap.insert(p);
    else
      out.reject_dear.insert(p);
  }
  return out;
}

}  // namespace

TEST_CASE("exhaustive sets on the line fixture") {
  auto inst = fixtures::line_instance();
  CostModel costs(inst);
  auto choice = ChoiceModel::duration_only();

  auto s = enumerate_trip(inst, costs, choice, 1, EnumMethod::Exhaustive);
  CHECK(s.paths.size() == 13);
  CHECK(s.adopting.size() == 4);  // direct + three one-hub routes
  CHECK(s.rejecting_profitable.empty());  // fare weight 3 is below any path
  CHECK(s.rejecting_nonprofitable.size() == 9);
  CHECK(s.latent_active());

  // sorted by weighted cost, cheapest is the 1->3 route at 10.75
  CHECK(s.paths[0].metrics.weighted_cost == doctest::Approx(10.75));
  CHECK(s.paths[0].path ==
        Path{{{0, 1, LegKind::Shuttle}, {1, 3, LegKind::Hub},
              {3, 4, LegKind::Shuttle}}});
  for (size_t i = 1; i < s.paths.size(); ++i)
    CHECK(s.paths[i - 1].metrics.weighted_cost <=
          s.paths[i].metrics.weighted_cost + 1e-12);
}

TEST_CASE("path reduction keeps only improving paths") {
  auto inst = fixtures::line_instance();
  CostModel costs(inst);
  auto choice = ChoiceModel::duration_only();
  auto pre = preprocess(inst, costs, choice);

  auto s = enumerate_trip(inst, costs, choice, 1, EnumMethod::Exhaustive, &pre);
  REQUIRE(s.paths.size() == 2);  // bound 12: the 10.75 route and the direct
  CHECK(s.paths[0].metrics.weighted_cost == doctest::Approx(10.75));
  CHECK(s.paths[1].metrics.weighted_cost == doctest::Approx(12.0));
  CHECK(s.adopting.size() == 2);
}

TEST_CASE("demand-driven equals exhaustive on the fixture variants") {
  auto base = fixtures::line_instance();
  for (double fare : {4.0, 16.0, 60.0}) {
    auto inst = base;
    inst.cost.fare = fare;
    CostModel costs(inst);
    auto choice = ChoiceModel::duration_only();

    for (bool reduced : {false, true}) {
      auto pre = preprocess(inst, costs, choice,
                            reduced ? PreprocessOptions{}
                                    : PreprocessOptions::none());
      auto ex = enumerate_trip(inst, costs, choice, 1,
                               EnumMethod::Exhaustive, &pre);
      auto dd = enumerate_trip(inst, costs, choice, 1,
                               EnumMethod::DemandDriven, &pre);
      CHECK(ex.removed == dd.removed);
      CHECK(pick(ex, ex.adopting) == pick(dd, dd.adopting));
      CHECK(pick(ex, ex.rejecting_profitable) ==
            pick(dd, dd.rejecting_profitable));
    }
  }
}

TEST_CASE("exhaustive matches the chain reference classification") {
  for (unsigned seed = 1; seed <= 12; ++seed) {
    auto inst = fixtures::random_instance(seed, 9, 5, 6);
    CostModel costs(inst);
    auto choice = ChoiceModel::duration_only();
    auto pre = preprocess(inst, costs, choice, PreprocessOptions::none());

    for (size_t t = 0; t < inst.trips.size(); ++t) {
      if (inst.trips[t].kind != TripKind::Latent) continue;
      auto s = enumerate_trip(inst, costs, choice, static_cast<int>(t),
                              EnumMethod::Exhaustive, &pre);
      auto want = ref_sets(inst, inst.trips[t], choice, std::nullopt);
      CHECK(pick(s, s.adopting) == want.adopt);
      CHECK(pick(s, s.rejecting_profitable) == want.reject_cheap);
      CHECK(pick(s, s.rejecting_nonprofitable) == want.reject_dear);
    }
  }
}

TEST_CASE("both methods agree on reduced sets across random instances") {
  for (unsigned seed = 1; seed <= 12; ++seed) {
    auto inst = fixtures::random_instance(seed, 9, 5, 6);
    CostModel costs(inst);
    auto choice = ChoiceModel::duration_only();

    for (bool reduced : {false, true}) {
      auto pre = preprocess(inst, costs, choice,
                            reduced ? PreprocessOptions{}
                                    : PreprocessOptions::none());
      auto ex = enumerate_latent(inst, costs, choice, EnumMethod::Exhaustive,
                                 &pre);
      auto dd = enumerate_latent(inst, costs, choice, EnumMethod::DemandDriven,
                                 &pre);
      for (size_t t = 0; t < inst.trips.size(); ++t) {
        if (inst.trips[t].kind != TripKind::Latent) continue;
        CHECK(ex[t].removed == dd[t].removed);
        CHECK(pick(ex[t], ex[t].adopting) == pick(dd[t], dd[t].adopting));
        CHECK(pick(ex[t], ex[t].rejecting_profitable) ==
              pick(dd[t], dd[t].rejecting_profitable));
        // reference cross-check of the reduced adopted set
        auto want = ref_sets(inst, inst.trips[t], choice,
                             reduced ? std::optional<double>(
                                           pre.trips[t].g_fixed)
                                     : std::nullopt);
        if (!ex[t].removed) CHECK(pick(ex[t], ex[t].adopting) == want.adopt);
      }
    }
  }
}

TEST_CASE("bounded-legs adopting mode matches the duration stream") {
  for (unsigned seed = 1; seed <= 8; ++seed) {
    auto inst = fixtures::random_instance(seed, 9, 5, 6);
    inst.choice = ChoiceKind::DurationAndTransfers;
    for (auto& t : inst.trips)
      if (t.kind == TripKind::Latent) t.max_transfers = 2;
    CostModel costs(inst);
    auto choice = ChoiceModel::duration_and_transfers();
    auto pre = preprocess(inst, costs, choice);

    EnumOptions stream_mode, legs_mode;
    legs_mode.adopting_mode = AdoptingSetMode::BoundedLegs;
    for (size_t t = 0; t < inst.trips.size(); ++t) {
      if (inst.trips[t].kind != TripKind::Latent) continue;
      auto a = enumerate_trip(inst, costs, choice, static_cast<int>(t),
                              EnumMethod::DemandDriven, &pre, stream_mode);
      auto b = enumerate_trip(inst, costs, choice, static_cast<int>(t),
                              EnumMethod::DemandDriven, &pre, legs_mode);
      CHECK(pick(a, a.adopting) == pick(b, b.adopting));
      CHECK(pick(a, a.rejecting_profitable) ==
            pick(b, b.rejecting_profitable));
    }
  }
}

TEST_CASE("settled trips come back empty and inactive") {
  auto inst = fixtures::line_instance();
  Trip t;
  t.id = "settle";
  t.origin = 1;
  t.destination = 2;
  t.riders = 2.0;
  t.kind = TripKind::Latent;
  t.alpha = 2.0;
  t.t_current = 1.0;  // cutoff 2 < direct 3: rejects everything attainable
  inst.trips.push_back(t);
  CostModel costs(inst);
  auto choice = ChoiceModel::duration_only();
  auto pre = preprocess(inst, costs, choice);
  REQUIRE(pre.trips[2].removed);

  auto s = enumerate_trip(inst, costs, choice, 2, EnumMethod::Exhaustive, &pre);
  CHECK(s.removed);
  CHECK(s.paths.empty());
  CHECK_FALSE(s.latent_active());
}

TEST_CASE("demand-driven rejects unstructured choice models") {
  auto inst = fixtures::line_instance();
  CostModel costs(inst);
  auto whims = ChoiceModel::custom(
      [](const Trip&, const PathMetrics& m) { return m.transfers % 2 == 0; },
      "even-transfers");
  CHECK_THROWS_AS(
      enumerate_trip(inst, costs, whims, 1, EnumMethod::DemandDriven),
      ValidationError);
  CHECK_NOTHROW(enumerate_trip(inst, costs, whims, 1, EnumMethod::Exhaustive));
}

TEST_CASE("core trips cannot be enumerated") {
  auto inst = fixtures::line_instance();
  CostModel costs(inst);
  CHECK_THROWS_AS(enumerate_trip(inst, costs, ChoiceModel::duration_only(), 0,
                                 EnumMethod::Exhaustive),
                  std::invalid_argument);
}
