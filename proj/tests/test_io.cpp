// Instance files, reports, and the GeoJSON export.

#include <doctest.h>

#include <cstdio>
#include <string>

#include <json.hpp>

#include "odmts/io.hpp"
#include "odmts/oracle.hpp"
#include "support/fixtures.hpp"

using namespace odmts;
using nlohmann::json;

namespace {

// Substring assertion with a readable failure message.
void check_contains(const std::string& hay, const std::string& needle) {
  INFO("text: " << hay);
  CHECK(hay.find(needle) != std::string::npos);
}

void check_load_fails(std::string text, const std::string& needle) {
  try {
    parse_instance(text, "f.json");
    FAIL_CHECK("expected a ValidationError mentioning " << needle);
  } catch (const ValidationError& e) {
    check_contains(e.what(), needle);
  }
}

// A minimal-but-complete document the error tests mutate.
json base_doc() {
  return json::parse(R"({
    "schema": "odmts-instance/1",
    "units": {"time": "minutes", "distance": "km"},
    "horizon": 60,
    "cost": {"theta": 0.3, "basis": "distance", "bus_cost_dist": 1,
             "bus_cost_time": 0, "shuttle_cost_dist": 1,
             "shuttle_cost_time": 0, "fare": 2},
    "choice": "duration_only",
    "stops": [{"id": "a", "x": 0, "y": 0}, {"id": "b", "x": 1, "y": 0}],
    "hubs": [],
    "arcs": [],
    "trips": [{"id": "t0", "origin": "a", "destination": "b", "kind": "core"}],
    "geometry": {"pace": 2}
  })");
}

}  // namespace

TEST_CASE("a minimal hub-less file loads") {
  auto inst = parse_instance(base_doc().dump());
  CHECK(inst.stops.size() == 2);
  CHECK(inst.hubs.empty());
  CHECK(inst.arcs.empty());
  REQUIRE(inst.trips.size() == 1);
  CHECK(inst.trips[0].riders == 1.0);  // defaulted
  CHECK(inst.trips[0].kind == TripKind::Core);
  CHECK(inst.time_unit == TimeUnit::Minutes);
  CHECK(inst.pace == 2.0);

  // Hub-less means a single design: everyone rides the direct shuttle.
  CostModel costs(inst);
  auto res = oracle_solve(inst, costs, ChoiceModel::duration_only(), {});
  CHECK(res.designs_checked == 1);
  CHECK(res.invest_cost == 0.0);
  CHECK(res.objective == doctest::Approx(costs.gamma(0, 1)).epsilon(1e-12));
}

TEST_CASE("serialization round-trips in geometry and matrix mode") {
  auto geo = fixtures::line_instance();
  auto mat = fixtures::line_instance();
  int n = mat.n_stops();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mat.car_time_matrix.push_back(geo.car_time(i, j));
      mat.car_dist_matrix.push_back(geo.car_dist(i, j));
    }
  mat.pace = 0.0;

  for (const auto& inst : {geo, mat}) {
    std::string s1 = instance_to_json(inst);
    NetworkInstance back = parse_instance(s1);
    std::string s2 = instance_to_json(back);
    CHECK(s1 == s2);
    CHECK(back.geometry_mode() == inst.geometry_mode());
    CHECK(back.stops.size() == inst.stops.size());
    CHECK(back.hubs == inst.hubs);
    REQUIRE(back.arcs.size() == inst.arcs.size());
    for (size_t k = 0; k < inst.arcs.size(); ++k) {
      CHECK(back.arcs[k].from == inst.arcs[k].from);
      CHECK(back.arcs[k].wait == inst.arcs[k].wait);
      CHECK(back.arcs[k].fixed == inst.arcs[k].fixed);
    }
    REQUIRE(back.trips.size() == inst.trips.size());
    CHECK(back.trips[1].alpha == inst.trips[1].alpha);
    CHECK(back.car_time(0, 4) == doctest::Approx(inst.car_time(0, 4)));
  }
}

TEST_CASE("file save and load round-trip through disk") {
  auto inst = fixtures::random_instance(5);
  std::string path = "io_roundtrip_tmp.json";
  save_instance(inst, path);
  NetworkInstance back = load_instance(path);
  CHECK(instance_to_json(back) == instance_to_json(inst));
  std::remove(path.c_str());
}

TEST_CASE("omitted waits default to half the headway") {
  json doc = base_doc();
  doc["stops"].push_back({{"id", "h1"}, {"x", 2}, {"y", 0}});
  doc["stops"].push_back({{"id", "h2"}, {"x", 3}, {"y", 0}});
  doc["hubs"] = {"h1", "h2"};
  doc["arcs"] = {{{"from", "h1"}, {"to", "h2"}, {"time", 5}, {"dist", 1},
                  {"frequency", 4}, {"fixed", false}},
                 {{"from", "h2"}, {"to", "h1"}, {"time", 5}, {"dist", 1},
                  {"frequency", 4}, {"wait", 9}, {"fixed", false}}};
  auto inst = parse_instance(doc.dump());
  CHECK(inst.arcs[0].wait == doctest::Approx(60.0 / (2 * 4)));
  CHECK(inst.arcs[1].wait == 9.0);
}

TEST_CASE("loader errors name the offending field") {
  json doc = base_doc();
  doc["hubs"] = {"zz"};
  check_load_fails(doc.dump(), "hubs[0]");
  check_load_fails(doc.dump(), "unknown stop id 'zz'");

  doc = base_doc();
  doc["schema"] = "odmts-instance/2";
  check_load_fails(doc.dump(), "schema");

  doc = base_doc();
  doc["trips"][0]["kind"] = "latnet";
  check_load_fails(doc.dump(), "trips[0].kind");

  doc = base_doc();
  doc["trips"][0]["alpha"] = 1.5;  // core trips take no choice inputs
  check_load_fails(doc.dump(), "trips[0].alpha");

  doc = base_doc();
  doc["matrices"] = {{"car_time", {{0, 1}, {1, 0}}},
                     {"car_dist", {{0, 1}, {1, 0}}}};
  check_load_fails(doc.dump(), "exactly one of geometry/matrices");

  doc = base_doc();
  doc.erase("geometry");
  doc["matrices"] = {{"car_time", {{0, 1}}}, {"car_dist", {{0, 1}, {1, 0}}}};
  check_load_fails(doc.dump(), "matrices.car_time");

  doc = base_doc();
  doc["units"]["distance"] = "miles";
  check_load_fails(doc.dump(), "units.distance");

  doc = base_doc();
  doc["stops"][1]["id"] = "a";
  check_load_fails(doc.dump(), "stops[1].id");

  check_load_fails("{not json", "not valid JSON");

  // Unknown keys fail loudly instead of being ignored.
  doc = base_doc();
  doc["trips"][0]["ryders"] = 3;
  check_load_fails(doc.dump(), "trips[0].ryders");

  // Structural invariants are re-checked after resolution.
  doc = base_doc();
  doc["trips"][0]["destination"] = "a";
  check_load_fails(doc.dump(), "origin equals destination");
}

TEST_CASE("preprocess report carries counts and toggles") {
  auto inst = fixtures::line_instance();
  CostModel costs(inst);
  auto choice = ChoiceModel::duration_only();
  auto pre = preprocess(inst, costs, choice, {});
  auto sets = enumerate_latent(inst, costs, choice, EnumMethod::Exhaustive, &pre);

  json rep = json::parse(preprocess_report_json(inst, pre, &sets));
  CHECK(rep["trips"]["total"] == 2);
  CHECK(rep["trips"]["core"] == 1);
  CHECK(rep["trips"]["latent"] == 1);
  int settled = rep["trips"]["settled_adopt"].get<int>() +
                rep["trips"]["settled_reject"].get<int>();
  CHECK(rep["trips"]["remaining"] == 2 - settled);
  CHECK(rep["options"]["reduce_paths"] == true);
  CHECK(rep.contains("paths"));
  CHECK(rep["exclusions"]["shuttle_legs"] ==
        pre.summary.shuttle_legs_excluded);
}

TEST_CASE("run report cross-foots and mirrors the solution") {
  auto inst = fixtures::line_instance();
  CostModel costs(inst);
  auto choice = ChoiceModel::duration_only();
  auto pre = preprocess(inst, costs, choice, {});
  auto sets = enumerate_latent(inst, costs, choice, EnumMethod::Exhaustive, &pre);
  auto built = build_model(inst, costs, pre, sets, {});
  auto backend = make_backend("highs");
  REQUIRE(backend->available());
  auto sol = solve_design(inst, costs, choice, pre, built, *backend, {});
  REQUIRE(sol.status == SolveStatus::Optimal);

  json rep = json::parse(run_report_json(inst, pre, sets, built, sol));
  CHECK(rep["status"] == "optimal");
  CHECK(rep["backend"] == "highs");
  double total = rep["objective"]["total"].get<double>();
  double parts = rep["objective"]["investment"].get<double>() +
                 rep["objective"]["core_riders"].get<double>() +
                 rep["objective"]["adoption"].get<double>();
  CHECK(total == doctest::Approx(parts).epsilon(1e-12));
  CHECK(total == doctest::Approx(51.0));
  CHECK(rep["design"]["opened"] == 0);
  CHECK(rep["design"]["open_arcs"].size() == 0);
  CHECK(rep["design"]["fixed_arcs"].size() == 2);
  CHECK(rep["adoption"]["adopters"] == 1);
  CHECK(rep["adoption"]["adopters"].get<int>() ==
        rep["adoption"]["shuttle_only"].get<int>() +
            rep["adoption"]["hub_using"].get<int>());
  CHECK(rep["adoption"]["trip_share"] == doctest::Approx(1.0));
  CHECK(rep["model"]["variables"] == built.mip.var_count());
  CHECK(rep["model"]["rows"] == built.mip.row_count());
  CHECK(rep["timings"]["solver_calls"] == 1);

  // The lazy round log is appended when provided.
  std::vector<LazyRound> rounds;
  auto lazy = lazy_constraint_solve(inst, costs, choice, pre, sets, *backend,
                                    {}, &rounds);
  json rep2 =
      json::parse(run_report_json(inst, pre, sets, built, lazy, &rounds));
  CHECK(rep2["lazy"].size() == rounds.size());
  CHECK(rep2["timings"]["lazy_rounds"].get<int>() == lazy.lazy_rounds);
}

TEST_CASE("design export emits one feature per stop and arc") {
  auto inst = fixtures::line_instance();
  std::vector<char> open(inst.arcs.size(), 0);
  for (size_t k = 0; k < inst.arcs.size(); ++k) open[k] = inst.arcs[k].fixed;

  json rep = json::parse(design_geojson(inst, open));
  CHECK(rep["type"] == "FeatureCollection");
  REQUIRE(rep["features"].size() == inst.stops.size() + inst.arcs.size());
  int points = 0, lines = 0, open_lines = 0, hubs = 0;
  for (const auto& f : rep["features"]) {
    std::string kind = f["geometry"]["type"].get<std::string>();
    if (kind == "Point") {
      ++points;
      hubs += f["properties"]["hub"].get<bool>() ? 1 : 0;
    } else if (kind == "LineString") {
      ++lines;
      open_lines += f["properties"]["open"].get<bool>() ? 1 : 0;
    }
  }
  CHECK(points == 5);
  CHECK(hubs == 3);
  CHECK(lines == 6);
  CHECK(open_lines == 2);
}
