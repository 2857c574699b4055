#include "odmts/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace odmts {

namespace {

using J = nlohmann::ordered_json;

constexpr const char* kSchema = "odmts-instance/1";

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& what) {
  throw ValidationError(origin + ": " + (path.empty() ? "$" : path) + ": " +
                        what);
}

std::string idx(const std::string& base, size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

std::string dot(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Typed field access; every failure names the offending JSON path.
struct Reader {
  std::string origin;

  const J& get(const J& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) fail(origin, path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(origin, dot(path, key), "missing");
    return *it;
  }
  const J* opt(const J& obj, const char* key) const {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }
  void keys(const J& obj, const std::string& path,
            std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(origin, path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : allowed) known = known || it.key() == k;
      if (!known) fail(origin, dot(path, it.key()), "unknown field");
    }
  }
  double num(const J& j, const std::string& path) const {
    if (!j.is_number()) fail(origin, path, "expected a number");
    return j.get<double>();
  }
  int integer(const J& j, const std::string& path) const {
    if (!j.is_number_integer()) fail(origin, path, "expected an integer");
    return j.get<int>();
  }
  bool boolean(const J& j, const std::string& path) const {
    if (!j.is_boolean()) fail(origin, path, "expected a boolean");
    return j.get<bool>();
  }
  std::string str(const J& j, const std::string& path) const {
    if (!j.is_string()) fail(origin, path, "expected a string");
    return j.get<std::string>();
  }
  const J& array(const J& j, const std::string& path) const {
    if (!j.is_array()) fail(origin, path, "expected an array");
    return j;
  }
};

std::string dump(const J& j) { return j.dump(2) + "\n"; }

}  // namespace

NetworkInstance parse_instance(const std::string& text,
                               const std::string& origin) {
  J root;
  try {
    root = J::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(origin + ": not valid JSON: " + e.what());
  }
  Reader r{origin};
  r.keys(root, "", {"schema", "units", "horizon", "cost", "choice", "stops",
                    "hubs", "arcs", "trips", "geometry", "matrices"});
  if (r.str(r.get(root, "", "schema"), "schema") != kSchema)
    fail(origin, "schema",
         std::string("unsupported; this build reads \"") + kSchema + "\"");

  NetworkInstance inst;

  const J& units = r.get(root, "", "units");
  r.keys(units, "units", {"time", "distance"});
  std::string tu = r.str(r.get(units, "units", "time"), "units.time");
  if (tu == "seconds")
    inst.time_unit = TimeUnit::Seconds;
  else if (tu == "minutes")
    inst.time_unit = TimeUnit::Minutes;
  else
    fail(origin, "units.time", "expected \"seconds\" or \"minutes\"");
  if (r.str(r.get(units, "units", "distance"), "units.distance") != "km")
    fail(origin, "units.distance", "only \"km\" is supported");

  inst.horizon = r.num(r.get(root, "", "horizon"), "horizon");
  if (inst.horizon <= 0.0) fail(origin, "horizon", "must be positive");

  const J& cost = r.get(root, "", "cost");
  r.keys(cost, "cost", {"theta", "basis", "bus_cost_dist", "bus_cost_time",
                        "shuttle_cost_dist", "shuttle_cost_time", "fare"});
  inst.cost.theta = r.num(r.get(cost, "cost", "theta"), "cost.theta");
  std::string basis = r.str(r.get(cost, "cost", "basis"), "cost.basis");
  if (basis == "distance")
    inst.cost.basis = CostBasis::Distance;
  else if (basis == "time")
    inst.cost.basis = CostBasis::Time;
  else
    fail(origin, "cost.basis", "expected \"distance\" or \"time\"");
  inst.cost.bus_cost_dist =
      r.num(r.get(cost, "cost", "bus_cost_dist"), "cost.bus_cost_dist");
  inst.cost.bus_cost_time =
      r.num(r.get(cost, "cost", "bus_cost_time"), "cost.bus_cost_time");
  inst.cost.shuttle_cost_dist =
      r.num(r.get(cost, "cost", "shuttle_cost_dist"), "cost.shuttle_cost_dist");
  inst.cost.shuttle_cost_time =
      r.num(r.get(cost, "cost", "shuttle_cost_time"), "cost.shuttle_cost_time");
  inst.cost.fare = r.num(r.get(cost, "cost", "fare"), "cost.fare");

  std::string choice = r.str(r.get(root, "", "choice"), "choice");
  if (choice == "duration_only")
    inst.choice = ChoiceKind::DurationOnly;
  else if (choice == "duration_and_transfers")
    inst.choice = ChoiceKind::DurationAndTransfers;
  else
    fail(origin, "choice",
         "expected \"duration_only\" or \"duration_and_transfers\"");

  const J& stops = r.array(r.get(root, "", "stops"), "stops");
  std::map<std::string, int> stop_ix;
  for (size_t i = 0; i < stops.size(); ++i) {
    std::string path = idx("stops", i);
    const J& s = stops[i];
    r.keys(s, path, {"id", "x", "y"});
    Stop st;
    st.id = r.str(r.get(s, path, "id"), dot(path, "id"));
    st.x = r.num(r.get(s, path, "x"), dot(path, "x"));
    st.y = r.num(r.get(s, path, "y"), dot(path, "y"));
    if (!stop_ix.emplace(st.id, static_cast<int>(i)).second)
      fail(origin, dot(path, "id"), "duplicate stop id '" + st.id + "'");
    inst.stops.push_back(std::move(st));
  }
  auto stop_ref = [&](const J& j, const std::string& path) {
    std::string id = r.str(j, path);
    auto it = stop_ix.find(id);
    if (it == stop_ix.end())
      fail(origin, path, "unknown stop id '" + id + "'");
    return it->second;
  };

  const J& hubs = r.array(r.get(root, "", "hubs"), "hubs");
  for (size_t i = 0; i < hubs.size(); ++i)
    inst.hubs.push_back(stop_ref(hubs[i], idx("hubs", i)));
  std::sort(inst.hubs.begin(), inst.hubs.end());

  const J& arcs = r.array(r.get(root, "", "arcs"), "arcs");
  for (size_t i = 0; i < arcs.size(); ++i) {
    std::string path = idx("arcs", i);
    const J& a = arcs[i];
    r.keys(a, path, {"from", "to", "time", "dist", "frequency", "wait",
                     "fixed"});
    HubArc arc;
    arc.from = stop_ref(r.get(a, path, "from"), dot(path, "from"));
    arc.to = stop_ref(r.get(a, path, "to"), dot(path, "to"));
    arc.time = r.num(r.get(a, path, "time"), dot(path, "time"));
    arc.dist = r.num(r.get(a, path, "dist"), dot(path, "dist"));
    arc.frequency = r.num(r.get(a, path, "frequency"), dot(path, "frequency"));
    if (const J* w = r.opt(a, "wait")) {
      arc.wait = r.num(*w, dot(path, "wait"));
    } else {
      if (arc.frequency <= 0.0)
        fail(origin, dot(path, "frequency"),
             "must be positive to default the wait");
      arc.wait = default_wait(inst.horizon, arc.frequency);
    }
    if (const J* f = r.opt(a, "fixed"))
      arc.fixed = r.boolean(*f, dot(path, "fixed"));
    inst.arcs.push_back(arc);
  }

  const J& trips = r.array(r.get(root, "", "trips"), "trips");
  for (size_t i = 0; i < trips.size(); ++i) {
    std::string path = idx("trips", i);
    const J& t = trips[i];
    r.keys(t, path, {"id", "origin", "destination", "riders", "kind", "alpha",
                     "t_current", "max_transfers"});
    Trip trip;
    trip.id = r.str(r.get(t, path, "id"), dot(path, "id"));
    trip.origin = stop_ref(r.get(t, path, "origin"), dot(path, "origin"));
    trip.destination =
        stop_ref(r.get(t, path, "destination"), dot(path, "destination"));
    if (const J* rr = r.opt(t, "riders"))
      trip.riders = r.num(*rr, dot(path, "riders"));
    std::string kind = r.str(r.get(t, path, "kind"), dot(path, "kind"));
    if (kind == "core") {
      trip.kind = TripKind::Core;
      for (const char* k : {"alpha", "t_current", "max_transfers"})
        if (r.opt(t, k))
          fail(origin, dot(path, k), "only latent trips take choice inputs");
    } else if (kind == "latent") {
      trip.kind = TripKind::Latent;
      trip.alpha = r.num(r.get(t, path, "alpha"), dot(path, "alpha"));
      trip.t_current =
          r.num(r.get(t, path, "t_current"), dot(path, "t_current"));
      if (const J* m = r.opt(t, "max_transfers"))
        trip.max_transfers = r.integer(*m, dot(path, "max_transfers"));
    } else {
      fail(origin, dot(path, "kind"), "expected \"core\" or \"latent\"");
    }
    inst.trips.push_back(std::move(trip));
  }

  const J* geo = r.opt(root, "geometry");
  const J* mat = r.opt(root, "matrices");
  if (!!geo == !!mat)
    fail(origin, "", "exactly one of geometry/matrices is required");
  if (geo) {
    r.keys(*geo, "geometry", {"pace"});
    inst.pace = r.num(r.get(*geo, "geometry", "pace"), "geometry.pace");
  } else {
    r.keys(*mat, "matrices", {"car_time", "car_dist"});
    auto load_matrix = [&](const char* key, std::vector<double>& out) {
      std::string base = dot("matrices", key);
      const J& m = r.array(r.get(*mat, "matrices", key), base);
      size_t n = inst.stops.size();
      if (m.size() != n)
        fail(origin, base, "expected " + std::to_string(n) + " rows");
      out.reserve(n * n);
      for (size_t i = 0; i < n; ++i) {
        const J& row = r.array(m[i], idx(base, i));
        if (row.size() != n)
          fail(origin, idx(base, i),
               "expected " + std::to_string(n) + " entries");
        for (size_t j = 0; j < n; ++j)
          out.push_back(r.num(row[j], idx(idx(base, i), j)));
      }
    };
    load_matrix("car_time", inst.car_time_matrix);
    load_matrix("car_dist", inst.car_dist_matrix);
  }

  try {
    validate_instance(inst);
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  return inst;
}

NetworkInstance load_instance(const std::string& path) {
  return parse_instance(read_text_file(path), path);
}

std::string instance_to_json(const NetworkInstance& inst) {
  J root;
  root["schema"] = kSchema;
  root["units"] = {
      {"time", inst.time_unit == TimeUnit::Seconds ? "seconds" : "minutes"},
      {"distance", "km"}};
  root["horizon"] = inst.horizon;
  root["cost"] = {
      {"theta", inst.cost.theta},
      {"basis", inst.cost.basis == CostBasis::Distance ? "distance" : "time"},
      {"bus_cost_dist", inst.cost.bus_cost_dist},
      {"bus_cost_time", inst.cost.bus_cost_time},
      {"shuttle_cost_dist", inst.cost.shuttle_cost_dist},
      {"shuttle_cost_time", inst.cost.shuttle_cost_time},
      {"fare", inst.cost.fare}};
  root["choice"] = inst.choice == ChoiceKind::DurationOnly
                       ? "duration_only"
                       : "duration_and_transfers";
  root["stops"] = J::array();
  for (const Stop& s : inst.stops)
    root["stops"].push_back({{"id", s.id}, {"x", s.x}, {"y", s.y}});
  root["hubs"] = J::array();
  for (int h : inst.hubs) root["hubs"].push_back(inst.stops[h].id);
  root["arcs"] = J::array();
  for (const HubArc& a : inst.arcs)
    root["arcs"].push_back({{"from", inst.stops[a.from].id},
                            {"to", inst.stops[a.to].id},
                            {"time", a.time},
                            {"dist", a.dist},
                            {"frequency", a.frequency},
                            {"wait", a.wait},
                            {"fixed", a.fixed}});
  root["trips"] = J::array();
  for (const Trip& t : inst.trips) {
    J j = {{"id", t.id},
           {"origin", inst.stops[t.origin].id},
           {"destination", inst.stops[t.destination].id},
           {"riders", t.riders},
           {"kind", t.kind == TripKind::Core ? "core" : "latent"}};
    if (t.kind == TripKind::Latent) {
      j["alpha"] = t.alpha;
      j["t_current"] = t.t_current;
      if (t.max_transfers >= 0) j["max_transfers"] = t.max_transfers;
    }
    root["trips"].push_back(std::move(j));
  }
  if (inst.geometry_mode()) {
    root["geometry"] = {{"pace", inst.pace}};
  } else {
    auto rows = [&](const std::vector<double>& m) {
      size_t n = inst.stops.size();
      J out = J::array();
      for (size_t i = 0; i < n; ++i) {
        J row = J::array();
        for (size_t j = 0; j < n; ++j) row.push_back(m[i * n + j]);
        out.push_back(std::move(row));
      }
      return out;
    };
    root["matrices"] = {{"car_time", rows(inst.car_time_matrix)},
                        {"car_dist", rows(inst.car_dist_matrix)}};
  }
  return dump(root);
}

void save_instance(const NetworkInstance& inst, const std::string& path) {
  write_text_file(path, instance_to_json(inst));
}

namespace {

J path_counts(const std::vector<TripPathSets>& sets) {
  size_t adopting = 0, rej_p = 0, rej_np = 0;
  int active = 0;
  for (const auto& s : sets) {
    adopting += s.adopting.size();
    rej_p += s.rejecting_profitable.size();
    rej_np += s.rejecting_nonprofitable.size();
    active += s.latent_active() ? 1 : 0;
  }
  return {{"adopting", adopting},
          {"rejecting_profitable", rej_p},
          {"rejecting_nonprofitable", rej_np},
          {"latent_trips_with_variables", active}};
}

J preprocess_block(const NetworkInstance& inst, const PreprocessResult& pre) {
  int settled = pre.summary.riders_removed_adopt +
                pre.summary.riders_removed_reject;
  return {
      {"trips",
       {{"total", inst.trips.size()},
        {"core", inst.core_trip_indices().size()},
        {"latent", inst.latent_trip_indices().size()},
        {"settled_adopt", pre.summary.riders_removed_adopt},
        {"settled_reject", pre.summary.riders_removed_reject},
        {"remaining", static_cast<int>(inst.trips.size()) - settled}}},
      {"exclusions",
       {{"shuttle_legs", pre.summary.shuttle_legs_excluded},
        {"hub_legs", pre.summary.hub_legs_excluded}}},
      {"settled_objective_constant", pre.summary.removed_constant},
      {"options",
       {{"reduce_shuttle_legs", pre.options.reduce_shuttle_legs},
        {"assign_and_remove", pre.options.assign_and_remove},
        {"remove_hub_legs", pre.options.remove_hub_legs},
        {"reduce_paths", pre.options.reduce_paths}}}};
}

}  // namespace

std::string preprocess_report_json(const NetworkInstance& inst,
                                   const PreprocessResult& pre,
                                   const std::vector<TripPathSets>* sets) {
  J rep = preprocess_block(inst, pre);
  if (sets) rep["paths"] = path_counts(*sets);
  return dump(rep);
}

std::string run_report_json(const NetworkInstance& inst,
                            const PreprocessResult& pre,
                            const std::vector<TripPathSets>& sets,
                            const BuiltModel& built, const DesignSolution& sol,
                            const std::vector<LazyRound>* rounds) {
  J rep;
  rep["status"] = to_string(sol.status);
  rep["backend"] = sol.backend;
  if (!sol.message.empty()) rep["message"] = sol.message;

  rep["objective"] = {{"total", sol.objective},
                      {"investment", sol.invest_cost},
                      {"core_riders", sol.core_cost},
                      {"adoption", sol.adoption_value},
                      {"model_units", sol.model_objective},
                      {"gap", sol.gap}};

  J open_list = J::array();
  J fixed_list = J::array();
  int opened = 0;
  if (sol.open_arcs.size() == inst.arcs.size()) {
    for (size_t k = 0; k < inst.arcs.size(); ++k) {
      if (!sol.open_arcs[k]) continue;
      const HubArc& a = inst.arcs[k];
      std::string name = inst.stops[a.from].id + "->" + inst.stops[a.to].id;
      if (a.fixed) {
        fixed_list.push_back(name);
      } else {
        open_list.push_back(name);
        ++opened;
      }
    }
  }
  rep["design"] = {{"undecided_total", inst.undecided_arc_count()},
                   {"opened", opened},
                   {"open_arcs", std::move(open_list)},
                   {"fixed_arcs", std::move(fixed_list)}};

  if (sol.trips.size() == inst.trips.size()) {
    int latent = 0, adopters = 0, settled_adopters = 0;
    int shuttle_only = 0, hub_using = 0, profitable = 0;
    double latent_riders = 0.0, adopter_riders = 0.0;
    for (size_t t = 0; t < inst.trips.size(); ++t) {
      if (inst.trips[t].kind != TripKind::Latent) continue;
      ++latent;
      latent_riders += inst.trips[t].riders;
      const TripOutcome& o = sol.trips[t];
      if (!o.adopted) continue;
      ++adopters;
      adopter_riders += inst.trips[t].riders;
      if (o.settled) ++settled_adopters;
      if (o.path.hub_legs().empty())
        ++shuttle_only;
      else
        ++hub_using;
      if (o.contribution < 0.0) ++profitable;
    }
    rep["adoption"] = {
        {"latent_trips", latent},
        {"adopters", adopters},
        {"settled_adopters", settled_adopters},
        {"shuttle_only", shuttle_only},
        {"hub_using", hub_using},
        {"profitable", profitable},
        {"latent_riders", latent_riders},
        {"adopter_riders", adopter_riders},
        {"trip_share", latent > 0 ? static_cast<double>(adopters) / latent : 0.0},
        {"rider_share",
         latent_riders > 0.0 ? adopter_riders / latent_riders : 0.0}};
  }

  rep["preprocessing"] = preprocess_block(inst, pre);
  rep["paths"] = path_counts(sets);
  rep["model"] = {{"formulation", built.formulation == Formulation::RiderFlow
                                      ? "rider-flow"
                                      : "path-choice"},
                  {"lexicographic", built.lexicographic},
                  {"scale", built.scale},
                  {"variables", built.mip.var_count()},
                  {"binaries", built.mip.binary_count()},
                  {"rows", built.mip.row_count()}};
  rep["timings"] = {{"solve_seconds", sol.solve_seconds},
                    {"solver_calls", sol.solver_calls},
                    {"lazy_rounds", sol.lazy_rounds}};
  if (rounds) {
    J log = J::array();
    for (const LazyRound& r : *rounds)
      log.push_back({{"model_objective", r.model_objective},
                     {"carried", r.carried},
                     {"added", r.added}});
    rep["lazy"] = std::move(log);
  }
  return dump(rep);
}

std::string design_geojson(const NetworkInstance& inst,
                           const std::vector<char>& open_arcs) {
  J features = J::array();
  for (size_t s = 0; s < inst.stops.size(); ++s) {
    const Stop& st = inst.stops[s];
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "Point"}, {"coordinates", {st.x, st.y}}}},
         {"properties",
          {{"id", st.id}, {"hub", inst.is_hub(static_cast<int>(s))}}}});
  }
  for (size_t k = 0; k < inst.arcs.size(); ++k) {
    const HubArc& a = inst.arcs[k];
    const Stop& u = inst.stops[a.from];
    const Stop& v = inst.stops[a.to];
    bool open = k < open_arcs.size() && open_arcs[k];
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "LineString"},
           {"coordinates", {{u.x, u.y}, {v.x, v.y}}}}},
         {"properties",
          {{"from", u.id}, {"to", v.id}, {"fixed", a.fixed}, {"open", open}}}});
  }
  J fc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return dump(fc);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ValidationError("error while reading '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw ValidationError("error while writing '" + path + "'");
}

}  // namespace odmts
