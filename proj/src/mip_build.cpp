#include "odmts/mip_build.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "odmts/common.hpp"
#include "odmts/costs.hpp"
#include "odmts/trip_graph.hpp"

namespace odmts {

namespace {

std::string pair_tag(int i, int j) {
  return std::to_string(i) + "_" + std::to_string(j);
}

// Per-trip variable domains. Arc-flow variables follow the preprocessing
// mask directly; shuttle variables and the vertex set come from the trip
// graph so they match the enumeration side exactly.
struct FlowDomain {
  TripGraph graph;
  std::vector<int> x_arcs;
  std::vector<Leg> y_legs;
};

FlowDomain flow_domain(const NetworkInstance& inst, const CostModel& costs,
                       const Trip& trip, const TripReduction& red) {
  FlowDomain d;
  TripGraphOptions o;
  o.shuttle_cost_cap = red.shuttle_cap;
  d.graph = build_trip_graph(inst, costs, trip, o);
  for (size_t k = 0; k < inst.arcs.size(); ++k)
    if (red.arc_ok[k]) d.x_arcs.push_back(static_cast<int>(k));
  for (const auto& a : d.graph.arcs)
    if (a.kind == LegKind::Shuttle) d.y_legs.push_back(a.leg());
  return d;
}

bool trip_active(const Trip& trip, const TripReduction& red,
                 const TripPathSets& s) {
  if (trip.kind == TripKind::Core) return true;
  return !red.removed && !s.adopting.empty();
}

std::map<std::pair<int, int>, int> candidate_arc_index(
    const NetworkInstance& inst) {
  std::map<std::pair<int, int>, int> m;
  for (size_t k = 0; k < inst.arcs.size(); ++k)
    m[{inst.arcs[k].from, inst.arcs[k].to}] = static_cast<int>(k);
  return m;
}

std::vector<int> path_arc_ids(const Path& p,
                              const std::map<std::pair<int, int>, int>& ix) {
  std::vector<int> ids;
  for (const auto& l : p.legs)
    if (l.kind == LegKind::Hub) ids.push_back(ix.at({l.from, l.to}));
  return ids;
}

// The flow polytope admits two consecutive shuttle legs through a hub, a
// shape no valid itinerary has. Such a detour must never undercut the
// direct ride, in either channel, or the flow could claim a cost no rider
// can attain.
void check_shuttle_triangle(const NetworkInstance& inst,
                            const CostModel& costs, const Trip& trip) {
  int o = trip.origin, d = trip.destination;
  double direct_w = shuttle_leg_cost(inst.cost, inst.car_dist(o, d),
                                     inst.car_time(o, d));
  double direct_t = inst.car_time(o, d);
  for (int h : inst.hubs) {
    if (h == o || h == d) continue;
    double w = shuttle_leg_cost(inst.cost, inst.car_dist(o, h),
                                inst.car_time(o, h)) +
               shuttle_leg_cost(inst.cost, inst.car_dist(h, d),
                                inst.car_time(h, d));
    double t = inst.car_time(o, h) + inst.car_time(h, d);
    if (definitely_less(w, direct_w) ||
        (costs.transformed() && definitely_less(t, direct_t)))
      throw ValidationError(
          "shuttle costs violate the triangle inequality via hub " +
          std::to_string(h) + " for trip " + trip.id);
  }
}

// The duration fold must keep the (cost, duration) order of every
// enumerated path; otherwise a folded comparison could prefer the wrong
// path and the folded model would not restate the plain one.
void check_fold_order(const TripPathSets& s, double scale,
                      const std::string& trip_id) {
  std::vector<int> idx(s.paths.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const auto& ma = s.paths[a].metrics;
    const auto& mb = s.paths[b].metrics;
    if (ma.weighted_cost != mb.weighted_cost)
      return ma.weighted_cost < mb.weighted_cost;
    return ma.duration < mb.duration;
  });
  for (size_t i = 1; i < idx.size(); ++i) {
    const auto& a = s.paths[idx[i - 1]].metrics;
    const auto& b = s.paths[idx[i]].metrics;
    if (!definitely_less(a.weighted_cost, b.weighted_cost)) continue;
    double fa = scale * a.weighted_cost + a.duration;
    double fb = scale * b.weighted_cost + b.duration;
    if (fa > fb)
      throw ValidationError("duration fold reorders the paths of trip " +
                            trip_id +
                            "; cost gaps are too small for the fold scale");
  }
}

}  // namespace

ModelSizes predict_sizes(const NetworkInstance& inst, const CostModel& costs,
                         const PreprocessResult& pre,
                         const std::vector<TripPathSets>& sets,
                         const BuildOptions& opt) {
  if (sets.size() != inst.trips.size() || pre.trips.size() != inst.trips.size())
    throw ValidationError("preprocessing and path sets must cover every trip");
  auto arc_ix = candidate_arc_index(inst);

  ModelSizes out;
  out.vars = inst.arcs.size();
  out.binaries = inst.arcs.size();
  out.rows = inst.hubs.size() + inst.fixed_arc_count();

  for (size_t t = 0; t < inst.trips.size(); ++t) {
    const Trip& trip = inst.trips[t];
    const TripReduction& red = pre.trips[t];
    const TripPathSets& s = sets[t];
    if (!trip_active(trip, red, s)) continue;
    bool core = trip.kind == TripKind::Core;
    bool flow = core || opt.formulation == Formulation::RiderFlow;

    size_t zr = 0, lr = 0, vr = 0;
    if (flow) {
      FlowDomain d = flow_domain(inst, costs, trip, red);
      zr = d.x_arcs.size();
      lr = d.y_legs.size();
      vr = d.graph.vertices.size();
      out.vars += zr + lr + 1;
      if (!(opt.relax_core_flow && core)) out.binaries += zr + lr;
      out.rows += 1 + vr + zr;
    }
    if (core) continue;

    size_t na = s.adopting.size();
    size_t nrp = s.rejecting_profitable.size();
    if (opt.formulation == Formulation::RiderFlow) {
      out.vars += 2 * na + nrp;
      out.binaries += 2 * na + nrp;
      if (opt.lambda_leq_availability) {
        out.rows += 3 * (na + nrp) + na;
      } else {
        size_t masked_on = 0;  // adopted legs priced out of the flow domain
        for (int i : s.adopting)
          for (int k : path_arc_ids(s.paths[i].path, arc_ix))
            if (!red.arc_ok[k]) masked_on++;
        out.rows += na * (zr + 4) + 3 * nrp + masked_on;
      }
    } else {
      size_t np = s.paths.size();
      size_t legs = 0;
      for (const auto& cp : s.paths)
        legs += cp.path.hub_legs().size();
      out.vars += 2 * np + 1;
      out.binaries += 2 * np;
      out.rows += 4 * np + 1 + legs;
    }
  }
  return out;
}

BuiltModel build_model(const NetworkInstance& inst, const CostModel& costs,
                       const PreprocessResult& pre,
                       const std::vector<TripPathSets>& sets,
                       const BuildOptions& opt) {
  if (costs.transformed())
    throw ValidationError("build_model folds durations itself; pass plain costs");
  if (opt.formulation == Formulation::PathChoice)
    for (const auto& s : sets)
      if (s.latent_active() && !s.complete)
        throw ValidationError(
            "the path-choice formulation needs complete path sets; "
            "enumerate exhaustively (trip " +
            inst.trips[s.trip].id + " has a demand-driven set)");
  auto sizes = predict_sizes(inst, costs, pre, sets, opt);
  if (sizes.vars > opt.max_vars || sizes.rows > opt.max_rows)
    throw ResourceLimitError("model needs " + std::to_string(sizes.vars) +
                             " variables and " + std::to_string(sizes.rows) +
                             " rows, above the configured cap");

  BuiltModel B;
  B.formulation = opt.formulation;
  B.lexicographic = opt.lexicographic;
  double scale = 1.0;
  CostModel mc = costs;
  if (opt.lexicographic) {
    scale = lex_scale_for(inst);
    mc = CostModel::lexicographic(inst, scale);
  }
  B.scale = scale;
  const double phi_bar = mc.fare_weight();
  auto model_g = [&](const PathMetrics& m) {
    return opt.lexicographic ? scale * m.weighted_cost + m.duration
                             : m.weighted_cost;
  };
  auto gbar_model = [&](const TripReduction& red) {
    return opt.lexicographic ? scale * red.g_fixed + scale / 100.0
                             : red.g_fixed;
  };

  MipModel& M = B.mip;
  M.name = opt.formulation == Formulation::RiderFlow ? "riderflow"
                                                     : "pathchoice";
  auto arc_ix = candidate_arc_index(inst);

  B.z.resize(inst.arcs.size());
  for (size_t k = 0; k < inst.arcs.size(); ++k) {
    const HubArc& a = inst.arcs[k];
    double lb = a.fixed ? 1.0 : 0.0;
    B.z[k] = M.add_var("z_" + pair_tag(a.from, a.to), VarType::Binary, lb, 1.0,
                       mc.beta(a));
    if (opt.warm_start) M.hints.emplace_back(B.z[k], lb);
  }

  // Every opened hub must be left as often as it is entered.
  for (int h : inst.hubs) {
    std::vector<std::pair<int, double>> terms;
    for (size_t k = 0; k < inst.arcs.size(); ++k) {
      if (inst.arcs[k].from == h) terms.emplace_back(B.z[k], 1.0);
      if (inst.arcs[k].to == h) terms.emplace_back(B.z[k], -1.0);
    }
    M.add_row("bal_h" + std::to_string(h), std::move(terms), 0.0, 0.0);
  }
  for (size_t k = 0; k < inst.arcs.size(); ++k)
    if (inst.arcs[k].fixed)
      M.add_row("pin_" + pair_tag(inst.arcs[k].from, inst.arcs[k].to),
                {{B.z[k], 1.0}}, 1.0, 1.0);

  B.trips.resize(inst.trips.size());
  for (size_t t = 0; t < inst.trips.size(); ++t) {
    const Trip& trip = inst.trips[t];
    const TripReduction& red = pre.trips[t];
    const TripPathSets& s = sets[t];
    const std::string tt = "t" + std::to_string(t);
    bool core = trip.kind == TripKind::Core;

    if (!core && red.removed) {
      M.objective_offset += opt.lexicographic
                                ? scale * red.constant +
                                      trip.riders * red.removed_duration
                                : red.constant;
      B.settled_cost += red.constant;
      continue;
    }
    if (!trip_active(trip, red, s)) continue;

    TripVarMap& tv = B.trips[t];
    tv.built = true;
    if (opt.lexicographic && !core) check_fold_order(s, scale, trip.id);

    std::vector<int> xvar(inst.arcs.size(), -1);
    bool flow = core || opt.formulation == Formulation::RiderFlow;
    if (flow) {
      check_shuttle_triangle(inst, mc, trip);
      FlowDomain d = flow_domain(inst, costs, trip, red);
      bool relax = opt.relax_core_flow && core;
      VarType vt = relax ? VarType::Continuous : VarType::Binary;
      for (int k : d.x_arcs) {
        const HubArc& a = inst.arcs[k];
        int v = M.add_var("x_" + tt + "_" + pair_tag(a.from, a.to), vt, 0.0,
                          1.0, 0.0);
        tv.x.emplace_back(k, v);
        xvar[k] = v;
      }
      for (const Leg& l : d.y_legs) {
        int v = M.add_var("y_" + tt + "_" + pair_tag(l.from, l.to), vt, 0.0,
                          1.0, 0.0);
        tv.y.emplace_back(l, v);
      }
      tv.g = M.add_var("g_" + tt, VarType::Continuous, 0.0, kInf,
                       core ? trip.riders : 0.0);

      // Unit flow origin -> destination over the trip's vertices.
      std::vector<std::vector<std::pair<int, double>>> by_vertex(
          d.graph.vertices.size());
      for (const auto& [k, v] : tv.x) {
        by_vertex[d.graph.local(inst.arcs[k].from)].emplace_back(v, 1.0);
        by_vertex[d.graph.local(inst.arcs[k].to)].emplace_back(v, -1.0);
      }
      for (const auto& [l, v] : tv.y) {
        by_vertex[d.graph.local(l.from)].emplace_back(v, 1.0);
        by_vertex[d.graph.local(l.to)].emplace_back(v, -1.0);
      }
      for (size_t i = 0; i < d.graph.vertices.size(); ++i) {
        int sv = d.graph.vertices[i];
        double rhs = sv == trip.origin ? 1.0 : (sv == trip.destination ? -1.0 : 0.0);
        M.add_row("flow_" + tt + "_s" + std::to_string(sv),
                  std::move(by_vertex[i]), rhs, rhs);
      }

      std::vector<std::pair<int, double>> gdef{{tv.g, 1.0}};
      for (const auto& [k, v] : tv.x) gdef.emplace_back(v, -mc.tau(inst.arcs[k]));
      for (const auto& [l, v] : tv.y) gdef.emplace_back(v, -mc.gamma(l.from, l.to));
      M.add_row("cost_" + tt, std::move(gdef), 0.0, 0.0);

      for (const auto& [k, v] : tv.x)
        M.add_row("cap_" + tt + "_" + pair_tag(inst.arcs[k].from,
                                               inst.arcs[k].to),
                  {{v, 1.0}, {B.z[k], -1.0}}, -kInf, 0.0);
    }
    if (core) continue;

    std::vector<char> adopt(s.paths.size(), 0);
    for (int i : s.adopting) adopt[i] = 1;

    if (opt.formulation == Formulation::RiderFlow) {
      double mr = gbar_model(red);
      std::vector<char> carried(s.paths.size(), 0);
      for (int i : s.adopting) carried[i] = 1;
      for (int i : s.rejecting_profitable) carried[i] = 1;

      std::vector<int> fvar(s.paths.size(), -1), lvar(s.paths.size(), -1);
      for (size_t i = 0; i < s.paths.size(); ++i) {
        if (!carried[i]) continue;
        const std::string pt = tt + "_p" + std::to_string(i);
        fvar[i] = M.add_var("f_" + pt, VarType::Binary, 0.0, 1.0, 0.0);
        tv.avail.emplace_back(static_cast<int>(i), fvar[i]);
        if (adopt[i]) {
          double coeff = trip.riders * (model_g(s.paths[i].metrics) - phi_bar);
          lvar[i] = M.add_var("l_" + pt, VarType::Binary, 0.0, 1.0, coeff);
          tv.chosen.emplace_back(static_cast<int>(i), lvar[i]);
        }
      }

      for (size_t i = 0; i < s.paths.size(); ++i) {
        if (!carried[i]) continue;
        const std::string pt = tt + "_p" + std::to_string(i);
        auto on = path_arc_ids(s.paths[i].path, arc_ix);
        double n = static_cast<double>(on.size());

        std::vector<std::pair<int, double>> avail{{fvar[i], -n}};
        for (int k : on) avail.emplace_back(B.z[k], 1.0);
        M.add_row("avail_" + pt, std::move(avail), 0.0, kInf);

        std::vector<std::pair<int, double>> force{{fvar[i], -1.0}};
        for (int k : on) force.emplace_back(B.z[k], 1.0);
        M.add_row("force_" + pt, std::move(force), -kInf, n - 1.0);

        M.add_row("gub_" + pt, {{tv.g, 1.0}, {fvar[i], mr}}, -kInf,
                  model_g(s.paths[i].metrics) + mr);

        if (!adopt[i]) continue;
        if (opt.lambda_leq_availability) {
          M.add_row("lf_" + pt, {{lvar[i], 1.0}, {fvar[i], -1.0}}, -kInf, 0.0);
          continue;
        }
        // Adoption detection: lambda = 1 exactly when the flow matches
        // this path's hub legs. Legs priced out of the flow domain count
        // as permanently unused.
        std::vector<char> on_mask(inst.arcs.size(), 0);
        for (int k : on) on_mask[k] = 1;
        std::vector<std::pair<int, double>> match{{lvar[i], 1.0}};
        for (int k : on) {
          if (xvar[k] >= 0) {
            M.add_row("on_" + pt + "_a" + std::to_string(k),
                      {{lvar[i], 1.0}, {xvar[k], -1.0}}, -kInf, 0.0);
            match.emplace_back(xvar[k], -1.0);
          } else {
            M.add_row("on_" + pt + "_a" + std::to_string(k),
                      {{lvar[i], 1.0}}, -kInf, 0.0);
          }
        }
        for (const auto& [k, v] : tv.x) {
          if (on_mask[k]) continue;
          M.add_row("off_" + pt + "_a" + std::to_string(k),
                    {{lvar[i], 1.0}, {v, 1.0}}, -kInf, 1.0);
          match.emplace_back(v, 1.0);
        }
        M.add_row("match_" + pt, std::move(match), 1.0 - n, kInf);
      }
    } else {
      double mbase = gbar_model(red);
      tv.g = M.add_var("m_" + tt, VarType::Continuous, 0.0, kInf, 0.0);

      std::vector<int> fvar(s.paths.size(), -1), lvar(s.paths.size(), -1);
      std::vector<std::pair<int, double>> pick;
      for (size_t i = 0; i < s.paths.size(); ++i) {
        const std::string pt = tt + "_p" + std::to_string(i);
        fvar[i] = M.add_var("f_" + pt, VarType::Binary, 0.0, 1.0, 0.0);
        double coeff =
            adopt[i] ? trip.riders * (model_g(s.paths[i].metrics) - phi_bar)
                     : 0.0;
        lvar[i] = M.add_var("l_" + pt, VarType::Binary, 0.0, 1.0, coeff);
        tv.avail.emplace_back(static_cast<int>(i), fvar[i]);
        tv.chosen.emplace_back(static_cast<int>(i), lvar[i]);
        pick.emplace_back(lvar[i], 1.0);
      }
      for (size_t i = 0; i < s.paths.size(); ++i) {
        const std::string pt = tt + "_p" + std::to_string(i);
        auto on = path_arc_ids(s.paths[i].path, arc_ix);
        double gp = model_g(s.paths[i].metrics);
        double mp = std::max(mbase, gp);

        for (int k : on)
          M.add_row("avail_" + pt + "_a" + std::to_string(k),
                    {{fvar[i], 1.0}, {B.z[k], -1.0}}, -kInf, 0.0);
        std::vector<std::pair<int, double>> force{{fvar[i], -1.0}};
        for (int k : on) force.emplace_back(B.z[k], 1.0);
        M.add_row("force_" + pt, std::move(force), -kInf,
                  static_cast<double>(on.size()) - 1.0);
        M.add_row("mub_" + pt, {{tv.g, 1.0}, {fvar[i], mp}}, -kInf, gp + mp);
        M.add_row("lf_" + pt, {{lvar[i], 1.0}, {fvar[i], -1.0}}, -kInf, 0.0);
        M.add_row("mlb_" + pt, {{tv.g, 1.0}, {lvar[i], -mp}}, gp - mp, kInf);
      }
      M.add_row("pick_" + tt, std::move(pick), 1.0, 1.0);
    }
  }
  return B;
}

}  // namespace odmts
