#pragma once

#include "odmts/mip_model.hpp"
#include "odmts/path_enum.hpp"

namespace odmts {

// Two single-level restatements of the design problem.
//  - RiderFlow routes every still-undecided rider through arc-flow
//    variables, bounds the attained cost by per-path availability
//    indicators, and detects adoption by matching the flow against each
//    adopted pattern. Needs the adopted and rejected-but-cheap sets only.
//  - PathChoice gives each still-undecided rider one selection variable
//    per enumerated path and pins the chosen path to the cheapest
//    available one. Needs the complete path set, so it cannot be paired
//    with demand-driven enumeration.
// Must-serve riders are plain arc flows under either formulation.
enum class Formulation { RiderFlow, PathChoice };

struct BuildOptions {
  Formulation formulation = Formulation::RiderFlow;
  // Fold durations into the weighted channel so the solver breaks cost
  // ties by duration; objectives are then in folded units.
  bool lexicographic = false;
  // LP-relax the arc flows of must-serve riders. Undecided riders keep
  // binary flows; adoption detection needs integral patterns.
  bool relax_core_flow = false;
  // Replace adoption detection by lambda <= f alone. Cheaper, but it lets
  // the solver claim an adoption the rider would not make whenever that
  // helps the objective; kept for experiments, off by default.
  bool lambda_leq_availability = false;
  // Record a feasible starting hint (backbone-only design).
  bool warm_start = false;
  size_t max_vars = 5'000'000;
  size_t max_rows = 20'000'000;
};

// Variable handles for one trip; -1 or empty when absent. `g` is the
// attained-cost variable of flow trips and the chosen-cost variable of
// PathChoice undecided trips.
struct TripVarMap {
  bool built = false;
  int g = -1;
  std::vector<std::pair<int, int>> x;       // (candidate arc index, var)
  std::vector<std::pair<Leg, int>> y;       // (shuttle leg, var)
  std::vector<std::pair<int, int>> avail;   // (path index, f var)
  std::vector<std::pair<int, int>> chosen;  // (path index, lambda var)
};

struct BuiltModel {
  MipModel mip;
  Formulation formulation = Formulation::RiderFlow;
  bool lexicographic = false;
  double scale = 1.0;           // duration-fold multiplier, 1 when plain
  std::vector<int> z;           // per candidate arc
  std::vector<TripVarMap> trips;
  double settled_cost = 0.0;    // unfolded constant from settled riders
};

struct ModelSizes {
  size_t vars = 0;
  size_t binaries = 0;
  size_t rows = 0;
};

// Structural counts computed from the reduced sets alone, without emitting
// anything; the built model must match them exactly.
ModelSizes predict_sizes(const NetworkInstance& inst, const CostModel& costs,
                         const PreprocessResult& pre,
                         const std::vector<TripPathSets>& sets,
                         const BuildOptions& opt = {});

// Assembles the chosen formulation over the reduced variable domains and
// path sets. `costs` must be the plain cost model; the duration fold is
// applied internally when requested, after a per-trip check that folded
// path costs keep the (cost, duration) order. Throws ResourceLimitError
// when predicted sizes exceed the option guards.
BuiltModel build_model(const NetworkInstance& inst, const CostModel& costs,
                       const PreprocessResult& pre,
                       const std::vector<TripPathSets>& sets,
                       const BuildOptions& opt = {});

}  // namespace odmts
