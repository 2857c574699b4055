#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "odmts/choice.hpp"
#include "odmts/mip_build.hpp"

namespace odmts {

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, Error };
const char* to_string(SolveStatus s);

struct SolveOptions {
  double rel_gap = 0.0;     // relative MIP gap target; 0 demands exactness
  double time_limit = 0.0;  // seconds; 0 disables the limit
  int threads = 0;          // 0 leaves the solver default
  bool verify = true;       // re-derive the objective after optimal solves
};

// Raw solver answer in model units, objective offset not yet applied.
struct RawSolution {
  SolveStatus status = SolveStatus::Error;
  std::vector<double> values;
  double objective = 0.0;
  double gap = 0.0;
  std::string message;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual bool available() const = 0;
  virtual RawSolution solve(const MipModel& model, const SolveOptions& opt) = 0;
};

// Registry. make_backend("") resolves $ODMTS_SOLVER, then "highs".
// "highs" drives scipy's HiGHS wrapper over a python subprocess;
// "null" never solves and exists so model export works without python.
void register_backend(const std::string& name,
                      std::function<std::unique_ptr<SolverBackend>()> factory);
std::vector<std::string> backend_names();
std::unique_ptr<SolverBackend> make_backend(const std::string& name = "");

// How a rider breaks ties among cheapest paths: Generalized picks whatever
// suits the operator best (the optimistic bilevel convention), Lexicographic
// prefers the shorter duration, then fewer legs, then lexicographic order.
enum class FollowerMode { Generalized, Lexicographic };

struct TripOutcome {
  int trip = -1;
  bool settled = false;  // decided by preprocessing, not by the solver
  bool served = false;   // rides the system: core riders or adopters
  bool adopted = false;  // latent riders only
  Path path;             // best itinerary under the design (also for
                         // non-adopters, as the offer they declined)
  PathMetrics metrics;
  double contribution = 0.0;  // objective share in plain cost units
};

struct DesignSolution {
  SolveStatus status = SolveStatus::Error;
  std::string backend;
  std::string message;
  double gap = 0.0;
  std::vector<char> open_arcs;   // per NetworkInstance::hub_arcs
  double model_objective = 0.0;  // solver units (duration-folded when the
                                 // model was built lexicographic)
  double objective = 0.0;        // plain units, recomputed from outcomes
  double invest_cost = 0.0;      // objective = invest + core + adoption
  double core_cost = 0.0;
  double adoption_value = 0.0;
  std::vector<TripOutcome> trips;  // indexed like NetworkInstance::trips
  double solve_seconds = 0.0;
  int solver_calls = 1;
  int lazy_rounds = 0;
};

// Exact follower response for one trip under a fixed design, in plain cost
// units. The design graph allows every shuttle leg and only open hub arcs.
TripOutcome follower_outcome(const NetworkInstance& inst, const CostModel& costs,
                             const ChoiceModel& choice, int trip_index,
                             const std::vector<char>& open_arcs,
                             FollowerMode mode);

// Solves a built model and decodes the design. The follower mode is implied
// by how the model was built (lexicographic or not). When opt.verify is set
// and the solve was optimal, the solver objective is cross-checked against
// an independent follower re-solve per trip; disagreement throws SolverError.
DesignSolution solve_design(const NetworkInstance& inst, const CostModel& costs,
                            const ChoiceModel& choice, const PreprocessResult& pre,
                            const BuiltModel& built, SolverBackend& backend,
                            const SolveOptions& opt = {});

// Which paths the lazy loop carries before the first solve. The cheap
// rejected set is always carried in full.
//  - Profitable (default): also every adopting path priced under the fare
//    weight. Each partial model is then a relaxation of the full one, which
//    makes termination at the exact optimum provable.
//  - RejectingOnly: nothing else. Converges in practice but the partial
//    models can overestimate unvisited designs, so no exactness guarantee.
//  - Everything: all carried; one round, identical to the direct solve.
enum class LazySeed { Profitable, RejectingOnly, Everything };

struct LazyRound {
  double model_objective = 0.0;  // the round's partial optimum, model units
  size_t carried = 0;            // paths carried into the round
  size_t added = 0;              // paths the separation added afterwards
};

struct LazyOptions {
  LazySeed seed = LazySeed::Profitable;
  int max_rounds = 200;
  BuildOptions build;  // formulation must remain RiderFlow
  SolveOptions solve;
};

// Iterative variant of the arc-flow solve: build with a subset of carried
// paths, solve, then per rider compare the modeled outcome against an exact
// follower re-solve and carry the missing paths (any open path cheaper than
// the attained flow cost, plus adopting ties when the claimed contribution
// is off). Repeats until nothing is added; the final solution passes the
// same verification as solve_design. Appends one entry per round to
// `rounds` when given.
DesignSolution lazy_constraint_solve(const NetworkInstance& inst,
                                     const CostModel& costs,
                                     const ChoiceModel& choice,
                                     const PreprocessResult& pre,
                                     const std::vector<TripPathSets>& sets,
                                     SolverBackend& backend,
                                     const LazyOptions& opt = {},
                                     std::vector<LazyRound>* rounds = nullptr);

}  // namespace odmts
