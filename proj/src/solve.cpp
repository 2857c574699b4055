#include "odmts/solve.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "milp_server_embed.hpp"
#include "odmts/trip_graph.hpp"

namespace odmts {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Error: return "error";
  }
  return "error";
}

namespace {

using nlohmann::json;

// Writes on a pipe whose reader died must surface as errors, not signals.
void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string python_interpreter() {
  const char* env = std::getenv("ODMTS_PYTHON");
  return env && *env ? env : "python3";
}

// A child process spoken to over stdin/stdout lines. stderr is inherited.
class Subprocess {
 public:
  Subprocess() = default;
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;
  ~Subprocess() { shutdown(""); }

  bool running() const { return pid_ > 0; }

  void spawn(const std::vector<std::string>& argv) {
    ignore_sigpipe_once();
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
      throw SolverError("failed to create solver pipes");
    pid_t pid = ::fork();
    if (pid < 0) throw SolverError("failed to fork solver subprocess");
    if (pid == 0) {
      ::dup2(to_child[0], 0);
      ::dup2(from_child[1], 1);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]})
        ::close(fd);
      std::vector<char*> args;
      args.reserve(argv.size() + 1);
      for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
      args.push_back(nullptr);
      ::execvp(args[0], args.data());
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    pid_ = pid;
    in_ = to_child[1];
    out_ = from_child[0];
    buf_.clear();
  }

  void write_line(const std::string& line) {
    std::string data = line;
    data.push_back('\n');
    size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(in_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw SolverError("solver subprocess is not accepting input");
      }
      off += static_cast<size_t>(n);
    }
  }

  std::string read_line(int timeout_ms) {
    while (true) {
      auto nl = buf_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return line;
      }
      struct pollfd pfd{out_, POLLIN, 0};
      int pr = ::poll(&pfd, 1, timeout_ms);
      if (pr == 0) throw SolverError("solver subprocess timed out");
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw SolverError("failed to poll solver subprocess");
      }
      char chunk[65536];
      ssize_t n = ::read(out_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw SolverError("failed to read from solver subprocess");
      }
      if (n == 0) throw SolverError("solver subprocess exited unexpectedly");
      buf_.append(chunk, static_cast<size_t>(n));
    }
  }

  void shutdown(const std::string& farewell) {
    if (!running()) return;
    if (!farewell.empty()) {
      try {
        write_line(farewell);
      } catch (const SolverError&) {
      }
    }
    ::close(in_);
    ::close(out_);
    in_ = out_ = -1;
    int status = 0;
    for (int i = 0; i < 50; ++i) {  // ~0.5s of grace, then kill
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      ::usleep(10'000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }

 private:
  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::string buf_;
};

json bound_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

json encode_request(const MipModel& m, const SolveOptions& opt) {
  json req;
  req["action"] = "solve";
  json obj = json::array(), lb = json::array(), ub = json::array();
  json integrality = json::array();
  for (const auto& v : m.vars()) {
    obj.push_back(v.objective);
    lb.push_back(bound_json(v.lb));
    ub.push_back(bound_json(v.ub));
    integrality.push_back(v.type == VarType::Binary ? 1 : 0);
  }
  req["obj"] = std::move(obj);
  req["lb"] = std::move(lb);
  req["ub"] = std::move(ub);
  req["integrality"] = std::move(integrality);
  json rows = json::array();
  for (const auto& r : m.rows()) {
    json row;
    row["lb"] = bound_json(r.lb);
    row["ub"] = bound_json(r.ub);
    json terms = json::array();
    for (const auto& [col, coef] : r.terms)
      terms.push_back(json::array({col, coef}));
    row["terms"] = std::move(terms);
    rows.push_back(std::move(row));
  }
  req["rows"] = std::move(rows);
  req["rel_gap"] = opt.rel_gap;
  req["time_limit"] =
      opt.time_limit > 0 ? json(opt.time_limit) : json(nullptr);
  return req;
}

RawSolution decode_response(const json& res, size_t n_vars) {
  RawSolution out;
  std::string status = res.value("status", "error");
  out.message = res.value("message", "");
  bool has_values = res.contains("values");
  if (status == "optimal" && has_values) {
    out.status = SolveStatus::Optimal;
  } else if (status == "limit" && has_values) {
    out.status = SolveStatus::Feasible;
  } else if (status == "infeasible") {
    out.status = SolveStatus::Infeasible;
  } else if (status == "unbounded") {
    out.status = SolveStatus::Unbounded;
  } else {
    out.status = SolveStatus::Error;
    if (out.message.empty()) out.message = "solver answered: " + status;
    return out;
  }
  if (has_values) {
    out.values = res["values"].get<std::vector<double>>();
    if (out.values.size() != n_vars)
      throw SolverError("solver returned " + std::to_string(out.values.size()) +
                        " values for " + std::to_string(n_vars) + " variables");
    out.objective = res.value("objective", 0.0);
    out.gap = res.value("gap", 0.0);
  }
  return out;
}

// Runs scipy's HiGHS wrapper in a long-lived python subprocess, one JSON
// line per request. The server script is compiled into the binary, so the
// backend works from any directory. Starting hints are not forwarded; the
// wrapper has no warm-start interface.
class SubprocessHighsBackend : public SolverBackend {
 public:
  std::string name() const override { return "highs"; }

  bool available() const override {
    if (avail_ < 0) {
      std::string cmd = "\"" + python_interpreter() +
                        "\" -c 'import scipy.optimize, numpy' >/dev/null 2>&1";
      avail_ = std::system(cmd.c_str()) == 0 ? 1 : 0;
    }
    return avail_ == 1;
  }

  RawSolution solve(const MipModel& model, const SolveOptions& opt) override {
    std::string request = encode_request(model, opt).dump();
    int timeout_ms = opt.time_limit > 0
                         ? static_cast<int>((opt.time_limit + 300.0) * 1000.0)
                         : 7'200'000;
    std::string line;
    for (int attempt = 0;; ++attempt) {
      try {
        ensure_server(opt);
        proc_.write_line(request);
        line = proc_.read_line(timeout_ms);
        break;
      } catch (const SolverError&) {
        proc_.shutdown("");
        if (attempt >= 1) throw;
      }
    }
    json res = json::parse(line, nullptr, false);
    if (res.is_discarded())
      throw SolverError("solver subprocess wrote malformed output");
    return decode_response(res, model.var_count());
  }

  ~SubprocessHighsBackend() override { proc_.shutdown(R"({"action":"quit"})"); }

 private:
  void ensure_server(const SolveOptions& opt) {
    if (proc_.running()) return;
    if (opt.threads > 0)
      ::setenv("OMP_NUM_THREADS", std::to_string(opt.threads).c_str(), 1);
    proc_.spawn({python_interpreter(), "-c", detail::kMilpServerSource});
    proc_.write_line(R"({"action":"ping"})");
    // first answer waits for the scipy import
    std::string pong = proc_.read_line(120'000);
    json res = json::parse(pong, nullptr, false);
    if (res.is_discarded() || res.value("status", "") != "ok")
      throw SolverError("solver subprocess failed its handshake: " + pong);
  }

  Subprocess proc_;
  mutable int avail_ = -1;
};

// Placeholder for workflows that only export models.
class NullBackend : public SolverBackend {
 public:
  std::string name() const override { return "null"; }
  bool available() const override { return true; }
  RawSolution solve(const MipModel&, const SolveOptions&) override {
    RawSolution out;
    out.status = SolveStatus::Error;
    out.message = "the null backend does not solve; export the model instead";
    return out;
  }
};

using Factory = std::function<std::unique_ptr<SolverBackend>()>;

std::map<std::string, Factory>& registry() {
  static std::map<std::string, Factory> r = {
      {"highs", [] { return std::unique_ptr<SolverBackend>(new SubprocessHighsBackend); }},
      {"null", [] { return std::unique_ptr<SolverBackend>(new NullBackend); }},
  };
  return r;
}

}  // namespace

void register_backend(const std::string& name, Factory factory) {
  registry()[name] = std::move(factory);
}

std::vector<std::string> backend_names() {
  std::vector<std::string> names;
  for (const auto& [name, factory] : registry()) names.push_back(name);
  return names;
}

std::unique_ptr<SolverBackend> make_backend(const std::string& name) {
  std::string resolved = name;
  if (resolved.empty()) {
    const char* env = std::getenv("ODMTS_SOLVER");
    resolved = env && *env ? env : "highs";
  }
  auto it = registry().find(resolved);
  if (it == registry().end())
    throw ValidationError("unknown solver backend: " + resolved);
  return it->second();
}

namespace {

struct Candidate {
  Path path;
  PathMetrics m;
};

// (duration, legs, leg sequence), exact comparisons; used inside a
// same-weighted-cost tie set where determinism matters more than slack.
bool shorter(const Candidate& a, const Candidate& b) {
  if (a.m.duration != b.m.duration) return a.m.duration < b.m.duration;
  if (a.path.legs.size() != b.path.legs.size())
    return a.path.legs.size() < b.path.legs.size();
  return a.path < b.path;
}

}  // namespace

TripOutcome follower_outcome(const NetworkInstance& inst, const CostModel& costs,
                             const ChoiceModel& choice, int trip_index,
                             const std::vector<char>& open_arcs,
                             FollowerMode mode) {
  if (costs.transformed())
    throw ValidationError("follower evaluation expects plain costs");
  const Trip& trip = inst.trips.at(static_cast<size_t>(trip_index));

  TripGraphOptions gopt;
  gopt.hub_arc_allowed = &open_arcs;
  TripGraph g = build_trip_graph(inst, costs, trip, gopt);

  KShortestStream stream(g, Channel::WeightedCost);
  auto first = stream.next();
  if (!first)  // cannot happen: the direct shuttle is always present
    throw ValidationError("trip " + trip.id + " has no itinerary");
  double best = first->value;
  std::vector<Candidate> ties;
  ties.push_back({first->path, graph_metrics(g, first->path)});
  constexpr size_t kTieCap = 4096;
  while (auto p = stream.next()) {
    if (!leq_tol(p->value, best)) break;
    ties.push_back({p->path, graph_metrics(g, p->path)});
    if (ties.size() > kTieCap)
      throw ResourceLimitError("trip " + trip.id +
                               ": minimum-cost tie set exceeds its cap");
  }

  // Duration-aware riders only stay indifferent among equally fast ties.
  if (mode == FollowerMode::Lexicographic) {
    double t_best = std::numeric_limits<double>::infinity();
    for (const auto& c : ties) t_best = std::min(t_best, c.m.duration);
    std::erase_if(ties, [&](const Candidate& c) {
      return !approx_eq(c.m.duration, t_best);
    });
  }

  TripOutcome out;
  out.trip = trip_index;
  if (trip.kind == TripKind::Core) {
    const Candidate& pick =
        mode == FollowerMode::Lexicographic
            ? *std::min_element(ties.begin(), ties.end(), shorter)
            : ties.front();
    out.served = true;
    out.path = pick.path;
    out.metrics = pick.m;
    out.contribution = trip.riders * pick.m.weighted_cost;
    return out;
  }

  // Remaining indifference resolves in the operator's favor.
  const Candidate* adopting = nullptr;
  const Candidate* declining = nullptr;
  for (const auto& c : ties) {
    if (choice.adopts(trip, c.m)) {
      if (!adopting) adopting = &c;
    } else if (!declining) {
      declining = &c;
    }
  }
  double phi_bar = costs.fare_weight();
  bool adopt = adopting && (!declining ||
                            trip.riders * (adopting->m.weighted_cost - phi_bar) < 0.0);
  const Candidate& pick = adopt ? *adopting : (declining ? *declining : ties.front());
  out.served = out.adopted = adopt;
  out.path = pick.path;
  out.metrics = pick.m;
  out.contribution = adopt ? trip.riders * (pick.m.weighted_cost - phi_bar) : 0.0;
  return out;
}

namespace {

std::vector<char> decode_open_arcs(const NetworkInstance& inst,
                                   const BuiltModel& built,
                                   const std::vector<double>& values) {
  std::vector<char> open(inst.arcs.size(), 0);
  for (size_t k = 0; k < inst.arcs.size(); ++k) {
    double v = values[static_cast<size_t>(built.z[k])];
    double r = std::round(v);
    if (std::fabs(v - r) > 1e-4)
      throw SolverError("design variable for arc " + std::to_string(k) +
                        " came back fractional: " + std::to_string(v));
    open[k] = r > 0.5 ? 1 : 0;
  }
  return open;
}

DesignSolution decode_solution(const NetworkInstance& inst, const CostModel& costs,
                               const ChoiceModel& choice,
                               const PreprocessResult& pre,
                               const BuiltModel& built, const RawSolution& raw,
                               bool verify, const std::string& backend_name,
                               double seconds) {
  DesignSolution sol;
  sol.backend = backend_name;
  sol.solve_seconds = seconds;
  sol.status = raw.status;
  sol.gap = raw.gap;
  sol.message = raw.message;
  if (raw.status != SolveStatus::Optimal && raw.status != SolveStatus::Feasible)
    return sol;

  sol.model_objective = raw.objective + built.mip.objective_offset;
  sol.open_arcs = decode_open_arcs(inst, built, raw.values);

  FollowerMode mode = built.lexicographic ? FollowerMode::Lexicographic
                                          : FollowerMode::Generalized;

  // Independent accounting: invest from the design, trip terms from exact
  // follower re-solves. `model_accum` rebuilds the solver's objective in
  // model units without reusing the model's own offset, so settlement,
  // folding, and formulation errors all surface as a mismatch.
  double invest = 0.0;
  double model_accum = 0.0;
  for (size_t k = 0; k < inst.arcs.size(); ++k) {
    if (!sol.open_arcs[k]) continue;
    double beta = costs.beta(inst.arcs[k]);
    invest += beta;
    model_accum += built.scale * beta;
  }
  double core = 0.0, adoption = 0.0;
  sol.trips.resize(inst.trips.size());
  for (size_t t = 0; t < inst.trips.size(); ++t) {
    const Trip& trip = inst.trips[t];
    TripOutcome out = follower_outcome(inst, costs, choice, static_cast<int>(t),
                                       sol.open_arcs, mode);
    out.settled = trip.kind == TripKind::Latent && pre.trips[t].removed;
    if (trip.kind == TripKind::Core) {
      core += out.contribution;
      model_accum += built.scale * out.contribution +
                     (built.lexicographic ? trip.riders * out.metrics.duration : 0.0);
    } else {
      adoption += out.contribution;
      if (out.adopted)
        model_accum += built.scale * out.contribution +
                       (built.lexicographic ? trip.riders * out.metrics.duration : 0.0);
    }
    sol.trips[t] = std::move(out);
  }
  sol.invest_cost = invest;
  sol.core_cost = core;
  sol.adoption_value = adoption;
  sol.objective = invest + core + adoption;

  if (verify && raw.status == SolveStatus::Optimal) {
    double reported = built.mip.objective_value(raw.values);
    if (!rel_close(reported, sol.model_objective))
      throw SolverError("solver objective drifts from its own assignment: " +
                        std::to_string(raw.objective) + " vs " +
                        std::to_string(reported - built.mip.objective_offset));
    double viol = built.mip.max_row_violation(raw.values);
    double viol_tol = 1e-5 * std::max(1.0, built.scale);
    if (viol > viol_tol)
      throw SolverError("solution violates a model row by " + std::to_string(viol));
    if (!rel_close(model_accum, sol.model_objective))
      throw SolverError("model objective " + std::to_string(sol.model_objective) +
                        " disagrees with the follower re-solve " +
                        std::to_string(model_accum));
  }
  return sol;
}

}  // namespace

DesignSolution solve_design(const NetworkInstance& inst, const CostModel& costs,
                            const ChoiceModel& choice, const PreprocessResult& pre,
                            const BuiltModel& built, SolverBackend& backend,
                            const SolveOptions& opt) {
  if (costs.transformed())
    throw ValidationError("solve_design expects plain costs; the model carries its own fold");
  auto t0 = std::chrono::steady_clock::now();
  RawSolution raw = backend.solve(built.mip, opt);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return decode_solution(inst, costs, choice, pre, built, raw, opt.verify,
                         backend.name(), seconds);
}

DesignSolution lazy_constraint_solve(const NetworkInstance& inst,
                                     const CostModel& costs,
                                     const ChoiceModel& choice,
                                     const PreprocessResult& pre,
                                     const std::vector<TripPathSets>& sets,
                                     SolverBackend& backend,
                                     const LazyOptions& opt,
                                     std::vector<LazyRound>* rounds) {
  if (opt.build.formulation != Formulation::RiderFlow)
    throw ValidationError("the lazy loop is defined for the arc-flow formulation");
  if (costs.transformed())
    throw ValidationError("lazy_constraint_solve expects plain costs");
  if (sets.size() != inst.trips.size())
    throw ValidationError("path sets are not aligned with the trip list");

  double phi_bar = costs.fare_weight();
  std::vector<std::vector<char>> carried(sets.size());
  size_t carried_count = 0;
  for (size_t t = 0; t < sets.size(); ++t) {
    const TripPathSets& s = sets[t];
    carried[t].assign(s.paths.size(), 0);
    auto mark = [&](int i) {
      if (!carried[t][static_cast<size_t>(i)]) {
        carried[t][static_cast<size_t>(i)] = 1;
        ++carried_count;
      }
    };
    for (int i : s.rejecting_profitable) mark(i);  // always carried in full
    if (opt.seed == LazySeed::Everything) {
      for (int i : s.adopting) mark(i);
    } else if (opt.seed == LazySeed::Profitable) {
      for (int i : s.adopting)
        if (definitely_less(s.paths[static_cast<size_t>(i)].metrics.weighted_cost,
                            phi_bar))
          mark(i);
    }
  }

  // (from, to) -> candidate arc, for the is-this-path-open test
  std::map<std::pair<int, int>, size_t> arc_of;
  for (size_t k = 0; k < inst.arcs.size(); ++k)
    arc_of[{inst.arcs[k].from, inst.arcs[k].to}] = k;
  auto path_open = [&](const Path& path, const std::vector<char>& open) {
    for (const Leg& leg : path.legs)
      if (leg.kind == LegKind::Hub && !open[arc_of.at({leg.from, leg.to})])
        return false;
    return true;
  };

  double seconds = 0.0;
  for (int round = 1;; ++round) {
    if (round > opt.max_rounds)
      throw ResourceLimitError("lazy loop did not settle within " +
                               std::to_string(opt.max_rounds) + " rounds");

    std::vector<TripPathSets> partial = sets;
    for (size_t t = 0; t < partial.size(); ++t) {
      auto keep = [&](std::vector<int>& idx) {
        std::erase_if(idx, [&](int i) { return !carried[t][static_cast<size_t>(i)]; });
      };
      keep(partial[t].adopting);
      keep(partial[t].rejecting_profitable);
    }
    BuiltModel built = build_model(inst, costs, pre, partial, opt.build);

    auto t0 = std::chrono::steady_clock::now();
    RawSolution raw = backend.solve(built.mip, opt.solve);
    seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (raw.status != SolveStatus::Optimal)
      throw SolverError(std::string("lazy round ended ") + to_string(raw.status) +
                        (raw.message.empty() ? "" : ": " + raw.message));

    std::vector<char> open = decode_open_arcs(inst, built, raw.values);
    FollowerMode mode = built.lexicographic ? FollowerMode::Lexicographic
                                            : FollowerMode::Generalized;
    auto model_g = [&](const PathMetrics& m) {
      return built.scale * m.weighted_cost +
             (built.lexicographic ? m.duration : 0.0);
    };

    size_t added = 0;
    size_t carried_before = carried_count;
    for (size_t t = 0; t < sets.size(); ++t) {
      const Trip& trip = inst.trips[t];
      const TripPathSets& s = sets[t];
      if (trip.kind != TripKind::Latent || pre.trips[t].removed ||
          s.adopting.empty())
        continue;

      TripOutcome truth = follower_outcome(inst, costs, choice,
                                           static_cast<int>(t), open, mode);
      double truth_model =
          truth.adopted ? built.scale * truth.contribution +
                              (built.lexicographic
                                   ? trip.riders * truth.metrics.duration
                                   : 0.0)
                        : 0.0;

      double claimed = 0.0;
      double g_temp;
      const TripVarMap& vars = built.trips[t];
      if (vars.built) {
        for (const auto& lam : vars.chosen)
          claimed += std::round(raw.values[static_cast<size_t>(lam.second)]) *
                     built.mip.vars()[static_cast<size_t>(lam.second)].objective;
        g_temp = raw.values[static_cast<size_t>(vars.g)];
      } else {
        // trip omitted this round: it claims nothing, and the flow cost it
        // would attain is its follower optimum
        g_temp = model_g(truth.metrics);
      }
      bool mismatch = !rel_close(claimed, truth_model, 1e-7);
      double tol = kEps * built.scale;

      auto scan = [&](const std::vector<int>& members) {
        for (int i : members) {
          if (carried[t][static_cast<size_t>(i)]) continue;
          const ClassifiedPath& cp = s.paths[static_cast<size_t>(i)];
          if (!path_open(cp.path, open)) continue;
          double mg = model_g(cp.metrics);
          bool cheaper = mg < g_temp - tol;
          bool dodged_tie = mismatch && cp.adopts && mg <= g_temp + tol;
          if (cheaper || dodged_tie) {
            carried[t][static_cast<size_t>(i)] = 1;
            ++carried_count;
            ++added;
          }
        }
      };
      scan(s.adopting);
      scan(s.rejecting_profitable);
    }

    if (rounds)
      rounds->push_back({raw.objective + built.mip.objective_offset,
                         carried_before, added});
    if (added == 0) {
      DesignSolution sol =
          decode_solution(inst, costs, choice, pre, built, raw,
                          opt.solve.verify, backend.name(), seconds);
      sol.lazy_rounds = round;
      sol.solver_calls = round;
      return sol;
    }
  }
}

}  // namespace odmts
