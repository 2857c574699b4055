// Batch command-line surface. Exit codes: 0 success, 1 unexpected failure
// or disagreement, 2 invalid input, 3 resource guard, 4 solver limit or
// solver failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odmts/generate.hpp"
#include "odmts/io.hpp"
#include "odmts/oracle.hpp"

namespace {

using namespace odmts;
using J = nlohmann::ordered_json;

struct Options {
  std::string instance;
  std::string formulation = "ppath";
  std::string enum_method;  // empty = pe-dcm, or pe when cpath is chosen
  std::string follower = "generalized";
  bool no_preprocess = false;
  std::vector<std::string> skip_steps;
  bool lazy = false;
  bool relax_xy = false;
  bool warm_start = false;
  bool paranoid = false;
  bool geojson = false;
  double gap = 0.0;
  double time_limit = 0.0;
  int threads = 0;
  std::string out_dir = ".";
  std::string export_model;

  // generate
  GenerateSpec gen;
  bool matrices = false;
  std::string gen_basis = "distance";
  std::string gen_choice = "duration-only";
  std::string out_file;
};

Formulation parse_formulation(const std::string& s) {
  return s == "cpath" ? Formulation::PathChoice : Formulation::RiderFlow;
}

FollowerMode parse_follower(const std::string& s) {
  return s == "lex" ? FollowerMode::Lexicographic : FollowerMode::Generalized;
}

PreprocessOptions preprocess_options(const Options& o) {
  if (!o.no_preprocess) return {};
  std::vector<std::string> steps;
  for (const std::string& s : o.skip_steps)
    if (!s.empty()) steps.push_back(s);  // a bare flag parses as one empty token
  if (steps.empty()) return PreprocessOptions::none();
  PreprocessOptions p;
  for (const std::string& s : steps) {
    if (s == "shuttle-legs")
      p.reduce_shuttle_legs = false;
    else if (s == "assign-remove")
      p.assign_and_remove = false;
    else if (s == "hub-legs")
      p.remove_hub_legs = false;
    else if (s == "paths")
      p.reduce_paths = false;
    else
      throw ValidationError("--no-preprocess: unknown step '" + s +
                            "'; steps are shuttle-legs, assign-remove, "
                            "hub-legs, paths");
  }
  return p;
}

EnumMethod enum_method(const Options& o, Formulation f) {
  std::string m = o.enum_method;
  if (m.empty()) m = f == Formulation::PathChoice ? "pe" : "pe-dcm";
  return m == "pe" ? EnumMethod::Exhaustive : EnumMethod::DemandDriven;
}

std::string arc_name(const NetworkInstance& inst, const HubArc& a) {
  return inst.stops[a.from].id + "->" + inst.stops[a.to].id;
}

int cmd_solve(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  CostModel costs(inst);
  ChoiceModel choice = ChoiceModel::from_kind(inst.choice);
  Formulation f = parse_formulation(o.formulation);
  bool lex = parse_follower(o.follower) == FollowerMode::Lexicographic;

  PreprocessResult pre = preprocess(inst, costs, choice, preprocess_options(o));
  auto sets = enumerate_latent(inst, costs, choice, enum_method(o, f), &pre);
  BuildOptions bopt;
  bopt.formulation = f;
  bopt.lexicographic = lex;
  bopt.relax_core_flow = o.relax_xy;
  bopt.warm_start = o.warm_start;
  BuiltModel built = build_model(inst, costs, pre, sets, bopt);
  std::filesystem::create_directories(o.out_dir);
  if (!o.export_model.empty()) {
    auto parent = std::filesystem::path(o.export_model).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    write_text_file(o.export_model, built.mip.to_lp());
  }

  auto backend = make_backend();
  SolveOptions sopt;
  sopt.rel_gap = o.gap;
  sopt.time_limit = o.time_limit;
  sopt.threads = o.threads;

  std::vector<LazyRound> rounds;
  DesignSolution sol;
  if (o.lazy) {
    LazyOptions lopt;
    lopt.build = bopt;
    lopt.solve = sopt;
    sol = lazy_constraint_solve(inst, costs, choice, pre, sets, *backend,
                                lopt, &rounds);
  } else {
    sol = solve_design(inst, costs, choice, pre, built, *backend, sopt);
  }

  std::string report_path = o.out_dir + "/report.json";
  write_text_file(report_path, run_report_json(inst, pre, sets, built, sol,
                                               o.lazy ? &rounds : nullptr));
  if (o.geojson)
    write_text_file(o.out_dir + "/design.geojson",
                    design_geojson(inst, sol.open_arcs));

  int opened = 0;
  for (size_t k = 0; k < sol.open_arcs.size(); ++k)
    if (sol.open_arcs[k] && !inst.arcs[k].fixed) ++opened;
  std::cout << std::setprecision(12) << "status " << to_string(sol.status)
            << "\nobjective " << sol.objective << "\nmodel_objective "
            << sol.model_objective << "\nopened " << opened << " of "
            << inst.undecided_arc_count() << " undecided arcs\nreport "
            << report_path << "\n";
  if (sol.status == SolveStatus::Optimal) return 0;
  std::cerr << "solve ended without an optimum: " << to_string(sol.status)
            << (sol.message.empty() ? "" : ": " + sol.message) << "\n";
  return 4;
}

int cmd_enumerate(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  CostModel costs(inst);
  ChoiceModel choice = ChoiceModel::from_kind(inst.choice);
  PreprocessResult pre = preprocess(inst, costs, choice, preprocess_options(o));
  Formulation f = parse_formulation(o.formulation);
  auto sets = enumerate_latent(inst, costs, choice, enum_method(o, f), &pre);

  J out;
  out["method"] =
      enum_method(o, f) == EnumMethod::Exhaustive ? "pe" : "pe-dcm";
  size_t adopting = 0, rej_p = 0, rej_np = 0;
  J per_trip = J::array();
  for (const auto& s : sets) {
    if (inst.trips[s.trip].kind != TripKind::Latent) continue;
    adopting += s.adopting.size();
    rej_p += s.rejecting_profitable.size();
    rej_np += s.rejecting_nonprofitable.size();
    per_trip.push_back({{"id", inst.trips[s.trip].id},
                        {"removed", s.removed},
                        {"complete", s.complete},
                        {"paths", s.paths.size()},
                        {"adopting", s.adopting.size()},
                        {"rejecting_profitable", s.rejecting_profitable.size()},
                        {"rejecting_nonprofitable",
                         s.rejecting_nonprofitable.size()}});
  }
  out["totals"] = {{"adopting", adopting},
                   {"rejecting_profitable", rej_p},
                   {"rejecting_nonprofitable", rej_np}};
  out["trips"] = std::move(per_trip);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_preprocess_report(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  CostModel costs(inst);
  ChoiceModel choice = ChoiceModel::from_kind(inst.choice);
  PreprocessResult pre = preprocess(inst, costs, choice, preprocess_options(o));
  Formulation f = parse_formulation(o.formulation);
  auto sets = enumerate_latent(inst, costs, choice, enum_method(o, f), &pre);

  J rep = J::parse(preprocess_report_json(inst, pre, &sets));
  BuildOptions bopt;
  bopt.lexicographic = parse_follower(o.follower) == FollowerMode::Lexicographic;
  auto rf = predict_sizes(inst, costs, pre, sets, bopt);
  rep["model_prediction"]["rider_flow"] = {
      {"variables", rf.vars}, {"binaries", rf.binaries}, {"rows", rf.rows}};
  bool complete = true;
  for (const auto& s : sets) complete = complete && (!s.latent_active() || s.complete);
  if (complete) {
    bopt.formulation = Formulation::PathChoice;
    auto pc = predict_sizes(inst, costs, pre, sets, bopt);
    rep["model_prediction"]["path_choice"] = {
        {"variables", pc.vars}, {"binaries", pc.binaries}, {"rows", pc.rows}};
  }
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_oracle(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  CostModel costs(inst);
  ChoiceModel choice = ChoiceModel::from_kind(inst.choice);
  OracleOptions oopt;
  oopt.mode = parse_follower(o.follower);
  oopt.paranoid = o.paranoid;
  OracleResult res = oracle_solve(inst, costs, choice, oopt);

  J out{{"objective", res.objective},
        {"model_objective", res.model_objective},
        {"investment", res.invest_cost},
        {"core_riders", res.core_cost},
        {"adoption", res.adoption_value},
        {"designs_checked", res.designs_checked}};
  J open = J::array();
  for (size_t k = 0; k < inst.arcs.size(); ++k)
    if (res.open_arcs[k] && !inst.arcs[k].fixed)
      open.push_back(arc_name(inst, inst.arcs[k]));
  out["open_arcs"] = std::move(open);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_compare(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  CostModel costs(inst);
  ChoiceModel choice = ChoiceModel::from_kind(inst.choice);
  FollowerMode mode = parse_follower(o.follower);

  OracleOptions oopt;
  oopt.mode = mode;
  OracleResult truth = oracle_solve(inst, costs, choice, oopt);

  PreprocessResult pre = preprocess(inst, costs, choice, preprocess_options(o));
  auto sets = enumerate_latent(inst, costs, choice,
                               enum_method(o, Formulation::RiderFlow), &pre);
  BuildOptions bopt;
  bopt.lexicographic = mode == FollowerMode::Lexicographic;
  bopt.relax_core_flow = o.relax_xy;
  BuiltModel built = build_model(inst, costs, pre, sets, bopt);

  auto backend = make_backend();
  SolveOptions sopt;
  sopt.rel_gap = o.gap;
  sopt.time_limit = o.time_limit;
  sopt.threads = o.threads;
  DesignSolution direct =
      solve_design(inst, costs, choice, pre, built, *backend, sopt);
  LazyOptions lopt;
  lopt.build = bopt;
  lopt.solve = sopt;
  DesignSolution lazy =
      lazy_constraint_solve(inst, costs, choice, pre, sets, *backend, lopt);

  auto agrees = [&](const DesignSolution& s) {
    return s.status == SolveStatus::Optimal &&
           rel_close(s.objective, truth.objective, 1e-6) &&
           rel_close(s.model_objective, truth.model_objective, 1e-6);
  };
  std::cout << std::setprecision(12) << "method  objective  model_objective  agrees\n"
            << "oracle  " << truth.objective << "  " << truth.model_objective
            << "  -\n"
            << "ppath   " << direct.objective << "  " << direct.model_objective
            << "  " << (agrees(direct) ? "yes" : "NO") << "\n"
            << "lazy    " << lazy.objective << "  " << lazy.model_objective
            << "  " << (agrees(lazy) ? "yes" : "NO") << "\n";
  if (agrees(direct) && agrees(lazy)) return 0;
  std::cerr << "disagreement against the exhaustive reference\n";
  return 1;
}

int cmd_generate(Options& o) {
  o.gen.geometry = !o.matrices;
  o.gen.basis =
      o.gen_basis == "time" ? CostBasis::Time : CostBasis::Distance;
  o.gen.choice = o.gen_choice == "duration-transfers"
                     ? ChoiceKind::DurationAndTransfers
                     : ChoiceKind::DurationOnly;
  NetworkInstance inst = generate_instance(o.gen);
  std::string text = instance_to_json(inst);
  if (o.out_file.empty())
    std::cout << text;
  else
    write_text_file(o.out_file, text);
  return 0;
}

int cmd_export_model(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  CostModel costs(inst);
  ChoiceModel choice = ChoiceModel::from_kind(inst.choice);
  Formulation f = parse_formulation(o.formulation);
  PreprocessResult pre = preprocess(inst, costs, choice, preprocess_options(o));
  auto sets = enumerate_latent(inst, costs, choice, enum_method(o, f), &pre);
  BuildOptions bopt;
  bopt.formulation = f;
  bopt.lexicographic = parse_follower(o.follower) == FollowerMode::Lexicographic;
  bopt.relax_core_flow = o.relax_xy;
  bopt.warm_start = o.warm_start;
  BuiltModel built = build_model(inst, costs, pre, sets, bopt);
  if (o.export_model.empty())
    std::cout << built.mip.to_lp();
  else
    write_text_file(o.export_model, built.mip.to_lp());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transit network design with rider adoption"};
  app.require_subcommand(1);
  Options o;
  std::vector<CLI::Option*> no_pre_opts;

  auto add_common = [&](CLI::App* c, bool with_model_flags) {
    c->add_option("--instance", o.instance, "instance file (JSON)")
        ->required();
    no_pre_opts.push_back(
        c->add_option("--no-preprocess", o.skip_steps,
                      "disable all preprocessing, or a comma list of: "
                      "shuttle-legs, assign-remove, hub-legs, paths")
            ->expected(0, 4)
            ->delimiter(','));
    c->add_option("--follower", o.follower,
                  "tie handling of indifferent riders")
        ->check(CLI::IsMember({"generalized", "lex"}));
    if (with_model_flags) {
      c->add_option("--formulation", o.formulation, "model family")
          ->check(CLI::IsMember({"ppath", "cpath"}));
      c->add_option("--enum", o.enum_method,
                    "path enumeration method (default pe-dcm; pe for cpath)")
          ->check(CLI::IsMember({"pe", "pe-dcm"}));
    }
  };
  auto add_solver = [&](CLI::App* c) {
    c->add_option("--gap", o.gap, "relative MIP gap");
    c->add_option("--time-limit", o.time_limit, "solver seconds");
    c->add_option("--threads", o.threads, "solver threads");
    c->add_flag("--relax-xy", o.relax_xy,
                "LP-relax must-serve rider flows");
  };

  CLI::App* solve = app.add_subcommand("solve", "optimize a design");
  add_common(solve, true);
  add_solver(solve);
  solve->add_flag("--lazy", o.lazy, "row generation over rider paths");
  solve->add_flag("--warm-start", o.warm_start, "hint the backbone design");
  solve->add_option("--out-dir", o.out_dir, "where report.json goes");
  solve->add_option("--export-model", o.export_model,
                    "also write the model in LP format");
  solve->add_flag("--geojson", o.geojson, "also write design.geojson");

  CLI::App* enumerate = app.add_subcommand("enumerate", "path set counts");
  add_common(enumerate, true);

  CLI::App* prep =
      app.add_subcommand("preprocess-report", "reduction counts and "
                                              "predicted model sizes");
  add_common(prep, true);

  CLI::App* oracle =
      app.add_subcommand("oracle", "exhaustive design search (small "
                                   "instances)");
  add_common(oracle, false);
  oracle->add_flag("--paranoid", o.paranoid,
                   "re-check each follower answer by full enumeration");

  CLI::App* compare = app.add_subcommand(
      "compare", "agreement table: oracle vs direct vs lazy");
  add_common(compare, false);
  add_solver(compare);

  CLI::App* generate = app.add_subcommand("generate", "synthetic instance");
  generate->add_option("--seed", o.gen.seed, "RNG seed");
  generate->add_option("--stops", o.gen.n_stops, "stop count");
  generate->add_option("--hubs", o.gen.n_hubs, "hub count");
  generate->add_option("--fixed-arcs", o.gen.n_fixed_arcs,
                       "fixed directed arcs (even)");
  generate->add_option("--candidate-arcs", o.gen.n_candidate_arcs,
                       "total directed arcs (even)");
  generate->add_option("--core", o.gen.n_core, "must-serve trips");
  generate->add_option("--latent", o.gen.n_latent, "optional-rider trips");
  generate->add_option("--theta", o.gen.theta, "rider weight in (0,1)");
  generate->add_option("--basis", o.gen_basis, "agency cost basis")
      ->check(CLI::IsMember({"distance", "time"}));
  generate->add_option("--choice", o.gen_choice, "adoption rule")
      ->check(CLI::IsMember({"duration-only", "duration-transfers"}));
  generate->add_flag("--matrices", o.matrices,
                     "emit explicit car matrices instead of geometry");
  generate->add_option("--out", o.out_file, "output file (default stdout)");

  CLI::App* exportm =
      app.add_subcommand("export-model", "write the MIP in LP format");
  add_common(exportm, true);
  exportm->add_flag("--warm-start", o.warm_start, "hint the backbone design");
  exportm->add_flag("--relax-xy", o.relax_xy,
                    "LP-relax must-serve rider flows");
  exportm->add_option("--export-model", o.export_model,
                      "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (CLI::Option* p : no_pre_opts)
    if (p->count() > 0) o.no_preprocess = true;

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (enumerate->parsed()) return cmd_enumerate(o);
    if (prep->parsed()) return cmd_preprocess_report(o);
    if (oracle->parsed()) return cmd_oracle(o);
    if (compare->parsed()) return cmd_compare(o);
    if (generate->parsed()) return cmd_generate(o);
    if (exportm->parsed()) return cmd_export_model(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
