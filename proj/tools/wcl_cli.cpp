// Command-line front end: build-graph, sample-routes, solve, export,
// evaluate and experiment.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcl/centrality.hpp"
#include "wcl/errors.hpp"
#include "wcl/experiments.hpp"
#include "wcl/random.hpp"
#include "wcl/ip_builder.hpp"
#include "wcl/road_network.hpp"
#include "wcl/routing.hpp"
#include "wcl/soc_model.hpp"
#include "wcl/solvers.hpp"
#include "wcl/state_graph.hpp"

namespace {

using nlohmann::ordered_json;
using namespace wcl;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;

struct Options {
  std::string config;
  std::string network;
  std::string setting = "urban";
  std::string routes;
  std::string out;
  std::string mode = "fixed-budget";
  std::string solver = "bb";
  std::string scheme = "binary";
  std::string soc_function = "realistic";
  std::string rule = "above";
  std::string warmstart;
  double alpha = 0.0;
  double beta = 0.1;
  double budget = 0.0;
  double eps_tol = 0.0;
  int layers = 101;
  std::uint64_t seed = 0;
  int threads = 1;
  std::uint64_t node_limit = 0;
  double time_limit_s = 0.0;

  ordered_json file;  // --config contents
  std::map<std::string, std::vector<CLI::Option*>> flags;  // one entry per subcommand using the flag
  std::set<std::string> from_config;

  bool given(const std::string& key) const {
    if (from_config.count(key) > 0) return true;
    auto it = flags.find(key);
    if (it == flags.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [](CLI::Option* f) { return f->count() > 0; });
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

template <typename T>
CLI::Option* add(CLI::App* app, Options& o, const std::string& name, T& target, const std::string& help) {
  CLI::Option* opt = app->add_option(name, target, help)->capture_default_str();
  o.flags[name.substr(2)].push_back(opt);
  return opt;
}

void add_network(CLI::App* app, Options& o) {
  add(app, o, "--network", o.network, "Road network (.json, or .csv)")->required();
  add(app, o, "--setting", o.setting, "urban|rural speeds for CSV networks");
  app->add_option("--config", o.config, "JSON config; flags given on the command line win");
}

void add_model(CLI::App* app, Options& o) {
  add(app, o, "--routes", o.routes, "Routes JSON")->required();
  add(app, o, "--mode", o.mode, "fixed-budget|min-budget");
  add(app, o, "--alpha", o.alpha, "Final SOC threshold");
  auto* beta = add(app, o, "--beta", o.beta, "Budget as a fraction of the total installation cost");
  beta->excludes(add(app, o, "--budget", o.budget, "Absolute budget"));
  add(app, o, "--layers", o.layers, "Number of discrete SOC levels");
  add(app, o, "--scheme", o.scheme, "binary|penalty|tolerance");
  add(app, o, "--eps-tol", o.eps_tol, "Tolerance band half-width");
  add(app, o, "--soc-function", o.soc_function, "realistic|simplistic");
  add(app, o, "--rule", o.rule, "above (soc > alpha) or at-least (soc >= alpha)");
  add(app, o, "--threads", o.threads, "Worker threads");
}

// Fills options not given on the command line from the --config file.
void apply_config(Options& o) {
  if (o.config.empty()) return;
  try {
    o.file = ordered_json::parse(read_file(o.config));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(o.config + ": " + e.what());
  }
  if (!o.file.is_object()) throw InputError(o.config + ": expected an object");
  auto take = [&](const std::string& key, auto& target) {
    const std::string json_key = [&] {
      std::string k = key;
      for (char& c : k) {
        if (c == '-') c = '_';
      }
      return k;
    }();
    if (o.given(key)) return;
    if (!o.file.contains(json_key)) return;
    try {
      target = o.file[json_key].get<std::decay_t<decltype(target)>>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(o.config + ": field " + json_key + ": " + e.what());
    }
    o.from_config.insert(key);
  };
  take("network", o.network);
  take("setting", o.setting);
  take("routes", o.routes);
  take("mode", o.mode);
  take("solver", o.solver);
  take("scheme", o.scheme);
  take("alpha", o.alpha);
  take("layers", o.layers);
  take("eps-tol", o.eps_tol);
  take("soc-function", o.soc_function);
  take("rule", o.rule);
  take("seed", o.seed);
  take("threads", o.threads);
  take("warmstart", o.warmstart);
  const bool cli_budget = o.given("beta") || o.given("budget");
  if (!cli_budget) {
    if (o.file.contains("beta") && o.file.contains("budget")) {
      throw InputError(o.config + ": give either beta or budget, not both");
    }
    take("beta", o.beta);
    take("budget", o.budget);
  }
  take("node-limit", o.node_limit);
  take("time-limit-s", o.time_limit_s);
}

SegmentGraph load_graph(const Options& o) { return load_network(o.network, parse_setting(o.setting)); }

SocParams params(const Options& o) {
  SocParams p;
  if (o.file.contains("battery")) p = soc_params_from_json(o.file["battery"], p);
  auto given = [&](const char* key) { return o.given(key); };
  if (given("alpha") || !o.file.contains("battery") || !o.file["battery"].contains("alpha")) p.alpha = o.alpha;
  if (given("layers") || !o.file.contains("battery") || !o.file["battery"].contains("n_layers")) p.n_layers = o.layers;
  if (given("eps-tol") || !o.file.contains("battery") || !o.file["battery"].contains("eps_tol")) p.eps_tol = o.eps_tol;
  if (given("soc-function") || !o.file.contains("battery") || !o.file["battery"].contains("soc_function")) {
    p.soc_function = parse_soc_function(o.soc_function);
  }
  if (given("rule") || !o.file.contains("battery") || !o.file["battery"].contains("rule")) {
    p.rule = parse_threshold_rule(o.rule);
  }
  p.validate();
  return p;
}

double budget_of(const Options& o, const SegmentGraph& g) {
  if (o.given("budget")) {
    if (!(o.budget >= 0.0)) throw InputError("budget must be nonnegative");
    return o.budget;
  }
  return budget_from_fraction(g, o.beta);
}

SolveLimits limits(const Options& o) {
  SolveLimits l;
  if (o.given("node-limit")) l.node_limit = o.node_limit;
  if (o.given("time-limit-s")) l.time_limit_s = o.time_limit_s;
  return l;
}

std::vector<SegmentIndex> ranking_for(const std::string& solver, const SegmentGraph& g, std::uint64_t seed,
                                      int threads) {
  if (solver == "random") return random_ranking(g, seed);
  return centrality_scores(g, parse_centrality(solver), threads).ranking;
}

int cmd_build_graph(Options& o, int max_category, const std::string& dot_route) {
  apply_config(o);
  SegmentGraph g = filter_categories(load_graph(o), max_category);
  std::cerr << "segments: " << g.size() << "  edges: " << g.edge_count()
            << "  total length: " << g.total_length() << " mi\n";
  if (!dot_route.empty()) {
    // Debug aid: the SOC-state graph of one route, as Graphviz.
    const auto routes = load_routes(dot_route, g);
    if (routes.empty()) throw InputError("no routes in " + dot_route);
    const auto sg = build_state_graph(routes.front(), 0, params(o), g, parse_variant(o.mode));
    write_output(o.out, to_dot(sg));
    return kExitOk;
  }
  write_output(o.out, network_to_json(g, parse_setting(o.setting)));
  return kExitOk;
}

int cmd_sample_routes(Options& o, const std::string& source, std::size_t count, std::size_t population,
                      std::size_t min_segs, std::optional<double> l, bool infeasible_only) {
  apply_config(o);
  const SegmentGraph g = load_graph(o);
  RoutePopulation pop;
  if (source == "all") {
    EnumerationOptions eo;
    eo.min_segments = min_segs;
    eo.threads = o.threads;
    pop = enumerate_all_routes(g, eo);
  } else if (source == "random") {
    pop = RoutePopulation::from(random_routes(g, population, mix_seed(o.seed, 0x706f70), min_segs));
  } else {
    throw InputError("--source must be all or random");
  }
  std::vector<RoutePredicate> preds;
  if (l) preds.push_back(in_omega(pop, *l));
  if (infeasible_only) preds.push_back(infeasible_without_install(params(o), g));
  RoutePredicate pred;
  if (!preds.empty()) {
    pred = [preds](const Route& r) {
      for (const auto& f : preds) {
        if (!f(r)) return false;
      }
      return true;
    };
  }
  std::vector<Route> routes;
  if (count > 0) {
    routes = sample_routes(pop, count, o.seed, pred);
  } else {
    for (const auto& r : pop.routes) {
      if (!pred || pred(r)) routes.push_back(r);
    }
  }
  std::cerr << "population: " << pop.routes.size() << "  tau: " << pop.tau << "  sigma: " << pop.sigma
            << "  written: " << routes.size() << "\n";
  write_output(o.out, routes_to_json(routes, g));
  return kExitOk;
}

int cmd_solve(Options& o) {
  apply_config(o);
  const SegmentGraph g = load_graph(o);
  const auto routes = load_routes(o.routes, g);
  const SocParams p = params(o);
  const WeightScheme scheme = parse_weight_scheme(o.scheme);
  const GraphVariant mode = parse_variant(o.mode);
  const bool heuristic = o.solver == "betweenness" || o.solver == "closeness" || o.solver == "eigenvector" ||
                         o.solver == "random";
  if (!heuristic && o.solver != "exact" && o.solver != "bb") {
    throw InputError("--solver must be exact, bb, betweenness, closeness, eigenvector or random");
  }

  SolveResult res;
  if (mode == GraphVariant::min_budget) {
    if (!o.warmstart.empty()) throw InputError("--warmstart applies to the fixed-budget mode only");
    if (heuristic) {
      const auto ranking = ranking_for(o.solver, g, o.seed, o.threads);
      const PrefixBudget pb = min_prefix_budget(ranking, routes, p, g);
      std::vector<SegmentIndex> prefix(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(pb.count));
      res = heuristic_result(Installation::from(g, prefix), routes, g, p, WeightScheme::binary, std::nullopt,
                             o.threads);
    } else {
      res = min_budget(routes, g, p, o.solver == "exact" ? SolveLimits{} : limits(o), o.threads);
    }
  } else {
    const double budget = budget_of(o, g);
    if (heuristic) {
      res = heuristic_result(heuristic_fill(ranking_for(o.solver, g, o.seed, o.threads), g, budget), routes, g, p,
                             scheme, budget, o.threads);
    } else {
      std::optional<Installation> warm;
      if (!o.warmstart.empty()) warm = load_installation(o.warmstart, g);
      if (o.solver == "exact" && !warm && candidate_segments(routes).size() <= 20) {
        res = brute_force(routes, g, p, budget, scheme, o.threads);
      } else {
        res = branch_and_bound(routes, g, p, budget, scheme, warm,
                               o.solver == "exact" ? SolveLimits{} : limits(o), o.threads);
      }
    }
  }
  write_output(o.out, solution_json(res, g));
  std::cerr << to_string(mode) << " / " << o.solver << ": status " << to_string(res.status) << ", "
            << res.installation.installed.size() << " lanes, cost " << res.installation.total_cost
            << ", objective " << res.objective << ", gap " << res.gap << ", infeasible routes "
            << res.evaluation.infeasible_count << "/" << routes.size() << "\n";
  return kExitOk;
}

int cmd_export(Options& o, std::string summary_path) {
  apply_config(o);
  const SegmentGraph g = load_graph(o);
  const auto routes = load_routes(o.routes, g);
  const SocParams p = params(o);
  const GraphVariant mode = parse_variant(o.mode);
  const IpInstance ip = mode == GraphVariant::min_budget
                            ? build_min_budget_ip(routes, g, p, o.threads)
                            : build_fixed_budget_ip(routes, g, p, budget_of(o, g), parse_weight_scheme(o.scheme),
                                                    o.threads);
  if (o.out.empty() || o.out == "-") throw InputError("export needs --out <file.mps>");
  write_output(o.out, export_mps(ip));
  if (summary_path.empty()) summary_path = std::filesystem::path(o.out).replace_extension(".summary.json").string();
  write_output(summary_path, instance_summary_json(ip));
  std::cerr << "variables: " << ip.variables.size() << "  constraints: " << ip.constraints.size() << "\n";
  return kExitOk;
}

int cmd_evaluate(Options& o, const std::string& installation) {
  apply_config(o);
  const SegmentGraph g = load_graph(o);
  const auto routes = load_routes(o.routes, g);
  const SocParams p = params(o);
  const Installation inst = installation.empty() ? Installation{} : load_installation(installation, g);
  const Evaluation ev = evaluate_installation(inst, routes, p, g, parse_weight_scheme(o.scheme), o.threads);
  ordered_json j;
  j["installed"] = inst.ids(g);
  j["cost"] = inst.total_cost;
  j["objective"] = ev.objective;
  j["infeasible_count"] = ev.infeasible_count;
  auto per = ordered_json::array();
  for (std::size_t r = 0; r < ev.outcomes.size(); ++r) {
    const auto& out = ev.outcomes[r];
    per.push_back({{"route", r},
                   {"final_soc", out.final_soc},
                   {"completed", out.completed},
                   {"stall_distance", out.stall_distance},
                   {"feasible", out.feasible}});
  }
  j["per_route"] = std::move(per);
  write_output(o.out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_experiment(const std::string& config, const std::string& kind, const std::string& out, int threads,
                   std::optional<std::uint64_t> seed) {
  ordered_json cfg;
  try {
    cfg = ordered_json::parse(read_file(config));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(config + ": " + e.what());
  }
  if (cfg.contains("config") && cfg["config"].is_object()) cfg = cfg["config"];
  if (!kind.empty()) cfg["kind"] = kind;
  if (seed) cfg["seed"] = *seed;
  const ExperimentReport rep = run_experiment(cfg, threads);
  for (const auto& path : write_report(rep, out.empty() ? std::string(".") : out)) {
    std::cerr << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Placement of wireless charging lanes for electric vehicles"};
  app.require_subcommand(1);
  Options o;

  auto* build = app.add_subcommand("build-graph", "Validate a network and write the resolved segment graph");
  add_network(build, o);
  add(build, o, "--out", o.out, "Output file (default stdout)");
  int max_category = 8;
  build->add_option("--max-category", max_category, "Keep road categories up to this one")->capture_default_str();
  std::string dot_route;
  build->add_option("--dot-route", dot_route, "Write the SOC-state graph of the first route in this file as DOT");
  add(build, o, "--mode", o.mode, "State graph variant for --dot-route");
  add(build, o, "--alpha", o.alpha, "Final SOC threshold");
  add(build, o, "--layers", o.layers, "Number of discrete SOC levels");
  add(build, o, "--soc-function", o.soc_function, "realistic|simplistic");
  add(build, o, "--rule", o.rule, "above|at-least");

  auto* sample = app.add_subcommand("sample-routes", "Enumerate or draw routes and sample a subset");
  add_network(sample, o);
  add(sample, o, "--out", o.out, "Output routes JSON (default stdout)");
  add(sample, o, "--seed", o.seed, "Random seed");
  add(sample, o, "--threads", o.threads, "Worker threads");
  std::string source = "all";
  std::size_t count = 0, population = 1000, min_segs = 2;
  std::optional<double> l;
  bool infeasible_only = false;
  sample->add_option("--source", source, "all (every fastest route) or random (random OD pairs)")->capture_default_str();
  sample->add_option("--count", count, "Routes to sample (0 writes every qualifying route)")->capture_default_str();
  sample->add_option("--population", population, "Route draws for --source random")->capture_default_str();
  sample->add_option("--min-segments", min_segs, "Minimum route length in segments")->capture_default_str();
  sample->add_option("--l", l, "Keep routes longer than tau + l * sigma");
  sample->add_flag("--infeasible-only", infeasible_only, "Keep routes infeasible without installation");
  add(sample, o, "--alpha", o.alpha, "Final SOC threshold");
  add(sample, o, "--layers", o.layers, "Number of discrete SOC levels");
  add(sample, o, "--soc-function", o.soc_function, "realistic|simplistic");
  add(sample, o, "--rule", o.rule, "above|at-least");

  auto* solve = app.add_subcommand("solve", "Choose lanes and write a solution JSON");
  add_network(solve, o);
  add_model(solve, o);
  add(solve, o, "--solver", o.solver, "exact|bb|betweenness|closeness|eigenvector|random");
  add(solve, o, "--seed", o.seed, "Seed for the random baseline");
  add(solve, o, "--node-limit", o.node_limit, "Branch-and-bound node limit");
  add(solve, o, "--time-limit-s", o.time_limit_s, "Branch-and-bound time limit in seconds");
  add(solve, o, "--warmstart", o.warmstart, "Solution JSON used as the initial incumbent");
  add(solve, o, "--out", o.out, "Solution JSON (default stdout)");

  auto* exp = app.add_subcommand("export", "Write the integer program as MPS plus a summary JSON");
  add_network(exp, o);
  add_model(exp, o);
  add(exp, o, "--out", o.out, "MPS output file");
  std::string summary_path;
  exp->add_option("--summary", summary_path, "Summary JSON (default <out>.summary.json)");

  auto* eval = app.add_subcommand("evaluate", "Simulate routes under an installation");
  add_network(eval, o);
  add(eval, o, "--routes", o.routes, "Routes JSON")->required();
  add(eval, o, "--alpha", o.alpha, "Final SOC threshold");
  add(eval, o, "--layers", o.layers, "Number of discrete SOC levels");
  add(eval, o, "--scheme", o.scheme, "binary|penalty|tolerance");
  add(eval, o, "--eps-tol", o.eps_tol, "Tolerance band half-width");
  add(eval, o, "--soc-function", o.soc_function, "realistic|simplistic");
  add(eval, o, "--rule", o.rule, "above|at-least");
  add(eval, o, "--threads", o.threads, "Worker threads");
  std::string installation;
  eval->add_option("--installation", installation, "Solution JSON (default: nothing installed)");
  add(eval, o, "--out", o.out, "Output JSON (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "Run an experiment suite and write CSV reports");
  std::string exp_config, exp_kind, exp_out = ".";
  int exp_threads = 1;
  std::optional<std::uint64_t> exp_seed;
  experiment->add_option("--config", exp_config, "Experiment config or report sidecar JSON")->required();
  experiment->add_option("kind", exp_kind, "distribution|random-isoc|velocity|warmstart (overrides the config)")
      ->check(CLI::IsMember({"distribution", "random-isoc", "velocity", "warmstart"}));
  experiment->add_option("--out", exp_out, "Output directory")->capture_default_str();
  experiment->add_option("--threads", exp_threads, "Worker threads")->capture_default_str();
  experiment->add_option("--seed", exp_seed, "Seed (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*build) return cmd_build_graph(o, max_category, dot_route);
    if (*sample) return cmd_sample_routes(o, source, count, population, min_segs, l, infeasible_only);
    if (*solve) return cmd_solve(o);
    if (*exp) return cmd_export(o, summary_path);
    if (*eval) return cmd_evaluate(o, installation);
    if (*experiment) return cmd_experiment(exp_config, exp_kind, exp_out, exp_threads, exp_seed);
  } catch (const InfeasibleModelError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
