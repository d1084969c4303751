#include "wcl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "wcl/errors.hpp"
#include "wcl/format.hpp"
#include "wcl/generators.hpp"
#include "wcl/parallel.hpp"
#include "wcl/random.hpp"

namespace wcl {

using nlohmann::ordered_json;

namespace {

constexpr std::size_t kGridPoints = 101;

std::string csv_field(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

double mean_final_soc(const std::vector<Route>& routes, const std::vector<char>& mask,
                      const SocParams& p, const SegmentGraph& g) {
  if (routes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : routes) sum += simulate_route(r, mask, p, g).final_soc;
  return sum / static_cast<double>(routes.size());
}

std::size_t count_if_routes(const std::vector<Route>& routes, const RoutePredicate& pred) {
  return static_cast<std::size_t>(std::count_if(routes.begin(), routes.end(), pred));
}

// Samples up to n routes; fewer when not enough qualify.
std::vector<Route> sample_up_to(const RoutePopulation& pop, std::size_t n, std::uint64_t seed,
                                const RoutePredicate& pred) {
  const std::size_t avail = pred ? count_if_routes(pop.routes, pred) : pop.routes.size();
  return sample_routes(pop, std::min(n, avail), seed, pred);
}

Installation solve_model(const std::vector<Route>& routes, const SegmentGraph& g, const SocParams& p,
                         double budget, const std::string& solver, const StudyOptions& opts) {
  if (routes.empty()) return {};
  if (solver == "exact") return brute_force(routes, g, p, budget, opts.scheme, opts.threads).installation;
  return branch_and_bound(routes, g, p, budget, opts.scheme, std::nullopt, opts.limits, opts.threads)
      .installation;
}

ordered_json installation_json(const Installation& inst, const SegmentGraph& g) {
  return {{"installed", inst.ids(g)}, {"cost", inst.total_cost}};
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) {
      throw std::logic_error("table " + t.name + " has a row of the wrong width");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const std::filesystem::path& dir) {
  std::string stem = report.kind;
  auto tag = [&](const char* key, const char* label) {
    if (report.config.contains(key) && report.config[key].is_number()) {
      stem += std::string("_") + label + format_number(report.config[key].get<double>());
    }
  };
  tag("seed", "seed");
  tag("beta", "beta");
  tag("budget", "budget");
  if (report.config.contains("battery") && report.config["battery"].contains("alpha")) {
    stem += "_alpha" + format_number(report.config["battery"]["alpha"].get<double>());
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    written.push_back(path);
  };
  ordered_json files = ordered_json::array();
  for (const auto& t : report.tables) {
    const std::string name = stem + "_" + t.name + ".csv";
    write(dir / name, to_csv(t));
    files.push_back(name);
  }
  ordered_json sidecar;
  sidecar["kind"] = report.kind;
  sidecar["config"] = report.config;
  sidecar["summary"] = report.summary;
  sidecar["files"] = files;
  write(dir / (stem + ".json"), sidecar.dump(2) + "\n");
  return written;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw InputError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("spearman needs equally long samples");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ExperimentReport soc_distribution(const std::vector<Route>& routes,
                                  const std::vector<LabeledInstallation>& installations,
                                  const SocParams& p, const SegmentGraph& g) {
  if (routes.empty()) throw InputError("the SOC distribution needs at least one route");
  ExperimentReport rep;
  rep.kind = "distribution";
  Table curves{"curves", {"x"}, {}};
  Table summary{"summary", {"label", "cost", "installed", "infeasible", "mean_final_soc"}, {}};
  std::vector<std::vector<double>> finals;
  for (const auto& [label, inst] : installations) {
    curves.columns.push_back(label);
    const auto mask = inst.mask(g.size());
    std::vector<double> f;
    std::size_t infeasible = 0;
    for (const auto& r : routes) {
      const auto out = simulate_route(r, mask, p, g);
      f.push_back(out.final_soc);
      if (!out.feasible) ++infeasible;
    }
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    std::sort(f.begin(), f.end());
    summary.rows.push_back({label, inst.total_cost, static_cast<double>(inst.installed.size()),
                            static_cast<double>(infeasible), mean});
    rep.summary[label] = {{"infeasible", infeasible}, {"cost", inst.total_cost}, {"mean_final_soc", mean}};
    finals.push_back(std::move(f));
  }
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(kGridPoints - 1);
    std::vector<Cell> row{x};
    for (const auto& f : finals) {
      const auto below = i + 1 == kGridPoints
                             ? f.size()
                             : static_cast<std::size_t>(std::lower_bound(f.begin(), f.end(), x) - f.begin());
      row.emplace_back(static_cast<double>(below));
    }
    curves.rows.push_back(std::move(row));
  }
  rep.summary["routes"] = routes.size();
  rep.tables.push_back(std::move(curves));
  rep.tables.push_back(std::move(summary));
  return rep;
}

ExperimentReport random_isoc_study(const RoutePopulation& pop, const std::vector<double>& ls,
                                   std::size_t n_routes, double a, std::uint64_t seed,
                                   double budget, const SocParams& p, const SegmentGraph& g,
                                   const StudyOptions& opts) {
  if (!(a >= 0.0 && a < 1.0)) throw InputError("a must be in [0, 1)");
  ExperimentReport rep;
  rep.kind = "random-isoc";
  Table t{"lambda",
          {"l", "omega_size", "model_routes", "lambda_none", "lambda_model", "lambda_betweenness"},
          {}};
  const auto ranking = centrality_scores(g, CentralityMeasure::betweenness, opts.threads).ranking;
  const Installation btw = heuristic_fill(ranking, g, budget);
  const auto btw_mask = btw.mask(g.size());
  const std::vector<char> none(g.size(), 0);
  for (std::size_t li = 0; li < ls.size(); ++li) {
    auto omega = omega_l(pop, ls[li]);
    if (omega.empty()) throw InputError("Omega_l is empty for l = " + format_number(ls[li]));
    Rng rng(mix_seed(seed, 1, li));
    for (auto& r : omega) r.initial_soc = rng.uniform_open(a, 1.0);
    const auto omega_pop = RoutePopulation::from(omega);
    const auto model_routes = sample_up_to(omega_pop, n_routes, mix_seed(seed, 2, li), {});
    const Installation model = solve_model(model_routes, g, p, budget, "bb", opts);
    const double l_none = mean_final_soc(omega, none, p, g);
    const double l_model = mean_final_soc(omega, model.mask(g.size()), p, g);
    const double l_btw = mean_final_soc(omega, btw_mask, p, g);
    t.rows.push_back({ls[li], static_cast<double>(omega.size()), static_cast<double>(model_routes.size()),
                      l_none, l_model, l_btw});
    rep.summary["l=" + format_number(ls[li])] = {{"lambda_none", l_none},
                                                 {"lambda_model", l_model},
                                                 {"lambda_betweenness", l_btw},
                                                 {"model", installation_json(model, g)}};
  }
  rep.summary["betweenness"] = installation_json(btw, g);
  rep.tables.push_back(std::move(t));
  return rep;
}

ExperimentReport velocity_study(const std::vector<Route>& routes, const std::vector<double>& eps_v,
                                std::size_t trials, std::uint64_t seed, const Installation& inst,
                                const SocParams& p, const SegmentGraph& g, int threads) {
  if (routes.empty()) throw InputError("the velocity study needs at least one route");
  if (trials == 0) throw InputError("the velocity study needs at least one trial");
  for (double e : eps_v) {
    if (!(e > -1.0 && e < 1.0)) throw InputError("eps_v values must lie in (-1, 1)");
  }
  const auto mask = inst.mask(g.size());
  std::vector<double> avg(eps_v.size() * trials);
  parallel_for(avg.size(), threads, [&](std::size_t idx) {
    const std::size_t e = idx / trials, t = idx % trials;
    const double width = std::abs(eps_v[e]);
    Rng rng(mix_seed(seed, e, t));
    std::vector<double> speeds(g.size());
    for (SegmentIndex s = 0; s < g.size(); ++s) {
      double v = 0.0;
      do {
        const double u = width == 0.0 ? 0.0 : rng.uniform_open(-width, width);
        v = g.segment(s).speed * (1.0 + u);
      } while (!(v > 0.0));
      speeds[s] = v;
    }
    const SegmentGraph perturbed = g.with_speeds(speeds);
    avg[idx] = mean_final_soc(routes, mask, p, perturbed);
  });

  ExperimentReport rep;
  rep.kind = "velocity";
  Table per_trial{"trials", {"eps_v", "trial", "avg_final_soc"}, {}};
  Table quart{"quartiles", {"eps_v", "min", "q1", "median", "q3", "max", "spread"}, {}};
  std::vector<double> medians;
  for (std::size_t e = 0; e < eps_v.size(); ++e) {
    std::vector<double> xs(avg.begin() + static_cast<std::ptrdiff_t>(e * trials),
                           avg.begin() + static_cast<std::ptrdiff_t>((e + 1) * trials));
    for (std::size_t t = 0; t < trials; ++t) per_trial.rows.push_back({eps_v[e], static_cast<double>(t), xs[t]});
    const double lo = quantile(xs, 0.0), hi = quantile(xs, 1.0);
    medians.push_back(quantile(xs, 0.5));
    quart.rows.push_back({eps_v[e], lo, quantile(xs, 0.25), medians.back(), quantile(xs, 0.75), hi, hi - lo});
  }
  std::vector<double> abs_eps;
  for (double e : eps_v) abs_eps.push_back(std::abs(e));
  rep.summary["routes"] = routes.size();
  rep.summary["trials"] = trials;
  rep.summary["spearman_median_vs_eps"] = spearman(abs_eps, medians);
  rep.summary["installation"] = installation_json(inst, g);
  rep.tables.push_back(std::move(per_trial));
  rep.tables.push_back(std::move(quart));
  return rep;
}

ExperimentReport warmstart_study(const RoutePopulation& pop, const std::vector<std::size_t>& ks,
                                 std::size_t repeats, std::uint64_t seed, double budget,
                                 const SocParams& p, const SegmentGraph& g,
                                 const RoutePredicate& eligible, const StudyOptions& opts) {
  if (!opts.limits.node_limit && !opts.limits.time_limit_s) {
    throw InputError("the warm-start study needs a node or time limit");
  }
  const auto ranking = centrality_scores(g, CentralityMeasure::betweenness, opts.threads).ranking;
  const Installation warm = heuristic_fill(ranking, g, budget);

  struct Run {
    std::size_t routes = 0;
    SolveResult seeded, cold;
  };
  std::vector<Run> runs(ks.size() * repeats);
  parallel_for(runs.size(), opts.threads, [&](std::size_t idx) {
    const std::size_t ki = idx / repeats, rep_i = idx % repeats;
    const auto routes = sample_up_to(pop, ks[ki], mix_seed(seed, ki, rep_i), eligible);
    runs[idx].routes = routes.size();
    runs[idx].seeded = branch_and_bound(routes, g, p, budget, opts.scheme, warm, opts.limits, 1);
    runs[idx].cold = branch_and_bound(routes, g, p, budget, opts.scheme, std::nullopt, opts.limits, 1);
  });

  ExperimentReport rep;
  rep.kind = "warmstart";
  Table t{"ratios",
          {"k", "repeat", "routes", "obj_warm", "obj_cold", "ratio", "gap_warm", "gap_cold", "nodes_warm",
           "nodes_cold"},
          {}};
  Table s{"summary", {"k", "median_ratio", "dominant", "below_one"}, {}};
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    std::vector<double> numeric;
    std::size_t dominant = 0, below_one = 0;
    for (std::size_t r = 0; r < repeats; ++r) {
      const Run& run = runs[ki * repeats + r];
      const double o1 = run.seeded.objective, o2 = run.cold.objective;
      Cell ratio;
      if (o2 == 0.0) {
        if (o1 == 0.0) ratio = 1.0;
        else if (o1 > 0.0) ratio = std::string("dominant");
        else ratio = std::string("dominated");
      } else {
        ratio = o1 / o2;
      }
      if (std::holds_alternative<std::string>(ratio)) {
        if (std::get<std::string>(ratio) == "dominant") ++dominant;
        else ++below_one;
      } else {
        numeric.push_back(std::get<double>(ratio));
        if (std::get<double>(ratio) < 1.0) ++below_one;
      }
      t.rows.push_back({static_cast<double>(ks[ki]), static_cast<double>(r), static_cast<double>(run.routes),
                        o1, o2, ratio, run.seeded.gap, run.cold.gap,
                        static_cast<double>(run.seeded.nodes), static_cast<double>(run.cold.nodes)});
    }
    // "dominant" runs rank above every numeric ratio.
    const std::size_t total = numeric.size() + dominant;
    Cell median = std::string("dominant");
    if (total > 0 && numeric.size() * 2 > total) {
      std::sort(numeric.begin(), numeric.end());
      numeric.resize(numeric.size() + dominant, std::numeric_limits<double>::infinity());
      median = quantile(numeric, 0.5);
    }
    s.rows.push_back({static_cast<double>(ks[ki]), median, static_cast<double>(dominant),
                      static_cast<double>(below_one)});
  }
  rep.summary["betweenness"] = installation_json(warm, g);
  rep.tables.push_back(std::move(t));
  rep.tables.push_back(std::move(s));
  return rep;
}

SocParams soc_params_from_json(const ordered_json& b, SocParams p) {
  if (!b.is_object()) throw InputError("battery must be an object");
  static const std::set<std::string> keys = {"e_cap", "p1", "p2", "eta", "n_layers", "alpha",
                                             "eps_tol", "soc_function", "rule", "initial_soc"};
  for (const auto& [k, v] : b.items()) {
    if (!keys.count(k)) throw InputError("unknown battery field '" + k + "'");
  }
  try {
    if (b.contains("e_cap")) p.e_cap = b["e_cap"].get<double>();
    if (b.contains("p1")) p.p1 = b["p1"].get<double>();
    if (b.contains("p2")) p.p2 = b["p2"].get<double>();
    if (b.contains("eta")) p.eta = b["eta"].get<double>();
    if (b.contains("n_layers")) p.n_layers = b["n_layers"].get<int>();
    if (b.contains("alpha")) p.alpha = b["alpha"].get<double>();
    if (b.contains("eps_tol")) p.eps_tol = b["eps_tol"].get<double>();
    if (b.contains("soc_function")) p.soc_function = parse_soc_function(b["soc_function"].get<std::string>());
    if (b.contains("rule")) p.rule = parse_threshold_rule(b["rule"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("battery: ") + e.what());
  }
  p.validate();
  return p;
}

ordered_json soc_params_to_json(const SocParams& p) {
  return {{"e_cap", p.e_cap},
          {"p1", p.p1},
          {"p2", p.p2},
          {"eta", p.eta},
          {"n_layers", p.n_layers},
          {"alpha", p.alpha},
          {"eps_tol", p.eps_tol},
          {"soc_function", std::string(to_string(p.soc_function))},
          {"rule", std::string(to_string(p.rule))}};
}

SegmentGraph network_from_config(const ordered_json& n) {
  if (!n.is_object()) throw InputError("network must be an object");
  try {
    const Setting setting = parse_setting(n.value("setting", std::string("urban")));
    if (n.contains("path")) return load_network(n["path"].get<std::string>(), setting);
    const std::string gen = n.value("generator", std::string());
    const std::uint64_t seed = n.value("seed", std::uint64_t{0});
    if (gen == "grid") {
      GridOptions o;
      o.rows = n.value("rows", o.rows);
      o.cols = n.value("cols", o.cols);
      o.min_length = n.value("min_length", o.min_length);
      o.max_length = n.value("max_length", o.max_length);
      o.avenue_every = n.value("avenue_every", o.avenue_every);
      o.setting = setting;
      return grid_network(o, seed);
    }
    if (gen == "random") {
      RandomNetworkOptions o;
      o.intersections = n.value("intersections", o.intersections);
      o.segments = n.value("segments", o.segments);
      o.min_length = n.value("min_length", o.min_length);
      o.max_length = n.value("max_length", o.max_length);
      o.setting = n.contains("setting") ? setting : o.setting;
      return random_network(o, seed);
    }
    if (gen == "cycle") {
      return cycle_network(n.value("n", std::size_t{10}), n.value("length", 1.0), n.value("category", 3),
                           setting);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("network: ") + e.what());
  }
  throw InputError("network needs a \"path\" or a generator (grid, random, cycle)");
}

namespace {

SegmentGraph scale_lengths(const SegmentGraph& g, double factor) {
  if (factor == 1.0) return g;
  std::vector<RoadSegment> segs = g.segments();
  for (auto& s : segs) s.length *= factor;
  return SegmentGraph::build(std::move(segs));
}

template <typename T>
std::vector<T> list_of(const ordered_json& j, const char* key) {
  if (!j.is_array()) throw InputError(std::string(key) + " must be a list");
  return j.get<std::vector<T>>();
}

}  // namespace

ExperimentReport run_experiment(const ordered_json& input, int threads) {
  const ordered_json& in = input.contains("config") && input["config"].is_object() ? input["config"] : input;
  if (!in.is_object() || !in.contains("kind")) throw InputError("experiment config needs a \"kind\"");
  ordered_json cfg;
  try {
    const std::string kind = in["kind"].get<std::string>();
    static const std::set<std::string> kinds = {"distribution", "random-isoc", "velocity", "warmstart"};
    if (!kinds.count(kind)) throw InputError("unknown experiment kind '" + kind + "'");
    std::set<std::string> allowed = {"kind", "seed", "network", "length_scale", "max_category",
                                     "population", "battery", "initial_soc", "scheme", "beta",
                                     "budget", "solver", "node_limit", "time_limit_s", "sample",
                                     "n_routes"};
    if (kind == "distribution") allowed.insert("heuristics");
    if (kind == "random-isoc") allowed.insert({"ls", "a"});
    if (kind == "velocity") allowed.insert({"eps_v", "trials", "l"});
    if (kind == "warmstart") allowed.insert({"ks", "repeats"});
    for (const auto& [k, v] : in.items()) {
      if (!allowed.count(k)) throw InputError("unknown config field '" + k + "' for " + kind);
    }
    if (!in.contains("network")) throw InputError("config needs a \"network\"");
    if (in.contains("beta") && in.contains("budget")) throw InputError("give either beta or budget, not both");

    cfg["kind"] = kind;
    cfg["seed"] = in.value("seed", std::uint64_t{0});
    cfg["network"] = in["network"];
    cfg["length_scale"] = in.value("length_scale", 1.0);
    cfg["max_category"] = in.value("max_category", 8);
    cfg["population"] = in.value("population", ordered_json{{"source", "all"}, {"min_segments", 2}});
    cfg["battery"] = soc_params_to_json(soc_params_from_json(in.value("battery", ordered_json::object())));
    cfg["initial_soc"] = in.value("initial_soc", 1.0);
    cfg["scheme"] = in.value("scheme", std::string("binary"));
    if (in.contains("budget")) cfg["budget"] = in["budget"].get<double>();
    else cfg["beta"] = in.value("beta", 0.1);
    cfg["solver"] = in.value("solver", std::string("bb"));
    cfg["node_limit"] = in.value("node_limit", std::uint64_t{20000});
    cfg["time_limit_s"] = in.contains("time_limit_s") ? in["time_limit_s"] : ordered_json(nullptr);
    cfg["sample"] = in.value("sample", std::string("infeasible"));
    const std::size_t default_routes = kind == "velocity" ? 30 : 100;
    cfg["n_routes"] = in.value("n_routes", default_routes);
    if (kind == "distribution") {
      cfg["heuristics"] = in.value(
          "heuristics", ordered_json::array({"betweenness", "closeness", "eigenvector", "random"}));
    } else if (kind == "random-isoc") {
      cfg["ls"] = in.value("ls", ordered_json::array({2.0}));
      cfg["a"] = in.value("a", 0.4);
    } else if (kind == "velocity") {
      cfg["eps_v"] = in.value("eps_v", ordered_json::array({0.0, 0.1, 0.2, 0.3, 0.4, 0.5}));
      cfg["trials"] = in.value("trials", std::size_t{50});
      cfg["l"] = in.value("l", 2.0);
    } else {
      cfg["ks"] = in.value("ks", ordered_json::array({20, 40}));
      cfg["repeats"] = in.value("repeats", std::size_t{30});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("experiment config: ") + e.what());
  }

  const std::string kind = cfg["kind"];
  const std::uint64_t seed = cfg["seed"];
  SegmentGraph g = network_from_config(cfg["network"]);
  g = scale_lengths(filter_categories(g, cfg["max_category"].get<int>()), cfg["length_scale"].get<double>());
  const SocParams p = soc_params_from_json(cfg["battery"]);
  const double isoc = cfg["initial_soc"];
  if (!(isoc >= 0.0 && isoc <= 1.0)) throw InputError("initial_soc must be in [0, 1]");

  StudyOptions opts;
  opts.scheme = parse_weight_scheme(cfg["scheme"].get<std::string>());
  opts.threads = threads;
  opts.limits.node_limit = cfg["node_limit"].get<std::uint64_t>();
  if (!cfg["time_limit_s"].is_null()) opts.limits.time_limit_s = cfg["time_limit_s"].get<double>();
  const std::string solver = cfg["solver"];
  if (solver != "bb" && solver != "exact") throw InputError("experiment solver must be bb or exact");
  const double budget = cfg.contains("budget") ? cfg["budget"].get<double>()
                                               : budget_from_fraction(g, cfg["beta"].get<double>());

  // Route population.
  std::vector<Route> all;
  {
    const ordered_json& pc = cfg["population"];
    const std::string source = pc.value("source", std::string("all"));
    const std::size_t min_segs = pc.value("min_segments", std::size_t{2});
    if (source == "all") {
      EnumerationOptions eo;
      eo.min_segments = min_segs;
      eo.max_nodes = pc.value("max_nodes", eo.max_nodes);
      eo.threads = threads;
      all = enumerate_all_routes(g, eo).routes;
    } else if (source == "random") {
      all = random_routes(g, pc.value("count", std::size_t{1000}), mix_seed(seed, 0x706f70), min_segs);
    } else if (source == "file") {
      all = load_routes(pc.at("path").get<std::string>(), g);
    } else {
      throw InputError("population source must be all, random or file");
    }
    if (source != "file") {
      for (auto& r : all) r.initial_soc = isoc;
    }
  }
  if (all.empty()) throw InputError("the route population is empty");
  const RoutePopulation pop = RoutePopulation::from(std::move(all));

  const std::string sample = cfg["sample"];
  RoutePredicate eligible;
  if (sample == "infeasible") eligible = infeasible_without_install(p, g);
  else if (sample != "any") throw InputError("sample must be infeasible or any");
  const std::size_t n_routes = cfg["n_routes"];

  ExperimentReport rep;
  if (kind == "distribution") {
    const auto model_routes = sample_up_to(pop, n_routes, mix_seed(seed, 0x6d6f64), eligible);
    std::vector<LabeledInstallation> labeled;
    labeled.emplace_back("none", Installation{});
    labeled.emplace_back("model", solve_model(model_routes, g, p, budget, solver, opts));
    for (const auto& h : cfg["heuristics"]) {
      const std::string name = h.get<std::string>();
      const auto ranking = name == "random" ? random_ranking(g, mix_seed(seed, 0x726e64))
                                            : centrality_scores(g, parse_centrality(name), threads).ranking;
      labeled.emplace_back(name, heuristic_fill(ranking, g, budget));
    }
    rep = soc_distribution(pop.routes, labeled, p, g);
    rep.summary["model_routes"] = model_routes.size();
    rep.summary["budget"] = budget;
  } else if (kind == "random-isoc") {
    rep = random_isoc_study(pop, list_of<double>(cfg["ls"], "ls"), n_routes, cfg["a"].get<double>(), seed,
                            budget, p, g, opts);
    rep.summary["budget"] = budget;
  } else if (kind == "velocity") {
    const double cut = pop.tau + cfg["l"].get<double>() * pop.sigma;
    RoutePredicate pred = [&](const Route& r) { return r.distance >= cut && (!eligible || eligible(r)); };
    const auto routes = sample_up_to(pop, n_routes, mix_seed(seed, 0x76656c), pred);
    if (routes.empty()) throw InputError("no route qualifies for the velocity study");
    const Installation inst = solve_model(routes, g, p, budget, solver, opts);
    rep = velocity_study(routes, list_of<double>(cfg["eps_v"], "eps_v"), cfg["trials"].get<std::size_t>(),
                         seed, inst, p, g, threads);
    rep.summary["budget"] = budget;
  } else {
    rep = warmstart_study(pop, list_of<std::size_t>(cfg["ks"], "ks"), cfg["repeats"].get<std::size_t>(), seed,
                          budget, p, g, eligible, opts);
    rep.summary["budget"] = budget;
  }
  rep.kind = kind;
  rep.config = cfg;
  return rep;
}

}  // namespace wcl
