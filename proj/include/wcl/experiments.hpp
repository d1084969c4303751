#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wcl/centrality.hpp"
#include "wcl/road_network.hpp"
#include "wcl/routing.hpp"
#include "wcl/soc_model.hpp"
#include "wcl/solvers.hpp"

namespace wcl {

using Cell = std::variant<double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string to_csv(const Table& t);

struct ExperimentReport {
  std::string kind;
  nlohmann::ordered_json config;   // canonical config; rerunning it reproduces the report
  nlohmann::ordered_json summary;
  std::vector<Table> tables;
};

/// Writes one CSV per table plus a JSON sidecar holding config and summary.
/// File names embed the kind, seed and main parameters. Returns the paths.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const std::filesystem::path& dir);

/// Value at fraction q of the sorted sample, linear interpolation between
/// order statistics.
double quantile(std::vector<double> values, double q);
/// Spearman rank correlation (average ranks for ties); 0 if either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

using LabeledInstallation = std::pair<std::string, Installation>;

/// Cumulative count of routes with final SOC below x for x = 0, 0.01, ..., 1;
/// the last row counts every route (the limit from above at 1). Stalled
/// routes count at SOC 0. Also fills a per-label summary table.
ExperimentReport soc_distribution(const std::vector<Route>& routes,
                                  const std::vector<LabeledInstallation>& installations,
                                  const SocParams& p, const SegmentGraph& g);

struct StudyOptions {
  WeightScheme scheme = WeightScheme::binary;
  SolveLimits limits{20000, std::nullopt};
  int threads = 1;
};

/// Average final SOC (lambda_l) over Omega_l, with initial SOC uniform on
/// (a, 1), before installation, after the model installation built from
/// n_routes sampled routes, and after betweenness at the same budget.
/// Throws InputError when Omega_l is empty.
ExperimentReport random_isoc_study(const RoutePopulation& pop, const std::vector<double>& ls,
                                   std::size_t n_routes, double a, std::uint64_t seed,
                                   double budget, const SocParams& p, const SegmentGraph& g,
                                   const StudyOptions& opts = {});

/// Average final SOC of `routes` under `inst` when every segment speed is
/// scaled by (1 + u), u uniform on (-|eps|, |eps|), per trial. Reports every
/// trial and the quartiles per eps.
ExperimentReport velocity_study(const std::vector<Route>& routes, const std::vector<double>& eps_v,
                                std::size_t trials, std::uint64_t seed, const Installation& inst,
                                const SocParams& p, const SegmentGraph& g, int threads = 1);

/// Per k and repeat: objective of branch and bound seeded with the
/// betweenness installation (obj_1) against the unseeded run (obj_2) under
/// the same limits. The ratio column holds obj_1 / obj_2, 1 when both are 0
/// and "dominant" when only obj_2 is 0.
ExperimentReport warmstart_study(const RoutePopulation& pop, const std::vector<std::size_t>& ks,
                                 std::size_t repeats, std::uint64_t seed, double budget,
                                 const SocParams& p, const SegmentGraph& g,
                                 const RoutePredicate& eligible, const StudyOptions& opts);

/// Runs an experiment described by a JSON config (or a report sidecar,
/// whose "config" member is used). Missing fields take their defaults; the
/// report carries the completed config. Throws InputError on bad configs.
ExperimentReport run_experiment(const nlohmann::ordered_json& config, int threads = 1);

/// Network described by a config's "network" member: {"path": ...} or
/// {"generator": "grid" | "random" | "cycle", ...}.
SegmentGraph network_from_config(const nlohmann::ordered_json& network);

/// Battery and threshold parameters from a "battery" object; absent keys
/// keep the defaults in `base`.
SocParams soc_params_from_json(const nlohmann::ordered_json& battery, SocParams base = {});
nlohmann::ordered_json soc_params_to_json(const SocParams& p);

}  // namespace wcl
