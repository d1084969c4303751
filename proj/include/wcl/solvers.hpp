#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wcl/road_network.hpp"
#include "wcl/routing.hpp"
#include "wcl/soc_model.hpp"
#include "wcl/state_graph.hpp"

namespace wcl {

struct Evaluation {
  double objective = 0.0;
  std::size_t infeasible_count = 0;
  std::vector<RouteOutcome> outcomes;
};

/// demand * boundary weight of a simulated outcome.
double route_score(const Route& r, const RouteOutcome& out, const SocParams& p, WeightScheme scheme);

/// Simulates every route under the installation. Scores are summed in
/// route order, so the objective is bit-identical for any thread count.
Evaluation evaluate_installation(const Installation& inst, const std::vector<Route>& routes,
                                 const SocParams& p, const SegmentGraph& g, WeightScheme scheme,
                                 int threads = 1);

/// Segments on at least one route, in id order.
std::vector<SegmentIndex> candidate_segments(const std::vector<Route>& routes);

/// cost <= budget up to a relative 1e-9 slack for accumulated rounding.
bool within_budget(double cost, double budget);

enum class SolveStatus {
  optimal,
  feasible,   // stopped at a limit; gap is measured against the proven bound
  heuristic,  // not searched; gap is measured against a relaxation bound
};
std::string_view to_string(SolveStatus s);

struct SolveLimits {
  std::optional<std::uint64_t> node_limit;
  std::optional<double> time_limit_s;
};

struct SolveResult {
  Installation installation;
  double objective = 0.0;  // fixed budget: score; min budget: installation cost
  double bound = 0.0;      // best proven bound on the optimum
  double gap = 0.0;
  SolveStatus status = SolveStatus::optimal;
  std::uint64_t nodes = 0;
  Evaluation evaluation;
};

/// Exhaustive search over install subsets within budget. Ties go to the
/// smaller set, then the lexicographically smaller id list. Throws
/// InputError when more than 20 segments are candidates.
SolveResult brute_force(const std::vector<Route>& routes, const SegmentGraph& g, const SocParams& p,
                        double budget, WeightScheme scheme, int threads = 1);

/// Best-first branch and bound with the simulation as oracle. Without
/// limits the result is optimal and matches brute_force's objective. A
/// warm-start incumbent is never lost; it must fit the budget.
SolveResult branch_and_bound(const std::vector<Route>& routes, const SegmentGraph& g,
                             const SocParams& p, double budget, WeightScheme scheme,
                             const std::optional<Installation>& incumbent = std::nullopt,
                             const SolveLimits& limits = {}, int threads = 1);

/// Cheapest installation making every route feasible. Throws
/// InsufficientChargingError when electrifying every route segment is not
/// enough for some route.
SolveResult min_budget(const std::vector<Route>& routes, const SegmentGraph& g, const SocParams& p,
                       const SolveLimits& limits = {}, int threads = 1);

/// Objective with every candidate that fits the budget on its own installed;
/// no installation within the budget scores higher.
double fixed_budget_upper_bound(const std::vector<Route>& routes, const SegmentGraph& g,
                                const SocParams& p, double budget, WeightScheme scheme);

/// Cost lower bound for min_budget: routes infeasible without installation
/// whose segment sets are pairwise disjoint each need their own lane.
double min_budget_lower_bound(const std::vector<Route>& routes, const SegmentGraph& g,
                              const SocParams& p);

/// Wraps a heuristic installation as a result with status heuristic.
SolveResult heuristic_result(Installation inst, const std::vector<Route>& routes,
                             const SegmentGraph& g, const SocParams& p, WeightScheme scheme,
                             std::optional<double> budget, int threads = 1);

/// Union of the cheapest per-route fixes from the state graphs.
Installation min_cost_path_union(const std::vector<Route>& routes, const SegmentGraph& g,
                                 const SocParams& p);

std::string solution_json(const SolveResult& res, const SegmentGraph& g);
/// Reads the "installed" id list of a solution JSON file.
Installation load_installation(const std::string& path, const SegmentGraph& g);

}  // namespace wcl
