#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "wcl/road_network.hpp"
#include "wcl/routing.hpp"
#include "wcl/soc_model.hpp"

namespace wcl {

enum class CentralityMeasure { betweenness, closeness, eigenvector };

CentralityMeasure parse_centrality(std::string_view text);
std::string_view to_string(CentralityMeasure m);

struct CentralityScores {
  CentralityMeasure measure = CentralityMeasure::betweenness;
  std::vector<double> scores;          // per segment index
  std::vector<SegmentIndex> ranking;   // best first, ties by id
};

/// Betweenness: number of ordered pairs (i, j) whose fastest path (ties
/// broken as in routing) passes strictly through k. Closeness: sum of
/// travel times to every reachable segment, ranked ascending. Eigenvector:
/// power iteration on A^T + I (a segment gains from the segments feeding
/// into it), tolerance 1e-10, at most 10000 iterations, max entry 1.
/// Throws InputError on an empty graph (or one without edges for
/// eigenvector) and ConvergenceError if the iteration stalls.
CentralityScores centrality_scores(const SegmentGraph& g, CentralityMeasure measure,
                                   int threads = 1);

/// Uniformly random permutation of the segment indices.
std::vector<SegmentIndex> random_ranking(const SegmentGraph& g, std::uint64_t seed);

/// Takes the ranking in order while the running cost fits the budget and
/// stops at the first segment that does not.
Installation heuristic_fill(const std::vector<SegmentIndex>& ranking, const SegmentGraph& g,
                            double budget);

struct PrefixBudget {
  std::size_t count = 0;  // length of the shortest sufficient prefix
  double cost = 0.0;
};

/// Shortest ranking prefix leaving no route infeasible. Throws
/// InsufficientChargingError if even the full ranking is not enough.
PrefixBudget min_prefix_budget(const std::vector<SegmentIndex>& ranking,
                               const std::vector<Route>& routes, const SocParams& p,
                               const SegmentGraph& g);

}  // namespace wcl
