#include "wcl/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wcl/errors.hpp"
#include "wcl/parallel.hpp"
#include "wcl/random.hpp"
#include "wcl/solvers.hpp"

namespace wcl {

namespace {

constexpr double kEigenTolerance = 1e-10;
constexpr int kEigenMaxIterations = 10000;

std::vector<double> betweenness(const SegmentGraph& g, int threads) {
  const std::size_t n = g.size();
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  // Integer counts per worker, so the total is independent of the split.
  std::vector<std::vector<std::uint64_t>> count(workers, std::vector<std::uint64_t>(n, 0));
  parallel_for(workers, threads, [&](std::size_t w) {
    std::vector<std::uint64_t> below(n);
    for (std::size_t o = w; o < n; o += workers) {
      const ShortestPathTree tree(g, static_cast<SegmentIndex>(o));
      const auto& order = tree.order();
      for (auto v : order) below[v] = 0;
      // Reverse settle order visits children before parents.
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const SegmentIndex v = *it;
        if (v == tree.origin()) continue;
        count[w][v] += below[v];
        below[tree.parent(v)] += below[v] + 1;
      }
    }
  });
  std::vector<double> score(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    std::uint64_t total = 0;
    for (const auto& c : count) total += c[v];
    score[v] = static_cast<double>(total);
  }
  return score;
}

std::vector<double> closeness(const SegmentGraph& g, int threads) {
  std::vector<double> score(g.size(), 0.0);
  parallel_for(g.size(), threads, [&](std::size_t o) {
    const ShortestPathTree tree(g, static_cast<SegmentIndex>(o));
    double sum = 0.0;
    for (auto v : tree.order()) sum += tree.time_to(v);
    score[o] = sum;
  });
  return score;
}

std::vector<double> eigenvector(const SegmentGraph& g) {
  if (g.edge_count() == 0) throw InputError("eigenvector centrality needs at least one edge");
  const std::size_t n = g.size();
  std::vector<double> x(n, 1.0), next(n);
  for (int it = 1; it <= kEigenMaxIterations; ++it) {
    double top = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double s = x[v];
      for (auto u : g.predecessors(static_cast<SegmentIndex>(v))) s += x[u];
      next[v] = s;
      top = std::max(top, s);
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= top;
      change = std::max(change, std::abs(next[v] - x[v]));
    }
    x.swap(next);
    if (change < kEigenTolerance) return x;
  }
  throw ConvergenceError("eigenvector centrality did not converge in " +
                             std::to_string(kEigenMaxIterations) + " iterations",
                         kEigenMaxIterations);
}

}  // namespace

CentralityMeasure parse_centrality(std::string_view text) {
  if (text == "betweenness") return CentralityMeasure::betweenness;
  if (text == "closeness") return CentralityMeasure::closeness;
  if (text == "eigenvector") return CentralityMeasure::eigenvector;
  throw InputError("unknown centrality measure '" + std::string(text) + "'");
}

std::string_view to_string(CentralityMeasure m) {
  switch (m) {
    case CentralityMeasure::betweenness: return "betweenness";
    case CentralityMeasure::closeness: return "closeness";
    case CentralityMeasure::eigenvector: return "eigenvector";
  }
  return "betweenness";
}

CentralityScores centrality_scores(const SegmentGraph& g, CentralityMeasure measure, int threads) {
  if (g.empty()) throw InputError("centrality needs a nonempty graph");
  CentralityScores c;
  c.measure = measure;
  switch (measure) {
    case CentralityMeasure::betweenness: c.scores = betweenness(g, threads); break;
    case CentralityMeasure::closeness: c.scores = closeness(g, threads); break;
    case CentralityMeasure::eigenvector: c.scores = eigenvector(g); break;
  }
  c.ranking.resize(g.size());
  std::iota(c.ranking.begin(), c.ranking.end(), SegmentIndex{0});
  const bool ascending = measure == CentralityMeasure::closeness;
  std::stable_sort(c.ranking.begin(), c.ranking.end(), [&](SegmentIndex a, SegmentIndex b) {
    return ascending ? c.scores[a] < c.scores[b] : c.scores[a] > c.scores[b];
  });
  return c;
}

std::vector<SegmentIndex> random_ranking(const SegmentGraph& g, std::uint64_t seed) {
  std::vector<SegmentIndex> r(g.size());
  std::iota(r.begin(), r.end(), SegmentIndex{0});
  Rng rng(mix_seed(seed));
  rng.shuffle(r);
  return r;
}

Installation heuristic_fill(const std::vector<SegmentIndex>& ranking, const SegmentGraph& g,
                            double budget) {
  if (!(budget >= 0.0)) throw InputError("budget must be nonnegative");
  std::vector<SegmentIndex> chosen;
  double cost = 0.0;
  for (auto s : ranking) {
    const double c = cost + g.segment(s).cost;
    if (!within_budget(c, budget)) break;
    chosen.push_back(s);
    cost = c;
  }
  return Installation::from(g, std::move(chosen));
}

PrefixBudget min_prefix_budget(const std::vector<SegmentIndex>& ranking,
                               const std::vector<Route>& routes, const SocParams& p,
                               const SegmentGraph& g) {
  // Feasibility only grows with the prefix, so binary search its length.
  auto all_feasible = [&](std::size_t k) {
    std::vector<char> mask(g.size(), 0);
    for (std::size_t i = 0; i < k; ++i) mask[ranking[i]] = 1;
    return std::all_of(routes.begin(), routes.end(),
                       [&](const Route& r) { return simulate_route(r, mask, p, g).feasible; });
  };
  if (!all_feasible(ranking.size())) {
    throw InsufficientChargingError("the full ranking leaves some route infeasible");
  }
  std::size_t lo = 0, hi = ranking.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (all_feasible(mid)) hi = mid;
    else lo = mid + 1;
  }
  PrefixBudget out;
  out.count = lo;
  for (std::size_t i = 0; i < lo; ++i) out.cost += g.segment(ranking[i]).cost;
  return out;
}

}  // namespace wcl
