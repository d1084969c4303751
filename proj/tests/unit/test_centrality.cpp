#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>

#include "support.hpp"
#include "wcl/centrality.hpp"
#include "wcl/errors.hpp"
#include "wcl/generators.hpp"

using namespace wcl;

namespace {

// Bidirectional star: hub intersection h with spokes to leaves l1..lk.
SegmentGraph star(int k) {
  std::vector<RoadSegment> segs;
  for (int i = 1; i <= k; ++i) {
    const auto leaf = "l" + std::to_string(i);
    segs.push_back(test::seg("in" + std::to_string(i), 1, leaf, "h"));
    segs.push_back(test::seg("out" + std::to_string(i), 1, "h", leaf));
  }
  return SegmentGraph::build(std::move(segs));
}

// Dominant eigenvector of A^T + I by a dense solver, scaled to max 1.
std::vector<double> dense_eigenvector(const SegmentGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (SegmentIndex u = 0; u < g.size(); ++u) {
    for (auto v : g.successors(u)) m(v, u) += 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
  }
  Eigen::VectorXd x = es.eigenvectors().col(best).real();
  if (x.sum() < 0) x = -x;
  x /= x.maxCoeff();
  return {x.data(), x.data() + n};
}

}  // namespace

TEST_SUITE("centrality") {

TEST_CASE("parse and print measures") {
  for (auto m : {CentralityMeasure::betweenness, CentralityMeasure::closeness, CentralityMeasure::eigenvector}) {
    CHECK(parse_centrality(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_centrality("pagerank"), InputError);
}

TEST_CASE("betweenness on a cycle is uniform") {
  const auto g = cycle_network(7);
  const auto c = centrality_scores(g, CentralityMeasure::betweenness);
  // Each of the 42 ordered pairs passes through (distance - 1) segments.
  double total = 0.0;
  for (int d = 1; d < 7; ++d) total += 7.0 * (d - 1);
  for (double s : c.scores) CHECK(s == doctest::Approx(total / 7.0));
  CHECK(c.ranking == test::all_indices(g));
}

TEST_CASE("betweenness on a short path") {
  const auto g = test::chain({1, 1, 1});
  const auto c = centrality_scores(g, CentralityMeasure::betweenness);
  CHECK(c.scores == std::vector<double>{0, 1, 0});
  CHECK(c.ranking.front() == 1);
}

TEST_CASE("betweenness and closeness agree with exhaustive oracles") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    RandomNetworkOptions o;
    o.intersections = 5 + s % 3;
    o.segments = o.intersections + 6;
    const auto g = random_network(o, s);
    const auto closure = test::oracle_closure(g);
    std::vector<double> between(g.size(), 0.0), close(g.size(), 0.0);
    for (SegmentIndex i = 0; i < g.size(); ++i) {
      for (SegmentIndex j = 0; j < g.size(); ++j) {
        if (i == j || !closure[i][j]) continue;
        const auto path = test::oracle_shortest_path(g, i, j);
        for (std::size_t k = 1; k + 1 < path.size(); ++k) between[path[k]] += 1.0;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) close[i] += g.time(path[k]);
      }
    }
    const auto b = centrality_scores(g, CentralityMeasure::betweenness, 3);
    const auto c = centrality_scores(g, CentralityMeasure::closeness, 2);
    for (SegmentIndex i = 0; i < g.size(); ++i) {
      CHECK(b.scores[i] == between[i]);
      CHECK(c.scores[i] == doctest::Approx(close[i]).epsilon(1e-12));
    }
    CHECK(std::is_sorted(c.ranking.begin(), c.ranking.end(),
                         [&](auto x, auto y) { return c.scores[x] < c.scores[y]; }));
    CHECK(std::is_sorted(b.ranking.begin(), b.ranking.end(),
                         [&](auto x, auto y) { return b.scores[x] > b.scores[y]; }));
  }
}

TEST_CASE("eigenvector centrality matches a dense eigensolver") {
  const auto g = star(4);
  const auto c = centrality_scores(g, CentralityMeasure::eigenvector);
  const auto ref = dense_eigenvector(g);
  for (SegmentIndex i = 0; i < g.size(); ++i) CHECK(c.scores[i] == doctest::Approx(ref[i]).epsilon(1e-8));
  CHECK(*std::max_element(c.scores.begin(), c.scores.end()) == 1.0);

  for (std::uint64_t s = 10; s < 14; ++s) {
    RandomNetworkOptions o;
    o.intersections = 6;
    o.segments = 14;
    const auto rg = random_network(o, s);
    const auto rc = centrality_scores(rg, CentralityMeasure::eigenvector);
    const auto rref = dense_eigenvector(rg);
    for (SegmentIndex i = 0; i < rg.size(); ++i) CHECK(rc.scores[i] == doctest::Approx(rref[i]).epsilon(1e-7));
  }
}

TEST_CASE("eigenvector iteration that cannot settle raises") {
  // On a path the iterates keep growing polynomially; the normalized vector
  // creeps toward the tail too slowly to meet the tolerance in time.
  const auto g = test::chain({1, 1, 1});
  try {
    centrality_scores(g, CentralityMeasure::eigenvector);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 10000);
  }
  const auto lone = test::chain({1});
  CHECK_THROWS_AS(centrality_scores(lone, CentralityMeasure::eigenvector), InputError);
}

TEST_CASE("random ranking is a seeded permutation") {
  const auto g = cycle_network(30);
  const auto a = random_ranking(g, 9);
  CHECK(a == random_ranking(g, 9));
  CHECK(a != random_ranking(g, 10));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == test::all_indices(g));
}

TEST_CASE("minimum sufficient ranking prefix") {
  const auto g = cycle_network(10);
  SocParams p;
  p.soc_function = SocFunction::simplistic;
  p.n_layers = 4;
  p.alpha = 0.0;
  const std::vector<Route> rs = {make_route(g, {0, 1, 2, 3})};
  const std::vector<SegmentIndex> ranking = {9, 8, 1, 2, 0};
  const auto pb = min_prefix_budget(ranking, rs, p, g);
  CHECK(pb.count == 3);
  CHECK(pb.cost == 3.0);
  const std::vector<SegmentIndex> useless = {9, 8, 7};
  CHECK_THROWS_AS(min_prefix_budget(useless, rs, p, g), InsufficientChargingError);
}

}
