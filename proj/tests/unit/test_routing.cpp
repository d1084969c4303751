#include <doctest.h>

#include <set>

#include "support.hpp"
#include "wcl/errors.hpp"
#include "wcl/generators.hpp"

using namespace wcl;
using wcl::test::seg;

TEST_SUITE("routing") {

TEST_CASE("make_route validates adjacency and computes distance") {
  const auto g = test::chain({1.0, 2.5, 0.5});
  const auto r = make_route(g, {0, 1, 2});
  CHECK(r.distance == 4.0);
  CHECK(distance_through(g, r, 2) == 3.5);
  CHECK_THROWS_AS(make_route(g, {0, 2}), InputError);
  CHECK_THROWS_AS(make_route(g, {}), InputError);
  CHECK_THROWS_AS(make_route(g, {0}, 0.0), InputError);
  CHECK_THROWS_AS(make_route(g, {0}, 1.0, 1.5), InputError);
}

TEST_CASE("fastest routes match exhaustive path enumeration") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    RandomNetworkOptions o;
    o.intersections = 5;
    o.segments = 12;
    const auto g = random_network(o, s);
    for (SegmentIndex a = 0; a < g.size(); ++a) {
      for (SegmentIndex b = 0; b < g.size(); ++b) {
        if (a == b) continue;
        const auto expected = test::oracle_shortest_path(g, a, b);
        const auto got = shortest_route(g, a, b);
        REQUIRE(got.has_value() == !expected.empty());
        if (got) CHECK(got->segments == expected);
      }
    }
  }
}

TEST_CASE("equally fast paths resolve to the smaller id sequence") {
  // Two equal-time detours from s to t: via m1 or via m2, and a deeper tie
  // where the id order is decided at the first differing segment.
  const auto g = SegmentGraph::build({seg("s", 1, "o", "x"), seg("m2", 1, "x", "y"), seg("m1", 1, "x", "y"),
                                      seg("t", 1, "y", "z")});
  auto r = shortest_route(g, "s", "t");
  REQUIRE(r);
  CHECK(g.segment(r->segments[1]).id == "m1");

  const auto h = SegmentGraph::build({seg("s", 1, "o", "x"), seg("a", 1, "x", "p"), seg("b", 1, "x", "q"),
                                      seg("z1", 1, "p", "y"), seg("a2", 1, "q", "y"), seg("t", 1, "y", "w")});
  r = shortest_route(h, "s", "t");
  REQUIRE(r);
  CHECK(h.segment(r->segments[1]).id == "a");
  CHECK(h.segment(r->segments[2]).id == "z1");
}

TEST_CASE("all-pairs enumeration covers exactly the reachable pairs") {
  RandomNetworkOptions o;
  o.intersections = 6;
  o.segments = 11;
  const auto g = random_network(o, 3);
  const auto closure = test::oracle_closure(g);
  std::size_t reachable = 0;
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (std::size_t v = 0; v < g.size(); ++v) reachable += closure[u][v] && u != v;
  }
  EnumerationOptions eo;
  const auto pop = enumerate_all_routes(g, eo);
  CHECK(pop.routes.size() == reachable);
  for (std::size_t i = 1; i < pop.routes.size(); ++i) {
    const auto& p = pop.routes[i - 1].segments;
    const auto& q = pop.routes[i].segments;
    CHECK(std::make_pair(p.front(), p.back()) < std::make_pair(q.front(), q.back()));
  }
  eo.threads = 3;
  const auto again = enumerate_all_routes(g, eo);
  REQUIRE(again.routes.size() == pop.routes.size());
  for (std::size_t i = 0; i < pop.routes.size(); ++i) CHECK(again.routes[i].segments == pop.routes[i].segments);
  eo.max_nodes = 3;
  CHECK_THROWS_AS(enumerate_all_routes(g, eo), InputError);
}

TEST_CASE("population statistics and Omega_l") {
  const auto g = test::chain({1, 1, 1, 1});
  std::vector<Route> rs = {make_route(g, {0, 1}), make_route(g, {0, 1, 2}), make_route(g, {0, 1, 2, 3})};
  const auto pop = RoutePopulation::from(rs);
  CHECK(pop.tau == doctest::Approx(3.0));
  CHECK(pop.sigma == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(omega_l(pop, 0).size() == 1);
  CHECK(omega_l(pop, -2).size() == 3);
  CHECK(omega_l(pop, 5).empty());
}

TEST_CASE("route sampling is deterministic and without repetition") {
  const auto g = cycle_network(8);
  const auto pop = enumerate_all_routes(g);
  const auto a = sample_routes(pop, 10, 42);
  const auto b = sample_routes(pop, 10, 42);
  REQUIRE(a.size() == 10);
  std::set<std::vector<SegmentIndex>> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].segments == b[i].segments);
    seen.insert(a[i].segments);
  }
  CHECK(seen.size() == 10);
  const auto longer = sample_routes(pop, 5, 1, min_segments(6));
  for (const auto& r : longer) CHECK(r.segments.size() >= 6);
  CHECK_THROWS_AS(sample_routes(pop, 1000, 1), InputError);
  CHECK_THROWS_AS(sample_routes(pop, 1, 1, min_distance(100.0)), InputError);
}

TEST_CASE("random OD routes are distinct fastest routes") {
  GridOptions o;
  o.rows = 5;
  o.cols = 5;
  const auto g = grid_network(o, 1);
  const auto rs = random_routes(g, 20, 9, 3);
  std::set<std::pair<SegmentIndex, SegmentIndex>> od;
  for (const auto& r : rs) {
    CHECK(r.segments.size() >= 3);
    od.emplace(r.segments.front(), r.segments.back());
    const auto best = shortest_route(g, r.segments.front(), r.segments.back());
    CHECK(best->segments == r.segments);
  }
  CHECK(od.size() == 20);
}

TEST_CASE("routes JSON round trip") {
  const auto g = test::chain({1, 2, 3});
  std::vector<Route> rs = {make_route(g, {0, 1}, 0.5, 0.9), make_route(g, {1, 2})};
  const auto back = parse_routes_json(routes_to_json(rs, g), g);
  REQUIRE(back.size() == 2);
  CHECK(back[0].segments == rs[0].segments);
  CHECK(back[0].demand == 0.5);
  CHECK(back[0].initial_soc == 0.9);
  CHECK(back[1].distance == 5.0);
  CHECK_THROWS_AS(parse_routes_json(R"([{"segments": ["s0", "s2"]}])", g), InputError);
  CHECK_THROWS_AS(parse_routes_json(R"([{"segments": ["s0"], "demand": 3}])", g), InputError);
  CHECK_THROWS_AS(parse_routes_json(R"([{"segments": ["nope"]}])", g), InputError);
}

}
