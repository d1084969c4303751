#include <doctest.h>

#include "support.hpp"
#include "wcl/errors.hpp"
#include "wcl/generators.hpp"

using namespace wcl;

TEST_SUITE("soc_model") {

TEST_CASE("energy balance per segment") {
  const auto g = test::chain({1.5});  // category 3 urban: 30 mph, 0.05 h
  SocParams p;
  CHECK(delta_soc(g.segment(0), false, p) == doctest::Approx(-10.0 * 0.05 / 30.0));
  CHECK(delta_soc(g.segment(0), true, p) == doctest::Approx((0.8 * 40.0 - 10.0) * 0.05 / 30.0));
}

TEST_CASE("discretization rounds to the nearest level, ties down") {
  CHECK(discretize(0.0, 5) == 0);
  CHECK(discretize(1.0, 5) == 4);
  CHECK(discretize(0.125, 5) == 0);
  CHECK(discretize(0.1250001, 5) == 1);
  CHECK(discretize(0.375, 5) == 1);
  CHECK(discretize(0.62, 5) == 2);
  CHECK(discretize(-0.3, 5) == 0);
  CHECK(discretize(1.7, 5) == 4);
  CHECK(level_value(3, 4) == doctest::Approx(1.0));
  CHECK(level_value(1, 5) == doctest::Approx(0.25));
}

TEST_CASE("simplistic steps are clamped") {
  CHECK(simplistic_step(3, true, 4) == 3);
  CHECK(simplistic_step(0, false, 4) == 0);
  CHECK(simplistic_step(1, false, 4) == 0);
  CHECK(simplistic_step(1, true, 4) == 2);
}

TEST_CASE("simulation agrees with the direct battery model") {
  RandomNetworkOptions o;
  o.intersections = 6;
  o.segments = 16;
  o.min_length = 1.0;
  o.max_length = 12.0;
  const auto g = random_network(o, 5);
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    SocParams p;
    p.soc_function = trial % 2 ? SocFunction::simplistic : SocFunction::realistic;
    p.n_layers = 3 + static_cast<int>(rng.below(6));
    p.alpha = rng.uniform() * 0.6;
    p.rule = trial % 3 ? ThresholdRule::above : ThresholdRule::at_least;
    auto r = test::random_walk(g, rng, 1 + rng.below(10));
    r.initial_soc = 0.2 + 0.8 * rng.uniform();
    std::vector<char> mask(g.size());
    for (auto& m : mask) m = rng.below(3) == 0;
    const auto got = simulate_route(r, mask, p, g);
    const auto want = test::oracle_drive(g, r, mask, p);
    CHECK(got.final_soc == doctest::Approx(want.soc).epsilon(1e-12));
    CHECK(got.completed == !want.stalled);
    CHECK(got.stall_distance == doctest::Approx(want.reached));
    CHECK(got.feasible == test::oracle_feasible(want, p));
    if (got.completed) CHECK(got.trajectory.size() == r.segments.size());
  }
}

TEST_CASE("an EV that empties its battery mid-route stalls") {
  const auto g = test::chain({1, 1, 1});
  SocParams p;
  p.soc_function = SocFunction::simplistic;
  p.n_layers = 3;
  const auto r = make_route(g, {0, 1, 2});
  const std::vector<char> none(3, 0);
  auto out = simulate_route(r, none, p, g);
  CHECK_FALSE(out.completed);
  CHECK(out.final_soc == 0.0);
  CHECK(out.stall_distance == 2.0);
  CHECK_FALSE(out.feasible);

  // Reaching empty exactly on arrival completes the route.
  const auto two = make_route(g, {0, 1});
  out = simulate_route(two, none, p, g);
  CHECK(out.completed);
  CHECK(out.final_soc == 0.0);
  CHECK_FALSE(out.feasible);
  p.rule = ThresholdRule::at_least;
  CHECK(simulate_route(two, none, p, g).feasible);

  auto empty_start = r;
  empty_start.initial_soc = 0.0;
  CHECK_FALSE(simulate_route(empty_start, none, p, g).completed);
}

TEST_CASE("installations are sorted sets with summed cost") {
  const auto g = test::chain({1, 2, 3});
  const auto inst = Installation::from(g, {2, 0, 2});
  CHECK(inst.installed == std::vector<SegmentIndex>{0, 2});
  CHECK(inst.total_cost == 4.0);
  CHECK(inst.ids(g) == std::vector<std::string>{"s0", "s2"});
  CHECK(inst.mask(3) == std::vector<char>{1, 0, 1});
  CHECK_THROWS_AS(Installation::from(g, {7}), InputError);
}

TEST_CASE("parameter validation") {
  SocParams p;
  CHECK_NOTHROW(p.validate());
  p.n_layers = 1;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.alpha = 1.2;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.eta = 0.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  CHECK(parse_soc_function("simplistic") == SocFunction::simplistic);
  CHECK(parse_threshold_rule("at-least") == ThresholdRule::at_least);
  CHECK_THROWS_AS(parse_soc_function("linear"), InputError);
}

TEST_CASE("feasibility is strict by default") {
  SocParams p;
  p.alpha = 0.5;
  CHECK_FALSE(p.feasible(0.5));
  CHECK(p.feasible(0.51));
  p.rule = ThresholdRule::at_least;
  CHECK(p.feasible(0.5));
}

}
