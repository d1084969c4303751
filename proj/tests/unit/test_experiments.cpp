#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wcl/errors.hpp"
#include "wcl/experiments.hpp"
#include "wcl/generators.hpp"

using namespace wcl;
using nlohmann::ordered_json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wcl_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ordered_json small_config(const std::string& kind) {
  ordered_json c;
  c["kind"] = kind;
  c["seed"] = 3;
  c["network"] = {{"generator", "cycle"}, {"n", 12}, {"length", 2.0}};
  c["battery"] = {{"e_cap", 4.0}, {"alpha", 0.3}, {"n_layers", 21}};
  c["budget"] = 4.0;
  c["n_routes"] = 10;
  if (kind == "velocity") {
    c["eps_v"] = {0.0, 0.2};
    c["trials"] = 5;
    c["l"] = 0.0;
  }
  if (kind == "warmstart") {
    c["ks"] = {5};
    c["repeats"] = 3;
    c["node_limit"] = 50;
  }
  if (kind == "random-isoc") c["ls"] = {0.0, 1.0};
  return c;
}

std::string report_bytes(const ExperimentReport& rep) {
  std::string all = rep.config.dump() + rep.summary.dump();
  for (const auto& t : rep.tables) all += to_csv(t);
  return all;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("quantiles interpolate between order statistics") {
  CHECK(quantile({3, 1, 2, 4}, 0.0) == 1.0);
  CHECK(quantile({3, 1, 2, 4}, 1.0) == 4.0);
  CHECK(quantile({3, 1, 2, 4}, 0.5) == 2.5);
  CHECK(quantile({3, 1, 2, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({7}, 0.3) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), InputError);
}

TEST_CASE("spearman rank correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {9, 7, 5, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 1, 1}, {1, 2, 3}) == 0.0);
  // Ties take average ranks: x ranks 1.5 1.5 3, y ranks 1 2 3.
  CHECK(spearman({0, 0, 1}, {1, 2, 3}) == doctest::Approx(0.8660254037844386));
}

TEST_CASE("CSV quoting") {
  Table t{"x", {"a", "b"}, {{1.5, std::string("p,q")}, {2.0, std::string("say \"hi\"")}}};
  CHECK(to_csv(t) == "a,b\n1.5,\"p,q\"\n2,\"say \"\"hi\"\"\"\n");
}

TEST_CASE("SOC distribution curves are cumulative counts") {
  const auto g = cycle_network(10);
  SocParams p;
  p.soc_function = SocFunction::simplistic;
  p.n_layers = 11;
  const std::vector<Route> one = {make_route(g, {0, 1, 2})};
  auto rep = soc_distribution(one, {{"none", Installation{}}}, p, g);
  const auto& curves = rep.tables[0];
  REQUIRE(curves.rows.size() == 101);
  // Final SOC is 0.7: the curve steps from 0 to 1 just above x = 0.7.
  for (const auto& row : curves.rows) {
    const double x = std::get<double>(row[0]);
    const double y = std::get<double>(row[1]);
    CHECK(y == (x > 0.7 + 1e-9 ? 1.0 : 0.0));
  }

  const auto routes = enumerate_all_routes(g).routes;
  const auto inst = Installation::from(g, {2, 7});
  rep = soc_distribution(routes, {{"none", Installation{}}, {"two", inst}}, p, g);
  for (std::size_t col = 1; col <= 2; ++col) {
    double prev = -1.0;
    for (const auto& row : rep.tables[0].rows) {
      const double y = std::get<double>(row[col]);
      CHECK(y >= prev);
      prev = y;
    }
    CHECK(prev == static_cast<double>(routes.size()));
  }
  CHECK(rep.tables[1].rows.size() == 2);
  CHECK(rep.summary["routes"] == routes.size());
}

TEST_CASE("velocity study without perturbation has no spread") {
  const auto g = cycle_network(10, 3.0);
  SocParams p;
  const auto routes = enumerate_all_routes(g).routes;
  const auto rep = velocity_study(routes, {0.0, 0.3}, 7, 5, Installation::from(g, {1, 4}), p, g, 2);
  const auto& q = rep.tables[1];
  CHECK(std::get<double>(q.rows[0][6]) == 0.0);
  CHECK(std::get<double>(q.rows[1][6]) > 0.0);
  const auto again = velocity_study(routes, {0.0, 0.3}, 7, 5, Installation::from(g, {1, 4}), p, g, 1);
  CHECK(report_bytes(rep) == report_bytes(again));
}

TEST_CASE("speed noise does not raise the median arrival SOC") {
  // Slower driving costs more charge per mile without a lane, so the
  // median tends down as the noise widens.
  const auto g = cycle_network(12, 2.0);
  SocParams p;
  p.e_cap = 10.0;
  const auto routes = enumerate_all_routes(g).routes;
  const auto rep = velocity_study(routes, {0.0, 0.2, 0.4, 0.6, 0.8}, 40, 11, Installation{}, p, g, 2);
  CHECK(rep.summary["spearman_median_vs_eps"].get<double>() <= 0.0);
}

TEST_CASE("warm start never hurts under a zero node limit") {
  const auto g = cycle_network(12, 2.0);
  SocParams p;
  p.e_cap = 4.0;
  p.alpha = 0.3;
  auto pop = enumerate_all_routes(g);
  StudyOptions opts;
  opts.limits = {0, std::nullopt};
  const auto rep = warmstart_study(pop, {5, 8}, 4, 1, 4.0, p, g, {}, opts);
  for (const auto& row : rep.tables[0].rows) {
    const double warm = std::get<double>(row[3]), cold = std::get<double>(row[4]);
    CHECK(warm >= cold);
    if (std::holds_alternative<double>(row[5])) CHECK(std::get<double>(row[5]) >= 1.0);
    else CHECK(std::get<std::string>(row[5]) == "dominant");
  }
  StudyOptions unlimited;
  unlimited.limits = {};
  CHECK_THROWS_AS(warmstart_study(pop, {5}, 1, 1, 4.0, p, g, {}, unlimited), InputError);
}

TEST_CASE("random initial SOC study without budget changes nothing") {
  const auto g = cycle_network(12, 2.0);
  SocParams p;
  p.e_cap = 4.0;
  const auto pop = enumerate_all_routes(g);
  const auto rep = random_isoc_study(pop, {0.0, 1.0}, 10, 0.4, 2, 0.0, p, g);
  for (const auto& row : rep.tables[0].rows) {
    CHECK(std::get<double>(row[3]) == std::get<double>(row[4]));
    CHECK(std::get<double>(row[3]) == std::get<double>(row[5]));
  }
  CHECK_THROWS_AS(random_isoc_study(pop, {50.0}, 10, 0.4, 2, 0.0, p, g), InputError);
}

TEST_CASE("configs are validated and completed") {
  CHECK_THROWS_AS(run_experiment(ordered_json{{"kind", "nope"}}), InputError);
  auto c = small_config("distribution");
  c["bogus"] = 1;
  CHECK_THROWS_AS(run_experiment(c), InputError);
  c = small_config("distribution");
  c["beta"] = 0.1;
  CHECK_THROWS_AS(run_experiment(c), InputError);
  const auto rep = run_experiment(small_config("distribution"));
  CHECK(rep.config["solver"] == "bb");
  CHECK(rep.config["heuristics"].size() == 4);
  CHECK(rep.config["battery"]["p2"] == 40.0);
}

TEST_CASE("sidecars rerun to identical files for every kind") {
  for (const char* kind : {"distribution", "random-isoc", "velocity", "warmstart"}) {
    CAPTURE(kind);
    const auto dir1 = scratch(std::string(kind) + "_1");
    const auto dir2 = scratch(std::string(kind) + "_2");
    const auto first = run_experiment(small_config(kind), 1);
    const auto files = write_report(first, dir1);
    std::filesystem::path sidecar;
    for (const auto& f : files) {
      if (f.extension() == ".json") sidecar = f;
    }
    REQUIRE(!sidecar.empty());
    const auto second = run_experiment(ordered_json::parse(slurp(sidecar)), 2);
    const auto files2 = write_report(second, dir2);
    REQUIRE(files.size() == files2.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
      CHECK(files[i].filename() == files2[i].filename());
      CHECK(slurp(files[i]) == slurp(files2[i]));
    }
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
  }
}

}
