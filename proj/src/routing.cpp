#include "wcl/routing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wcl/errors.hpp"
#include "wcl/parallel.hpp"
#include "wcl/random.hpp"

namespace wcl {

Route make_route(const SegmentGraph& g, std::vector<SegmentIndex> segments, double demand,
                 double initial_soc) {
  if (segments.empty()) throw InputError("route must contain at least one segment");
  if (!(demand > 0.0)) throw InputError("route demand must be positive");
  if (!(initial_soc >= 0.0 && initial_soc <= 1.0)) {
    throw InputError("initial SOC must be in [0, 1]");
  }
  Route r;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i] >= g.size()) throw InputError("route references unknown segment");
    if (i > 0 && !g.has_edge(segments[i - 1], segments[i])) {
      throw InputError("route segments " + g.segment(segments[i - 1]).id + " and " +
                       g.segment(segments[i]).id + " are not adjacent");
    }
    r.distance += g.segment(segments[i]).length;
  }
  r.segments = std::move(segments);
  r.demand = demand;
  r.initial_soc = initial_soc;
  return r;
}

double distance_through(const SegmentGraph& g, const Route& r, std::size_t count) {
  double d = 0.0;
  for (std::size_t i = 0; i < count && i < r.segments.size(); ++i) {
    d += g.segment(r.segments[i]).length;
  }
  return d;
}

RoutePopulation RoutePopulation::from(std::vector<Route> routes) {
  RoutePopulation pop;
  pop.routes = std::move(routes);
  if (pop.routes.empty()) return pop;
  double sum = 0.0;
  for (const auto& r : pop.routes) sum += r.distance;
  pop.tau = sum / static_cast<double>(pop.routes.size());
  double sq = 0.0;
  for (const auto& r : pop.routes) sq += (r.distance - pop.tau) * (r.distance - pop.tau);
  pop.sigma = std::sqrt(sq / static_cast<double>(pop.routes.size()));
  return pop;
}

// ---------------------------------------------------------------------------

ShortestPathTree::ShortestPathTree(const SegmentGraph& g, SegmentIndex origin) : origin_(origin) {
  const std::size_t n = g.size();
  if (origin >= n) throw InputError("unknown origin segment");
  dist_.assign(n, std::numeric_limits<double>::infinity());
  parent_.assign(n, kNone);
  depth_.assign(n, 0);

  using Item = std::pair<double, SegmentIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<char> done(n, 0);
  dist_[origin] = 0.0;
  heap.emplace(0.0, origin);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    order_.push_back(u);
    const double w = g.edge_weight(u);
    for (SegmentIndex v : g.successors(u)) {
      const double nd = d + w;
      if (nd < dist_[v]) {
        dist_[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }

  std::uint32_t levels = 1;
  while ((std::size_t{1} << levels) < n) ++levels;
  lift_.assign(levels, std::vector<SegmentIndex>(n, origin));

  // Predecessors on a shortest path are always settled earlier, so the best
  // parent can be chosen in settle order.
  for (std::size_t k = 1; k < order_.size(); ++k) {
    const SegmentIndex v = order_[k];
    SegmentIndex best = kNone;
    for (SegmentIndex u : g.predecessors(v)) {
      if (!done[u] || dist_[u] + g.edge_weight(u) != dist_[v]) continue;
      if (best == kNone || extends_smaller(u, best, v)) best = u;
    }
    parent_[v] = best;
    depth_[v] = depth_[best] + 1;
    lift_[0][v] = best;
    for (std::uint32_t j = 1; j < levels; ++j) lift_[j][v] = lift_[j - 1][lift_[j - 1][v]];
  }
}

SegmentIndex ShortestPathTree::ancestor(SegmentIndex v, std::uint32_t up) const {
  for (std::uint32_t j = 0; up != 0; ++j, up >>= 1) {
    if (up & 1U) v = lift_[j][v];
  }
  return v;
}

SegmentIndex ShortestPathTree::lca(SegmentIndex a, SegmentIndex b) const {
  if (depth_[a] < depth_[b]) std::swap(a, b);
  a = ancestor(a, depth_[a] - depth_[b]);
  if (a == b) return a;
  for (std::size_t j = lift_.size(); j-- > 0;) {
    if (lift_[j][a] != lift_[j][b]) {
      a = lift_[j][a];
      b = lift_[j][b];
    }
  }
  return lift_[0][a];
}

// True if path(u1) + v is lexicographically smaller than path(u2) + v.
// Node indices follow id order, so comparing indices compares ids.
bool ShortestPathTree::extends_smaller(SegmentIndex u1, SegmentIndex u2, SegmentIndex v) const {
  const SegmentIndex a = lca(u1, u2);
  if (a == u1) return v < ancestor(u2, depth_[u2] - depth_[a] - 1);
  if (a == u2) return ancestor(u1, depth_[u1] - depth_[a] - 1) < v;
  return ancestor(u1, depth_[u1] - depth_[a] - 1) < ancestor(u2, depth_[u2] - depth_[a] - 1);
}

std::vector<SegmentIndex> ShortestPathTree::path_to(SegmentIndex v) const {
  if (!reachable(v)) return {};
  std::vector<SegmentIndex> path(depth_[v] + 1);
  for (std::size_t k = path.size(); k-- > 0;) {
    path[k] = v;
    v = parent_[v];
  }
  return path;
}

std::optional<Route> shortest_route(const SegmentGraph& g, SegmentIndex origin, SegmentIndex dest) {
  if (dest >= g.size()) throw InputError("unknown destination segment");
  ShortestPathTree tree(g, origin);
  if (!tree.reachable(dest)) return std::nullopt;
  return make_route(g, tree.path_to(dest));
}

std::optional<Route> shortest_route(const SegmentGraph& g, std::string_view origin,
                                    std::string_view dest) {
  return shortest_route(g, g.index_of(origin), g.index_of(dest));
}

RoutePopulation enumerate_all_routes(const SegmentGraph& g, const EnumerationOptions& opts) {
  if (g.size() > opts.max_nodes) {
    throw InputError("graph has " + std::to_string(g.size()) + " segments, above the enumeration cap of " +
                     std::to_string(opts.max_nodes));
  }
  std::vector<std::vector<Route>> per_origin(g.size());
  parallel_for(g.size(), opts.threads, [&](std::size_t o) {
    ShortestPathTree tree(g, static_cast<SegmentIndex>(o));
    for (SegmentIndex d = 0; d < g.size(); ++d) {
      if (d == o || !tree.reachable(d)) continue;
      if (tree.depth(d) + 1 < opts.min_segments) continue;
      per_origin[o].push_back(make_route(g, tree.path_to(d)));
    }
  });
  std::vector<Route> all;
  for (auto& v : per_origin) {
    for (auto& r : v) all.push_back(std::move(r));
  }
  return RoutePopulation::from(std::move(all));
}

RoutePredicate min_distance(double miles) {
  return [miles](const Route& r) { return r.distance >= miles; };
}

RoutePredicate min_segments(std::size_t count) {
  return [count](const Route& r) { return r.segments.size() >= count; };
}

RoutePredicate in_omega(const RoutePopulation& pop, double l) {
  const double cut = pop.tau + l * pop.sigma;
  return [cut](const Route& r) { return r.distance > cut; };
}

std::vector<Route> omega_l(const RoutePopulation& pop, double l) {
  if (pop.routes.empty()) throw InputError("omega_l requires a nonempty population");
  auto pred = in_omega(pop, l);
  std::vector<Route> out;
  for (const auto& r : pop.routes) {
    if (pred(r)) out.push_back(r);
  }
  return out;
}

std::vector<Route> sample_routes(const RoutePopulation& pop, std::size_t n, std::uint64_t seed,
                                 const RoutePredicate& pred) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pop.routes.size(); ++i) {
    if (!pred || pred(pop.routes[i])) candidates.push_back(i);
  }
  if (candidates.size() < n) {
    throw InputError("only " + std::to_string(candidates.size()) + " routes qualify, " +
                     std::to_string(n) + " requested");
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(candidates[i], candidates[i + rng.below(candidates.size() - i)]);
  }
  candidates.resize(n);
  std::sort(candidates.begin(), candidates.end());
  std::vector<Route> out;
  out.reserve(n);
  for (auto i : candidates) out.push_back(pop.routes[i]);
  return out;
}

std::vector<Route> random_routes(const SegmentGraph& g, std::size_t n, std::uint64_t seed,
                                 std::size_t min_segs, const RoutePredicate& pred,
                                 std::size_t max_attempts) {
  if (g.size() < 2) throw InputError("need at least two segments to draw routes");
  if (max_attempts == 0) max_attempts = 1000 * n + 1000;
  Rng rng(seed);
  std::set<std::pair<SegmentIndex, SegmentIndex>> seen;
  std::vector<Route> out;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < n; ++attempt) {
    const auto o = static_cast<SegmentIndex>(rng.below(g.size()));
    const auto d = static_cast<SegmentIndex>(rng.below(g.size()));
    if (o == d || !seen.emplace(o, d).second) continue;
    auto r = shortest_route(g, o, d);
    if (!r || r->segments.size() < min_segs || (pred && !pred(*r))) continue;
    out.push_back(std::move(*r));
  }
  if (out.size() < n) {
    throw InputError("found only " + std::to_string(out.size()) + " qualifying routes");
  }
  return out;
}

std::vector<Route> parse_routes_json(std::string_view text, const SegmentGraph& g) {
  try {
    const auto doc = nlohmann::json::parse(text);
    std::vector<Route> routes;
    for (const auto& j : doc) {
      std::vector<SegmentIndex> segs;
      for (const auto& id : j.at("segments")) segs.push_back(g.index_of(id.get<std::string>()));
      const double demand = j.value("demand", 1.0);
      if (demand > 1.0) throw InputError("route demand must be normalized to (0, 1]");
      routes.push_back(make_route(g, std::move(segs), demand, j.value("initial_soc", 1.0)));
    }
    return routes;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("routes JSON: ") + e.what());
  }
}

std::vector<Route> load_routes(const std::filesystem::path& path, const SegmentGraph& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_routes_json(ss.str(), g);
}

std::string routes_to_json(const std::vector<Route>& routes, const SegmentGraph& g) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : routes) {
    nlohmann::ordered_json j;
    auto& ids = j["segments"] = nlohmann::ordered_json::array();
    for (auto s : r.segments) ids.push_back(g.segment(s).id);
    j["demand"] = r.demand;
    j["initial_soc"] = r.initial_soc;
    doc.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace wcl
