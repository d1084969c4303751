#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wcl/road_network.hpp"

namespace wcl {

/// Ordered sequence of adjacent segments driven by one EV trip.
struct Route {
  std::vector<SegmentIndex> segments;
  double distance = 0.0;     // miles, sum of segment lengths
  double demand = 1.0;       // objective weight
  double initial_soc = 1.0;  // SOC at the start of the first segment
};

/// Builds a route, checking adjacency and computing its distance.
/// Throws InputError on an empty sequence, non-adjacent consecutive segments,
/// demand <= 0 or initial SOC outside [0, 1].
Route make_route(const SegmentGraph& g, std::vector<SegmentIndex> segments, double demand = 1.0,
                 double initial_soc = 1.0);

/// Distance (miles) from the route origin through the end of its first
/// `count` segments.
double distance_through(const SegmentGraph& g, const Route& r, std::size_t count);

struct RoutePopulation {
  std::vector<Route> routes;
  double tau = 0.0;    // mean route distance
  double sigma = 0.0;  // population standard deviation of route distance

  static RoutePopulation from(std::vector<Route> routes);
};

/// Single-source shortest travel-time paths where ties between equally fast
/// paths go to the lexicographically smallest id sequence.
class ShortestPathTree {
 public:
  static constexpr SegmentIndex kNone = std::numeric_limits<SegmentIndex>::max();

  ShortestPathTree(const SegmentGraph& g, SegmentIndex origin);

  SegmentIndex origin() const { return origin_; }
  bool reachable(SegmentIndex v) const { return parent_[v] != kNone || v == origin_; }
  /// Sum of edge weights (hours) along the path; +inf if unreachable.
  double time_to(SegmentIndex v) const { return dist_[v]; }
  SegmentIndex parent(SegmentIndex v) const { return parent_[v]; }
  /// Number of segments on the path to v, minus one.
  std::uint32_t depth(SegmentIndex v) const { return depth_[v]; }
  /// Nodes in nondecreasing order of time (unreachable nodes omitted).
  const std::vector<SegmentIndex>& order() const { return order_; }

  std::vector<SegmentIndex> path_to(SegmentIndex v) const;

 private:
  SegmentIndex ancestor(SegmentIndex v, std::uint32_t up) const;
  SegmentIndex lca(SegmentIndex a, SegmentIndex b) const;
  bool extends_smaller(SegmentIndex u1, SegmentIndex u2, SegmentIndex v) const;

  SegmentIndex origin_;
  std::vector<double> dist_;
  std::vector<SegmentIndex> parent_;
  std::vector<std::uint32_t> depth_;
  std::vector<SegmentIndex> order_;
  std::vector<std::vector<SegmentIndex>> lift_;  // lift_[k][v]: 2^k-th ancestor
};

/// Fastest route from origin to dest (both included); nullopt if unreachable.
std::optional<Route> shortest_route(const SegmentGraph& g, SegmentIndex origin, SegmentIndex dest);
std::optional<Route> shortest_route(const SegmentGraph& g, std::string_view origin,
                                    std::string_view dest);

struct EnumerationOptions {
  std::size_t min_segments = 2;
  std::size_t max_nodes = 2000;
  int threads = 1;
};

/// One shortest route per ordered reachable pair of distinct segments with
/// at least min_segments segments, in (origin id, destination id) order.
/// Throws InputError when the graph exceeds max_nodes.
RoutePopulation enumerate_all_routes(const SegmentGraph& g, const EnumerationOptions& opts = {});

using RoutePredicate = std::function<bool(const Route&)>;

RoutePredicate min_distance(double miles);
RoutePredicate min_segments(std::size_t count);
/// Routes longer than tau + l * sigma of the given population.
RoutePredicate in_omega(const RoutePopulation& pop, double l);

/// The routes of pop whose distance exceeds tau + l * sigma.
std::vector<Route> omega_l(const RoutePopulation& pop, double l);

/// n distinct routes drawn uniformly from those satisfying pred, returned in
/// population order. Throws InputError if fewer than n qualify.
std::vector<Route> sample_routes(const RoutePopulation& pop, std::size_t n, std::uint64_t seed,
                                 const RoutePredicate& pred = {});

/// Shortest routes between n distinct uniformly drawn (origin, dest) pairs
/// for graphs too large to enumerate. Gives up after max_attempts draws.
std::vector<Route> random_routes(const SegmentGraph& g, std::size_t n, std::uint64_t seed,
                                 std::size_t min_segments = 2, const RoutePredicate& pred = {},
                                 std::size_t max_attempts = 0);

std::vector<Route> parse_routes_json(std::string_view text, const SegmentGraph& g);
std::vector<Route> load_routes(const std::filesystem::path& path, const SegmentGraph& g);
std::string routes_to_json(const std::vector<Route>& routes, const SegmentGraph& g);

}  // namespace wcl
