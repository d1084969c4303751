#pragma once

#include <string_view>
#include <vector>

#include "wcl/road_network.hpp"
#include "wcl/routing.hpp"

namespace wcl {

enum class SocFunction {
  realistic,   // energy balance over the traversal time
  simplistic,  // one discrete level up when charging, one down otherwise
};

/// How a final SOC is compared against the threshold alpha.
enum class ThresholdRule {
  above,     // feasible iff soc > alpha (a route ending at alpha is infeasible)
  at_least,  // feasible iff soc >= alpha
};

SocFunction parse_soc_function(std::string_view text);
std::string_view to_string(SocFunction f);
ThresholdRule parse_threshold_rule(std::string_view text);
std::string_view to_string(ThresholdRule r);

/// Battery, charging and discretization parameters.
struct SocParams {
  double e_cap = 30.0;  // kWh
  double p1 = 10.0;     // kW drawn while driving
  double p2 = 40.0;     // kW delivered by a charging lane
  double eta = 0.8;     // charging efficiency
  int n_layers = 101;
  double alpha = 0.0;
  double eps_tol = 0.0;
  SocFunction soc_function = SocFunction::realistic;
  ThresholdRule rule = ThresholdRule::above;

  /// Throws InputError if any bound is violated.
  void validate() const;
  bool feasible(double soc) const { return rule == ThresholdRule::above ? soc > alpha : soc >= alpha; }
};

/// Set of electrified segments.
struct Installation {
  std::vector<SegmentIndex> installed;  // sorted, unique
  double total_cost = 0.0;

  static Installation from(const SegmentGraph& g, std::vector<SegmentIndex> ids);
  /// Membership mask sized to the graph.
  std::vector<char> mask(std::size_t graph_size) const;
  std::vector<std::string> ids(const SegmentGraph& g) const;
};

struct RouteOutcome {
  double final_soc = 0.0;
  std::vector<double> trajectory;  // SOC after each driven segment
  bool completed = false;
  double stall_distance = 0.0;  // miles; route distance when completed
  bool feasible = false;
};

/// Net SOC change from driving `seg`, as a fraction of capacity.
double delta_soc(const RoadSegment& seg, bool installed, const SocParams& p);

/// Level after one segment under the simplistic function; 0 = empty,
/// n_layers - 1 = full.
int simplistic_step(int level, bool installed, int n_layers);

/// Nearest of the n_layers uniform levels on [0, 1]; ties go down.
int discretize(double soc, int n_layers);
inline double level_value(int level, int n_layers) {
  return static_cast<double>(level) / static_cast<double>(n_layers - 1);
}

/// Drives the route segment by segment, clamping SOC to [0, 1]. The EV
/// stalls when the battery is empty before the last segment is finished.
RouteOutcome simulate_route(const Route& r, const std::vector<char>& installed_mask,
                            const SocParams& p, const SegmentGraph& g);
RouteOutcome simulate_route(const Route& r, const Installation& inst, const SocParams& p,
                            const SegmentGraph& g);

/// Routes that end infeasible when nothing is installed.
RoutePredicate infeasible_without_install(const SocParams& p, const SegmentGraph& g);

}  // namespace wcl
