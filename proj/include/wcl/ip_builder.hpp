#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wcl/road_network.hpp"
#include "wcl/routing.hpp"
#include "wcl/soc_model.hpp"
#include "wcl/state_graph.hpp"

namespace wcl {

enum class ObjectiveSense { minimize, maximize };
enum class RowSense { less_equal, greater_equal, equal };

struct LinearTerm {
  std::size_t var = 0;
  double coef = 0.0;
};

struct IpVariable {
  enum class Kind { install, edge };
  std::string name;
  double objective = 0.0;
  Kind kind = Kind::install;
  SegmentIndex segment = 0;  // install variables
  std::size_t route = 0;     // edge variables
  std::size_t edge = 0;      // index into the route's SocStateGraph::edges()
};

struct IpConstraint {
  std::string name;
  RowSense sense = RowSense::equal;
  double rhs = 0.0;
  std::vector<LinearTerm> terms;
};

/// Binary program over install decisions R_k and state-graph edge flows
/// x_{r,u,v}. All variables are binary.
///
/// Variables: R_<segment id> for every segment on some route (id order),
/// then X_<route>_<i>_<j>_<i'>_<j'>_<w> per state-graph edge, where s is
/// (0, 0), t is (m+2, 0) and w is the edge weight (parallel install and
/// no-install edges share their endpoints).
/// Rows: BUDGET (fixed budget only), flow rows F_<route>_<i>_<j> in
/// (route, layer, j) order, then LU_<id> (R_k <= p(u_k)) and LM_<id>
/// (M R_k >= p(u_k)) per candidate segment.
struct IpInstance {
  std::string name = "WCL";
  ObjectiveSense sense = ObjectiveSense::maximize;
  GraphVariant variant = GraphVariant::fixed_budget;
  std::vector<IpVariable> variables;
  std::vector<IpConstraint> constraints;
  std::vector<SegmentIndex> candidates;  // segment of install variable k
  std::vector<std::size_t> edge_var_offset;  // first x variable of each route
  std::vector<SocStateGraph> graphs;
  double big_m = 0.0;
  std::optional<double> budget;
  std::size_t route_count() const { return graphs.size(); }
};

/// Maximize the demand-weighted boundary score subject to the budget.
/// Throws InputError on an empty route set or negative budget.
IpInstance build_fixed_budget_ip(const std::vector<Route>& routes, const SegmentGraph& g,
                                 const SocParams& p, double budget, WeightScheme scheme,
                                 int threads = 1);

/// Minimize installation cost so every route arrives feasible. Throws
/// InsufficientChargingError when a route cannot be fixed at all.
IpInstance build_min_budget_ip(const std::vector<Route>& routes, const SegmentGraph& g,
                               const SocParams& p, int threads = 1);

/// The 0/1 point an installation induces: R_k from the set, and every route
/// following its state graph with the installed segments electrified.
std::vector<double> assignment_from_installation(const IpInstance& ip,
                                                 const std::vector<char>& installed_mask);

double objective_value(const IpInstance& ip, const std::vector<double>& values);
/// Largest amount by which any row is violated.
double max_violation(const IpInstance& ip, const std::vector<double>& values);

/// MPS text. Fixed format when every name fits 8 characters and every
/// number 12, free format otherwise. Output is byte-stable.
std::string export_mps(const IpInstance& ip);

/// {"vars": n, "cons": m, "budget": B | null, "routes": k}
std::string instance_summary_json(const IpInstance& ip);

}  // namespace wcl
