#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wcl/road_network.hpp"
#include "wcl/routing.hpp"
#include "wcl/soc_model.hpp"

namespace wcl {

enum class GraphVariant {
  min_budget,    // only feasible final states reach the sink
  fixed_budget,  // every state reaches the sink; empty batteries escape early
};

enum class WeightScheme { binary, penalty, tolerance };

WeightScheme parse_weight_scheme(std::string_view text);
std::string_view to_string(WeightScheme s);
GraphVariant parse_variant(std::string_view text);
std::string_view to_string(GraphVariant v);

using StateNodeId = std::uint32_t;

struct StateEdge {
  StateNodeId from = 0;
  StateNodeId to = 0;
  bool installed = false;  // weight 1: a lane is installed on the segment being driven
  int weight() const { return installed ? 1 : 0; }
};

/// A state adjacent to the sink, scored by the boundary weight function.
struct BoundaryNode {
  StateNodeId node = 0;
  double soc = 0.0;       // discretized SOC the state represents
  double reached = 0.0;   // miles driven from the origin when the route ends here
  bool stalled = false;   // battery emptied before the last segment
};

/// Layered DAG of discretized SOC states for one route.
///
/// Layers i = 1..m+1 hold n_layers states each: layer i is the SOC when
/// entering segment i (layer m+1 is the arrival). Within a layer, j = 1 is
/// the full battery and j = n_layers the empty one, so j = n_layers - level.
/// Node ids run s, (1,1), (1,2), ..., (m+1,n_layers), t, which is also a
/// topological order.
class SocStateGraph {
 public:
  std::size_t route_index() const { return route_index_; }
  GraphVariant variant() const { return variant_; }
  std::size_t segment_count() const { return segments_.size(); }
  int n_layers() const { return n_layers_; }
  const std::vector<SegmentIndex>& segments() const { return segments_; }
  double route_distance() const { return route_distance_; }

  std::size_t node_count() const { return (segments_.size() + 1) * n_layers_ + 2; }
  StateNodeId source() const { return 0; }
  StateNodeId sink() const { return static_cast<StateNodeId>(node_count() - 1); }
  StateNodeId node(std::size_t layer, int j) const {
    return static_cast<StateNodeId>(1 + (layer - 1) * n_layers_ + (j - 1));
  }
  StateNodeId node_at_level(std::size_t layer, int level) const { return node(layer, n_layers_ - level); }
  /// Layer index i of a grid node (0 for s, m+2 for t).
  std::size_t layer_of(StateNodeId v) const;
  /// Row index j of a grid node (0 for s and t).
  int j_of(StateNodeId v) const;
  int level_of(StateNodeId v) const { return n_layers_ - j_of(v); }

  const std::vector<StateEdge>& edges() const { return edges_; }
  /// Indices into edges() of the edges leaving v.
  std::span<const std::size_t> out_edges(StateNodeId v) const {
    return {out_index_.data() + out_offset_[v], out_index_.data() + out_offset_[v + 1]};
  }
  const std::vector<BoundaryNode>& boundary() const { return boundary_; }
  const BoundaryNode* find_boundary(StateNodeId v) const;

 private:
  friend SocStateGraph build_state_graph(const Route&, std::size_t, const SocParams&,
                                         const SegmentGraph&, GraphVariant);
  std::size_t route_index_ = 0;
  GraphVariant variant_ = GraphVariant::fixed_budget;
  std::vector<SegmentIndex> segments_;
  double route_distance_ = 0.0;
  int n_layers_ = 0;
  std::vector<StateEdge> edges_;
  std::vector<std::size_t> out_offset_, out_index_;
  std::vector<BoundaryNode> boundary_;
};

/// Level reached after driving segment `seg` from `level`, computed from
/// the level's representative SOC and snapped back to the grid.
int state_transition(int level, const RoadSegment& seg, bool installed, const SocParams& p);

/// Expands a route into its SOC-state graph. For the min_budget variant,
/// throws InsufficientChargingError when even electrifying every segment
/// cannot reach a feasible arrival state.
SocStateGraph build_state_graph(const Route& r, std::size_t route_index, const SocParams& p,
                                const SegmentGraph& g, GraphVariant variant);

/// Score of a route outcome. Feasible arrivals score 1. Otherwise binary
/// scores 0, penalty scores (reached - total) / total, and tolerance scores
/// 0 inside the band (alpha - eps_tol, alpha + eps_tol) and the penalty below
/// it. A stall is never inside the band. With eps_tol = 0 the tolerance
/// scheme coincides with the penalty scheme.
double outcome_weight(double soc, double reached, double total, bool stalled, const SocParams& p,
                      WeightScheme scheme);

/// Weight of a boundary node; throws InputError if v is not adjacent to t.
double boundary_weight(const SocStateGraph& sg, StateNodeId v, const SocParams& p,
                       WeightScheme scheme);

struct StatePath {
  std::vector<StateNodeId> nodes;
  std::vector<std::size_t> edges;           // indices into SocStateGraph::edges()
  std::vector<std::size_t> install_positions;  // 0-based positions along the route
  std::vector<SegmentIndex> install_segments;
  int cost = 0;
};

/// Cheapest s-t path (fewest installations). Among equally cheap paths the
/// installations are pushed as late along the route as possible. Throws
/// InfeasibleModelError when t is unreachable.
StatePath min_cost_path(const SocStateGraph& sg);

/// The s-t path a vehicle follows when exactly the masked segments are
/// electrified. Returns an empty path if it dead-ends (min_budget variant).
StatePath follow_installation(const SocStateGraph& sg, const std::vector<char>& installed_mask);

/// Graphviz rendering: nodes labelled (i, j, SOC), edges by weight.
std::string to_dot(const SocStateGraph& sg);

}  // namespace wcl
