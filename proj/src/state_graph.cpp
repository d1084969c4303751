#include "wcl/state_graph.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "wcl/errors.hpp"
#include "wcl/format.hpp"

namespace wcl {

WeightScheme parse_weight_scheme(std::string_view text) {
  if (text == "binary") return WeightScheme::binary;
  if (text == "penalty") return WeightScheme::penalty;
  if (text == "tolerance") return WeightScheme::tolerance;
  throw InputError("scheme must be binary, penalty or tolerance");
}

std::string_view to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::binary: return "binary";
    case WeightScheme::penalty: return "penalty";
    case WeightScheme::tolerance: return "tolerance";
  }
  return "";
}

GraphVariant parse_variant(std::string_view text) {
  if (text == "min-budget") return GraphVariant::min_budget;
  if (text == "fixed-budget") return GraphVariant::fixed_budget;
  throw InputError("mode must be min-budget or fixed-budget");
}

std::string_view to_string(GraphVariant v) {
  return v == GraphVariant::min_budget ? "min-budget" : "fixed-budget";
}

std::size_t SocStateGraph::layer_of(StateNodeId v) const {
  if (v == source()) return 0;
  if (v == sink()) return segments_.size() + 2;
  return (v - 1) / n_layers_ + 1;
}

int SocStateGraph::j_of(StateNodeId v) const {
  if (v == source() || v == sink()) return 0;
  return static_cast<int>((v - 1) % n_layers_) + 1;
}

const BoundaryNode* SocStateGraph::find_boundary(StateNodeId v) const {
  for (const auto& b : boundary_) {
    if (b.node == v) return &b;
  }
  return nullptr;
}

int state_transition(int level, const RoadSegment& seg, bool installed, const SocParams& p) {
  if (p.soc_function == SocFunction::simplistic) return simplistic_step(level, installed, p.n_layers);
  const double soc = std::clamp(level_value(level, p.n_layers) + delta_soc(seg, installed, p), 0.0, 1.0);
  return discretize(soc, p.n_layers);
}

SocStateGraph build_state_graph(const Route& r, std::size_t route_index, const SocParams& p,
                                const SegmentGraph& g, GraphVariant variant) {
  p.validate();
  if (r.segments.empty()) throw InputError("route must contain at least one segment");
  SocStateGraph sg;
  sg.route_index_ = route_index;
  sg.variant_ = variant;
  sg.segments_ = r.segments;
  sg.route_distance_ = r.distance;
  sg.n_layers_ = p.n_layers;
  const std::size_t m = r.segments.size();
  const int n = p.n_layers;
  const StateNodeId t = sg.sink();

  const int start_level = discretize(r.initial_soc, n);
  if (variant == GraphVariant::min_budget) {
    int level = start_level;
    bool ok = level > 0;
    for (std::size_t i = 0; ok && i < m; ++i) {
      level = state_transition(level, g.segment(r.segments[i]), true, p);
      if (level == 0 && i + 1 < m) ok = false;
    }
    if (!ok || !p.feasible(level_value(level, n))) {
      throw InsufficientChargingError("route " + std::to_string(route_index) +
                                      " cannot reach the SOC threshold even if fully electrified");
    }
  }

  sg.edges_.push_back({sg.source(), sg.node_at_level(1, start_level), false});
  double reached = 0.0;
  for (std::size_t i = 1; i <= m + 1; ++i) {
    for (int j = 1; j <= n; ++j) {
      const int level = n - j;
      const StateNodeId v = sg.node(i, j);
      const double soc = level_value(level, n);
      if (i == m + 1) {
        if (variant == GraphVariant::fixed_budget || p.feasible(soc)) {
          sg.edges_.push_back({v, t, false});
          sg.boundary_.push_back({v, soc, reached, false});
        }
      } else if (level == 0) {
        if (variant == GraphVariant::fixed_budget) {
          sg.edges_.push_back({v, t, false});
          sg.boundary_.push_back({v, 0.0, reached, true});
        }
      } else {
        const RoadSegment& seg = g.segment(r.segments[i - 1]);
        sg.edges_.push_back({v, sg.node_at_level(i + 1, state_transition(level, seg, false, p)), false});
        sg.edges_.push_back({v, sg.node_at_level(i + 1, state_transition(level, seg, true, p)), true});
      }
    }
    if (i <= m) reached += g.segment(r.segments[i - 1]).length;
  }
  // The arrival layer always reports the full route distance.
  for (auto& b : sg.boundary_) {
    if (!b.stalled) b.reached = r.distance;
  }

  // Edges were emitted in node order.
  sg.out_offset_.assign(sg.node_count() + 1, 0);
  for (const auto& e : sg.edges_) ++sg.out_offset_[e.from + 1];
  for (std::size_t v = 0; v < sg.node_count(); ++v) sg.out_offset_[v + 1] += sg.out_offset_[v];
  sg.out_index_.resize(sg.edges_.size());
  for (std::size_t k = 0; k < sg.edges_.size(); ++k) sg.out_index_[k] = k;
  return sg;
}

double outcome_weight(double soc, double reached, double total, bool stalled, const SocParams& p,
                      WeightScheme scheme) {
  const double penalty = (reached - total) / total;
  const bool feasible = !stalled && p.feasible(soc);
  switch (scheme) {
    case WeightScheme::binary:
      return feasible ? 1.0 : 0.0;
    case WeightScheme::penalty:
      return feasible ? 1.0 : penalty;
    case WeightScheme::tolerance:
      if (p.eps_tol == 0.0) return feasible ? 1.0 : penalty;
      if (stalled) return penalty;
      if (soc >= p.alpha + p.eps_tol) return 1.0;
      if (soc > p.alpha - p.eps_tol) return 0.0;
      return penalty;
  }
  return 0.0;
}

double boundary_weight(const SocStateGraph& sg, StateNodeId v, const SocParams& p,
                       WeightScheme scheme) {
  const BoundaryNode* b = sg.find_boundary(v);
  if (b == nullptr) throw InputError("node " + std::to_string(v) + " is not a boundary node");
  return outcome_weight(b->soc, b->reached, sg.route_distance(), b->stalled, p, scheme);
}

namespace {

StatePath make_path(const SocStateGraph& sg, const std::vector<std::size_t>& edge_ids) {
  StatePath path;
  path.nodes.push_back(sg.source());
  for (auto k : edge_ids) {
    const auto& e = sg.edges()[k];
    path.edges.push_back(k);
    path.nodes.push_back(e.to);
    if (e.installed) {
      const std::size_t pos = sg.layer_of(e.from) - 1;
      path.install_positions.push_back(pos);
      path.install_segments.push_back(sg.segments()[pos]);
      ++path.cost;
    }
  }
  return path;
}

}  // namespace

StatePath min_cost_path(const SocStateGraph& sg) {
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  const std::size_t nodes = sg.node_count();
  std::vector<int> to_sink(nodes, kInf);
  to_sink[sg.sink()] = 0;
  for (std::size_t v = nodes - 1; v-- > 0;) {
    for (auto k : sg.out_edges(static_cast<StateNodeId>(v))) {
      const auto& e = sg.edges()[k];
      to_sink[v] = std::min(to_sink[v], e.weight() + to_sink[e.to]);
    }
  }
  if (to_sink[sg.source()] >= kInf) {
    throw InfeasibleModelError("no s-t path in the state graph of route " +
                               std::to_string(sg.route_index()));
  }
  // Out-edges list the no-install edge first, so the first optimal edge
  // postpones installation whenever that stays optimal.
  std::vector<std::size_t> chosen;
  StateNodeId v = sg.source();
  while (v != sg.sink()) {
    for (auto k : sg.out_edges(v)) {
      const auto& e = sg.edges()[k];
      if (e.weight() + to_sink[e.to] == to_sink[v]) {
        chosen.push_back(k);
        v = e.to;
        break;
      }
    }
  }
  return make_path(sg, chosen);
}

StatePath follow_installation(const SocStateGraph& sg, const std::vector<char>& mask) {
  std::vector<std::size_t> chosen;
  StateNodeId v = sg.source();
  while (v != sg.sink()) {
    const auto out = sg.out_edges(v);
    if (out.empty()) return {};
    std::size_t pick = out.front();
    if (out.size() == 2) {
      const std::size_t pos = sg.layer_of(v) - 1;
      pick = mask[sg.segments()[pos]] ? out[1] : out[0];
    }
    chosen.push_back(pick);
    v = sg.edges()[pick].to;
  }
  return make_path(sg, chosen);
}

std::string to_dot(const SocStateGraph& sg) {
  std::ostringstream os;
  os << "digraph route_" << sg.route_index() << " {\n  rankdir=LR;\n";
  os << "  n" << sg.source() << " [label=\"s\"];\n";
  for (StateNodeId v = 1; v < sg.sink(); ++v) {
    os << "  n" << v << " [label=\"(" << sg.layer_of(v) << ", " << sg.j_of(v) << ", "
       << format_number(level_value(sg.level_of(v), sg.n_layers())) << ")\"];\n";
  }
  os << "  n" << sg.sink() << " [label=\"t\"];\n";
  for (const auto& e : sg.edges()) {
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.weight() << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace wcl
