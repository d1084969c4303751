#include "wcl/soc_model.hpp"

#include <algorithm>
#include <cmath>

#include "wcl/errors.hpp"

namespace wcl {

SocFunction parse_soc_function(std::string_view text) {
  if (text == "realistic") return SocFunction::realistic;
  if (text == "simplistic") return SocFunction::simplistic;
  throw InputError("SOC function must be 'realistic' or 'simplistic'");
}

std::string_view to_string(SocFunction f) {
  return f == SocFunction::realistic ? "realistic" : "simplistic";
}

ThresholdRule parse_threshold_rule(std::string_view text) {
  if (text == "above") return ThresholdRule::above;
  if (text == "at-least") return ThresholdRule::at_least;
  throw InputError("threshold rule must be 'above' or 'at-least'");
}

std::string_view to_string(ThresholdRule r) { return r == ThresholdRule::above ? "above" : "at-least"; }

void SocParams::validate() const {
  if (!(e_cap > 0.0)) throw InputError("e_cap must be positive");
  if (!(p1 > 0.0)) throw InputError("p1 must be positive");
  if (!(p2 >= 0.0)) throw InputError("p2 must be nonnegative");
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("eta must be in (0, 1]");
  if (n_layers < 2) throw InputError("n_layers must be at least 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must be in [0, 1]");
  if (!(eps_tol >= 0.0)) throw InputError("eps_tol must be nonnegative");
}

Installation Installation::from(const SegmentGraph& g, std::vector<SegmentIndex> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Installation inst;
  for (auto i : ids) {
    if (i >= g.size()) throw InputError("installation references unknown segment");
    inst.total_cost += g.segment(i).cost;
  }
  inst.installed = std::move(ids);
  return inst;
}

std::vector<char> Installation::mask(std::size_t graph_size) const {
  std::vector<char> m(graph_size, 0);
  for (auto i : installed) m[i] = 1;
  return m;
}

std::vector<std::string> Installation::ids(const SegmentGraph& g) const {
  std::vector<std::string> out;
  out.reserve(installed.size());
  for (auto i : installed) out.push_back(g.segment(i).id);
  return out;
}

double delta_soc(const RoadSegment& seg, bool installed, const SocParams& p) {
  const double t = traversal_time(seg);
  const double charge = installed ? p.p2 * p.eta : 0.0;
  return (charge - p.p1) * t / p.e_cap;
}

int simplistic_step(int level, bool installed, int n_layers) {
  return installed ? std::min(level + 1, n_layers - 1) : std::max(level - 1, 0);
}

int discretize(double soc, int n_layers) {
  const double x = std::clamp(soc, 0.0, 1.0) * static_cast<double>(n_layers - 1);
  return static_cast<int>(std::ceil(x - 0.5));
}

RouteOutcome simulate_route(const Route& r, const std::vector<char>& mask, const SocParams& p,
                            const SegmentGraph& g) {
  RouteOutcome out;
  out.trajectory.reserve(r.segments.size());
  const std::size_t m = r.segments.size();
  double travelled = 0.0;
  auto stall = [&]() {
    out.completed = false;
    out.final_soc = 0.0;
    out.stall_distance = travelled;
    out.feasible = false;
    return out;
  };

  if (p.soc_function == SocFunction::simplistic) {
    int level = discretize(r.initial_soc, p.n_layers);
    if (level == 0) return stall();
    for (std::size_t i = 0; i < m; ++i) {
      const SegmentIndex s = r.segments[i];
      if (s >= g.size()) throw InputError("route references unknown segment");
      level = simplistic_step(level, mask[s] != 0, p.n_layers);
      travelled += g.segment(s).length;
      out.trajectory.push_back(level_value(level, p.n_layers));
      if (level == 0 && i + 1 < m) return stall();
    }
    out.final_soc = level_value(level, p.n_layers);
  } else {
    double soc = std::clamp(r.initial_soc, 0.0, 1.0);
    if (soc <= 0.0) return stall();
    for (std::size_t i = 0; i < m; ++i) {
      const SegmentIndex s = r.segments[i];
      if (s >= g.size()) throw InputError("route references unknown segment");
      soc = std::clamp(soc + delta_soc(g.segment(s), mask[s] != 0, p), 0.0, 1.0);
      travelled += g.segment(s).length;
      out.trajectory.push_back(soc);
      if (soc <= 0.0 && i + 1 < m) return stall();
    }
    out.final_soc = soc;
  }
  out.completed = true;
  out.stall_distance = travelled;
  out.feasible = p.feasible(out.final_soc);
  return out;
}

RouteOutcome simulate_route(const Route& r, const Installation& inst, const SocParams& p,
                            const SegmentGraph& g) {
  return simulate_route(r, inst.mask(g.size()), p, g);
}

RoutePredicate infeasible_without_install(const SocParams& p, const SegmentGraph& g) {
  return [p, &g](const Route& r) {
    const std::vector<char> none(g.size(), 0);
    return !simulate_route(r, none, p, g).feasible;
  };
}

}  // namespace wcl
