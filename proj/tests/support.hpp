#pragma once

// Test helpers and independent oracles. The oracles deliberately avoid the
// library's own algorithms: plain recursion and enumeration only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "wcl/random.hpp"
#include "wcl/road_network.hpp"
#include "wcl/routing.hpp"
#include "wcl/generators.hpp"
#include "wcl/soc_model.hpp"

namespace wcl::test {

inline RoadSegment seg(std::string id, double length, std::string from, std::string to, int category = 3,
                       double cost = -1.0) {
  RoadSegment s;
  s.id = std::move(id);
  s.length = length;
  s.category = category;
  s.speed = category_speed(category, Setting::urban);
  s.cost = cost < 0.0 ? length : cost;
  s.start_intersection = std::move(from);
  s.end_intersection = std::move(to);
  return s;
}

/// a -> b -> c ... as a chain of segments s0, s1, ... of the given lengths.
inline SegmentGraph chain(const std::vector<double>& lengths, int category = 3) {
  std::vector<RoadSegment> segs;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    segs.push_back(seg("s" + std::to_string(i), lengths[i], "n" + std::to_string(i), "n" + std::to_string(i + 1),
                       category));
  }
  return SegmentGraph::build(std::move(segs));
}

inline std::vector<SegmentIndex> all_indices(const SegmentGraph& g) {
  std::vector<SegmentIndex> v(g.size());
  for (SegmentIndex i = 0; i < g.size(); ++i) v[i] = i;
  return v;
}

/// Fastest simple path by exhaustive DFS; ties go to the smaller id sequence.
inline std::vector<SegmentIndex> oracle_shortest_path(const SegmentGraph& g, SegmentIndex from, SegmentIndex to) {
  std::vector<SegmentIndex> best, path{from};
  double best_time = std::numeric_limits<double>::infinity();
  std::vector<char> on(g.size(), 0);
  on[from] = 1;
  std::function<void(SegmentIndex, double)> dfs = [&](SegmentIndex u, double t) {
    if (u == to) {
      auto ids = [&](const std::vector<SegmentIndex>& p) {
        std::vector<std::string> s;
        for (auto v : p) s.push_back(g.segment(v).id);
        return s;
      };
      if (t < best_time || (t == best_time && ids(path) < ids(best))) {
        best_time = t;
        best = path;
      }
      return;
    }
    for (SegmentIndex v = 0; v < g.size(); ++v) {
      if (on[v] || g.segment(u).end_intersection != g.segment(v).start_intersection) continue;
      on[v] = 1;
      path.push_back(v);
      dfs(v, t + g.segment(u).length / g.segment(u).speed);
      path.pop_back();
      on[v] = 0;
    }
  };
  dfs(from, 0.0);
  return best;
}

/// Reachability by repeated squaring-free Warshall closure.
inline std::vector<std::vector<char>> oracle_closure(const SegmentGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      r[u][v] = u != v && g.segment(u).end_intersection == g.segment(v).start_intersection;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!r[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) r[i][j] = r[i][j] || r[k][j];
    }
  }
  return r;
}

struct OracleOutcome {
  double soc = 0.0;
  bool stalled = false;
  double reached = 0.0;
};

/// Segment-by-segment battery model written out from the definitions.
inline OracleOutcome oracle_drive(const SegmentGraph& g, const Route& r, const std::vector<char>& mask,
                                  const SocParams& p) {
  OracleOutcome o;
  const int top = p.n_layers - 1;
  if (p.soc_function == SocFunction::simplistic) {
    int level = static_cast<int>(std::ceil(std::clamp(r.initial_soc, 0.0, 1.0) * top - 0.5));
    if (level == 0) return {0.0, true, 0.0};
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
      level += mask[r.segments[i]] ? 1 : -1;
      level = std::clamp(level, 0, top);
      o.reached += g.segment(r.segments[i]).length;
      if (level == 0 && i + 1 < r.segments.size()) return {0.0, true, o.reached};
    }
    o.soc = static_cast<double>(level) / top;
    return o;
  }
  double soc = std::clamp(r.initial_soc, 0.0, 1.0);
  if (soc <= 0.0) return {0.0, true, 0.0};
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    const auto& s = g.segment(r.segments[i]);
    const double hours = s.length / s.speed;
    const double kw = (mask[r.segments[i]] ? p.eta * p.p2 : 0.0) - p.p1;
    soc = std::clamp(soc + kw * hours / p.e_cap, 0.0, 1.0);
    o.reached += s.length;
    if (soc <= 0.0 && i + 1 < r.segments.size()) return {0.0, true, o.reached};
  }
  o.soc = soc;
  return o;
}

inline bool oracle_feasible(const OracleOutcome& o, const SocParams& p) {
  if (o.stalled) return false;
  return p.rule == ThresholdRule::above ? o.soc > p.alpha : o.soc >= p.alpha;
}

/// Route score written from the weight definitions (binary / penalty /
/// tolerance band).
inline double oracle_weight(const OracleOutcome& o, double total, const SocParams& p, const std::string& scheme) {
  const double penalty = (o.reached - total) / total;
  const bool ok = oracle_feasible(o, p);
  if (scheme == "binary") return ok ? 1.0 : 0.0;
  if (scheme == "penalty" || p.eps_tol == 0.0) return ok ? 1.0 : penalty;
  if (o.stalled) return penalty;
  if (o.soc >= p.alpha + p.eps_tol) return 1.0;
  if (o.soc > p.alpha - p.eps_tol) return 0.0;
  return penalty;
}

/// Best objective over all budget-feasible subsets of route segments.
inline double oracle_best_objective(const SegmentGraph& g, const std::vector<Route>& routes, const SocParams& p,
                                    double budget, const std::string& scheme) {
  std::vector<SegmentIndex> cand;
  for (const auto& r : routes) cand.insert(cand.end(), r.segments.begin(), r.segments.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << cand.size()); ++bits) {
    std::vector<char> mask(g.size(), 0);
    double cost = 0.0;
    for (std::size_t k = 0; k < cand.size(); ++k) {
      if (bits >> k & 1U) {
        mask[cand[k]] = 1;
        cost += g.segment(cand[k]).cost;
      }
    }
    if (cost > budget + 1e-9 * std::max(1.0, budget)) continue;
    double obj = 0.0;
    for (const auto& r : routes) obj += r.demand * oracle_weight(oracle_drive(g, r, mask, p), r.distance, p, scheme);
    best = std::max(best, obj);
  }
  return best;
}

/// Fewest installs on one route that make its discretized arrival feasible
/// (levels snap to the grid after every segment, as in the state graph).
/// Returns -1 when impossible.
inline int oracle_min_installs(const SegmentGraph& g, const Route& r, const SocParams& p) {
  const std::size_t m = r.segments.size();
  const int top = p.n_layers - 1;
  auto snap = [&](double soc) {
    return static_cast<int>(std::ceil(std::clamp(soc, 0.0, 1.0) * top - 0.5));
  };
  int best = -1;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
    const int count = static_cast<int>(__builtin_popcountll(bits));
    if (best >= 0 && count >= best) continue;
    int level = snap(r.initial_soc);
    bool alive = level > 0;
    for (std::size_t i = 0; alive && i < m; ++i) {
      const bool on = bits >> i & 1U;
      if (p.soc_function == SocFunction::simplistic) {
        level = std::clamp(level + (on ? 1 : -1), 0, top);
      } else {
        const auto& s = g.segment(r.segments[i]);
        const double kw = (on ? p.eta * p.p2 : 0.0) - p.p1;
        level = snap(static_cast<double>(level) / top + kw * (s.length / s.speed) / p.e_cap);
      }
      if (level == 0 && i + 1 < m) alive = false;
    }
    if (!alive) continue;
    const double soc = static_cast<double>(level) / top;
    if (p.rule == ThresholdRule::above ? soc > p.alpha : soc >= p.alpha) best = count;
  }
  return best;
}

/// Random walk route of up to `len` segments starting anywhere.
inline Route random_walk(const SegmentGraph& g, Rng& rng, std::size_t len) {
  std::vector<SegmentIndex> segs{static_cast<SegmentIndex>(rng.below(g.size()))};
  while (segs.size() < len) {
    auto next = g.successors(segs.back());
    if (next.empty()) break;
    segs.push_back(next[rng.below(next.size())]);
  }
  return make_route(g, segs);
}

struct Instance {
  SegmentGraph g;
  std::vector<Route> routes;
  SocParams p;
  double budget = 0.0;
};

/// Small random placement problem: at most `max_candidates` route segments,
/// up to `max_routes` routes, battery settings that leave a mix of feasible
/// and infeasible routes, and a random budget.
inline Instance random_instance(std::uint64_t seed, std::size_t max_candidates = 12, std::size_t max_routes = 20) {
  Rng rng(mix_seed(seed, 0x696e73));
  RandomNetworkOptions o;
  o.intersections = 4 + rng.below(4);
  o.segments = std::min<std::size_t>(o.intersections * (o.intersections - 1), o.intersections + 4 + rng.below(8));
  o.min_length = 2.0;
  o.max_length = 14.0;
  Instance in;
  in.g = random_network(o, seed);
  in.p.soc_function = rng.below(3) == 0 ? SocFunction::simplistic : SocFunction::realistic;
  in.p.n_layers = in.p.soc_function == SocFunction::simplistic ? 4 + static_cast<int>(rng.below(4)) : 21;
  in.p.alpha = 0.3 + 0.5 * rng.uniform();
  in.p.e_cap = 4.0 + 6.0 * rng.uniform();
  const std::size_t want = 3 + rng.below(max_routes - 2);
  std::vector<char> used(in.g.size(), 0);
  std::size_t used_count = 0;
  for (std::size_t attempt = 0; attempt < 200 && in.routes.size() < want; ++attempt) {
    Route r = random_walk(in.g, rng, 2 + rng.below(5));
    std::size_t extra = 0;
    std::vector<char> seen = used;
    for (auto s : r.segments) {
      if (!seen[s]) {
        seen[s] = 1;
        ++extra;
      }
    }
    if (used_count + extra > max_candidates) continue;
    used = seen;
    used_count += extra;
    r.initial_soc = 0.6 + 0.4 * rng.uniform();
    in.routes.push_back(r);
  }
  double cost = 0.0;
  for (SegmentIndex s = 0; s < in.g.size(); ++s) {
    if (used[s]) cost += in.g.segment(s).cost;
  }
  in.budget = cost * (0.1 + 0.5 * rng.uniform());
  return in;
}

}  // namespace wcl::test
