#include "wcl/solvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "wcl/errors.hpp"
#include "wcl/parallel.hpp"

namespace wcl {

namespace {

constexpr std::size_t kBruteForceCap = 20;
// Below this many routes a parallel evaluation costs more than it saves.
constexpr std::size_t kParallelRoutes = 64;

double score_mask(const std::vector<char>& mask, const std::vector<Route>& routes,
                  const SocParams& p, const SegmentGraph& g, WeightScheme scheme, int threads) {
  if (threads <= 1 || routes.size() < kParallelRoutes) {
    double sum = 0.0;
    for (const auto& r : routes) sum += route_score(r, simulate_route(r, mask, p, g), p, scheme);
    return sum;
  }
  std::vector<double> part(routes.size());
  parallel_for(routes.size(), threads, [&](std::size_t i) {
    part[i] = route_score(routes[i], simulate_route(routes[i], mask, p, g), p, scheme);
  });
  double sum = 0.0;
  for (double v : part) sum += v;
  return sum;
}

double cost_of(const std::vector<SegmentIndex>& set, const SegmentGraph& g) {
  double c = 0.0;
  for (auto s : set) c += g.segment(s).cost;
  return c;
}

// Sets are sorted index lists; index order is id order.
bool preferred(double obj_a, const std::vector<SegmentIndex>& a, double obj_b,
               const std::vector<SegmentIndex>& b) {
  if (obj_a != obj_b) return obj_a > obj_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

double relative_gap(double bound, double obj) {
  return std::abs(bound - obj) / std::max(std::abs(bound), 1e-12);
}

class Clock {
 public:
  explicit Clock(const SolveLimits& limits) : limits_(limits), start_(std::chrono::steady_clock::now()) {}
  bool exhausted(std::uint64_t nodes) const {
    if (limits_.node_limit && nodes >= *limits_.node_limit) return true;
    if (limits_.time_limit_s) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
      if (elapsed.count() >= *limits_.time_limit_s) return true;
    }
    return false;
  }

 private:
  SolveLimits limits_;
  std::chrono::steady_clock::time_point start_;
};

void finish(SolveResult& res, std::vector<SegmentIndex> set, const std::vector<Route>& routes,
            const SocParams& p, const SegmentGraph& g, WeightScheme scheme, int threads) {
  res.installation = Installation::from(g, std::move(set));
  res.evaluation = evaluate_installation(res.installation, routes, p, g, scheme, threads);
}

}  // namespace

double route_score(const Route& r, const RouteOutcome& out, const SocParams& p, WeightScheme scheme) {
  return r.demand * outcome_weight(out.final_soc, out.stall_distance, r.distance, !out.completed, p,
                                   scheme);
}

Evaluation evaluate_installation(const Installation& inst, const std::vector<Route>& routes,
                                 const SocParams& p, const SegmentGraph& g, WeightScheme scheme,
                                 int threads) {
  Evaluation ev;
  const auto mask = inst.mask(g.size());
  ev.outcomes.resize(routes.size());
  parallel_for(routes.size(), routes.size() < kParallelRoutes ? 1 : threads,
               [&](std::size_t i) { ev.outcomes[i] = simulate_route(routes[i], mask, p, g); });
  for (std::size_t i = 0; i < routes.size(); ++i) {
    ev.objective += route_score(routes[i], ev.outcomes[i], p, scheme);
    if (!ev.outcomes[i].feasible) ++ev.infeasible_count;
  }
  return ev;
}

std::vector<SegmentIndex> candidate_segments(const std::vector<Route>& routes) {
  std::vector<SegmentIndex> out;
  for (const auto& r : routes) out.insert(out.end(), r.segments.begin(), r.segments.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool within_budget(double cost, double budget) {
  return cost <= budget + 1e-9 * std::max(1.0, std::abs(budget));
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::heuristic: return "heuristic";
  }
  return "feasible";
}

SolveResult brute_force(const std::vector<Route>& routes, const SegmentGraph& g, const SocParams& p,
                        double budget, WeightScheme scheme, int threads) {
  p.validate();
  const auto cands = candidate_segments(routes);
  if (cands.size() > kBruteForceCap) {
    throw InputError("brute force supports at most " + std::to_string(kBruteForceCap) +
                     " candidate segments, got " + std::to_string(cands.size()));
  }
  const std::uint64_t total = std::uint64_t{1} << cands.size();
  const std::size_t workers = static_cast<std::size_t>(std::max(threads, 1));

  struct Best {
    double obj = -std::numeric_limits<double>::infinity();
    std::vector<SegmentIndex> set;
    bool found = false;
  };
  std::vector<Best> best(workers);
  parallel_for(workers, threads, [&](std::size_t w) {
    std::vector<char> mask(g.size(), 0);
    std::vector<SegmentIndex> set;
    for (std::uint64_t bits = w; bits < total; bits += workers) {
      set.clear();
      double cost = 0.0;
      for (std::size_t k = 0; k < cands.size(); ++k) {
        if (bits >> k & 1U) {
          set.push_back(cands[k]);
          cost += g.segment(cands[k]).cost;
        }
      }
      if (!within_budget(cost, budget)) continue;
      for (auto s : set) mask[s] = 1;
      const double obj = score_mask(mask, routes, p, g, scheme, 1);
      for (auto s : set) mask[s] = 0;
      if (!best[w].found || preferred(obj, set, best[w].obj, best[w].set)) {
        best[w] = {obj, set, true};
      }
    }
  });
  Best winner;
  for (auto& b : best) {
    if (b.found && (!winner.found || preferred(b.obj, b.set, winner.obj, winner.set))) winner = b;
  }
  SolveResult res;
  res.objective = winner.obj;
  res.bound = winner.obj;
  res.nodes = total;
  finish(res, std::move(winner.set), routes, p, g, scheme, threads);
  return res;
}

SolveResult branch_and_bound(const std::vector<Route>& routes, const SegmentGraph& g,
                             const SocParams& p, double budget, WeightScheme scheme,
                             const std::optional<Installation>& incumbent, const SolveLimits& limits,
                             int threads) {
  p.validate();
  if (!(budget >= 0.0)) throw InputError("budget must be nonnegative");
  const Clock clock(limits);

  std::vector<SegmentIndex> order = candidate_segments(routes);
  {
    std::vector<std::size_t> coverage(g.size(), 0);
    for (const auto& r : routes) {
      auto segs = r.segments;
      std::sort(segs.begin(), segs.end());
      segs.erase(std::unique(segs.begin(), segs.end()), segs.end());
      for (auto s : segs) ++coverage[s];
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](SegmentIndex a, SegmentIndex b) { return coverage[a] > coverage[b]; });
  }
  const std::size_t n = order.size();

  std::vector<char> mask(g.size(), 0);
  auto evaluate = [&](const std::vector<SegmentIndex>& set) {
    for (auto s : set) mask[s] = 1;
    const double v = score_mask(mask, routes, p, g, scheme, threads);
    for (auto s : set) mask[s] = 0;
    return v;
  };

  double best_obj = 0.0;
  std::vector<SegmentIndex> best_set;
  if (incumbent) {
    if (!within_budget(incumbent->total_cost, budget)) {
      throw InputError("warm-start installation exceeds the budget");
    }
    best_set = incumbent->installed;
  }
  best_obj = evaluate(best_set);
  auto consider = [&](std::vector<SegmentIndex> set, double obj) {
    std::sort(set.begin(), set.end());
    if (preferred(obj, set, best_obj, best_set)) {
      best_obj = obj;
      best_set = std::move(set);
    }
  };

  struct Node {
    std::size_t depth = 0;  // positions < depth of `order` are decided
    std::vector<SegmentIndex> included;
    double cost = 0.0;
    double bound = 0.0;
    std::vector<SegmentIndex> relaxed;  // included plus every affordable undecided segment
    double relaxed_cost = 0.0;
    bool included_changed = true;
    std::uint64_t seq = 0;
  };
  auto bound_node = [&](Node& nd) {
    nd.relaxed = nd.included;
    nd.relaxed_cost = nd.cost;
    for (std::size_t k = nd.depth; k < n; ++k) {
      const double c = g.segment(order[k]).cost;
      if (within_budget(nd.cost + c, budget)) {
        nd.relaxed.push_back(order[k]);
        nd.relaxed_cost += c;
      }
    }
    nd.bound = evaluate(nd.relaxed);
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::uint64_t seq = 0;

  Node root;
  bound_node(root);
  open.push(std::move(root));

  SolveResult res;
  bool interrupted = false;
  while (!open.empty()) {
    if (open.top().bound <= best_obj) break;
    if (clock.exhausted(res.nodes)) {
      interrupted = true;
      break;
    }
    Node nd = open.top();
    open.pop();
    ++res.nodes;

    if (nd.included_changed) consider(nd.included, evaluate(nd.included));
    if (within_budget(nd.relaxed_cost, budget)) {
      // The relaxation is itself affordable, so it is the best completion.
      consider(nd.relaxed, nd.bound);
      continue;
    }
    std::size_t d = nd.depth;
    while (d < n && !within_budget(nd.cost + g.segment(order[d]).cost, budget)) ++d;
    if (d == n) continue;

    Node with;
    with.depth = d + 1;
    with.included = nd.included;
    with.included.push_back(order[d]);
    with.cost = nd.cost + g.segment(order[d]).cost;
    with.seq = ++seq;
    bound_node(with);

    Node without;
    without.depth = d + 1;
    without.included = nd.included;
    without.cost = nd.cost;
    without.included_changed = false;
    without.seq = ++seq;
    bound_node(without);

    if (with.bound > best_obj) open.push(std::move(with));
    if (without.bound > best_obj) open.push(std::move(without));
  }

  res.objective = best_obj;
  if (interrupted && !open.empty() && open.top().bound > best_obj) {
    res.status = SolveStatus::feasible;
    res.bound = open.top().bound;
    res.gap = relative_gap(res.bound, best_obj);
  } else {
    res.status = SolveStatus::optimal;
    res.bound = best_obj;
  }
  finish(res, std::move(best_set), routes, p, g, scheme, threads);
  return res;
}

Installation min_cost_path_union(const std::vector<Route>& routes, const SegmentGraph& g,
                                 const SocParams& p) {
  std::vector<SegmentIndex> all;
  for (std::size_t r = 0; r < routes.size(); ++r) {
    const auto sg = build_state_graph(routes[r], r, p, g, GraphVariant::min_budget);
    const auto path = min_cost_path(sg);
    all.insert(all.end(), path.install_segments.begin(), path.install_segments.end());
  }
  return Installation::from(g, std::move(all));
}

SolveResult min_budget(const std::vector<Route>& routes, const SegmentGraph& g, const SocParams& p,
                       const SolveLimits& limits, int threads) {
  p.validate();
  const Clock clock(limits);
  const auto cands = candidate_segments(routes);
  const std::size_t n = cands.size();
  std::vector<std::size_t> pos_of(g.size(), SIZE_MAX);
  for (std::size_t k = 0; k < n; ++k) pos_of[cands[k]] = k;

  // Candidate positions touched by each route.
  std::vector<std::vector<std::size_t>> route_pos(routes.size());
  for (std::size_t r = 0; r < routes.size(); ++r) {
    for (auto s : routes[r].segments) route_pos[r].push_back(pos_of[s]);
    std::sort(route_pos[r].begin(), route_pos[r].end());
    route_pos[r].erase(std::unique(route_pos[r].begin(), route_pos[r].end()), route_pos[r].end());
  }

  std::vector<char> mask(g.size(), 0);
  auto route_ok = [&](std::size_t r) { return simulate_route(routes[r], mask, p, g).feasible; };

  for (auto s : cands) mask[s] = 1;
  for (std::size_t r = 0; r < routes.size(); ++r) {
    if (!route_ok(r)) {
      throw InsufficientChargingError("route " + std::to_string(r) +
                                      " stays infeasible with every segment electrified");
    }
  }
  for (auto s : cands) mask[s] = 0;

  // Seed: union of per-route cheapest fixes, if the simulation agrees it works.
  std::vector<SegmentIndex> best_set = cands;
  {
    const auto seed = min_cost_path_union(routes, g, p);
    for (auto s : seed.installed) mask[s] = 1;
    bool ok = true;
    for (std::size_t r = 0; r < routes.size() && ok; ++r) ok = route_ok(r);
    for (auto s : seed.installed) mask[s] = 0;
    if (ok) best_set = seed.installed;
  }
  double best_cost = cost_of(best_set, g);

  enum : char { undecided = 0, in = 1, out = 2 };
  struct Node {
    std::vector<char> state;  // per candidate position
    double cost = 0.0;
    double lower = 0.0;
  };
  auto set_of = [&](const Node& nd) {
    std::vector<SegmentIndex> s;
    for (std::size_t k = 0; k < n; ++k) {
      if (nd.state[k] == in) s.push_back(cands[k]);
    }
    return s;
  };

  std::vector<Node> stack;
  stack.push_back({std::vector<char>(n, undecided), 0.0, 0.0});
  SolveResult res;
  bool interrupted = false;

  while (!stack.empty()) {
    if (clock.exhausted(res.nodes)) {
      interrupted = true;
      break;
    }
    Node nd = std::move(stack.back());
    stack.pop_back();
    if (nd.lower >= best_cost) continue;
    ++res.nodes;

    for (std::size_t k = 0; k < n; ++k) mask[cands[k]] = nd.state[k] == in;
    std::vector<std::size_t> violated;
    for (std::size_t r = 0; r < routes.size(); ++r) {
      if (!route_ok(r)) violated.push_back(r);
    }
    if (violated.empty()) {
      auto set = set_of(nd);
      if (nd.cost < best_cost || (nd.cost == best_cost && preferred(0.0, set, 0.0, best_set))) {
        best_cost = nd.cost;
        best_set = std::move(set);
      }
      continue;
    }

    // Every violated route must still be fixable by the undecided segments.
    for (std::size_t k = 0; k < n; ++k) mask[cands[k]] = nd.state[k] != out;
    bool fixable = true;
    for (auto r : violated) {
      if (!route_ok(r)) {
        fixable = false;
        break;
      }
    }
    if (!fixable) continue;

    // Violated routes with pairwise disjoint undecided segments each need
    // at least one more installation of their own.
    std::vector<char> used(n, 0);
    double packing = 0.0;
    std::size_t branch_route = violated.front();
    std::size_t branch_width = SIZE_MAX;
    for (auto r : violated) {
      std::size_t width = 0;
      bool disjoint = true;
      double cheapest = std::numeric_limits<double>::infinity();
      for (auto k : route_pos[r]) {
        if (nd.state[k] != undecided) continue;
        ++width;
        disjoint = disjoint && !used[k];
        cheapest = std::min(cheapest, g.segment(cands[k]).cost);
      }
      if (width < branch_width) {
        branch_width = width;
        branch_route = r;
      }
      if (disjoint) {
        for (auto k : route_pos[r]) {
          if (nd.state[k] == undecided) used[k] = 1;
        }
        packing += cheapest;
      }
    }
    const double lower = nd.cost + packing;
    if (lower >= best_cost) continue;

    // Children: install the k-th undecided segment of the branch route and
    // rule out the ones before it. Segments serving more violated routes
    // come first; pushed in reverse so the first child is explored first.
    std::vector<std::size_t> options;
    for (auto k : route_pos[branch_route]) {
      if (nd.state[k] == undecided) options.push_back(k);
    }
    std::vector<std::size_t> served(n, 0);
    for (auto r : violated) {
      for (auto k : route_pos[r]) ++served[k];
    }
    std::stable_sort(options.begin(), options.end(),
                     [&](std::size_t a, std::size_t b) { return served[a] > served[b]; });
    std::vector<Node> children;
    Node base = nd;
    for (auto k : options) {
      Node child = base;
      child.state[k] = in;
      child.cost = base.cost + g.segment(cands[k]).cost;
      child.lower = child.cost;
      if (child.lower < best_cost) children.push_back(std::move(child));
      base.state[k] = out;
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
  }

  res.objective = best_cost;
  if (interrupted) {
    res.bound = best_cost;
    for (const auto& nd : stack) res.bound = std::min(res.bound, nd.lower);
    res.status = res.bound < best_cost ? SolveStatus::feasible : SolveStatus::optimal;
    res.gap = res.status == SolveStatus::feasible
                  ? (best_cost - res.bound) / std::max(std::abs(best_cost), 1e-12)
                  : 0.0;
  } else {
    res.bound = best_cost;
  }
  finish(res, std::move(best_set), routes, p, g, WeightScheme::binary, threads);
  return res;
}

double fixed_budget_upper_bound(const std::vector<Route>& routes, const SegmentGraph& g,
                                const SocParams& p, double budget, WeightScheme scheme) {
  std::vector<char> mask(g.size(), 0);
  for (auto s : candidate_segments(routes)) mask[s] = within_budget(g.segment(s).cost, budget);
  return score_mask(mask, routes, p, g, scheme, 1);
}

double min_budget_lower_bound(const std::vector<Route>& routes, const SegmentGraph& g,
                              const SocParams& p) {
  const std::vector<char> none(g.size(), 0);
  std::vector<char> used(g.size(), 0);
  double total = 0.0;
  for (const auto& r : routes) {
    if (simulate_route(r, none, p, g).feasible) continue;
    const bool disjoint = std::none_of(r.segments.begin(), r.segments.end(),
                                       [&](SegmentIndex s) { return used[s] != 0; });
    if (!disjoint) continue;
    double cheapest = std::numeric_limits<double>::infinity();
    for (auto s : r.segments) {
      used[s] = 1;
      cheapest = std::min(cheapest, g.segment(s).cost);
    }
    total += cheapest;
  }
  return total;
}

SolveResult heuristic_result(Installation inst, const std::vector<Route>& routes,
                             const SegmentGraph& g, const SocParams& p, WeightScheme scheme,
                             std::optional<double> budget, int threads) {
  SolveResult res;
  res.status = SolveStatus::heuristic;
  res.installation = std::move(inst);
  res.evaluation = evaluate_installation(res.installation, routes, p, g, scheme, threads);
  if (budget) {
    res.objective = res.evaluation.objective;
    res.bound = std::max(res.objective, fixed_budget_upper_bound(routes, g, p, *budget, scheme));
    res.gap = relative_gap(res.bound, res.objective);
  } else {
    res.objective = res.installation.total_cost;
    res.bound = std::min(res.objective, min_budget_lower_bound(routes, g, p));
    res.gap = (res.objective - res.bound) / std::max(std::abs(res.objective), 1e-12);
  }
  return res;
}

std::string solution_json(const SolveResult& res, const SegmentGraph& g) {
  nlohmann::ordered_json j;
  j["installed"] = res.installation.ids(g);
  j["cost"] = res.installation.total_cost;
  j["objective"] = res.objective;
  j["status"] = std::string(to_string(res.status));
  j["gap"] = res.gap;
  j["infeasible_count"] = res.evaluation.infeasible_count;
  auto routes = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < res.evaluation.outcomes.size(); ++r) {
    const auto& o = res.evaluation.outcomes[r];
    routes.push_back({{"route", r}, {"final_soc", o.final_soc}, {"feasible", o.feasible}});
  }
  j["per_route"] = std::move(routes);
  return j.dump(2) + "\n";
}

Installation load_installation(const std::string& path, const SegmentGraph& g) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  if (!j.contains("installed") || !j["installed"].is_array()) {
    throw InputError(path + ": missing \"installed\" list");
  }
  std::vector<SegmentIndex> ids;
  for (const auto& id : j["installed"]) {
    if (!id.is_string()) throw InputError(path + ": installed ids must be strings");
    ids.push_back(g.index_of(id.get<std::string>()));
  }
  return Installation::from(g, std::move(ids));
}

}  // namespace wcl
