#include "wcl/ip_builder.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include <json.hpp>

#include "wcl/errors.hpp"
#include "wcl/format.hpp"
#include "wcl/parallel.hpp"

namespace wcl {

namespace {

std::vector<SocStateGraph> build_graphs(const std::vector<Route>& routes, const SegmentGraph& g,
                                        const SocParams& p, GraphVariant variant, int threads) {
  std::vector<SocStateGraph> graphs(routes.size());
  std::vector<std::exception_ptr> errors(routes.size());
  parallel_for(routes.size(), threads, [&](std::size_t r) {
    try {
      graphs[r] = build_state_graph(routes[r], r, p, g, variant);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  });
  // Report the first failing route regardless of thread count.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return graphs;
}

std::string coord(const SocStateGraph& sg, StateNodeId v) {
  return std::to_string(sg.layer_of(v)) + "_" + std::to_string(sg.j_of(v));
}

IpInstance assemble(const std::vector<Route>& routes, const SegmentGraph& g, const SocParams& p,
                    GraphVariant variant, std::optional<double> budget, WeightScheme scheme,
                    int threads) {
  if (routes.empty()) throw InputError("the model needs at least one route");
  p.validate();
  IpInstance ip;
  ip.variant = variant;
  ip.budget = budget;
  ip.sense = variant == GraphVariant::fixed_budget ? ObjectiveSense::maximize : ObjectiveSense::minimize;
  ip.graphs = build_graphs(routes, g, p, variant, threads);

  std::vector<std::size_t> uses(g.size(), 0);
  for (const auto& r : routes) {
    for (auto s : r.segments) ++uses[s];
  }
  std::vector<std::size_t> cand_of(g.size(), SIZE_MAX);
  std::size_t max_uses = 0;
  for (SegmentIndex s = 0; s < g.size(); ++s) {
    if (uses[s] == 0) continue;
    cand_of[s] = ip.candidates.size();
    ip.candidates.push_back(s);
    max_uses = std::max(max_uses, uses[s]);
  }
  // p(u_k) counts one install edge per route visit, so it never exceeds the
  // number of route visits to u_k (= the route count for simple routes).
  ip.big_m = static_cast<double>(std::max(routes.size(), max_uses));

  for (auto s : ip.candidates) {
    IpVariable v;
    v.name = "R_" + g.segment(s).id;
    v.kind = IpVariable::Kind::install;
    v.segment = s;
    v.objective = variant == GraphVariant::min_budget ? g.segment(s).cost : 0.0;
    ip.variables.push_back(std::move(v));
  }

  std::vector<std::vector<std::size_t>> install_vars(ip.candidates.size());
  for (std::size_t r = 0; r < ip.graphs.size(); ++r) {
    const auto& sg = ip.graphs[r];
    ip.edge_var_offset.push_back(ip.variables.size());
    for (std::size_t k = 0; k < sg.edges().size(); ++k) {
      const auto& e = sg.edges()[k];
      IpVariable v;
      v.name = "X_" + std::to_string(r) + "_" + coord(sg, e.from) + "_" + coord(sg, e.to) + "_" +
               std::to_string(e.weight());
      v.kind = IpVariable::Kind::edge;
      v.route = r;
      v.edge = k;
      if (variant == GraphVariant::fixed_budget && e.to == sg.sink()) {
        v.objective = routes[r].demand * boundary_weight(sg, e.from, p, scheme);
      }
      if (e.installed) {
        const SegmentIndex seg = sg.segments()[sg.layer_of(e.from) - 1];
        install_vars[cand_of[seg]].push_back(ip.variables.size());
      }
      ip.variables.push_back(std::move(v));
    }
  }

  if (budget) {
    IpConstraint row{"BUDGET", RowSense::less_equal, *budget, {}};
    for (std::size_t k = 0; k < ip.candidates.size(); ++k) {
      row.terms.push_back({k, g.segment(ip.candidates[k]).cost});
    }
    ip.constraints.push_back(std::move(row));
  }

  for (std::size_t r = 0; r < ip.graphs.size(); ++r) {
    const auto& sg = ip.graphs[r];
    const std::size_t base = ip.edge_var_offset[r];
    std::vector<std::vector<LinearTerm>> terms(sg.node_count());
    for (std::size_t k = 0; k < sg.edges().size(); ++k) {
      const auto& e = sg.edges()[k];
      terms[e.from].push_back({base + k, 1.0});
      terms[e.to].push_back({base + k, -1.0});
    }
    for (StateNodeId v = 0; v < sg.node_count(); ++v) {
      IpConstraint row;
      row.name = "F_" + std::to_string(r) + "_" + coord(sg, v);
      row.sense = RowSense::equal;
      row.rhs = v == sg.source() ? 1.0 : (v == sg.sink() ? -1.0 : 0.0);
      row.terms = std::move(terms[v]);
      std::sort(row.terms.begin(), row.terms.end(),
                [](const LinearTerm& a, const LinearTerm& b) { return a.var < b.var; });
      ip.constraints.push_back(std::move(row));
    }
  }

  for (std::size_t k = 0; k < ip.candidates.size(); ++k) {
    const std::string& id = g.segment(ip.candidates[k]).id;
    IpConstraint upper{"LU_" + id, RowSense::less_equal, 0.0, {{k, 1.0}}};
    IpConstraint big_m{"LM_" + id, RowSense::greater_equal, 0.0, {{k, ip.big_m}}};
    for (auto var : install_vars[k]) {
      upper.terms.push_back({var, -1.0});
      big_m.terms.push_back({var, -1.0});
    }
    ip.constraints.push_back(std::move(upper));
    ip.constraints.push_back(std::move(big_m));
  }
  return ip;
}

}  // namespace

IpInstance build_fixed_budget_ip(const std::vector<Route>& routes, const SegmentGraph& g,
                                 const SocParams& p, double budget, WeightScheme scheme,
                                 int threads) {
  if (!(budget >= 0.0)) throw InputError("budget must be nonnegative");
  return assemble(routes, g, p, GraphVariant::fixed_budget, budget, scheme, threads);
}

IpInstance build_min_budget_ip(const std::vector<Route>& routes, const SegmentGraph& g,
                               const SocParams& p, int threads) {
  return assemble(routes, g, p, GraphVariant::min_budget, std::nullopt, WeightScheme::binary,
                  threads);
}

std::vector<double> assignment_from_installation(const IpInstance& ip,
                                                 const std::vector<char>& mask) {
  std::vector<double> values(ip.variables.size(), 0.0);
  for (std::size_t k = 0; k < ip.candidates.size(); ++k) values[k] = mask[ip.candidates[k]] ? 1.0 : 0.0;
  for (std::size_t r = 0; r < ip.graphs.size(); ++r) {
    const StatePath path = follow_installation(ip.graphs[r], mask);
    for (auto e : path.edges) values[ip.edge_var_offset[r] + e] = 1.0;
  }
  return values;
}

double objective_value(const IpInstance& ip, const std::vector<double>& values) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ip.variables.size(); ++i) sum += ip.variables[i].objective * values[i];
  return sum;
}

double max_violation(const IpInstance& ip, const std::vector<double>& values) {
  double worst = 0.0;
  for (const auto& row : ip.constraints) {
    double act = 0.0;
    for (const auto& t : row.terms) act += t.coef * values[t.var];
    double v = 0.0;
    switch (row.sense) {
      case RowSense::less_equal: v = act - row.rhs; break;
      case RowSense::greater_equal: v = row.rhs - act; break;
      case RowSense::equal: v = std::abs(act - row.rhs); break;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

std::string export_mps(const IpInstance& ip) {
  constexpr std::size_t kNameWidth = 8;
  constexpr std::size_t kNumberWidth = 12;

  auto check_name = [](const std::string& n) {
    if (n.empty() || n.find_first_of(" \t\r\n") != std::string::npos) {
      throw InputError("name '" + n + "' cannot be written to MPS");
    }
  };
  bool fixed = ip.name.size() <= kNameWidth;
  for (const auto& v : ip.variables) {
    check_name(v.name);
    fixed = fixed && v.name.size() <= kNameWidth;
  }
  for (const auto& c : ip.constraints) {
    check_name(c.name);
    fixed = fixed && c.name.size() <= kNameWidth;
  }

  // Column-major entries; rows are visited in order so each column lists
  // its rows in row order.
  std::vector<std::vector<std::pair<std::size_t, double>>> column(ip.variables.size());
  for (std::size_t r = 0; r < ip.constraints.size(); ++r) {
    for (const auto& t : ip.constraints[r].terms) {
      if (t.coef != 0.0) column[t.var].emplace_back(r, t.coef);
    }
  }
  for (const auto& v : ip.variables) fixed = fixed && format_number(v.objective).size() <= kNumberWidth;
  for (const auto& c : ip.constraints) {
    fixed = fixed && format_number(c.rhs).size() <= kNumberWidth;
    for (const auto& t : c.terms) fixed = fixed && format_number(t.coef).size() <= kNumberWidth;
  }

  auto pad = [&](const std::string& s) { return fixed ? s + std::string(kNameWidth + 2 - s.size(), ' ') : s + "  "; };
  auto row_type = [](RowSense s) {
    switch (s) {
      case RowSense::less_equal: return "L";
      case RowSense::greater_equal: return "G";
      case RowSense::equal: return "E";
    }
    return "E";
  };

  std::ostringstream os;
  if (!fixed) os << "* free-format MPS: names or numbers exceed the fixed-format field widths\n";
  os << "NAME          " << ip.name << "\n";
  if (ip.sense == ObjectiveSense::maximize) os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n";
  os << " N  OBJ\n";
  for (const auto& c : ip.constraints) os << " " << row_type(c.sense) << "  " << c.name << "\n";
  os << "COLUMNS\n";
  for (std::size_t j = 0; j < ip.variables.size(); ++j) {
    const std::string& name = ip.variables[j].name;
    if (ip.variables[j].objective != 0.0) {
      os << "    " << pad(name) << pad("OBJ") << format_number(ip.variables[j].objective) << "\n";
    }
    for (const auto& [r, coef] : column[j]) {
      os << "    " << pad(name) << pad(ip.constraints[r].name) << format_number(coef) << "\n";
    }
  }
  os << "RHS\n";
  for (const auto& c : ip.constraints) {
    if (c.rhs != 0.0) os << "    " << pad("RHS") << pad(c.name) << format_number(c.rhs) << "\n";
  }
  os << "BOUNDS\n";
  for (const auto& v : ip.variables) os << " BV " << pad("BND") << v.name << "\n";
  os << "ENDATA\n";
  return os.str();
}

std::string instance_summary_json(const IpInstance& ip) {
  nlohmann::ordered_json j;
  j["vars"] = ip.variables.size();
  j["cons"] = ip.constraints.size();
  if (ip.budget) {
    j["budget"] = *ip.budget;
  } else {
    j["budget"] = nullptr;
  }
  j["routes"] = ip.route_count();
  return j.dump(2) + "\n";
}

}  // namespace wcl
