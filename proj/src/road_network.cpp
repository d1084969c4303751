#include "wcl/road_network.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/tokenizer.hpp>
#include <json.hpp>

#include "wcl/errors.hpp"
#include "wcl/format.hpp"

namespace wcl {

namespace {

// Urban / rural speed limits (mph) per OpenStreetMap road category.
constexpr std::array<std::array<double, 2>, 8> kCategorySpeeds{{
    {60, 70},  // motorway
    {45, 55},  // trunk
    {30, 50},  // primary
    {20, 45},  // secondary
    {15, 35},  // tertiary
    {8, 25},   // residential / unclassified
    {5, 10},   // service
    {5, 10},   // living street
}};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(const std::string& field, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw InputError("invalid " + what + ": '" + field + "'");
  }
}

}  // namespace

Setting parse_setting(std::string_view text) {
  if (text == "urban") return Setting::urban;
  if (text == "rural") return Setting::rural;
  throw InputError("setting must be 'urban' or 'rural', got '" + std::string(text) + "'");
}

std::string_view to_string(Setting s) { return s == Setting::urban ? "urban" : "rural"; }

double category_speed(int category, Setting setting) {
  if (category < 1 || category > 8) {
    throw InputError("road category must be in 1..8, got " + std::to_string(category));
  }
  return kCategorySpeeds[category - 1][setting == Setting::urban ? 0 : 1];
}

SegmentGraph SegmentGraph::build(std::vector<RoadSegment> segments) {
  for (const auto& s : segments) {
    if (s.id.empty()) throw InputError("segment with empty id");
    if (s.category < 1 || s.category > 8) {
      throw InputError("segment " + s.id + ": category " + std::to_string(s.category) +
                       " outside 1..8");
    }
    if (!(s.length > 0.0)) throw InputError("segment " + s.id + ": length must be positive");
    if (!(s.speed > 0.0)) throw InputError("segment " + s.id + ": speed must be positive");
    if (!(s.cost >= 0.0)) throw InputError("segment " + s.id + ": cost must be nonnegative");
    if (s.start_intersection.empty() || s.end_intersection.empty()) {
      throw InputError("segment " + s.id + ": dangling intersection reference");
    }
  }
  std::sort(segments.begin(), segments.end(),
            [](const RoadSegment& a, const RoadSegment& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].id == segments[i - 1].id) {
      throw InputError("duplicate segment id " + segments[i].id);
    }
  }

  SegmentGraph g;
  g.segments_ = std::move(segments);
  const std::size_t n = g.segments_.size();
  g.index_.reserve(n);
  g.times_.resize(n);
  std::multimap<std::string_view, SegmentIndex> by_start;
  for (SegmentIndex i = 0; i < n; ++i) {
    const auto& s = g.segments_[i];
    g.index_.emplace(s.id, i);
    g.times_[i] = traversal_time(s);
    g.total_length_ += s.length;
    g.total_cost_ += s.cost;
    by_start.emplace(s.start_intersection, i);
  }

  std::vector<std::vector<SegmentIndex>> out(n), in(n);
  for (SegmentIndex u = 0; u < n; ++u) {
    auto [lo, hi] = by_start.equal_range(g.segments_[u].end_intersection);
    for (auto it = lo; it != hi; ++it) {
      if (it->second == u) continue;
      out[u].push_back(it->second);
      in[it->second].push_back(u);
    }
  }
  auto flatten = [n](std::vector<std::vector<SegmentIndex>>& lists, std::vector<std::size_t>& offset,
                     std::vector<SegmentIndex>& flat) {
    offset.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(lists[i].begin(), lists[i].end());
      offset[i + 1] = offset[i] + lists[i].size();
    }
    flat.reserve(offset[n]);
    for (auto& l : lists) flat.insert(flat.end(), l.begin(), l.end());
  };
  flatten(out, g.succ_offset_, g.succ_);
  flatten(in, g.pred_offset_, g.pred_);
  g.edge_count_ = g.succ_.size();
  return g;
}

std::optional<SegmentIndex> SegmentGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SegmentIndex SegmentGraph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw InputError("unknown segment id '" + std::string(id) + "'");
}

bool SegmentGraph::has_edge(SegmentIndex u, SegmentIndex v) const {
  auto s = successors(u);
  return std::binary_search(s.begin(), s.end(), v);
}

SegmentGraph SegmentGraph::with_speeds(std::span<const double> speeds) const {
  if (speeds.size() != segments_.size()) throw InputError("speed vector size mismatch");
  std::vector<RoadSegment> segs = segments_;
  for (std::size_t i = 0; i < segs.size(); ++i) segs[i].speed = speeds[i];
  return build(std::move(segs));
}

SegmentGraph parse_network_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("network JSON: ") + e.what());
  }
  try {
    const Setting setting = parse_setting(doc.value("setting", std::string("urban")));
    std::vector<RoadSegment> segs;
    for (const auto& j : doc.at("segments")) {
      RoadSegment s;
      s.id = j.at("id").get<std::string>();
      s.length = j.at("length_mi").get<double>();
      s.category = j.at("category").get<int>();
      s.start_intersection = j.at("start").get<std::string>();
      s.end_intersection = j.at("end").get<std::string>();
      s.speed = j.contains("speed_mph") ? j["speed_mph"].get<double>()
                                        : category_speed(s.category, setting);
      s.cost = j.contains("cost") ? j["cost"].get<double>() : s.length;
      segs.push_back(std::move(s));
    }
    return SegmentGraph::build(std::move(segs));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("network JSON: ") + e.what());
  }
}

SegmentGraph parse_network_csv(std::string_view text, Setting setting) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> header;
  std::vector<RoadSegment> segs;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    for (const auto& cell : Tokenizer(l)) cells.push_back(cell);
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header.empty()) {
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      header = split(line);
      continue;
    }
    const auto cells = split(line);
    auto field = [&](const std::string& name) -> std::optional<std::string> {
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == name) {
          if (c >= cells.size() || cells[c].empty()) return std::nullopt;
          return cells[c];
        }
      }
      return std::nullopt;
    };
    auto required = [&](const std::string& name) {
      auto v = field(name);
      if (!v) throw InputError("network CSV: missing '" + name + "' in line: " + line);
      return *v;
    };
    RoadSegment s;
    s.id = required("id");
    s.length = parse_double(required("length_mi"), "length_mi");
    s.category = static_cast<int>(parse_double(required("category"), "category"));
    s.start_intersection = required("start");
    s.end_intersection = required("end");
    auto speed = field("speed_mph");
    s.speed = speed ? parse_double(*speed, "speed_mph") : category_speed(s.category, setting);
    auto cost = field("cost");
    s.cost = cost ? parse_double(*cost, "cost") : s.length;
    segs.push_back(std::move(s));
  }
  if (header.empty()) throw InputError("network CSV: header row required");
  return SegmentGraph::build(std::move(segs));
}

SegmentGraph load_network(const std::filesystem::path& path, Setting csv_setting) {
  const std::string text = read_file(path);
  if (path.extension() == ".csv") return parse_network_csv(text, csv_setting);
  return parse_network_json(text);
}

std::string network_to_json(const SegmentGraph& g, Setting setting) {
  nlohmann::ordered_json doc;
  doc["setting"] = std::string(to_string(setting));
  auto& arr = doc["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : g.segments()) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["length_mi"] = s.length;
    j["category"] = s.category;
    j["speed_mph"] = s.speed;
    j["cost"] = s.cost;
    j["start"] = s.start_intersection;
    j["end"] = s.end_intersection;
    arr.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

SegmentGraph filter_categories(const SegmentGraph& g, int max_category) {
  if (max_category < 1 || max_category > 8) {
    throw InputError("max_category must be in 1..8");
  }
  std::vector<RoadSegment> kept;
  for (const auto& s : g.segments()) {
    if (s.category <= max_category) kept.push_back(s);
  }
  return SegmentGraph::build(std::move(kept));
}

double budget_from_fraction(const SegmentGraph& g, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must be in [0, 1]");
  return beta * g.total_cost();
}

}  // namespace wcl
