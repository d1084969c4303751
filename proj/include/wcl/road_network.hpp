#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wcl {

/// Position of a segment in a SegmentGraph (segments are stored sorted by id).
using SegmentIndex = std::uint32_t;

enum class Setting { urban, rural };

Setting parse_setting(std::string_view text);
std::string_view to_string(Setting s);

/// Speed limit in mph for a road category (1 = motorway ... 8 = living street).
double category_speed(int category, Setting setting);

/// One-way stretch of road between two intersections.
struct RoadSegment {
  std::string id;
  double length = 0.0;  // miles
  int category = 1;
  double speed = 0.0;  // mph
  double cost = 0.0;
  std::string start_intersection;
  std::string end_intersection;
};

/// Hours needed to drive the segment at its average speed.
inline double traversal_time(const RoadSegment& seg) { return seg.length / seg.speed; }

/// Directed graph whose nodes are road segments; u -> v whenever u ends
/// where v starts. Immutable once built.
class SegmentGraph {
 public:
  SegmentGraph() = default;

  /// Validates the segments, sorts them by id and derives the adjacency.
  /// Throws InputError on duplicate ids, bad categories, nonpositive
  /// length/speed, negative cost or missing intersection tokens.
  static SegmentGraph build(std::vector<RoadSegment> segments);

  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  std::size_t edge_count() const { return edge_count_; }

  const RoadSegment& segment(SegmentIndex i) const { return segments_[i]; }
  const std::vector<RoadSegment>& segments() const { return segments_; }

  std::optional<SegmentIndex> find(std::string_view id) const;
  /// Like find() but throws InputError for unknown ids.
  SegmentIndex index_of(std::string_view id) const;

  std::span<const SegmentIndex> successors(SegmentIndex u) const {
    return {succ_.data() + succ_offset_[u], succ_.data() + succ_offset_[u + 1]};
  }
  std::span<const SegmentIndex> predecessors(SegmentIndex v) const {
    return {pred_.data() + pred_offset_[v], pred_.data() + pred_offset_[v + 1]};
  }
  bool has_edge(SegmentIndex u, SegmentIndex v) const;

  /// Weight of every edge leaving u: the traversal time of u in hours.
  double edge_weight(SegmentIndex u) const { return times_[u]; }
  double time(SegmentIndex u) const { return times_[u]; }

  /// Total length T of the network in miles.
  double total_length() const { return total_length_; }
  double total_cost() const { return total_cost_; }

  /// Same topology with replaced speeds (one entry per segment, index order).
  SegmentGraph with_speeds(std::span<const double> speeds) const;

 private:
  std::vector<RoadSegment> segments_;
  std::unordered_map<std::string, SegmentIndex> index_;
  std::vector<std::size_t> succ_offset_, pred_offset_;
  std::vector<SegmentIndex> succ_, pred_;
  std::vector<double> times_;
  std::size_t edge_count_ = 0;
  double total_length_ = 0.0;
  double total_cost_ = 0.0;
};

/// Reads the JSON network format, or CSV when the extension is ".csv".
/// Segments without a speed get the category speed for the file's setting
/// (CSV files carry no setting and use `csv_setting`).
SegmentGraph load_network(const std::filesystem::path& path, Setting csv_setting = Setting::urban);
SegmentGraph parse_network_json(std::string_view text);
SegmentGraph parse_network_csv(std::string_view text, Setting setting);

/// Serializes with every field explicit (speed and cost resolved).
std::string network_to_json(const SegmentGraph& g, Setting setting);

/// Induced subgraph on segments with category <= max_category.
SegmentGraph filter_categories(const SegmentGraph& g, int max_category);

/// Budget B = beta * total installation cost.
double budget_from_fraction(const SegmentGraph& g, double beta);

}  // namespace wcl
