#include "wcl/generators.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wcl/errors.hpp"
#include "wcl/random.hpp"

namespace wcl {

namespace {

std::string padded(char prefix, std::size_t i, int width) {
  std::string digits_text = std::to_string(i);
  if (digits_text.size() < static_cast<std::size_t>(width)) {
    digits_text.insert(0, static_cast<std::size_t>(width) - digits_text.size(), '0');
  }
  return prefix + digits_text;
}

int digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

RoadSegment make_segment(std::string id, double length, int category, Setting setting,
                         std::string from, std::string to) {
  RoadSegment s;
  s.id = std::move(id);
  s.length = length;
  s.category = category;
  s.speed = category_speed(category, setting);
  s.cost = length;
  s.start_intersection = std::move(from);
  s.end_intersection = std::move(to);
  return s;
}

}  // namespace

SegmentGraph cycle_network(std::size_t n, double length, int category, Setting setting) {
  if (n < 2) throw InputError("a cycle needs at least two segments");
  const int w = std::max(3, digits(n - 1));
  std::vector<RoadSegment> segs;
  for (std::size_t i = 0; i < n; ++i) {
    segs.push_back(make_segment(padded('c', i, w), length, category, setting, padded('n', i, w),
                                padded('n', (i + 1) % n, w)));
  }
  return SegmentGraph::build(std::move(segs));
}

SegmentGraph grid_network(const GridOptions& o, std::uint64_t seed) {
  if (o.rows < 2 || o.cols < 2) throw InputError("a grid needs at least 2 rows and 2 columns");
  if (!(o.min_length > 0.0 && o.max_length >= o.min_length)) throw InputError("bad length range");
  Rng rng(mix_seed(seed, 0x67726964));
  const int w = digits(o.rows * o.cols * 4);
  auto node = [&](std::size_t r, std::size_t c) { return padded('i', r * o.cols + c, w); };
  auto category = [&](std::size_t line) {
    return o.avenue_every > 0 && line % o.avenue_every == 0 ? 2 : 4;
  };
  std::vector<RoadSegment> segs;
  std::size_t next = 0;
  auto street = [&](std::string a, std::string b, int cat) {
    const double len = o.min_length + (o.max_length - o.min_length) * rng.uniform();
    segs.push_back(make_segment(padded('g', next++, w), len, cat, o.setting, a, b));
    segs.push_back(make_segment(padded('g', next++, w), len, cat, o.setting, b, a));
  };
  for (std::size_t r = 0; r < o.rows; ++r) {
    for (std::size_t c = 0; c < o.cols; ++c) {
      if (c + 1 < o.cols) street(node(r, c), node(r, c + 1), category(r));
      if (r + 1 < o.rows) street(node(r, c), node(r + 1, c), category(c));
    }
  }
  return SegmentGraph::build(std::move(segs));
}

SegmentGraph random_network(const RandomNetworkOptions& o, std::uint64_t seed) {
  const std::size_t k = o.intersections;
  if (k < 2) throw InputError("need at least two intersections");
  if (o.segments < k || o.segments > k * (k - 1)) throw InputError("segment count out of range");
  if (!(o.min_length > 0.0 && o.max_length >= o.min_length)) throw InputError("bad length range");
  Rng rng(mix_seed(seed, 0x72616e64));
  std::set<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < k; ++i) arcs.emplace(i, (i + 1) % k);
  while (arcs.size() < o.segments) {
    const std::size_t a = rng.below(k), b = rng.below(k);
    if (a != b) arcs.emplace(a, b);
  }
  const int w = digits(std::max(k, o.segments));
  std::vector<RoadSegment> segs;
  std::size_t next = 0;
  for (const auto& [a, b] : arcs) {
    const double len = o.min_length + (o.max_length - o.min_length) * rng.uniform();
    const int cat = 1 + static_cast<int>(rng.below(5));
    segs.push_back(make_segment(padded('e', next++, w), len, cat, o.setting, padded('v', a, w),
                                padded('v', b, w)));
  }
  return SegmentGraph::build(std::move(segs));
}

}  // namespace wcl
