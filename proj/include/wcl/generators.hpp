#pragma once

#include <cstdint>

#include "wcl/road_network.hpp"

namespace wcl {

/// Directed cycle of n unit segments c000 -> c001 -> ... -> c000 (ids are
/// zero-padded so id order is cycle order).
SegmentGraph cycle_network(std::size_t n, double length = 1.0, int category = 3,
                           Setting setting = Setting::urban);

struct GridOptions {
  std::size_t rows = 36;
  std::size_t cols = 36;
  double min_length = 0.05;  // miles
  double max_length = 0.3;
  std::size_t avenue_every = 4;  // every k-th row/column is a faster category 2 road
  Setting setting = Setting::urban;
};

/// Manhattan-like grid of two-way streets: every street between adjacent
/// intersections becomes two one-way segments. Lengths are uniform in
/// [min_length, max_length]; cost equals length.
SegmentGraph grid_network(const GridOptions& opts, std::uint64_t seed);

struct RandomNetworkOptions {
  std::size_t intersections = 8;
  std::size_t segments = 24;  // at least `intersections`
  double min_length = 0.5;
  double max_length = 3.0;
  Setting setting = Setting::rural;
};

/// Strongly connected random road network: a directed ring through every
/// intersection plus random extra one-way segments (no loops or parallel
/// segments). Categories are uniform in 1..5 and cost equals length.
SegmentGraph random_network(const RandomNetworkOptions& opts, std::uint64_t seed);

}  // namespace wcl
