#pragma once

#include <cstdint>
#include <vector>

#include "liouville/geometry/chart.hpp"

namespace liouville::geometry {

struct SampleOptions {
  int lattice_per_axis = 21;
  int random_count = 100;
  std::uint64_t seed = 20240611;
};

/// Lattice over the sample box followed by seeded uniform interior points.
/// Points outside the chart region are dropped.
std::vector<Point> sample_points(const ChartManifold& m, const SampleOptions& options = {});
std::vector<Point> random_points(const Box& box, int count, std::uint64_t seed);
std::vector<Point> lattice_points(const Box& box, int per_axis);

}  // namespace liouville::geometry
