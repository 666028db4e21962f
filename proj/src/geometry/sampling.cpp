#include "liouville/geometry/sampling.hpp"

#include <random>

#include "liouville/errors.hpp"

namespace liouville::geometry {

namespace {

void require_bounded(const Box& box) {
  if (!box.bounded()) throw ValidationError("sample box must be bounded", "sample_box");
}

}  // namespace

std::vector<Point> lattice_points(const Box& box, int per_axis) {
  require_bounded(box);
  std::vector<Point> out;
  if (per_axis <= 0) return out;
  const int d = box.dim();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    Point p(d);
    for (int a = 0; a < d; ++a) {
      const auto& iv = box.axes[static_cast<std::size_t>(a)];
      const int k = idx[static_cast<std::size_t>(a)];
      p[a] = per_axis == 1 ? 0.5 * (iv.lo + iv.hi) : iv.lo + (iv.hi - iv.lo) * k / (per_axis - 1);
    }
    out.push_back(p);
    int a = d - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == per_axis) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

std::vector<Point> random_points(const Box& box, int count, std::uint64_t seed) {
  require_bounded(box);
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int n = 0; n < count; ++n) {
    Point p(box.dim());
    for (int a = 0; a < box.dim(); ++a) {
      const auto& iv = box.axes[static_cast<std::size_t>(a)];
      std::uniform_real_distribution<double> u(iv.lo, iv.hi);
      p[a] = u(rng);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Point> sample_points(const ChartManifold& m, const SampleOptions& options) {
  std::vector<Point> out;
  for (auto& p : lattice_points(m.sample_box(), options.lattice_per_axis)) {
    if (m.in_chart(p)) out.push_back(std::move(p));
  }
  for (auto& p : random_points(m.sample_box(), options.random_count, options.seed)) {
    if (m.in_chart(p)) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace liouville::geometry
