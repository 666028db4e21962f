#include "liouville/geometry/catalog.hpp"

#include <charconv>
#include <numbers>

#include "liouville/errors.hpp"

namespace liouville::geometry {

namespace {

using symbolic::Expression;
using symbolic::ExprMatrix;

Expression radius_squared(int dim) {
  Expression r2 = Expression::constant(0.0);
  for (int i = 0; i < dim; ++i) r2 = r2 + Expression::variable(i) * Expression::variable(i);
  return r2;
}

ExprMatrix conformal(int dim, const Expression& factor) {
  ExprMatrix g(dim);
  for (int i = 0; i < dim; ++i) g(i, i) = factor;
  return g;
}

int parse_dim(const std::string& name, const std::string& prefix) {
  const std::string tail = name.substr(prefix.size());
  int d = 0;
  const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), d);
  if (ec != std::errc() || ptr != tail.data() + tail.size() || d < 1 || d > 8) {
    throw ValidationError("bad dimension in manifold name '" + name + "'", name);
  }
  return d;
}

}  // namespace

ChartManifold euclidean(int dim) {
  return ChartManifold("euclidean:" + std::to_string(dim), conformal(dim, Expression::constant(1.0)),
                       {Box::uniform(dim, -3.0, 3.0), Box::unbounded(dim), {}});
}

ChartManifold cigar() {
  const Expression one = Expression::constant(1.0);
  return ChartManifold("cigar", conformal(2, one / (one + radius_squared(2))),
                       {Box::uniform(2, -3.0, 3.0), Box::unbounded(2), {}});
}

ChartManifold sphere_stereo(int dim) {
  const Expression one = Expression::constant(1.0);
  const Expression q = one + radius_squared(dim);
  return ChartManifold("sphere_stereo:" + std::to_string(dim),
                       conformal(dim, Expression::constant(4.0) / (q * q)),
                       {Box::uniform(dim, -2.0, 2.0), Box::unbounded(dim), {}});
}

ChartManifold hyperbolic_halfplane() {
  const Expression y = Expression::variable(1);
  Box sample{{Interval{-2.0, 2.0}, Interval{0.5, 3.0}}};
  Box region{{Interval{}, Interval{0.0, std::numeric_limits<double>::infinity()}}};
  return ChartManifold("hyperbolic_halfplane", conformal(2, Expression::constant(1.0) / (y * y)),
                       {sample, region, {}});
}

ChartManifold torus_flat(int dim) {
  const double period = 2.0 * std::numbers::pi;
  return ChartManifold("torus_flat:" + std::to_string(dim), conformal(dim, Expression::constant(1.0)),
                       {Box::uniform(dim, 0.0, period), Box::unbounded(dim),
                        std::vector<double>(static_cast<std::size_t>(dim), period)});
}

bool is_catalog_name(const std::string& name) {
  return name == "cigar" || name == "hyperbolic_halfplane" || name.starts_with("euclidean:") ||
         name.starts_with("sphere_stereo:") || name.starts_with("torus_flat:");
}

ChartManifold catalog_manifold(const std::string& name) {
  if (name == "cigar") return cigar();
  if (name == "hyperbolic_halfplane") return hyperbolic_halfplane();
  if (name.starts_with("euclidean:")) return euclidean(parse_dim(name, "euclidean:"));
  if (name.starts_with("sphere_stereo:")) return sphere_stereo(parse_dim(name, "sphere_stereo:"));
  if (name.starts_with("torus_flat:")) return torus_flat(parse_dim(name, "torus_flat:"));
  throw ValidationError("unknown manifold '" + name + "'", name);
}

std::vector<std::string> catalog_names() {
  return {"euclidean:2", "cigar", "sphere_stereo:2", "sphere_stereo:3", "hyperbolic_halfplane",
          "torus_flat:2"};
}

std::vector<std::string> catalog_patterns() {
  return {"euclidean:<d>", "cigar", "sphere_stereo:<d>", "hyperbolic_halfplane", "torus_flat:<d>"};
}

}  // namespace liouville::geometry
