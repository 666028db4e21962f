#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liouville/geometry/kernel.hpp"

namespace liouville::maps {

using geometry::ChartManifold;
using geometry::Frame;
using geometry::LocalGeometry;
using geometry::Matrix;
using geometry::Point;
using geometry::Vector;
using symbolic::Expression;
using Jet = symbolic::JetEvaluator::Jet;

/// φ: domain -> target, components φ^α in domain coordinates.
class SmoothMap {
 public:
  SmoothMap(ChartManifold domain, ChartManifold target, std::vector<Expression> components);

  const ChartManifold& domain() const { return impl_->domain; }
  const ChartManifold& target() const { return impl_->target; }
  const std::vector<Expression>& components() const { return impl_->jets.functions(); }
  const symbolic::CachedJets& jets() const { return impl_->jets; }

  /// Γ^α_βγ ∘ φ in domain coordinates, index (α*n + β)*n + γ.
  const std::vector<Expression>& composed_christoffel() const;
  /// Target metric entries h_αβ ∘ φ, row-major n×n.
  const std::vector<Expression>& composed_metric() const;
  /// Tension field as domain expressions.
  const std::vector<Expression>& tension_expr() const;

 private:
  struct Impl {
    Impl(ChartManifold d, ChartManifold t) : domain(std::move(d)), target(std::move(t)) {}
    ChartManifold domain;
    ChartManifold target;
    symbolic::CachedJets jets;
    std::once_flag christoffel_once;
    std::vector<Expression> christoffel;
    std::once_flag metric_once;
    std::vector<Expression> metric;
    std::once_flag tension_once;
    std::vector<Expression> tension;
  };
  std::shared_ptr<Impl> impl_;
};

/// Section of φ^{-1}TN given by component expressions in domain coordinates.
class FieldAlongMap {
 public:
  FieldAlongMap(std::vector<Expression> components, int domain_dim);
  const std::vector<Expression>& components() const { return jets_.functions(); }
  const symbolic::CachedJets& jets() const { return jets_; }
  int size() const { return static_cast<int>(jets_.functions().size()); }

 private:
  symbolic::CachedJets jets_;
};

/// Seeded polynomial components of total degree <= `degree` in the centred
/// coordinates u_i = (x_i − c_i)/w_i of the domain sample box (centre c,
/// half-width w). Coefficients are uniform in [−scale, scale]; `offset[α]`
/// is added to component α.
std::vector<Expression> random_polynomial_components(const ChartManifold& domain, int target_dim, int degree,
                                                     std::uint64_t seed, double scale,
                                                     const std::vector<double>& offset = {});

/// Everything evaluated at one domain point.
struct MapPoint {
  Point point;
  Point image;
  LocalGeometry domain;
  LocalGeometry target;
  Jet jet;  // derivatives of φ
  Matrix differential;  // (α, i)
  int order = 0;
};

/// Domain geometry to order 1, target to order 2, φ jets to `order`.
/// Throws ChartExit naming both points when φ(p) leaves the target chart.
MapPoint map_point(const SmoothMap& phi, const Point& p, int order,
                   const std::optional<Frame>& frame = std::nullopt);

struct MapJet {
  Vector value;
  Matrix differential;
  Jet jet;
};

MapJet differential_at(const SmoothMap& phi, const Point& p, int order = 1);
double energy_density_at(const SmoothMap& phi, const Point& p, const std::optional<Frame>& frame = std::nullopt);
double energy_density(const MapPoint& mp);

/// (∇^φ_{∂_i} v)^α
Vector pullback_connection_at(const SmoothMap& phi, const FieldAlongMap& v, int direction, const Point& p);
/// ∇^φ_{∂_i} v for every direction, as columns.
Matrix pullback_connection(const MapPoint& mp, const Jet& v);

Vector tension_at(const SmoothMap& phi, const Point& p, const std::optional<Frame>& frame = std::nullopt);
Vector tension(const MapPoint& mp);

/// Σ_a (∇^φ_{e_a}∇^φ_{e_a} v − ∇^φ_{∇_{e_a}e_a} v); needs mp.order >= 2 and v jets of order 2.
Vector rough_laplacian(const MapPoint& mp, const Jet& v);
/// Σ_a R^N(v, dφ e_a) dφ e_a
Vector curvature_trace(const MapPoint& mp, const Vector& v);
Vector jacobi_operator(const MapPoint& mp, const Jet& v);
Vector jacobi_operator_at(const SmoothMap& phi, const FieldAlongMap& v, const Point& p,
                          const std::optional<Frame>& frame = std::nullopt);
/// J_φ(τ(φ)) with τ built symbolically.
Vector bitension_at(const SmoothMap& phi, const Point& p, const std::optional<Frame>& frame = std::nullopt);

}  // namespace liouville::maps
