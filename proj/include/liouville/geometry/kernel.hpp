#pragma once

// Pointwise Riemannian quantities on one chart. Curvature follows
//   R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z,   Ric(X,Y) = Σ_a g(R(X,e_a)e_a, Y)
// with {e_a} a g-orthonormal frame; in this convention Ric is positive on
// round spheres.

#include <optional>
#include <vector>

#include "liouville/geometry/chart.hpp"

namespace liouville::geometry {

struct MetricValue {
  Matrix g;
  Matrix inverse;
  double determinant = 0.0;
};

/// Γ^k_ij, symmetric in (i, j).
class ChristoffelArray {
 public:
  explicit ChristoffelArray(int dim = 0)
      : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}
  int dim() const { return dim_; }
  double& operator()(int k, int i, int j) { return data_[idx(k, i, j)]; }
  double operator()(int k, int i, int j) const { return data_[idx(k, i, j)]; }
  /// Γ(X, Y)^k = Γ^k_ij X^i Y^j
  Vector contract(const Vector& x, const Vector& y) const;

 private:
  std::size_t idx(int k, int i, int j) const {
    return static_cast<std::size_t>((k * dim_ + i) * dim_ + j);
  }
  int dim_;
  std::vector<double> data_;
};

/// ∂_m Γ^k_ij stored as (m, k, i, j).
class ChristoffelDerivative {
 public:
  explicit ChristoffelDerivative(int dim = 0)
      : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}
  double& operator()(int m, int k, int i, int j) { return data_[idx(m, k, i, j)]; }
  double operator()(int m, int k, int i, int j) const { return data_[idx(m, k, i, j)]; }

 private:
  std::size_t idx(int m, int k, int i, int j) const {
    return static_cast<std::size_t>(((m * dim_ + k) * dim_ + i) * dim_ + j);
  }
  int dim_;
  std::vector<double> data_;
};

/// Component l of R(∂_i, ∂_j)∂_k, stored as (l, i, j, k).
class RiemannArray {
 public:
  explicit RiemannArray(int dim = 0)
      : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}
  int dim() const { return dim_; }
  double& operator()(int l, int i, int j, int k) { return data_[idx(l, i, j, k)]; }
  double operator()(int l, int i, int j, int k) const { return data_[idx(l, i, j, k)]; }
  /// R(X, Y)Z
  Vector apply(const Vector& x, const Vector& y, const Vector& z) const;

 private:
  std::size_t idx(int l, int i, int j, int k) const {
    return static_cast<std::size_t>(((l * dim_ + i) * dim_ + j) * dim_ + k);
  }
  int dim_;
  std::vector<double> data_;
};

struct CurvatureValue {
  RiemannArray riemann;
  Matrix ricci;
};

/// Everything the higher modules need at one point, computed from one
/// evaluation of the metric jets.
struct LocalGeometry {
  Point point;
  MetricValue metric;
  Frame frame;
  ChristoffelArray christoffel;
  // present when order >= 2
  ChristoffelDerivative christoffel_derivative;
  CurvatureValue curvature;
  int order = 0;
};

/// order 0: metric and frame; 1: + Christoffel symbols; 2: + ∂Γ, Riemann, Ricci.
/// A supplied frame replaces the Gram–Schmidt frame in every trace.
LocalGeometry local_geometry(const ChartManifold& m, const Point& p, int order,
                             const std::optional<Frame>& frame = std::nullopt);

/// Throws ChartExit outside the chart region and NotPositiveDefinite when a
/// leading principal minor is not positive.
MetricValue metric_at(const ChartManifold& m, const Point& p);
ChristoffelArray christoffel_at(const ChartManifold& m, const Point& p);
CurvatureValue riemann_at(const ChartManifold& m, const Point& p,
                          const std::optional<Frame>& frame = std::nullopt);
Vector gradient_at(const ChartManifold& m, const ScalarField& fn, const Point& p);
Matrix hessian_at(const ChartManifold& m, const ScalarField& fn, const Point& p);
/// (div α)_J = Σ_a (∇_{e_a} α)(e_a, J); returns dim^(rank-1) components.
std::vector<double> divergence_tensor_at(const ChartManifold& m, const CovariantTensorField& alpha,
                                         const Point& p,
                                         const std::optional<Frame>& frame = std::nullopt);
/// Gram–Schmidt on ∂_0, ∂_1, ... in index order.
Frame orthonormal_frame_at(const ChartManifold& m, const Point& p);
Frame gram_schmidt(const Matrix& g);

/// Σ_a e_a^T T e_a
double frame_trace(const Frame& frame, const Matrix& t);
/// sqrt(g(v, v))
double norm_g(const Matrix& g, const Vector& v);
/// Largest |eigenvalue| of the symmetric form t relative to g.
double operator_norm_g(const Frame& frame, const Matrix& t);
/// Eigenvalues of g^{-1} t for symmetric t, ascending.
Vector relative_eigenvalues(const Frame& frame, const Matrix& t);

}  // namespace liouville::geometry
