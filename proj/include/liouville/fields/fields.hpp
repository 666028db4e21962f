#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liouville/geometry/chart.hpp"
#include "liouville/geometry/kernel.hpp"

namespace liouville::fields {

using geometry::ChartManifold;
using geometry::Matrix;
using geometry::Point;
using geometry::Vector;
using symbolic::Expression;

/// Vector field ξ = ξ^i ∂_i on a chart, with an optional declared conformal
/// potential f (𝓛_ξ g = 2fg).
class VectorField {
 public:
  VectorField(std::vector<Expression> components, int dim,
              std::optional<Expression> potential = std::nullopt);

  int dim() const { return dim_; }
  const std::vector<Expression>& components() const { return jets_.functions(); }
  const std::optional<Expression>& potential() const { return potential_; }
  const symbolic::CachedJets& jets() const { return jets_; }
  Vector value(const Point& p) const;
  VectorField negated() const;

 private:
  int dim_;
  symbolic::CachedJets jets_;
  std::optional<Expression> potential_;
};

struct SolitonSpec {
  VectorField field;
  double lambda = 0.0;
  /// Present for gradient solitons: field = grad f.
  std::optional<Expression> potential;

  bool is_gradient() const { return potential.has_value(); }
  /// "shrinking", "steady" or "expanding" by the sign of λ.
  std::string type() const;
};

/// Residual summary over a sample set, norms in the g-operator norm.
struct FieldReport {
  std::string check;
  std::vector<double> residuals;
  double sup = 0.0;
  double mean = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string verdict;
  std::optional<double> lambda;
  std::optional<double> potential;
};

enum class ConformalKind { Killing, Homothetic, Conformal, None };
std::string to_string(ConformalKind k);

struct ConformalClassification {
  ConformalKind kind = ConformalKind::None;
  /// sup over samples of ‖𝓛_ξ g − 2fg‖
  double residual = 0.0;
  std::vector<double> potential;  // f at each sample
  double potential_mean = 0.0;
  double potential_variance = 0.0;
  /// Constant for homothetic fields.
  double homothety = 0.0;
};

struct ClassifyOptions {
  double tol = 1e-8;
  double homothety_tol = 1e-10;
};

struct PinchReport {
  bool holds = false;
  /// Worst gap: min(eig) − λ for above, λ − max(eig) for below.
  double margin = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

enum class PinchSide { Above, Below };

struct CommutatorReport {
  std::vector<Expression> zeta;
  double sup = 0.0;
  double mean = 0.0;
  double grad_norm_sq_mean = 0.0;
  /// classify_conformal applied to ζ on the same samples.
  ConformalClassification zeta_class;
};

// Standard fields on flat charts and rotationally symmetric metrics.
VectorField position_field(int dim);
/// (−x1, x0, 0, ...)
VectorField rotation_field(int dim);
VectorField coordinate_field(int dim, int axis);
/// ⟨x,a⟩x − (|x|²/2)a, potential ⟨x,a⟩.
VectorField special_conformal_field(const std::vector<double>& a);

/// g^{ij} ∂_j f as expressions.
std::vector<Expression> gradient_expr(const ChartManifold& m, const Expression& f);
/// [V, W]^i = V^j ∂_j W^i − W^j ∂_j V^i
std::vector<Expression> lie_bracket(const std::vector<Expression>& v, const std::vector<Expression>& w);

/// Gradient soliton with field grad f built symbolically.
SolitonSpec gradient_soliton(const ChartManifold& m, const Expression& f, double lambda);

/// ∇_i ξ^k, as a matrix (k, i).
Matrix covariant_derivative_at(const ChartManifold& m, const VectorField& xi, const Point& p);
Matrix lie_derivative_metric_at(const ChartManifold& m, const VectorField& xi, const Point& p);
/// trace_g(𝓛_ξ g) / (2 dim)
double conformal_potential_at(const ChartManifold& m, const VectorField& xi, const Point& p);
ConformalClassification classify_conformal(const ChartManifold& m, const VectorField& xi,
                                           const std::vector<Point>& samples,
                                           const ClassifyOptions& options = {});

Matrix soliton_residual_at(const ChartManifold& m, const SolitonSpec& s, const Point& p);
Matrix gradient_soliton_residual_at(const ChartManifold& m, const Expression& f, double lambda,
                                    const Point& p);
/// Checks the soliton equation over samples. For gradient kind, also
/// requires field = grad f within 1e-10 and throws ValidationError otherwise.
FieldReport check_soliton(const ChartManifold& m, const SolitonSpec& s, const std::vector<Point>& samples,
                          double tol);

/// ∇_X∇_X ξ − ∇_{∇_X X} ξ + R(ξ, X)X with X extended as X + A(q − p); A = 0 by
/// default (coordinate-constant extension).
Vector jacobi_type_residual_at(const ChartManifold& m, const VectorField& xi, const Point& p,
                               const Vector& x, const std::optional<Matrix>& extension = std::nullopt);
/// Sup of ‖residual‖_g / |X|_g² over samples, with `directions` seeded random X per point.
FieldReport check_jacobi_type(const ChartManifold& m, const VectorField& xi, const std::vector<Point>& samples,
                              int directions, std::uint64_t seed, double tol);

PinchReport ricci_pinch_check(const ChartManifold& m, double lambda, const std::vector<Point>& samples,
                              PinchSide side);

/// ζ = [grad f, ξ] satisfies ∇_U ζ = |grad f|² U when
/// grad f is parallel and ξ is conformal with potential f. Throws
/// PreconditionFailed when Hess f exceeds tol, grad f vanishes, or ξ is not
/// conformal with potential f.
CommutatorReport homothetic_commutator_check(const ChartManifold& m, const Expression& f, const VectorField& xi,
                                             const std::vector<Point>& samples, double tol = 1e-8);

}  // namespace liouville::fields
