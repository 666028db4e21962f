#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "liouville/fields/fields.hpp"
#include "liouville/maps/maps.hpp"

namespace liouville::verifier {

using fields::SolitonSpec;
using fields::VectorField;
using geometry::ChartManifold;
using geometry::Matrix;
using geometry::Point;
using geometry::Vector;
using maps::SmoothMap;
using symbolic::Expression;

struct IdentityRow {
  std::size_t sample = 0;
  Point point;
  /// Empty for scalar identities, otherwise the tensor component, e.g. "01".
  std::string component;
  double left = 0.0;
  double right = 0.0;
  double residual = 0.0;
};

/// Pointwise comparison of two independently computed sides.
struct IdentityReport {
  std::string name;
  std::vector<IdentityRow> rows;
  double sup = 0.0;
  double mean = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  void add(std::size_t sample, const Point& p, double left, double right, std::string component = {});
  /// Computes sup, mean and pass from the rows.
  void finish();
};

/// One row per sample: identity, sample, point coordinates, component, left, right, residual.
void write_csv(std::ostream& os, const std::vector<IdentityReport>& reports);

struct IdentityOptions {
  double tolerance = 1e-8;
  /// Tolerance for the soliton / conformal / Jacobi-type preconditions.
  double precondition_tolerance = 1e-8;
  /// Require the Jacobi-type precondition for the biharmonic chain. When
  /// false the chain carries an explicit Jacobi-type defect term instead.
  bool strict = true;
};

/// div ω = h(ξ∘φ, τ) + (f∘φ)|dφ|² with ω(X) = h(ξ∘φ, dφ X). Uses the declared
/// potential of ξ when present, otherwise the trace estimate.
IdentityReport conformal_divergence_identity(const SmoothMap& phi, const VectorField& xi,
                                             const std::vector<Point>& samples, const IdentityOptions& options = {});

/// div ω = h(ξ∘φ, τ) + λ|dφ|² − Σ Ric(dφ e_a, dφ e_a).
IdentityReport soliton_divergence_identity(const SmoothMap& phi, const SolitonSpec& s,
                                           const std::vector<Point>& samples, const IdentityOptions& options = {});

/// Chain for η(X) = h(ξ∘φ, ∇^φ_X τ), one report per step, the final step last.
/// Step names: expand, bitension, product-rule, curvature-symmetry,
/// swap-curvature, jacobi-type, soliton.
std::vector<IdentityReport> biharmonic_divergence_identity(const SmoothMap& phi, const SolitonSpec& s,
                                                           const std::vector<Point>& samples,
                                                           const IdentityOptions& options = {1e-6, 1e-8, true});

/// Embedded hypersurface Y: U ⊂ ℝ^{n−1} -> ambient chart with an ambient field ξ̄.
struct HypersurfaceSpec {
  ChartManifold ambient;
  std::vector<Expression> embedding;
  VectorField field;
  /// Parameter box for the hypersurface chart.
  geometry::Box parameter_box;
};

struct HypersurfacePoint {
  Point parameter;
  Point position;
  Matrix induced_metric;
  Matrix second_fundamental_form;  // b_ab with B = b η
  Vector normal;
  Vector tangential_field;  // ξ^a
  double normal_component = 0.0;  // f
  double rho = 0.0;
  Vector mean_curvature;  // H in ambient coordinates
};

struct HypersurfaceReport {
  std::vector<HypersurfacePoint> points;
  /// umbilicity (b = ρh), decomposition (ξ̄ = ξ^a T_a + fη),
  /// lie-derivative (𝓛_ξ h = 2fρh), normal-component (fρ = h̄(ξ̄, H))
  std::vector<IdentityReport> checks;
};

/// The unit normal is oriented so that det(T_1, ..., T_{n−1}, η) > 0.
/// Throws RankDeficient when the embedding differential is not injective and
/// PreconditionFailed when ξ̄ is not Killing on the embedded samples.
HypersurfaceReport hypersurface_decompose(const HypersurfaceSpec& hs, const std::vector<Point>& samples,
                                          double tolerance = 1e-8);

/// Induced chart (n−1 dimensional) with metric h = Y*h̄.
ChartManifold induced_manifold(const HypersurfaceSpec& hs, const std::string& name = "hypersurface");

}  // namespace liouville::verifier
