#include "liouville/fields/fields.hpp"

#include <cmath>
#include <random>

#include "liouville/errors.hpp"

namespace liouville::fields {

using geometry::local_geometry;
using geometry::LocalGeometry;
using geometry::norm_g;
using geometry::operator_norm_g;

namespace {

std::span<const double> as_span(const Point& p) {
  return {p.data(), static_cast<std::size_t>(p.size())};
}

void require_dim(const ChartManifold& m, const VectorField& xi) {
  if (xi.dim() != m.dim()) {
    throw ArityError("vector field has " + std::to_string(xi.dim()) + " components, manifold " + m.name() +
                     " has dimension " + std::to_string(m.dim()));
  }
}

void summarize(FieldReport& r) {
  r.sup = 0.0;
  double total = 0.0;
  for (double v : r.residuals) {
    r.sup = std::max(r.sup, v);
    total += v;
  }
  r.mean = r.residuals.empty() ? 0.0 : total / static_cast<double>(r.residuals.size());
  r.pass = r.sup < r.tolerance;
}

Matrix nabla(const LocalGeometry& geo, const symbolic::JetEvaluator::Jet& jet, int d) {
  Matrix n(d, d);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      double acc = jet.d(k, i);
      for (int l = 0; l < d; ++l) acc += geo.christoffel(k, i, l) * jet.value(l);
      n(k, i) = acc;
    }
  }
  return n;
}

Matrix lie_from(const Matrix& g, const Matrix& n) {
  // g(∇_i ξ, ∂_j) + g(∇_j ξ, ∂_i)
  const Matrix a = n.transpose() * g;
  return a + a.transpose();
}

}  // namespace

VectorField::VectorField(std::vector<Expression> components, int dim, std::optional<Expression> potential)
    : dim_(dim), jets_(std::move(components), dim), potential_(std::move(potential)) {
  if (static_cast<int>(jets_.functions().size()) != dim) {
    throw ValidationError("vector field needs " + std::to_string(dim) + " components, got " +
                              std::to_string(jets_.functions().size()),
                          "components");
  }
  for (const auto& c : jets_.functions()) {
    if (c.max_variable() >= dim) {
      throw ValidationError("component " + c.to_string() + " uses a coordinate beyond dimension " +
                                std::to_string(dim),
                            "components");
    }
  }
}

Vector VectorField::value(const Point& p) const {
  const auto jet = jets_.eval(as_span(p), 0);
  Vector v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = jet.value(i);
  return v;
}

VectorField VectorField::negated() const {
  std::vector<Expression> neg;
  for (const auto& c : components()) neg.push_back(-c);
  std::optional<Expression> pot;
  if (potential_) pot = -*potential_;
  return VectorField(std::move(neg), dim_, pot);
}

std::string SolitonSpec::type() const {
  if (lambda > 0.0) return "shrinking";
  if (lambda < 0.0) return "expanding";
  return "steady";
}

std::string to_string(ConformalKind k) {
  switch (k) {
    case ConformalKind::Killing: return "killing";
    case ConformalKind::Homothetic: return "homothetic";
    case ConformalKind::Conformal: return "conformal";
    case ConformalKind::None: return "none";
  }
  return "none";
}

VectorField position_field(int dim) {
  std::vector<Expression> c;
  for (int i = 0; i < dim; ++i) c.push_back(Expression::variable(i));
  return VectorField(std::move(c), dim, Expression::constant(1.0));
}

VectorField rotation_field(int dim) {
  if (dim < 2) throw ValidationError("rotation field needs dimension >= 2", "dim");
  std::vector<Expression> c(static_cast<std::size_t>(dim), Expression::constant(0.0));
  c[0] = -Expression::variable(1);
  c[1] = Expression::variable(0);
  return VectorField(std::move(c), dim, Expression::constant(0.0));
}

VectorField coordinate_field(int dim, int axis) {
  std::vector<Expression> c(static_cast<std::size_t>(dim), Expression::constant(0.0));
  c[static_cast<std::size_t>(axis)] = Expression::constant(1.0);
  return VectorField(std::move(c), dim);
}

VectorField special_conformal_field(const std::vector<double>& a) {
  const int dim = static_cast<int>(a.size());
  Expression xa = Expression::constant(0.0);
  Expression r2 = Expression::constant(0.0);
  for (int i = 0; i < dim; ++i) {
    const Expression x = Expression::variable(i);
    xa = xa + Expression::constant(a[static_cast<std::size_t>(i)]) * x;
    r2 = r2 + x * x;
  }
  std::vector<Expression> c;
  for (int i = 0; i < dim; ++i) {
    c.push_back(xa * Expression::variable(i) -
                Expression::constant(0.5 * a[static_cast<std::size_t>(i)]) * r2);
  }
  return VectorField(std::move(c), dim, xa);
}

std::vector<Expression> gradient_expr(const ChartManifold& m, const Expression& f) {
  const auto& inv = m.inverse_metric_expr();
  std::vector<Expression> out;
  for (int i = 0; i < m.dim(); ++i) {
    Expression acc = Expression::constant(0.0);
    for (int j = 0; j < m.dim(); ++j) acc = acc + inv(i, j) * f.derive(j);
    out.push_back(acc);
  }
  return out;
}

std::vector<Expression> lie_bracket(const std::vector<Expression>& v, const std::vector<Expression>& w) {
  if (v.size() != w.size()) throw ArityError("lie bracket of fields with different dimensions");
  std::vector<Expression> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Expression acc = Expression::constant(0.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
      acc = acc + v[j] * w[i].derive(static_cast<int>(j)) - w[j] * v[i].derive(static_cast<int>(j));
    }
    out.push_back(acc);
  }
  return out;
}

SolitonSpec gradient_soliton(const ChartManifold& m, const Expression& f, double lambda) {
  return SolitonSpec{VectorField(gradient_expr(m, f), m.dim()), lambda, f};
}

Matrix covariant_derivative_at(const ChartManifold& m, const VectorField& xi, const Point& p) {
  require_dim(m, xi);
  const LocalGeometry geo = local_geometry(m, p, 1);
  return nabla(geo, xi.jets().eval(as_span(p), 1), m.dim());
}

Matrix lie_derivative_metric_at(const ChartManifold& m, const VectorField& xi, const Point& p) {
  require_dim(m, xi);
  const LocalGeometry geo = local_geometry(m, p, 1);
  return lie_from(geo.metric.g, nabla(geo, xi.jets().eval(as_span(p), 1), m.dim()));
}

double conformal_potential_at(const ChartManifold& m, const VectorField& xi, const Point& p) {
  require_dim(m, xi);
  const LocalGeometry geo = local_geometry(m, p, 1);
  const Matrix lie = lie_from(geo.metric.g, nabla(geo, xi.jets().eval(as_span(p), 1), m.dim()));
  return geometry::frame_trace(geo.frame, lie) / (2.0 * m.dim());
}

ConformalClassification classify_conformal(const ChartManifold& m, const VectorField& xi,
                                           const std::vector<Point>& samples, const ClassifyOptions& options) {
  require_dim(m, xi);
  if (samples.size() < 2) {
    throw EmptySampleSet("conformal classification needs at least 2 samples, got " +
                         std::to_string(samples.size()));
  }
  ConformalClassification out;
  double sum = 0.0;
  double max_abs = 0.0;
  for (const auto& p : samples) {
    const LocalGeometry geo = local_geometry(m, p, 1);
    const Matrix lie = lie_from(geo.metric.g, nabla(geo, xi.jets().eval(as_span(p), 1), m.dim()));
    const double f = geometry::frame_trace(geo.frame, lie) / (2.0 * m.dim());
    out.potential.push_back(f);
    out.residual = std::max(out.residual, operator_norm_g(geo.frame, lie - 2.0 * f * geo.metric.g));
    sum += f;
    max_abs = std::max(max_abs, std::abs(f));
  }
  const double n = static_cast<double>(samples.size());
  out.potential_mean = sum / n;
  double var = 0.0;
  for (double f : out.potential) var += (f - out.potential_mean) * (f - out.potential_mean);
  out.potential_variance = var / n;

  if (!(out.residual < options.tol)) {
    out.kind = ConformalKind::None;
  } else if (max_abs < options.tol) {
    out.kind = ConformalKind::Killing;
  } else if (out.potential_variance < options.homothety_tol * (1.0 + std::abs(out.potential_mean))) {
    out.kind = ConformalKind::Homothetic;
    out.homothety = out.potential_mean;
  } else {
    out.kind = ConformalKind::Conformal;
  }
  return out;
}

Matrix soliton_residual_at(const ChartManifold& m, const SolitonSpec& s, const Point& p) {
  require_dim(m, s.field);
  const LocalGeometry geo = local_geometry(m, p, 2);
  const Matrix lie = lie_from(geo.metric.g, nabla(geo, s.field.jets().eval(as_span(p), 1), m.dim()));
  return geo.curvature.ricci + 0.5 * lie - s.lambda * geo.metric.g;
}

Matrix gradient_soliton_residual_at(const ChartManifold& m, const Expression& f, double lambda, const Point& p) {
  const LocalGeometry geo = local_geometry(m, p, 2);
  const geometry::ScalarField field(f, m.dim());
  return geo.curvature.ricci + geometry::hessian_at(m, field, p) - lambda * geo.metric.g;
}

FieldReport check_soliton(const ChartManifold& m, const SolitonSpec& s, const std::vector<Point>& samples,
                          double tol) {
  require_dim(m, s.field);
  if (samples.empty()) throw EmptySampleSet("soliton check needs samples");
  FieldReport r;
  r.check = "soliton";
  r.tolerance = tol;
  r.lambda = s.lambda;
  std::optional<geometry::ScalarField> pot;
  if (s.potential) pot.emplace(*s.potential, m.dim());
  for (const auto& p : samples) {
    if (pot) {
      const Vector grad = geometry::gradient_at(m, *pot, p);
      const Vector diff = s.field.value(p) - grad;
      if (diff.cwiseAbs().maxCoeff() > 1e-10 * (1.0 + grad.cwiseAbs().maxCoeff())) {
        throw ValidationError("soliton field differs from grad f by " +
                                  std::to_string(diff.cwiseAbs().maxCoeff()),
                              "potential");
      }
    }
    const LocalGeometry geo = local_geometry(m, p, 2);
    r.residuals.push_back(operator_norm_g(geo.frame, soliton_residual_at(m, s, p)));
  }
  summarize(r);
  r.verdict = r.pass ? s.type() + " soliton" : "not a soliton";
  return r;
}

Vector jacobi_type_residual_at(const ChartManifold& m, const VectorField& xi, const Point& p, const Vector& x,
                               const std::optional<Matrix>& extension) {
  require_dim(m, xi);
  const int d = m.dim();
  if (x.size() != d) throw ArityError("direction has wrong dimension");
  const LocalGeometry geo = local_geometry(m, p, 2);
  const auto jet = xi.jets().eval(as_span(p), 2);
  const Matrix a = extension ? *extension : Matrix::Zero(d, d);
  const Matrix n = nabla(geo, jet, d);
  Vector xi_v(d);
  for (int k = 0; k < d; ++k) xi_v[k] = jet.value(k);

  const Vector w = n * x;
  // ∂_j W^k
  Matrix dw = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i) {
        double dn = jet.d(k, j, i);
        for (int l = 0; l < d; ++l) {
          dn += geo.christoffel_derivative(j, k, i, l) * xi_v[l] + geo.christoffel(k, i, l) * jet.d(l, j);
        }
        acc += a(i, j) * n(k, i) + x[i] * dn;
      }
      dw(k, j) = acc;
    }
  }
  const Vector nabla_x_w = dw * x + geo.christoffel.contract(x, w);
  const Vector nabla_x_x = a * x + geo.christoffel.contract(x, x);
  return nabla_x_w - n * nabla_x_x + geo.curvature.riemann.apply(xi_v, x, x);
}

FieldReport check_jacobi_type(const ChartManifold& m, const VectorField& xi, const std::vector<Point>& samples,
                              int directions, std::uint64_t seed, double tol) {
  require_dim(m, xi);
  if (samples.empty()) throw EmptySampleSet("jacobi-type check needs samples");
  FieldReport r;
  r.check = "jacobi-type";
  r.tolerance = tol;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (const auto& p : samples) {
    const Matrix g = geometry::metric_at(m, p).g;
    double worst = 0.0;
    for (int n = 0; n < directions; ++n) {
      Vector x(m.dim());
      for (int i = 0; i < m.dim(); ++i) x[i] = normal(rng);
      x /= norm_g(g, x);
      worst = std::max(worst, norm_g(g, jacobi_type_residual_at(m, xi, p, x)));
    }
    r.residuals.push_back(worst);
  }
  summarize(r);
  r.verdict = r.pass ? "jacobi-type" : "not jacobi-type";
  return r;
}

PinchReport ricci_pinch_check(const ChartManifold& m, double lambda, const std::vector<Point>& samples,
                              PinchSide side) {
  if (samples.empty()) throw EmptySampleSet("ricci pinching check needs samples");
  PinchReport r;
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  r.max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    const LocalGeometry geo = local_geometry(m, p, 2);
    const Vector ev = geometry::relative_eigenvalues(geo.frame, geo.curvature.ricci);
    r.min_eigenvalue = std::min(r.min_eigenvalue, ev.minCoeff());
    r.max_eigenvalue = std::max(r.max_eigenvalue, ev.maxCoeff());
  }
  r.margin = side == PinchSide::Above ? r.min_eigenvalue - lambda : lambda - r.max_eigenvalue;
  r.holds = r.margin > 0.0;
  return r;
}

CommutatorReport homothetic_commutator_check(const ChartManifold& m, const Expression& f, const VectorField& xi,
                                             const std::vector<Point>& samples, double tol) {
  require_dim(m, xi);
  if (samples.empty()) throw EmptySampleSet("commutator check needs samples");
  const geometry::ScalarField field(f, m.dim());
  double grad_max = 0.0;
  for (const auto& p : samples) {
    const LocalGeometry geo = local_geometry(m, p, 0);
    const double hess = operator_norm_g(geo.frame, geometry::hessian_at(m, field, p));
    if (!(hess < tol)) {
      throw PreconditionFailed("grad f is not parallel: |Hess f| = " + std::to_string(hess));
    }
    grad_max = std::max(grad_max, norm_g(geo.metric.g, geometry::gradient_at(m, field, p)));
  }
  if (!(grad_max > tol)) throw PreconditionFailed("grad f vanishes on the samples");
  const ConformalClassification cls = classify_conformal(m, xi, samples);
  if (cls.kind != ConformalKind::Conformal) {
    throw PreconditionFailed("field must be conformal with non-constant potential, classified as " +
                             to_string(cls.kind));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double fp = f.eval(as_span(samples[i]));
    if (!(std::abs(cls.potential[i] - fp) < tol * (1.0 + std::abs(fp)))) {
      throw PreconditionFailed("potential of the field differs from f at sample " + std::to_string(i));
    }
  }

  CommutatorReport r;
  r.zeta = lie_bracket(gradient_expr(m, f), xi.components());
  const symbolic::CachedJets zeta(r.zeta, m.dim());
  const int d = m.dim();
  double total = 0.0;
  double grad_total = 0.0;
  for (const auto& p : samples) {
    const LocalGeometry geo = local_geometry(m, p, 1);
    const auto jet = zeta.eval(as_span(p), 1);
    const Matrix n = nabla(geo, jet, d);
    const Vector grad = geometry::gradient_at(m, field, p);
    const double g2 = grad.dot(geo.metric.g * grad);
    grad_total += g2;
    double worst = 0.0;
    for (int u = 0; u < d; ++u) {
      Vector diff = n.col(u);
      diff[u] -= g2;
      worst = std::max(worst, norm_g(geo.metric.g, diff));
    }
    r.sup = std::max(r.sup, worst);
    total += worst;
  }
  r.mean = total / static_cast<double>(samples.size());
  r.grad_norm_sq_mean = grad_total / static_cast<double>(samples.size());
  r.zeta_class = classify_conformal(m, VectorField(r.zeta, d), samples);
  return r;
}

}  // namespace liouville::fields
