#include "liouville/verifier/verifier.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "liouville/errors.hpp"

namespace liouville::verifier {

using geometry::CovariantTensorField;
using maps::MapPoint;

namespace {

std::span<const double> as_span(const Point& p) {
  return {p.data(), static_cast<std::size_t>(p.size())};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_target_field(const SmoothMap& phi, const VectorField& xi) {
  if (xi.dim() != phi.target().dim()) {
    throw ArityError("field dimension " + std::to_string(xi.dim()) + " does not match target " +
                     phi.target().name());
  }
}

std::vector<Point> images(const SmoothMap& phi, const std::vector<Point>& samples) {
  std::vector<Point> out;
  for (const auto& p : samples) out.push_back(maps::differential_at(phi, p, 1).value);
  return out;
}

std::vector<Expression> compose(const std::vector<Expression>& target_exprs, const SmoothMap& phi) {
  std::vector<Expression> out;
  for (const auto& e : target_exprs) out.push_back(symbolic::substitute(e, phi.components()));
  return out;
}

/// Symbolic ingredients shared by the one-forms on the left-hand sides.
struct Composite {
  int m = 0;
  int n = 0;
  const std::vector<Expression>* metric = nullptr;       // h∘φ, n×n
  const std::vector<Expression>* christoffel = nullptr;  // Γ∘φ
  std::vector<std::vector<Expression>> dphi;             // [α][i]

  explicit Composite(const SmoothMap& phi)
      : m(phi.domain().dim()), n(phi.target().dim()), metric(&phi.composed_metric()),
        christoffel(&phi.composed_christoffel()) {
    for (int a = 0; a < n; ++a) {
      dphi.emplace_back();
      for (int i = 0; i < m; ++i) dphi.back().push_back(phi.components()[static_cast<std::size_t>(a)].derive(i));
    }
  }

  const Expression& h(int a, int b) const { return (*metric)[static_cast<std::size_t>(a * n + b)]; }
  const Expression& gamma(int a, int b, int c) const {
    return (*christoffel)[static_cast<std::size_t>((a * n + b) * n + c)];
  }

  Expression inner(const std::vector<Expression>& v, const std::vector<Expression>& w) const {
    Expression acc = Expression::constant(0.0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (h(a, b).is_zero()) continue;
        acc = acc + h(a, b) * v[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(b)];
      }
    }
    return acc;
  }

  /// ∇^φ_{∂_i} v
  std::vector<Expression> pullback(const std::vector<Expression>& v, int i) const {
    std::vector<Expression> out;
    for (int a = 0; a < n; ++a) {
      Expression acc = v[static_cast<std::size_t>(a)].derive(i);
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          if (gamma(a, b, c).is_zero()) continue;
          acc = acc + gamma(a, b, c) * dphi[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] *
                          v[static_cast<std::size_t>(c)];
        }
      }
      out.push_back(acc);
    }
    return out;
  }

  std::vector<Expression> column(int i) const {
    std::vector<Expression> out;
    for (int a = 0; a < n; ++a) out.push_back(dphi[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)]);
    return out;
  }
};

double inner(const Matrix& h, const Vector& a, const Vector& b) { return a.dot(h * b); }

Vector frame_vector(const MapPoint& mp, int a) { return mp.domain.frame.row(a).transpose(); }

}  // namespace

void IdentityReport::add(std::size_t sample, const Point& p, double left, double right, std::string component) {
  rows.push_back(IdentityRow{sample, p, std::move(component), left, right, std::abs(left - right)});
}

void IdentityReport::finish() {
  sup = 0.0;
  double total = 0.0;
  bool finite = true;
  for (const auto& r : rows) {
    if (!std::isfinite(r.residual)) finite = false;
    sup = std::max(sup, r.residual);
    total += r.residual;
  }
  mean = rows.empty() ? 0.0 : total / static_cast<double>(rows.size());
  pass = finite && !rows.empty() && sup < tolerance;
}

void write_csv(std::ostream& os, const std::vector<IdentityReport>& reports) {
  os << "identity,sample,point,component,left,right,residual\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      os << rep.name << ',' << r.sample << ',';
      for (int i = 0; i < r.point.size(); ++i) os << (i ? " " : "") << fmt(r.point[i]);
      os << ',' << r.component << ',' << fmt(r.left) << ',' << fmt(r.right) << ',' << fmt(r.residual) << '\n';
    }
  }
}

IdentityReport conformal_divergence_identity(const SmoothMap& phi, const VectorField& xi,
                                             const std::vector<Point>& samples, const IdentityOptions& options) {
  require_target_field(phi, xi);
  if (samples.empty()) throw EmptySampleSet("conformal identity needs samples");
  const auto imgs = images(phi, samples);
  if (imgs.size() >= 2) {
    const auto cls = fields::classify_conformal(phi.target(), xi, imgs, {options.precondition_tolerance, 1e-10});
    if (cls.kind == fields::ConformalKind::None) {
      throw PreconditionFailed("field is not conformal on the image samples (residual " + fmt(cls.residual) + ")");
    }
  }

  const Composite c(phi);
  const auto xi_phi = compose(xi.components(), phi);
  std::vector<Expression> omega;
  for (int i = 0; i < c.m; ++i) omega.push_back(c.inner(xi_phi, c.column(i)));
  const CovariantTensorField omega_field(1, c.m, omega);

  IdentityReport rep;
  rep.name = "conformal";
  rep.tolerance = options.tolerance;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Point& p = samples[s];
    const double left = geometry::divergence_tensor_at(phi.domain(), omega_field, p)[0];
    const MapPoint mp = maps::map_point(phi, p, 2);
    const double f = xi.potential() ? xi.potential()->eval(as_span(mp.image))
                                    : fields::conformal_potential_at(phi.target(), xi, mp.image);
    const double right = inner(mp.target.metric.g, xi.value(mp.image), maps::tension(mp)) + f * maps::energy_density(mp);
    rep.add(s, p, left, right);
  }
  rep.finish();
  return rep;
}

IdentityReport soliton_divergence_identity(const SmoothMap& phi, const SolitonSpec& s,
                                           const std::vector<Point>& samples, const IdentityOptions& options) {
  require_target_field(phi, s.field);
  if (samples.empty()) throw EmptySampleSet("soliton identity needs samples");
  const auto sol = fields::check_soliton(phi.target(), s, images(phi, samples), options.precondition_tolerance);
  if (!sol.pass) throw PreconditionFailed("soliton residual " + fmt(sol.sup) + " exceeds tolerance on the image");

  const Composite c(phi);
  const auto xi_phi = compose(s.field.components(), phi);
  std::vector<Expression> omega;
  for (int i = 0; i < c.m; ++i) omega.push_back(c.inner(xi_phi, c.column(i)));
  const CovariantTensorField omega_field(1, c.m, omega);

  IdentityReport rep;
  rep.name = "soliton";
  rep.tolerance = options.tolerance;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Point& p = samples[k];
    const double left = geometry::divergence_tensor_at(phi.domain(), omega_field, p)[0];
    const MapPoint mp = maps::map_point(phi, p, 2);
    double ric = 0.0;
    for (int a = 0; a < mp.domain.frame.rows(); ++a) {
      const Vector x = mp.differential * frame_vector(mp, a);
      ric += x.dot(mp.target.curvature.ricci * x);
    }
    const double right = inner(mp.target.metric.g, s.field.value(mp.image), maps::tension(mp)) +
                         s.lambda * maps::energy_density(mp) - ric;
    rep.add(k, p, left, right);
  }
  rep.finish();
  return rep;
}

std::vector<IdentityReport> biharmonic_divergence_identity(const SmoothMap& phi, const SolitonSpec& s,
                                                           const std::vector<Point>& samples,
                                                           const IdentityOptions& options) {
  require_target_field(phi, s.field);
  if (samples.empty()) throw EmptySampleSet("biharmonic identity needs samples");
  const auto imgs = images(phi, samples);
  const auto sol = fields::check_soliton(phi.target(), s, imgs, options.precondition_tolerance);
  if (!sol.pass) throw PreconditionFailed("soliton residual " + fmt(sol.sup) + " exceeds tolerance on the image");
  if (options.strict) {
    const auto jac = fields::check_jacobi_type(phi.target(), s.field, imgs, 3, 7, options.precondition_tolerance);
    if (!jac.pass) {
      throw PreconditionFailed("field is not Jacobi-type on the image (residual " + fmt(jac.sup) + ")");
    }
  }

  const Composite c(phi);
  const auto& tau = phi.tension_expr();
  const auto xi_phi = compose(s.field.components(), phi);
  std::vector<Expression> eta, omega2;
  for (int i = 0; i < c.m; ++i) {
    eta.push_back(c.inner(xi_phi, c.pullback(tau, i)));
    omega2.push_back(c.inner(c.pullback(xi_phi, i), tau));
  }
  const CovariantTensorField eta_field(1, c.m, eta);
  const CovariantTensorField omega2_field(1, c.m, omega2);
  const symbolic::CachedJets tau_jets(tau, c.m);
  const symbolic::CachedJets xi_jets(xi_phi, c.m);

  const char* names[] = {"expand", "bitension", "product-rule", "curvature-symmetry",
                         "swap-curvature", "jacobi-type", "soliton"};
  std::vector<IdentityReport> reps(7);
  for (std::size_t k = 0; k < reps.size(); ++k) {
    reps[k].name = std::string("biharmonic:") + names[k];
    reps[k].tolerance = options.tolerance;
  }

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Point& p = samples[k];
    const MapPoint mp = maps::map_point(phi, p, 2);
    const Matrix& h = mp.target.metric.g;
    const auto tj = tau_jets.eval(as_span(p), 2);
    const auto xj = xi_jets.eval(as_span(p), 2);
    Vector t(c.n);
    for (int a = 0; a < c.n; ++a) t[a] = tj.value(a);
    const Vector xv = s.field.value(mp.image);
    const Matrix nxi = fields::covariant_derivative_at(phi.target(), s.field, mp.image);

    const double div_eta = geometry::divergence_tensor_at(phi.domain(), eta_field, p)[0];
    const double div_omega2 = geometry::divergence_tensor_at(phi.domain(), omega2_field, p)[0];

    const Matrix nabla_tau = maps::pullback_connection(mp, tj);
    double a_term = 0.0;
    Vector jac = Vector::Zero(c.n);
    for (int e = 0; e < mp.domain.frame.rows(); ++e) {
      const Vector x = mp.differential * frame_vector(mp, e);
      a_term += inner(h, nxi * x, nabla_tau * frame_vector(mp, e));
      jac += fields::jacobi_type_residual_at(phi.target(), s.field, mp.image, x);
    }
    const Vector lap_tau = maps::rough_laplacian(mp, tj);
    const Vector lap_xi = maps::rough_laplacian(mp, xj);
    const Vector tau2 = maps::jacobi_operator(mp, tj);
    const Vector r_tau = maps::curvature_trace(mp, t);
    const Vector r_xi = maps::curvature_trace(mp, xv);
    const double xi_tau2 = inner(h, xv, tau2);
    const double jac_tau = inner(h, jac, t);

    reps[0].add(k, p, div_eta, a_term + inner(h, xv, lap_tau));
    reps[1].add(k, p, div_eta, a_term - inner(h, r_tau, xv) - xi_tau2);
    reps[2].add(k, p, a_term, div_omega2 - inner(h, lap_xi, t));
    reps[3].add(k, p, inner(h, r_tau, xv), inner(h, r_xi, t));
    reps[4].add(k, p, div_eta, div_omega2 - inner(h, lap_xi, t) - inner(h, r_xi, t) - xi_tau2);
    reps[5].add(k, p, div_eta, div_omega2 - inner(h, nxi * t, t) - jac_tau - xi_tau2);
    reps[6].add(k, p, div_eta,
                div_omega2 - s.lambda * inner(h, t, t) + t.dot(mp.target.curvature.ricci * t) - jac_tau - xi_tau2);
  }
  for (auto& r : reps) r.finish();
  return reps;
}

ChartManifold induced_manifold(const HypersurfaceSpec& hs, const std::string& name) {
  const int n = hs.ambient.dim();
  const int k = n - 1;
  if (static_cast<int>(hs.embedding.size()) != n) {
    throw ValidationError("embedding needs " + std::to_string(n) + " components", "embedding");
  }
  std::vector<Expression> hbar;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) hbar.push_back(symbolic::substitute(hs.ambient.g(a, b), hs.embedding));
  }
  symbolic::ExprMatrix h(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      Expression acc = Expression::constant(0.0);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const Expression& g = hbar[static_cast<std::size_t>(a * n + b)];
          if (g.is_zero()) continue;
          acc = acc + g * hs.embedding[static_cast<std::size_t>(a)].derive(i) *
                          hs.embedding[static_cast<std::size_t>(b)].derive(j);
        }
      }
      h(i, j) = acc;
    }
  }
  return ChartManifold(name, h, {hs.parameter_box, geometry::Box::unbounded(k), {}});
}

HypersurfaceReport hypersurface_decompose(const HypersurfaceSpec& hs, const std::vector<Point>& samples,
                                          double tolerance) {
  const int n = hs.ambient.dim();
  const int k = n - 1;
  if (hs.field.dim() != n) throw ArityError("ambient field has wrong dimension");
  if (samples.empty()) throw EmptySampleSet("hypersurface decomposition needs samples");
  for (const auto& e : hs.embedding) {
    if (e.max_variable() >= k) throw ValidationError("embedding uses a coordinate beyond " + std::to_string(k), "embedding");
  }
  const ChartManifold induced = induced_manifold(hs);
  const symbolic::CachedJets y_jets(hs.embedding, k);

  // ξ^a = h^{ab} h̄(ξ̄∘Y, T_b)
  const auto& hinv = induced.inverse_metric_expr();
  std::vector<Expression> xi_bar_y;
  for (const auto& comp : hs.field.components()) xi_bar_y.push_back(symbolic::substitute(comp, hs.embedding));
  std::vector<Expression> cov;
  for (int b = 0; b < k; ++b) {
    Expression acc = Expression::constant(0.0);
    for (int a = 0; a < n; ++a) {
      for (int d = 0; d < n; ++d) {
        const Expression g = symbolic::substitute(hs.ambient.g(a, d), hs.embedding);
        if (g.is_zero()) continue;
        acc = acc + g * xi_bar_y[static_cast<std::size_t>(a)] * hs.embedding[static_cast<std::size_t>(d)].derive(b);
      }
    }
    cov.push_back(acc);
  }
  std::vector<Expression> tangential;
  for (int a = 0; a < k; ++a) {
    Expression acc = Expression::constant(0.0);
    for (int b = 0; b < k; ++b) acc = acc + hinv(a, b) * cov[static_cast<std::size_t>(b)];
    tangential.push_back(acc);
  }
  const VectorField xi(tangential, k);

  HypersurfaceReport out;
  std::vector<Point> positions;
  for (const auto& u : samples) {
    HypersurfacePoint hp;
    hp.parameter = u;
    const auto jet = y_jets.eval(as_span(u), 2);
    hp.position.resize(n);
    Matrix t(n, k);
    for (int a = 0; a < n; ++a) {
      hp.position[a] = jet.value(a);
      for (int i = 0; i < k; ++i) t(a, i) = jet.d(a, i);
    }
    const auto amb = geometry::local_geometry(hs.ambient, hp.position, 1);
    const Matrix& hbar = amb.metric.g;
    hp.induced_metric = t.transpose() * hbar * t;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hp.induced_metric, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()))) {
      throw RankDeficient("embedding differential is not injective at parameter sample " +
                          std::to_string(out.points.size()));
    }
    // ν_c = det[T | e_c], so ν(w) = det[T | w]
    Vector nu(n);
    for (int col = 0; col < n; ++col) {
      Matrix mtx(n, n);
      mtx.leftCols(k) = t;
      mtx.col(k) = Vector::Unit(n, col);
      nu[col] = mtx.determinant();
    }
    const Vector raised = amb.metric.inverse * nu;
    hp.normal = raised / std::sqrt(nu.dot(raised));
    hp.second_fundamental_form.resize(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        Vector acc(n);
        for (int a = 0; a < n; ++a) acc[a] = jet.d(a, i, j);
        acc += amb.christoffel.contract(t.col(i), t.col(j));
        hp.second_fundamental_form(i, j) = acc.dot(hbar * hp.normal);
      }
    }
    const Matrix hinv_num = hp.induced_metric.inverse();
    hp.rho = (hinv_num * hp.second_fundamental_form).trace() / static_cast<double>(k);
    hp.mean_curvature = hp.rho * hp.normal;
    const Vector xbar = hs.field.value(hp.position);
    hp.normal_component = xbar.dot(hbar * hp.normal);
    hp.tangential_field = xi.value(u);
    positions.push_back(hp.position);
    out.points.push_back(std::move(hp));
  }

  if (positions.size() >= 2) {
    const auto cls = fields::classify_conformal(hs.ambient, hs.field, positions, {tolerance, 1e-10});
    if (cls.kind != fields::ConformalKind::Killing) {
      throw PreconditionFailed("ambient field is not Killing (classified " + fields::to_string(cls.kind) + ")");
    }
  }

  IdentityReport umb, dec, lie, nrm;
  umb.name = "hypersurface:umbilicity";
  dec.name = "hypersurface:decomposition";
  lie.name = "hypersurface:lie-derivative";
  nrm.name = "hypersurface:normal-component";
  for (auto* r : {&umb, &dec, &lie, &nrm}) r->tolerance = tolerance;
  for (std::size_t s = 0; s < out.points.size(); ++s) {
    const auto& hp = out.points[s];
    const Point& u = hp.parameter;
    const auto jet = y_jets.eval(as_span(u), 1);
    Matrix t(n, k);
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < k; ++i) t(a, i) = jet.d(a, i);
    }
    const Matrix lie_h = fields::lie_derivative_metric_at(induced, xi, u);
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        const std::string comp = std::to_string(i) + std::to_string(j);
        umb.add(s, u, hp.second_fundamental_form(i, j), hp.rho * hp.induced_metric(i, j), comp);
        lie.add(s, u, lie_h(i, j), 2.0 * hp.normal_component * hp.rho * hp.induced_metric(i, j), comp);
      }
    }
    const Vector xbar = hs.field.value(hp.position);
    const Vector recon = t * hp.tangential_field + hp.normal_component * hp.normal;
    for (int a = 0; a < n; ++a) dec.add(s, u, xbar[a], recon[a], std::to_string(a));
    const auto amb = geometry::metric_at(hs.ambient, hp.position);
    nrm.add(s, u, hp.normal_component * hp.rho, xbar.dot(amb.g * hp.mean_curvature));
  }
  for (auto* r : {&umb, &dec, &lie, &nrm}) {
    r->finish();
    out.checks.push_back(*r);
  }
  return out;
}

}  // namespace liouville::verifier
