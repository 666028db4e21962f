#include <doctest.h>

#include <cmath>
#include <random>

#include "liouville/errors.hpp"
#include "liouville/fields/fields.hpp"
#include "liouville/geometry/catalog.hpp"
#include "liouville/geometry/sampling.hpp"
#include "liouville/symbolic/parser.hpp"
#include "support/fd_oracle.hpp"

using namespace liouville;
using namespace liouville::fields;
using geometry::catalog_manifold;
using geometry::random_points;

namespace {

Expression ex(const std::string& s, int d = 2) { return symbolic::parse_expression(s, d); }

VectorField field(std::initializer_list<const char*> comps, int d = 2) {
  std::vector<Expression> c;
  for (const char* s : comps) c.push_back(ex(s, d));
  return VectorField(std::move(c), d);
}

Point pt(double a, double b) {
  Point p(2);
  p << a, b;
  return p;
}

std::vector<Point> few(const ChartManifold& m, int n = 40, std::uint64_t seed = 11) {
  return random_points(m.sample_box(), n, seed);
}

double maxabs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

testing::MetricFn metric_fn(const ChartManifold& m) {
  return [m](const Eigen::VectorXd& p) {
    Eigen::MatrixXd g(m.dim(), m.dim());
    for (int i = 0; i < m.dim(); ++i)
      for (int j = 0; j < m.dim(); ++j) g(i, j) = m.g(i, j).eval({p.data(), static_cast<std::size_t>(m.dim())});
    return g;
  };
}

// ∇_X∇_Xξ − ∇_{∇_X X}ξ + R(ξ,X)X from finite differences of g and ξ only.
Vector fd_jacobi(const ChartManifold& m, const VectorField& xi, const Point& p, const Vector& x) {
  const int d = m.dim();
  const double h = 1e-4;
  auto g = metric_fn(m);
  auto xi_at = [&](const Point& q) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = xi.components()[static_cast<std::size_t>(i)].eval({q.data(), static_cast<std::size_t>(d)});
    return v;
  };
  auto gamma_apply = [&](const std::vector<double>& gam, const Vector& a, const Vector& b) {
    Vector out = Vector::Zero(d);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[k] += gam[static_cast<std::size_t>((k * d + i) * d + j)] * a[i] * b[j];
    return out;
  };
  auto nabla_dir = [&](const Point& q, const Vector& u) {
    Vector dxi = (xi_at(q + h * u) - xi_at(q - h * u)) / (2 * h);
    return Vector(dxi + gamma_apply(testing::fd_christoffel(g, q, h), u, xi_at(q)));
  };
  const auto gam = testing::fd_christoffel(g, p, h);
  const Vector dw = (nabla_dir(p + h * x, x) - nabla_dir(p - h * x, x)) / (2 * h);
  const Vector w = nabla_dir(p, x);
  const Vector nxx = gamma_apply(gam, x, x);
  auto fd = testing::fd_geometry(g, p, h);
  const Vector xv = xi_at(p);
  Vector r = Vector::Zero(d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) r[l] += fd.rm(l, i, j, k) * xv[i] * x[j] * x[k];
  return dw + gamma_apply(gam, x, w) - nabla_dir(p, nxx) + r;
}

}  // namespace

TEST_CASE("lie derivative of the metric") {
  auto e2 = geometry::euclidean(2);
  auto e3 = geometry::euclidean(3);
  Point p3(3);
  p3 << 0.3, -1.2, 2.0;
  CHECK(maxabs(lie_derivative_metric_at(e3, position_field(3), p3) - 2.0 * Matrix::Identity(3, 3)) < 1e-14);
  CHECK(maxabs(lie_derivative_metric_at(e2, rotation_field(2), pt(0.7, 0.2))) < 1e-14);
  auto sc = special_conformal_field({1.0, 0.0});
  for (const auto& p : few(e2)) {
    CHECK(maxabs(lie_derivative_metric_at(e2, sc, p) - 2.0 * p[0] * Matrix::Identity(2, 2)) < 1e-12);
  }
  CHECK_THROWS_AS(lie_derivative_metric_at(e3, rotation_field(2), p3), ArityError);
  CHECK_THROWS_AS(VectorField({ex("x0")}, 2), ValidationError);
}

TEST_CASE("conformal classification") {
  auto e2 = geometry::euclidean(2);
  auto s = few(e2);
  auto pos = classify_conformal(e2, position_field(2), s);
  CHECK(pos.kind == ConformalKind::Homothetic);
  CHECK(pos.homothety == doctest::Approx(1.0));
  CHECK(classify_conformal(e2, rotation_field(2), s).kind == ConformalKind::Killing);
  auto sc = classify_conformal(e2, special_conformal_field({1.0, 0.0}), s);
  CHECK(sc.kind == ConformalKind::Conformal);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(sc.potential[i] == doctest::Approx(s[i][0]).epsilon(1e-12));
  auto neg = classify_conformal(e2, special_conformal_field({1.0, 0.0}).negated(), s);
  CHECK(neg.kind == ConformalKind::Conformal);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(neg.potential[i] == doctest::Approx(-sc.potential[i]));
  CHECK(classify_conformal(e2, field({"x0^2", "0"}), s).kind == ConformalKind::None);
  CHECK_THROWS_AS(classify_conformal(e2, rotation_field(2), {}), EmptySampleSet);
  CHECK_THROWS_AS(classify_conformal(e2, rotation_field(2), {pt(0, 0)}), EmptySampleSet);

  // cigar: grad f = −2x is conformal with potential −2/(1+r²)
  auto cg = geometry::cigar();
  auto grad = classify_conformal(cg, field({"-2*x0", "-2*x1"}), few(cg));
  CHECK(grad.kind == ConformalKind::Conformal);
  auto cs = few(cg);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    CHECK(grad.potential[i] == doctest::Approx(-2.0 / (1.0 + cs[i].squaredNorm())).epsilon(1e-12));
  }
  auto h = geometry::hyperbolic_halfplane();
  for (auto f : {field({"1", "0"}), field({"x0", "x1"}), field({"(x0^2-x1^2)/2", "x0*x1"})}) {
    CHECK(classify_conformal(h, f, few(h)).kind == ConformalKind::Killing);
  }
}

TEST_CASE("soliton residuals") {
  auto s2 = geometry::sphere_stereo(2);
  SolitonSpec einstein{field({"0", "0"}), 1.0, std::nullopt};
  for (const auto& p : few(s2)) CHECK(maxabs(soliton_residual_at(s2, einstein, p)) < 1e-10);
  CHECK(einstein.type() == "shrinking");

  auto e2 = geometry::euclidean(2);
  SolitonSpec gauss{position_field(2), 1.0, std::nullopt};
  for (const auto& p : few(e2)) CHECK(maxabs(soliton_residual_at(e2, gauss, p)) < 1e-14);
  for (const auto& p : few(e2)) CHECK(maxabs(gradient_soliton_residual_at(e2, ex("(x0^2+x1^2)/2"), 1.0, p)) < 1e-14);
  for (const auto& p : few(s2)) CHECK(maxabs(gradient_soliton_residual_at(s2, ex("3"), 1.0, p)) < 1e-10);

  auto cg = geometry::cigar();
  auto f = ex("-log(1+x0^2+x1^2)");
  auto sol = gradient_soliton(cg, f, 0.0);
  CHECK(sol.type() == "steady");
  for (const auto& p : geometry::sample_points(cg)) {
    const Matrix a = soliton_residual_at(cg, sol, p);
    const Matrix b = gradient_soliton_residual_at(cg, f, 0.0, p);
    CHECK(maxabs(a) < 1e-8);
    CHECK(maxabs(a - b) < 1e-10);
  }
  auto rep = check_soliton(cg, sol, few(cg), 1e-8);
  CHECK(rep.pass);
  CHECK(rep.sup >= rep.mean);
  CHECK(rep.verdict == "steady soliton");

  SolitonSpec wrong{field({"-2*x0", "-x1"}), 0.0, f};
  CHECK_THROWS_AS(check_soliton(cg, wrong, few(cg), 1e-8), ValidationError);
  SolitonSpec literal{field({"-2*x0", "-2*x1"}), 0.0, f};
  CHECK(check_soliton(cg, literal, few(cg), 1e-8).pass);
  SolitonSpec off{field({"-2*x0", "-2*x1"}), 0.5, std::nullopt};
  CHECK_FALSE(check_soliton(cg, off, few(cg), 1e-8).pass);
}

TEST_CASE("soliton residual scales linearly on flat space") {
  auto e2 = geometry::euclidean(2);
  auto xi = field({"x0^2 - x1", "sin(x0)"});
  for (double c : {2.0, -0.5, 3.25}) {
    std::vector<Expression> scaled;
    for (const auto& comp : xi.components()) scaled.push_back(Expression::constant(c) * comp);
    SolitonSpec a{xi, 0.7, std::nullopt};
    SolitonSpec b{VectorField(scaled, 2), c * 0.7, std::nullopt};
    for (const auto& p : few(e2, 10)) CHECK(maxabs(soliton_residual_at(e2, b, p) - c * soliton_residual_at(e2, a, p)) < 1e-12);
  }
}

TEST_CASE("jacobi-type residual") {
  auto e2 = geometry::euclidean(2);
  Vector x0 = Vector::Unit(2, 0);
  CHECK(jacobi_type_residual_at(e2, field({"3*x0-x1+2", "x1+5"}), pt(0.3, 0.4), Vector::Ones(2)).norm() < 1e-14);
  Vector r = jacobi_type_residual_at(e2, field({"x0^2", "0"}), pt(0.3, 0.4), x0);
  CHECK(r[0] == doctest::Approx(2.0));
  CHECK(r[1] == 0.0);

  struct Case {
    std::string manifold;
    VectorField xi;
  };
  std::vector<Case> killing = {
      {"sphere_stereo:2", rotation_field(2)},
      {"cigar", rotation_field(2)},
      {"euclidean:2", rotation_field(2)},
      {"hyperbolic_halfplane", field({"x0", "x1"})},
      {"hyperbolic_halfplane", field({"(x0^2-x1^2)/2", "x0*x1"})},
      {"torus_flat:2", coordinate_field(2, 1)},
  };
  for (const auto& c : killing) {
    auto m = catalog_manifold(c.manifold);
    auto rep = check_jacobi_type(m, c.xi, few(m, 20), 1, 99, 1e-8);
    INFO(c.manifold);
    CHECK(rep.pass);
  }
}

TEST_CASE("jacobi-type residual is extension independent and matches finite differences") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  for (const char* name : {"cigar", "sphere_stereo:2", "hyperbolic_halfplane"}) {
    auto m = catalog_manifold(name);
    auto xi = field({"x0*x1 + sin(x1)", "x0^2 - 0.5*x1"});
    for (const auto& p : few(m, 10)) {
      Vector x(2);
      x << n(rng), n(rng);
      Matrix a(2, 2);
      a << n(rng), n(rng), n(rng), n(rng);
      const Vector r0 = jacobi_type_residual_at(m, xi, p, x);
      const Vector r1 = jacobi_type_residual_at(m, xi, p, x, a);
      CHECK((r0 - r1).norm() < 1e-10 * (1.0 + r0.norm()));
      const Vector fd = fd_jacobi(m, xi, p, x);
      INFO(name);
      CHECK((r0 - fd).norm() < 1e-5 * (1.0 + r0.norm()));
    }
  }
}

TEST_CASE("ricci pinching") {
  auto cg = geometry::cigar();
  auto cs = geometry::sample_points(cg);
  auto above = ricci_pinch_check(cg, 0.0, cs, PinchSide::Above);
  CHECK(above.holds);
  CHECK(above.margin > 0.0);
  auto e2 = geometry::euclidean(2);
  CHECK_FALSE(ricci_pinch_check(e2, 0.0, few(e2), PinchSide::Above).holds);
  CHECK_FALSE(ricci_pinch_check(e2, 0.0, few(e2), PinchSide::Below).holds);
  auto h = geometry::hyperbolic_halfplane();
  auto below = ricci_pinch_check(h, 0.0, geometry::sample_points(h), PinchSide::Below);
  CHECK(below.holds);
  CHECK(below.max_eigenvalue == doctest::Approx(-1.0));
  CHECK_THROWS_AS(ricci_pinch_check(h, 0.0, {}, PinchSide::Below), EmptySampleSet);
}

TEST_CASE("homothetic commutator") {
  auto e2 = geometry::euclidean(2);
  auto s = few(e2);
  auto rep = homothetic_commutator_check(e2, ex("x0"), special_conformal_field({1.0, 0.0}), s);
  CHECK(rep.sup < 1e-12);
  CHECK(rep.zeta_class.kind == ConformalKind::Homothetic);
  CHECK(rep.zeta_class.homothety == doctest::Approx(1.0));
  for (const auto& p : s) {
    CHECK(rep.zeta[0].eval({p.data(), 2}) == doctest::Approx(p[0]));
    CHECK(rep.zeta[1].eval({p.data(), 2}) == doctest::Approx(p[1]));
  }
  CHECK_THROWS_AS(homothetic_commutator_check(e2, ex("x0"), position_field(2), s), PreconditionFailed);
  CHECK_THROWS_AS(homothetic_commutator_check(e2, ex("4"), special_conformal_field({1.0, 0.0}), s),
                  PreconditionFailed);
  CHECK_THROWS_AS(homothetic_commutator_check(e2, ex("x0^2"), special_conformal_field({1.0, 0.0}), s),
                  PreconditionFailed);
  // |grad f|² = 4 scales ζ
  CHECK_THROWS_AS(homothetic_commutator_check(e2, ex("2*x0"), special_conformal_field({0.0, 1.0}), s),
                  PreconditionFailed);
  auto rep2 = homothetic_commutator_check(e2, ex("2*x0"), special_conformal_field({2.0, 0.0}), s);
  CHECK(rep2.sup < 1e-12);
  CHECK(rep2.grad_norm_sq_mean == doctest::Approx(4.0));
}
