#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/geometry/catalog.hpp"
#include "liouville/geometry/sampling.hpp"
#include "liouville/symbolic/parser.hpp"
#include "liouville/verifier/verifier.hpp"

using namespace liouville;
using namespace liouville::verifier;
using geometry::catalog_manifold;
using geometry::random_points;

namespace {

std::vector<Expression> exprs(std::initializer_list<const char*> list, int d) {
  std::vector<Expression> out;
  for (const char* s : list) out.push_back(symbolic::parse_expression(s, d));
  return out;
}

SmoothMap random_map(const std::string& target, int degree, std::uint64_t seed, double scale = 0.4) {
  auto dom = catalog_manifold("torus_flat:2");
  auto tgt = catalog_manifold(target);
  return SmoothMap(dom, tgt, maps::random_polynomial_components(dom, tgt.dim(), degree, seed, scale));
}

std::vector<Point> torus_samples(int n, std::uint64_t seed = 77) {
  return random_points(catalog_manifold("torus_flat:2").sample_box(), n, seed);
}

SolitonSpec cigar_soliton() {
  return fields::gradient_soliton(catalog_manifold("cigar"), symbolic::parse_expression("-log(1+x0^2+x1^2)", 2), 0.0);
}

SolitonSpec gaussian_soliton() { return SolitonSpec{fields::position_field(2), 1.0, std::nullopt}; }

HypersurfaceSpec unit_sphere(VectorField field) {
  auto r3 = catalog_manifold("euclidean:3");
  return HypersurfaceSpec{r3, exprs({"2*x0/(1+x0^2+x1^2)", "2*x1/(1+x0^2+x1^2)", "(1-x0^2-x1^2)/(1+x0^2+x1^2)"}, 2),
                          std::move(field), geometry::Box::uniform(2, -2, 2)};
}

VectorField ambient(std::initializer_list<const char*> comps) { return VectorField(exprs(comps, 3), 3); }

}  // namespace

TEST_CASE("conformal identity") {
  auto e2 = catalog_manifold("euclidean:2");
  auto constant = SmoothMap(e2, e2, exprs({"0.3", "-1"}, 2));
  auto s = random_points(e2.sample_box(), 10, 1);
  auto rep = conformal_divergence_identity(constant, fields::position_field(2), s);
  CHECK(rep.pass);
  for (const auto& r : rep.rows) {
    CHECK(r.left == 0.0);
    CHECK(r.right == 0.0);
  }
  auto id = SmoothMap(e2, e2, exprs({"x0", "x1"}, 2));
  auto rid = conformal_divergence_identity(id, fields::position_field(2), s);
  CHECK(rid.pass);
  for (const auto& r : rid.rows) {
    CHECK(r.left == doctest::Approx(2.0));
    CHECK(r.right == doctest::Approx(2.0));
  }
  // grad f on the cigar, potential estimated by trace
  VectorField grad(exprs({"-2*x0", "-2*x1"}, 2), 2);
  VectorField declared(exprs({"-2*x0", "-2*x1"}, 2), 2, symbolic::parse_expression("-2/(1+x0^2+x1^2)", 2));
  for (int degree = 1; degree <= 4; ++degree) {
    auto phi = random_map("cigar", degree, 100 + degree);
    auto r = conformal_divergence_identity(phi, grad, torus_samples(200), {1e-6, 1e-8, true});
    INFO(degree);
    CHECK(r.pass);
    CHECK(r.sup < 1e-6);
    CHECK(conformal_divergence_identity(phi, declared, torus_samples(50), {1e-6, 1e-8, true}).pass);
  }
  auto phi = random_map("cigar", 2, 5);
  CHECK_THROWS_AS(conformal_divergence_identity(phi, VectorField(exprs({"x0^2", "0"}, 2), 2), torus_samples(20)),
                  PreconditionFailed);
  CHECK_THROWS_AS(conformal_divergence_identity(phi, fields::position_field(3), torus_samples(20)), ArityError);
}

TEST_CASE("soliton identity") {
  auto e2 = catalog_manifold("euclidean:2");
  auto s = random_points(e2.sample_box(), 10, 1);
  auto constant = SmoothMap(e2, e2, exprs({"0.3", "-1"}, 2));
  CHECK(soliton_divergence_identity(constant, gaussian_soliton(), s).pass);
  auto id = SmoothMap(e2, e2, exprs({"x0", "x1"}, 2));
  auto rid = soliton_divergence_identity(id, gaussian_soliton(), s);
  CHECK(rid.pass);
  for (const auto& r : rid.rows) CHECK(r.left == doctest::Approx(2.0));
  for (int degree = 1; degree <= 4; ++degree) {
    INFO(degree);
    auto r = soliton_divergence_identity(random_map("cigar", degree, 200 + degree), cigar_soliton(), torus_samples(200),
                                         {1e-6, 1e-8, true});
    CHECK(r.sup < 1e-6);
    auto f = soliton_divergence_identity(random_map("euclidean:2", degree, 300 + degree), gaussian_soliton(),
                                         torus_samples(200), {1e-6, 1e-8, true});
    CHECK(f.sup < 1e-6);
  }
  SolitonSpec wrong = cigar_soliton();
  wrong.lambda = 1.0;
  CHECK_THROWS_AS(soliton_divergence_identity(random_map("cigar", 2, 1), wrong, torus_samples(10)), PreconditionFailed);
}

TEST_CASE("biharmonic chain") {
  auto torus = catalog_manifold("torus_flat:2");
  auto e2 = catalog_manifold("euclidean:2");
  auto constant = SmoothMap(torus, e2, exprs({"0.3", "-1"}, 2));
  for (const auto& r : biharmonic_divergence_identity(constant, gaussian_soliton(), torus_samples(10))) {
    CHECK(r.pass);
    for (const auto& row : r.rows) CHECK(std::abs(row.left) + std::abs(row.right) < 1e-14);
  }
  // identity of the flat torus with a rotation Killing field (steady, λ = 0)
  auto id = SmoothMap(torus, e2, exprs({"x0", "x1"}, 2));
  SolitonSpec killing{fields::rotation_field(2), 0.0, std::nullopt};
  for (const auto& r : biharmonic_divergence_identity(id, killing, torus_samples(10))) {
    INFO(r.name);
    CHECK(r.pass);
  }
  for (int degree = 1; degree <= 4; ++degree) {
    auto flat = biharmonic_divergence_identity(random_map("euclidean:2", degree, 400 + degree), gaussian_soliton(),
                                               torus_samples(200));
    CHECK(flat.size() == 7);
    for (const auto& r : flat) {
      INFO(r.name << " degree " << degree << " sup " << r.sup);
      CHECK(r.pass);
    }
    auto cigar = biharmonic_divergence_identity(random_map("cigar", degree, 500 + degree), cigar_soliton(),
                                                torus_samples(200), {1e-6, 1e-8, false});
    for (const auto& r : cigar) {
      INFO(r.name << " degree " << degree << " sup " << r.sup);
      CHECK(r.pass);
    }
  }
  // grad f on the cigar is not Jacobi-type
  CHECK_THROWS_AS(biharmonic_divergence_identity(random_map("cigar", 2, 9), cigar_soliton(), torus_samples(10)),
                  PreconditionFailed);
}

TEST_CASE("biharmonic chain steps are not vacuous") {
  // dropping the τ₂ correction breaks the final step for a non-biharmonic map
  auto phi = random_map("euclidean:2", 4, 42);
  auto reps = biharmonic_divergence_identity(phi, gaussian_soliton(), torus_samples(20));
  double biggest = 0.0;
  for (const auto& p : torus_samples(20)) {
    biggest = std::max(biggest, std::abs(fields::position_field(2).value(maps::differential_at(phi, p).value)
                                             .dot(maps::bitension_at(phi, p))));
  }
  CHECK(biggest > 1e-3);
  const auto& last = reps.back();
  CHECK(last.name == "biharmonic:soliton");
  double spread = 0.0;
  for (const auto& r : last.rows) spread = std::max(spread, std::abs(r.left));
  CHECK(spread > 1e-3);
}

TEST_CASE("curvature pairing symmetry") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  for (const auto& name : {"cigar", "sphere_stereo:2", "sphere_stereo:3", "hyperbolic_halfplane", "euclidean:3"}) {
    auto m = catalog_manifold(name);
    const int d = m.dim();
    double worst = 0.0;
    for (const auto& p : random_points(m.sample_box(), 50, 3)) {
      auto geo = geometry::local_geometry(m, p, 2);
      Vector x(d), y(d), z(d), w(d);
      for (int i = 0; i < d; ++i) {
        x[i] = n(rng);
        y[i] = n(rng);
        z[i] = n(rng);
        w[i] = n(rng);
      }
      const double a = geo.curvature.riemann.apply(x, y, z).dot(geo.metric.g * w);
      const double b = geo.curvature.riemann.apply(w, z, y).dot(geo.metric.g * x);
      worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
    }
    INFO(name);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("young inequality") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10), pos(1e-3, 10);
  int equal = 0;
  for (int k = 0; k < 10000; ++k) {
    const double a = u(rng), b = u(rng), lam = pos(rng);
    const double gap = lam * a * a + b * b / lam - 2 * a * b;
    CHECK(gap >= -1e-12 * (lam * a * a + b * b / lam));
    const double beq = lam * a;
    const double geq = lam * a * a + beq * beq / lam - 2 * a * beq;
    if (std::abs(geq) <= 1e-12 * (1 + lam * a * a)) ++equal;
  }
  CHECK(equal == 10000);
}

TEST_CASE("hypersurface: unit sphere with a translation field") {
  auto hs = unit_sphere(ambient({"0", "0", "1"}));
  auto s = geometry::sample_points(induced_manifold(hs), {11, 50, 3});
  auto rep = hypersurface_decompose(hs, s);
  for (const auto& c : rep.checks) {
    INFO(c.name << " sup " << c.sup);
    CHECK(c.pass);
    CHECK(c.sup < 1e-8);
  }
  for (const auto& hp : rep.points) {
    const double z = hp.position[2];
    CHECK(hp.normal_component == doctest::Approx(z).epsilon(1e-12));
    CHECK(hp.rho == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK((hp.normal - hp.position).norm() < 1e-12);
    CHECK((hp.mean_curvature + hp.normal).norm() < 1e-12);
  }
}

TEST_CASE("hypersurface: lie derivative equals -2z h on the sphere") {
  auto hs = unit_sphere(ambient({"0", "0", "1"}));
  auto rep = hypersurface_decompose(hs, random_points(hs.parameter_box, 40, 8));
  for (const auto& c : rep.checks) {
    if (c.name != "hypersurface:lie-derivative") continue;
    for (const auto& row : c.rows) {
      const auto& hp = rep.points[row.sample];
      const int i = row.component[0] - '0', j = row.component[1] - '0';
      CHECK(std::abs(row.left + 2 * hp.position[2] * hp.induced_metric(i, j)) < 1e-8);
    }
  }
}

TEST_CASE("hypersurface: plane and rotation") {
  auto r3 = catalog_manifold("euclidean:3");
  HypersurfaceSpec plane{r3, exprs({"x0", "x1", "0"}, 2), ambient({"0", "0", "1"}), geometry::Box::uniform(2, -1, 1)};
  auto rep = hypersurface_decompose(plane, random_points(plane.parameter_box, 20, 2));
  for (const auto& c : rep.checks) CHECK(c.pass);
  for (const auto& hp : rep.points) {
    CHECK(hp.rho == 0.0);
    CHECK(hp.second_fundamental_form.isZero());
    CHECK(hp.normal_component == doctest::Approx(1.0));
  }
  auto rot = hypersurface_decompose(unit_sphere(ambient({"-x1", "x0", "0"})), random_points(geometry::Box::uniform(2, -2, 2), 30, 4));
  for (const auto& c : rot.checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
  for (const auto& hp : rot.points) CHECK(std::abs(hp.normal_component) < 1e-12);
}

TEST_CASE("hypersurface errors") {
  auto r3 = catalog_manifold("euclidean:3");
  HypersurfaceSpec line{r3, exprs({"x0", "0", "0"}, 2), ambient({"0", "0", "1"}), geometry::Box::uniform(2, -1, 1)};
  CHECK_THROWS_AS(hypersurface_decompose(line, random_points(line.parameter_box, 5, 2)), RankDeficient);
  CHECK_THROWS_AS(hypersurface_decompose(unit_sphere(ambient({"x0", "x1", "x2"})), random_points(geometry::Box::uniform(2, -2, 2), 5, 2)),
                  PreconditionFailed);
}

TEST_CASE("csv output") {
  auto e2 = catalog_manifold("euclidean:2");
  auto id = SmoothMap(e2, e2, exprs({"x0", "x1"}, 2));
  auto rep = conformal_divergence_identity(id, fields::position_field(2), random_points(e2.sample_box(), 3, 1));
  std::ostringstream os;
  write_csv(os, {rep});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "identity,sample,point,component,left,right,residual");
  int count = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("conformal,", 0) == 0);
    ++count;
  }
  CHECK(count == 3);
}
