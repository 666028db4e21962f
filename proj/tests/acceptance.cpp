#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "liouville/cli/report.hpp"
#include "liouville/errors.hpp"
#include "liouville/flow/heat_flow.hpp"
#include "liouville/geometry/catalog.hpp"
#include "liouville/geometry/kernel.hpp"
#include "liouville/geometry/sampling.hpp"
#include "liouville/symbolic/parser.hpp"
#include "liouville/verifier/verifier.hpp"
#include "support/fd_oracle.hpp"

using namespace liouville;
using geometry::catalog_manifold;
using geometry::Point;
using symbolic::Expression;

namespace {

constexpr double kPi = std::numbers::pi;

int failed = 0;

void report(int n, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  %2d  %-34s %s\n", pass ? "PASS" : "FAIL", n, name.c_str(), detail.c_str());
  std::fflush(stdout);
  failed += pass ? 0 : 1;
}

void run(int n, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(n, name, pass, detail);
  } catch (const std::exception& e) {
    report(n, name, false, std::string("raised ") + e.what());
  }
}

std::string g3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<Expression> exprs(std::initializer_list<const char*> list, int d) {
  std::vector<Expression> out;
  for (const char* s : list) out.push_back(symbolic::parse_expression(s, d));
  return out;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

std::pair<bool, std::string> cigar_certificate() {
  const auto cigar = catalog_manifold("cigar");
  const Expression f = symbolic::parse_expression("-log(1+x0^2+x1^2)", 2);
  const auto samples = geometry::sample_points(cigar);
  const testing::MetricFn g = [](const Eigen::VectorXd& p) {
    return Eigen::MatrixXd(Eigen::Matrix2d::Identity() / (1.0 + p.squaredNorm()));
  };
  const auto fn = [](const Eigen::VectorXd& p) { return -std::log(1.0 + p.squaredNorm()); };
  double sup = 0.0, oracle_gap = 0.0;
  const double h = 1e-4;
  for (const auto& p : samples) {
    const auto res = fields::gradient_soliton_residual_at(cigar, f, 0.0, p);
    sup = std::max(sup, max_abs(res));
    const auto fd = testing::fd_geometry(g, p);
    Eigen::Vector2d df;
    Eigen::Matrix2d ddf;
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd a = p, b = p;
      a[i] += h;
      b[i] -= h;
      df[i] = (fn(a) - fn(b)) / (2 * h);
      for (int j = 0; j < 2; ++j) {
        Eigen::VectorXd pp = p, pm = p, mp = p, mm = p;
        pp[i] += h, pp[j] += h;
        pm[i] += h, pm[j] -= h;
        mp[i] -= h, mp[j] += h;
        mm[i] -= h, mm[j] -= h;
        ddf(i, j) = (fn(pp) - fn(pm) - fn(mp) + fn(mm)) / (4 * h * h);
      }
    }
    Eigen::Matrix2d oracle = fd.ricci;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        double hess = ddf(i, j);
        for (int k = 0; k < 2; ++k) hess -= fd.christoffel(k, i, j) * df[k];
        oracle(i, j) += hess;
      }
    }
    oracle_gap = std::max(oracle_gap, max_abs(oracle - res));
  }
  return {sup < 1e-8 && oracle_gap < 1e-5 && samples.size() == 541,
          std::to_string(samples.size()) + " samples, sup " + g3(sup) + ", oracle gap " + g3(oracle_gap)};
}

std::pair<bool, std::string> ricci_pinching() {
  const auto cigar = catalog_manifold("cigar");
  const auto hyp = catalog_manifold("hyperbolic_halfplane");
  const auto c = fields::ricci_pinch_check(cigar, 0.0, geometry::sample_points(cigar), fields::PinchSide::Above);
  const auto h = fields::ricci_pinch_check(hyp, 0.0, geometry::sample_points(hyp), fields::PinchSide::Below);
  return {c.holds && c.min_eigenvalue > 0.0 && h.holds && h.max_eigenvalue < 0.0,
          "cigar min " + g3(c.min_eigenvalue) + ", hyperbolic max " + g3(h.max_eigenvalue)};
}

std::pair<bool, std::string> einstein() {
  double worst_s = 0.0, worst_h = 0.0;
  for (const auto& [name, k, worst] :
       {std::tuple{"sphere_stereo:2", 1.0, &worst_s}, std::tuple{"hyperbolic_halfplane", -1.0, &worst_h}}) {
    const auto m = catalog_manifold(name);
    for (const auto& p : geometry::sample_points(m)) {
      const auto ric = geometry::riemann_at(m, p).ricci;
      const auto g = geometry::metric_at(m, p).g;
      *worst = std::max(*worst, max_abs(ric - k * g));
    }
  }
  return {worst_s < 1e-8 && worst_h < 1e-8, "S2 " + g3(worst_s) + ", H2 " + g3(worst_h)};
}

std::pair<bool, std::string> conformal_classification() {
  const auto e2 = catalog_manifold("euclidean:2");
  const auto samples = geometry::sample_points(e2);
  const auto pos = fields::classify_conformal(e2, fields::position_field(2), samples);
  const auto rot = fields::classify_conformal(e2, fields::rotation_field(2), samples);
  const std::vector<double> a{0.7, -1.3};
  const auto sc = fields::classify_conformal(e2, fields::special_conformal_field(a), samples);
  double potential_gap = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    potential_gap = std::max(potential_gap, std::abs(sc.potential[i] - (a[0] * samples[i][0] + a[1] * samples[i][1])));
  }
  const double residual = std::max({pos.residual, rot.residual, sc.residual});
  const bool pass = pos.kind == fields::ConformalKind::Homothetic && std::abs(pos.homothety - 1.0) < 1e-10 &&
                    rot.kind == fields::ConformalKind::Killing && sc.kind == fields::ConformalKind::Conformal &&
                    sc.potential_variance > 0.1 && potential_gap < 1e-10 && residual < 1e-10;
  return {pass, "position " + fields::to_string(pos.kind) + " k=" + g3(pos.homothety) + ", rotation " +
                    fields::to_string(rot.kind) + ", special " + fields::to_string(sc.kind) + ", residual " +
                    g3(residual) + ", potential gap " + g3(potential_gap)};
}

std::pair<bool, std::string> commutator() {
  const auto e2 = catalog_manifold("euclidean:2");
  const auto c = fields::homothetic_commutator_check(e2, symbolic::parse_expression("x0", 2),
                                                     fields::special_conformal_field({1.0, 0.0}),
                                                     geometry::sample_points(e2));
  return {c.sup < 1e-10 && c.zeta_class.kind == fields::ConformalKind::Homothetic,
          "sup " + g3(c.sup) + ", zeta " + fields::to_string(c.zeta_class.kind) + " k=" + g3(c.zeta_class.homothety)};
}

std::pair<bool, std::string> divergence_identities() {
  const auto torus = catalog_manifold("torus_flat:2");
  const auto samples = geometry::random_points(torus.sample_box(), 200, 2024);
  const auto cigar = catalog_manifold("cigar");
  const auto cigar_soliton = fields::gradient_soliton(cigar, symbolic::parse_expression("-log(1+x0^2+x1^2)", 2), 0.0);
  const fields::SolitonSpec gaussian{fields::position_field(2), 1.0, std::nullopt};
  verifier::IdentityOptions relaxed{1e-6, 1e-8, false};
  verifier::IdentityOptions strict{1e-6, 1e-8, true};
  double worst = 0.0, largest_side = 0.0;
  int reports = 0;
  bool pass = true;
  for (int degree = 1; degree <= 4; ++degree) {
    for (const char* target : {"cigar", "euclidean:2"}) {
      const auto tgt = catalog_manifold(target);
      const bool is_cigar = tgt.name() == cigar.name();
      const maps::SmoothMap phi(torus, tgt,
                                maps::random_polynomial_components(torus, 2, degree, 500 + degree, 0.4));
      std::vector<verifier::IdentityReport> all;
      all.push_back(verifier::conformal_divergence_identity(
          phi, is_cigar ? fields::rotation_field(2) : fields::position_field(2), samples, strict));
      all.push_back(verifier::soliton_divergence_identity(phi, is_cigar ? cigar_soliton : gaussian, samples, strict));
      for (auto& r : verifier::biharmonic_divergence_identity(phi, is_cigar ? cigar_soliton : gaussian, samples,
                                                              is_cigar ? relaxed : strict)) {
        all.push_back(std::move(r));
      }
      for (const auto& r : all) {
        pass = pass && r.pass && r.sup < 1e-6 && r.rows.size() >= 200;
        worst = std::max(worst, r.sup);
        for (const auto& row : r.rows) largest_side = std::max(largest_side, std::abs(row.left));
        ++reports;
      }
    }
  }
  return {pass && largest_side > 1e-3, std::to_string(reports) + " reports over degrees 1-4, worst sup " + g3(worst) +
                                           ", largest side " + g3(largest_side)};
}

std::pair<bool, std::string> hypersurface() {
  const auto r3 = catalog_manifold("euclidean:3");
  const verifier::HypersurfaceSpec hs{
      r3, exprs({"2*x0/(1+x0^2+x1^2)", "2*x1/(1+x0^2+x1^2)", "(1-x0^2-x1^2)/(1+x0^2+x1^2)"}, 2),
      fields::coordinate_field(3, 2), geometry::Box::uniform(2, -2, 2)};
  auto samples = geometry::lattice_points(hs.parameter_box, 21);
  const auto extra = geometry::random_points(hs.parameter_box, 100, 7);
  samples.insert(samples.end(), extra.begin(), extra.end());
  const auto rep = verifier::hypersurface_decompose(hs, samples);
  double f_gap = 0.0, rho_gap = 0.0, lie_gap = 0.0, normal_sup = -1.0;
  std::size_t lie_rows = 0;
  for (const auto& hp : rep.points) {
    f_gap = std::max(f_gap, std::abs(hp.normal_component - hp.position[2]));
    rho_gap = std::max(rho_gap, std::abs(hp.rho + 1.0));
  }
  bool checks = true;
  for (const auto& c : rep.checks) {
    checks = checks && c.pass;
    if (c.name == "hypersurface:normal-component") normal_sup = c.sup;
    if (c.name == "hypersurface:lie-derivative") {
      for (const auto& row : c.rows) {
        const auto& hp = rep.points[row.sample];
        const int i = row.component[0] - '0', j = row.component[1] - '0';
        lie_gap = std::max(lie_gap, std::abs(row.left + 2 * hp.position[2] * hp.induced_metric(i, j)));
        ++lie_rows;
      }
    }
  }
  const double worst = std::max({f_gap, rho_gap, lie_gap, normal_sup});
  return {checks && worst < 1e-8 && normal_sup >= 0.0 && lie_rows == 3 * samples.size(),
          "f-z " + g3(f_gap) + ", rho+1 " + g3(rho_gap) + ", L h+2zh " + g3(lie_gap) + ", f rho-h(xi,H) " +
              g3(normal_sup)};
}

bool non_increasing(const flow::FlowTrace& t) {
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    if (t.records[i].energy > t.records[i - 1].energy) return false;
  }
  return true;
}

std::pair<bool, std::string> cigar_flow() {
  const auto cigar = catalog_manifold("cigar");
  flow::FlowConfig cfg;
  cfg.dt = 1e-3;
  cfg.max_steps = 100000;
  bool pass = true;
  double worst_ratio = 0.0, worst_dphi = 0.0;
  std::int64_t most_steps = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = flow::run_flow(flow::init_grid_map({32, 32}, cigar, flow::RandomSmooth{seed}), cigar, cfg);
    const double ratio = t.records.back().energy / t.records.front().energy;
    pass = pass && t.verdict == flow::Verdict::ConvergedConstant && ratio < 1e-3 &&
           t.records.back().sup_dphi < 1e-3 && non_increasing(t);
    worst_ratio = std::max(worst_ratio, ratio);
    worst_dphi = std::max(worst_dphi, t.records.back().sup_dphi);
    most_steps = std::max(most_steps, t.records.back().step);
  }
  return {pass, "5 seeds converged-constant, max steps " + std::to_string(most_steps) + ", E_end/E_0 <= " +
                    g3(worst_ratio) + ", sup|dphi| <= " + g3(worst_dphi)};
}

std::pair<bool, std::string> killing_target() {
  const auto torus = catalog_manifold("torus_flat:2");
  flow::FlowConfig cfg;
  cfg.dt = 1e-3;
  const auto t = flow::run_flow(flow::init_grid_map({32, 32}, torus, flow::Identity{}), torus, cfg);
  const auto& r = t.records.back();
  return {t.verdict == flow::Verdict::ConvergedNonconstant && r.sup_tension < 1e-9 && std::abs(r.sup_dphi - 1.0) < 1e-9,
          flow::to_string(t.verdict) + ", sup|tau| " + g3(r.sup_tension) + ", sup|dphi| " + g3(r.sup_dphi)};
}

std::pair<bool, std::string> discretization_order() {
  const auto line = catalog_manifold("euclidean:1");
  std::vector<double> err;
  for (int n : {32, 64, 128}) {
    const auto s = flow::init_grid_map({n}, line, exprs({"sin(x0)"}, 1));
    const auto tau = flow::tension_grid(s, line);
    double e = 0.0;
    for (std::size_t i = 0; i < s.nodes(); ++i) e = std::max(e, std::abs(tau[i] + std::sin(s.position(i)[0])));
    err.push_back(e);
  }
  const double r1 = err[0] / err[1], r2 = err[1] / err[2];
  return {std::abs(r1 - 4.0) <= 0.8 && std::abs(r2 - 4.0) <= 0.8,
          "errors " + g3(err[0]) + ", " + g3(err[1]) + ", " + g3(err[2]) + ", ratios " + g3(r1) + ", " + g3(r2)};
}

std::pair<bool, std::string> index_form() {
  const auto torus = catalog_manifold("torus_flat:2");
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const Expression x0 = Expression::variable(0), x1 = Expression::variable(1);
  auto field = [&] {
    std::vector<Expression> comps;
    for (int a = 0; a < 2; ++a) {
      Expression c = Expression::constant(coef(rng));
      for (int k0 = 0; k0 <= 2; ++k0) {
        for (int k1 = -2; k1 <= 2; ++k1) {
          if (k0 == 0 && k1 <= 0) continue;
          const Expression ph = Expression::constant(k0) * x0 + Expression::constant(k1) * x1;
          c = c + Expression::constant(coef(rng)) * cos(ph) + Expression::constant(coef(rng)) * sin(ph);
        }
      }
      comps.push_back(c);
    }
    return maps::FieldAlongMap(comps, 2);
  };
  double min_ivv = 1e300, asym = 0.0;
  const char* targets[] = {"euclidean:2", "torus_flat:2"};
  for (int trial = 0; trial < 20; ++trial) {
    const auto tgt = catalog_manifold(targets[trial % 2]);
    const maps::SmoothMap phi(torus, tgt, maps::random_polynomial_components(torus, 2, 1 + trial % 3, 900 + trial, 0.4));
    const auto v = field();
    const auto w = field();
    min_ivv = std::min(min_ivv, flow::index_form(phi, v, v, {16, 16}));
    asym = std::max(asym, std::abs(flow::index_form(phi, v, w, {16, 16}) - flow::index_form(phi, w, v, {16, 16})));
  }
  return {min_ivv >= -1e-9 && asym <= 1e-9, "min I(v,v) " + g3(min_ivv) + ", max asymmetry " + g3(asym)};
}

std::pair<bool, std::string> determinism() {
  const auto manifest = cli::parse_manifest(LIOUVILLE_MANIFEST);
  const auto a = cli::to_json(cli::run_manifest(manifest)).dump(2);
  const auto b = cli::to_json(cli::run_manifest(cli::parse_manifest(LIOUVILLE_MANIFEST))).dump(2);
  return {a == b, std::to_string(manifest.tasks.size()) + " tasks, " + std::to_string(a.size()) + " bytes, " +
                      (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  run(1, "cigar soliton certificate", cigar_certificate);
  run(2, "Ricci pinching", ricci_pinching);
  run(3, "Einstein checks", einstein);
  run(4, "conformal classification", conformal_classification);
  run(5, "homothetic commutator", commutator);
  run(6, "divergence identities", divergence_identities);
  run(7, "hypersurface suite", hypersurface);
  run(8, "cigar heat flow is constant", cigar_flow);
  run(9, "Killing-target fixed point", killing_target);
  run(10, "discretization order", discretization_order);
  run(11, "index form positivity", index_form);
  run(12, "manifest determinism", determinism);
  std::printf("%d of 12 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
