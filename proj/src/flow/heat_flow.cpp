#include "liouville/flow/heat_flow.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "liouville/errors.hpp"

namespace liouville::flow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string describe_node(const GridMapState& s, std::size_t node) {
  std::string out = "(";
  std::size_t rem = node;
  std::vector<int> idx(s.resolution.size());
  for (int a = s.domain_dim() - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(s.resolution[static_cast<std::size_t>(a)]));
    rem /= static_cast<std::size_t>(s.resolution[static_cast<std::size_t>(a)]);
  }
  for (std::size_t a = 0; a < idx.size(); ++a) out += (a ? "," : "") + std::to_string(idx[a]);
  return out + ")";
}

/// plus[a][node] / minus[a][node]: neighbour along axis a with wrap-around.
struct Neighbours {
  std::vector<std::vector<std::size_t>> plus, minus;
};

Neighbours neighbours(const std::vector<int>& res) {
  const int m = static_cast<int>(res.size());
  std::size_t total = 1;
  for (int r : res) total *= static_cast<std::size_t>(r);
  Neighbours nb;
  nb.plus.assign(static_cast<std::size_t>(m), std::vector<std::size_t>(total));
  nb.minus.assign(static_cast<std::size_t>(m), std::vector<std::size_t>(total));
  std::size_t stride = total;
  for (int a = 0; a < m; ++a) {
    const std::size_t n = static_cast<std::size_t>(res[static_cast<std::size_t>(a)]);
    stride /= n;
    for (std::size_t node = 0; node < total; ++node) {
      const std::size_t k = (node / stride) % n;
      const std::size_t base = node - k * stride;
      nb.plus[static_cast<std::size_t>(a)][node] = base + ((k + 1) % n) * stride;
      nb.minus[static_cast<std::size_t>(a)][node] = base + ((k + n - 1) % n) * stride;
    }
  }
  return nb;
}

void validate_state(const GridMapState& s, const ChartManifold& target) {
  if (s.target_dim != target.dim()) {
    throw ArityError("grid state has " + std::to_string(s.target_dim) + " components, target " + target.name() +
                     " has dimension " + std::to_string(target.dim()));
  }
  if (s.values.size() != s.nodes() * static_cast<std::size_t>(s.target_dim)) {
    throw ValidationError("grid state value count does not match its resolution", "values");
  }
}

double largest_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() == 1) return a(0, 0);
  if (a.rows() == 2) {
    const double half = 0.5 * (a(0, 0) + a(1, 1));
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return half + std::sqrt(std::max(0.0, half * half - det));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

std::size_t GridMapState::nodes() const {
  std::size_t total = 1;
  for (int r : resolution) total *= static_cast<std::size_t>(r);
  return total;
}

double GridMapState::spacing(int axis) const {
  return kTwoPi / resolution[static_cast<std::size_t>(axis)];
}

std::vector<double> GridMapState::position(std::size_t node) const {
  std::vector<double> x(resolution.size());
  std::size_t rem = node;
  for (int a = domain_dim() - 1; a >= 0; --a) {
    const std::size_t n = static_cast<std::size_t>(resolution[static_cast<std::size_t>(a)]);
    x[static_cast<std::size_t>(a)] = kTwoPi * static_cast<double>(rem % n) / static_cast<double>(n);
    rem /= n;
  }
  return x;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ConvergedConstant: return "converged-constant";
    case Verdict::ConvergedNonconstant: return "converged-nonconstant";
    case Verdict::MaxSteps: return "max-steps";
    case Verdict::ChartExit: return "chart-exit";
    case Verdict::EnergyIncrease: return "energy-increase";
  }
  return "max-steps";
}

void check_in_chart(const GridMapState& state, const ChartManifold& target) {
  const std::size_t n = state.nodes();
  geometry::Point p(state.target_dim);
  for (std::size_t node = 0; node < n; ++node) {
    for (int a = 0; a < state.target_dim; ++a) p[a] = state.plane(a)[node];
    if (!target.in_chart(p)) {
      std::string where = "(";
      for (int a = 0; a < p.size(); ++a) where += (a ? ", " : "") + fmt(p[a]);
      throw ChartExit("node " + describe_node(state, node) + " at " + where + ") leaves the chart of " + target.name());
    }
  }
}

GridMapState init_grid_map(const std::vector<int>& resolution, const ChartManifold& target, const Initializer& init) {
  if (resolution.empty()) throw ValidationError("grid needs at least one axis", "resolution");
  for (int r : resolution) {
    if (r < 3) throw ValidationError("grid resolution must be at least 3 per axis", "resolution");
  }
  GridMapState s;
  s.resolution = resolution;
  s.target_dim = target.dim();
  const std::size_t nodes = s.nodes();
  s.values.assign(nodes * static_cast<std::size_t>(s.target_dim), 0.0);
  const int m = s.domain_dim();

  if (const auto* exprs = std::get_if<std::vector<Expression>>(&init)) {
    if (static_cast<int>(exprs->size()) != s.target_dim) {
      throw ValidationError("initializer needs " + std::to_string(s.target_dim) + " components", "initializer");
    }
    for (std::size_t node = 0; node < nodes; ++node) {
      const auto x = s.position(node);
      for (int a = 0; a < s.target_dim; ++a) s.plane(a)[node] = (*exprs)[static_cast<std::size_t>(a)].eval(x);
    }
  } else if (const auto* rs = std::get_if<RandomSmooth>(&init)) {
    const auto& box = target.sample_box();
    if (!box.bounded()) throw ValidationError("random initializer needs a bounded target sample box", target.name());
    std::mt19937_64 rng(rs->seed);
    std::normal_distribution<double> normal;
    // wave vectors in [−K, K]^m, one of each ± pair
    std::vector<std::vector<int>> waves;
    const int k = rs->max_frequency;
    std::vector<int> cur(static_cast<std::size_t>(m), -k);
    while (true) {
      bool positive = false;
      for (int v : cur) {
        if (v != 0) {
          positive = v > 0;
          break;
        }
      }
      if (positive) waves.push_back(cur);
      int a = m - 1;
      while (a >= 0 && ++cur[static_cast<std::size_t>(a)] > k) {
        cur[static_cast<std::size_t>(a)] = -k;
        --a;
      }
      if (a < 0) break;
    }
    for (int alpha = 0; alpha < s.target_dim; ++alpha) {
      const auto& iv = box.axes[static_cast<std::size_t>(alpha)];
      const double centre = 0.5 * (iv.lo + iv.hi);
      const double half = 0.5 * (iv.hi - iv.lo);
      std::vector<double> ca, sa;
      for (const auto& w : waves) {
        double norm2 = 0.0;
        for (int v : w) norm2 += v * v;
        ca.push_back(normal(rng) / (1.0 + norm2));
        sa.push_back(normal(rng) / (1.0 + norm2));
      }
      double* out = s.plane(alpha);
      double peak = 0.0;
      for (std::size_t node = 0; node < nodes; ++node) {
        const auto x = s.position(node);
        double g = 0.0;
        for (std::size_t w = 0; w < waves.size(); ++w) {
          double phase = 0.0;
          for (int a = 0; a < m; ++a) phase += waves[w][static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
          g += ca[w] * std::cos(phase) + sa[w] * std::sin(phase);
        }
        out[node] = g;
        peak = std::max(peak, std::abs(g));
      }
      const double scale = peak > 0.0 ? rs->amplitude * half / peak : 0.0;
      for (std::size_t node = 0; node < nodes; ++node) out[node] = centre + scale * out[node];
    }
  } else {
    bool flat_torus = target.dim() == m && static_cast<int>(target.periods().size()) == m;
    for (double p : target.periods()) flat_torus = flat_torus && std::abs(p - kTwoPi) < 1e-12;
    if (flat_torus) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const auto& g = target.g(i, j);
          flat_torus = flat_torus && g.is_constant() && g.constant_value() == (i == j ? 1.0 : 0.0);
        }
      }
    }
    if (!flat_torus) {
      throw ValidationError("identity initializer needs the flat torus of dimension " + std::to_string(m) +
                                " as target, got " + target.name(),
                            target.name());
    }
    for (std::size_t node = 0; node < nodes; ++node) {
      const auto x = s.position(node);
      for (int a = 0; a < m; ++a) s.plane(a)[node] = x[static_cast<std::size_t>(a)];
    }
  }
  check_in_chart(s, target);
  return s;
}

GridTarget::GridTarget(ChartManifold target) : target_(std::move(target)) {
  std::vector<Expression> metric;
  const int n = target_.dim();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) metric.push_back(target_.g(a, b));
  }
  metric_tape_ = symbolic::Tape::compile(metric);
  christoffel_tape_ = symbolic::Tape::compile(target_.christoffel_expr());
}

void GridTarget::eval(const GridMapState& state, std::vector<double>& metric, std::vector<double>& christoffel,
                      const simd::Kernels& k) const {
  const int n = target_.dim();
  const std::size_t nodes = state.nodes();
  metric.resize(static_cast<std::size_t>(n * n) * nodes);
  christoffel.resize(static_cast<std::size_t>(n * n * n) * nodes);
  std::vector<const double*> in;
  for (int a = 0; a < n; ++a) in.push_back(state.plane(a));
  std::vector<double*> out_m, out_c;
  for (int i = 0; i < n * n; ++i) out_m.push_back(metric.data() + static_cast<std::size_t>(i) * nodes);
  for (int i = 0; i < n * n * n; ++i) out_c.push_back(christoffel.data() + static_cast<std::size_t>(i) * nodes);
  metric_tape_.eval_batch(in, nodes, out_m, k);
  christoffel_tape_.eval_batch(in, nodes, out_c, k);
  for (std::size_t i = 0; i < metric.size(); ++i) {
    if (!std::isfinite(metric[i])) throw ChartExit("target metric is not finite at node " + describe_node(state, i % nodes));
  }
  for (std::size_t i = 0; i < christoffel.size(); ++i) {
    if (!std::isfinite(christoffel[i])) {
      throw ChartExit("target Christoffel symbols are not finite at node " + describe_node(state, i % nodes));
    }
  }
}

GridDiagnostics diagnose(const GridMapState& state, const GridTarget& target, const simd::Kernels& k) {
  validate_state(state, target.manifold());
  const int m = state.domain_dim();
  const int n = state.target_dim;
  const std::size_t nodes = state.nodes();
  const Neighbours nb = neighbours(state.resolution);
  const auto& periods = target.manifold().periods();

  std::vector<double> metric, gamma;
  target.eval(state, metric, gamma, k);
  auto g_plane = [&](int a, int b) { return metric.data() + static_cast<std::size_t>(a * n + b) * nodes; };
  auto gam_plane = [&](int a, int b, int c) {
    return gamma.data() + static_cast<std::size_t>((a * n + b) * n + c) * nodes;
  };

  // d1[(axis * n + α)], fwd likewise
  std::vector<std::vector<double>> d1(static_cast<std::size_t>(m * n), std::vector<double>(nodes));
  std::vector<std::vector<double>> fwd(static_cast<std::size_t>(m * n), std::vector<double>(nodes));
  std::vector<double> plus(nodes), minus(nodes), bwd(nodes), d2(nodes);
  GridDiagnostics diag;
  diag.tension.assign(static_cast<std::size_t>(n) * nodes, 0.0);
  for (int axis = 0; axis < m; ++axis) {
    const double h = state.spacing(axis);
    const auto& pi = nb.plus[static_cast<std::size_t>(axis)];
    const auto& mi = nb.minus[static_cast<std::size_t>(axis)];
    for (int a = 0; a < n; ++a) {
      const double* c = state.plane(a);
      for (std::size_t node = 0; node < nodes; ++node) {
        plus[node] = c[pi[node]];
        minus[node] = c[mi[node]];
      }
      const double period = periods.empty() ? 0.0 : periods[static_cast<std::size_t>(a)];
      auto& f = fwd[static_cast<std::size_t>(axis * n + a)];
      k.wrapped_diffs(plus.data(), c, minus.data(), period, f.data(), bwd.data(), nodes);
      k.central_stencil(f.data(), bwd.data(), 1.0 / (2.0 * h), 1.0 / (h * h),
                        d1[static_cast<std::size_t>(axis * n + a)].data(), d2.data(), nodes);
      k.add(diag.tension.data() + static_cast<std::size_t>(a) * nodes, d2.data(),
            diag.tension.data() + static_cast<std::size_t>(a) * nodes, nodes);
    }
  }

  // S^{βγ} = Σ_axis D1^β D1^γ, F^{βγ} = Σ_axis fwd^β fwd^γ / h²
  std::vector<double> s(nodes), f(nodes), density(nodes, 0.0);
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) {
      k.fill(0.0, s.data(), nodes);
      k.fill(0.0, f.data(), nodes);
      for (int axis = 0; axis < m; ++axis) {
        const double h = state.spacing(axis);
        k.mul_acc(d1[static_cast<std::size_t>(axis * n + b)].data(), d1[static_cast<std::size_t>(axis * n + c)].data(),
                  s.data(), nodes);
        k.scaled_mul_acc(1.0 / (h * h), fwd[static_cast<std::size_t>(axis * n + b)].data(),
                         fwd[static_cast<std::size_t>(axis * n + c)].data(), f.data(), nodes);
      }
      for (int a = 0; a < n; ++a) {
        k.mul_acc(gam_plane(a, b, c), s.data(), diag.tension.data() + static_cast<std::size_t>(a) * nodes, nodes);
      }
      k.mul_acc(g_plane(b, c), f.data(), density.data(), nodes);
    }
  }

  double cell = 1.0;
  for (int axis = 0; axis < m; ++axis) cell *= state.spacing(axis);
  double total = 0.0;
  for (std::size_t node = 0; node < nodes; ++node) total += density[node];
  diag.energy = 0.5 * cell * total;

  Eigen::MatrixXd hm(n, n), dphi(n, m);
  for (std::size_t node = 0; node < nodes; ++node) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) hm(a, b) = g_plane(a, b)[node];
      for (int axis = 0; axis < m; ++axis) dphi(a, axis) = d1[static_cast<std::size_t>(axis * n + a)][node];
    }
    double t2 = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        t2 += diag.tension[static_cast<std::size_t>(a) * nodes + node] * hm(a, b) *
              diag.tension[static_cast<std::size_t>(b) * nodes + node];
      }
    }
    diag.sup_tension = std::max(diag.sup_tension, std::sqrt(std::max(0.0, t2)));
    const Eigen::MatrixXd pull = dphi.transpose() * hm * dphi;
    diag.sup_dphi = std::max(diag.sup_dphi, std::sqrt(std::max(0.0, largest_eigenvalue(pull))));
  }
  return diag;
}

GridDiagnostics diagnose(const GridMapState& state, const ChartManifold& target) {
  return diagnose(state, GridTarget(target), simd::kernels());
}

std::vector<double> tension_grid(const GridMapState& state, const ChartManifold& target) {
  check_in_chart(state, target);
  return diagnose(state, target).tension;
}

double total_energy(const GridMapState& state, const ChartManifold& target) {
  check_in_chart(state, target);
  return diagnose(state, target).energy;
}

namespace {

double default_dt(const GridMapState& s) {
  double h = s.spacing(0);
  for (int a = 1; a < s.domain_dim(); ++a) h = std::min(h, s.spacing(a));
  return 0.25 * h * h;
}

GridMapState advance(const GridMapState& s, const std::vector<double>& tension, double dt, const simd::Kernels& k) {
  GridMapState next = s;
  k.axpy(dt, tension.data(), next.values.data(), next.values.size());
  next.t = s.t + dt;
  next.steps = s.steps + 1;
  return next;
}

}  // namespace

StepResult flow_step(const GridMapState& state, const ChartManifold& target, const FlowConfig& config) {
  const simd::Kernels& k = simd::kernels(config.isa.value_or(simd::active_isa()));
  const GridTarget gt(target);
  check_in_chart(state, target);
  const GridDiagnostics diag = diagnose(state, gt, k);
  double dt = config.dt > 0.0 ? config.dt : default_dt(state);
  StepResult r;
  for (int attempt = 0;; ++attempt) {
    GridMapState next = advance(state, diag.tension, dt, k);
    check_in_chart(next, target);
    const double e = diagnose(next, gt, k).energy;
    if (e <= diag.energy) {
      r.state = std::move(next);
      r.dt = dt;
      r.rejected = attempt;
      return r;
    }
    if (config.policy == EnergyPolicy::Abort || attempt >= config.max_halvings) {
      throw EnergyIncrease("energy rises from " + fmt(diag.energy) + " to " + fmt(e) + " at t = " + fmt(state.t));
    }
    dt *= 0.5;
  }
}

FlowTrace run_flow(const GridMapState& initial, const ChartManifold& target, const FlowConfig& config) {
  if (!(config.dt >= 0.0) || !(config.stop_tolerance > 0.0) || !(config.constant_tolerance > 0.0)) {
    throw ValidationError("flow config needs dt >= 0 and positive tolerances", "config");
  }
  const simd::Kernels& k = simd::kernels(config.isa.value_or(simd::active_isa()));
  const GridTarget gt(target);
  FlowTrace trace;
  GridMapState state = initial;
  const double dt = config.dt > 0.0 ? config.dt : default_dt(state);
  GridDiagnostics diag;
  try {
    check_in_chart(state, target);
    diag = diagnose(state, gt, k);
  } catch (const ChartExit& e) {
    trace.verdict = Verdict::ChartExit;
    trace.message = e.what();
    trace.final_state = state;
    return trace;
  }
  auto record = [&] {
    trace.records.push_back(FlowRecord{state.steps, state.t, diag.energy, diag.sup_tension, diag.sup_dphi});
  };
  record();
  while (true) {
    if (diag.sup_tension < config.stop_tolerance) {
      trace.verdict = diag.sup_dphi < config.constant_tolerance ? Verdict::ConvergedConstant
                                                                : Verdict::ConvergedNonconstant;
      break;
    }
    if (state.steps - initial.steps >= config.max_steps) {
      trace.verdict = Verdict::MaxSteps;
      break;
    }
    double step_dt = dt;
    bool accepted = false;
    bool stop = false;
    for (int attempt = 0; !accepted; ++attempt) {
      GridMapState next = advance(state, diag.tension, step_dt, k);
      GridDiagnostics next_diag;
      try {
        check_in_chart(next, target);
        next_diag = diagnose(next, gt, k);
      } catch (const ChartExit& e) {
        trace.verdict = Verdict::ChartExit;
        trace.message = e.what();
        stop = true;
        break;
      }
      if (next_diag.energy <= diag.energy) {
        state = std::move(next);
        diag = std::move(next_diag);
        accepted = true;
      } else if (config.policy == EnergyPolicy::Abort || attempt >= config.max_halvings) {
        trace.verdict = Verdict::EnergyIncrease;
        trace.message = "energy rises from " + fmt(diag.energy) + " to " + fmt(next_diag.energy) + " at t = " +
                        fmt(state.t);
        stop = true;
        break;
      } else {
        step_dt *= 0.5;
        ++trace.rejected_steps;
      }
    }
    if (stop) break;
    record();
  }
  trace.final_state = std::move(state);
  return trace;
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace) {
  os << "step,t,energy,sup_tension,sup_dphi\n";
  for (const auto& r : trace.records) {
    os << r.step << ',' << fmt(r.t) << ',' << fmt(r.energy) << ',' << fmt(r.sup_tension) << ',' << fmt(r.sup_dphi)
       << '\n';
  }
}

void write_state(std::ostream& os, const GridMapState& state) {
  const std::size_t nodes = state.nodes();
  for (std::size_t node = 0; node < nodes; ++node) {
    std::size_t rem = node;
    std::vector<std::size_t> idx(state.resolution.size());
    for (int a = state.domain_dim() - 1; a >= 0; --a) {
      const std::size_t n = static_cast<std::size_t>(state.resolution[static_cast<std::size_t>(a)]);
      idx[static_cast<std::size_t>(a)] = rem % n;
      rem /= n;
    }
    for (std::size_t a = 0; a < idx.size(); ++a) os << (a ? " " : "") << idx[a];
    for (int a = 0; a < state.target_dim; ++a) os << ' ' << fmt(state.plane(a)[node]);
    os << '\n';
  }
}

double index_form(const maps::SmoothMap& phi, const maps::FieldAlongMap& v, const maps::FieldAlongMap& w,
                  const std::vector<int>& resolution) {
  const auto& dom = phi.domain();
  bool torus = static_cast<int>(dom.periods().size()) == dom.dim();
  for (double p : dom.periods()) torus = torus && std::abs(p - kTwoPi) < 1e-12;
  if (!torus) throw ValidationError("index form needs the flat torus as domain, got " + dom.name(), dom.name());
  if (static_cast<int>(resolution.size()) != dom.dim()) throw ArityError("resolution does not match the domain");
  if (v.size() != phi.target().dim() || w.size() != phi.target().dim()) {
    throw ArityError("variation fields must have one component per target coordinate");
  }
  GridMapState grid;
  grid.resolution = resolution;
  double cell = 1.0;
  for (int a = 0; a < dom.dim(); ++a) cell *= grid.spacing(a);
  double total = 0.0;
  const std::size_t nodes = grid.nodes();
  for (std::size_t node = 0; node < nodes; ++node) {
    const auto x = grid.position(node);
    geometry::Point p = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    const maps::MapPoint mp = maps::map_point(phi, p, 2);
    const auto vj = v.jets().eval({x.data(), x.size()}, 2);
    const auto wj = w.jets().eval({x.data(), x.size()}, 0);
    const geometry::Vector jv = maps::jacobi_operator(mp, vj);
    geometry::Vector wv(w.size());
    for (int a = 0; a < w.size(); ++a) wv[a] = wj.value(a);
    total += jv.dot(mp.target.metric.g * wv);
  }
  return cell * total;
}

}  // namespace liouville::flow
