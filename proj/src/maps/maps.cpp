#include "liouville/maps/maps.hpp"

#include <random>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville::maps {

namespace {

std::span<const double> as_span(const Point& p) {
  return {p.data(), static_cast<std::size_t>(p.size())};
}

std::string describe(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

Vector frame_vector(const Frame& f, int a) { return f.row(a).transpose(); }

}  // namespace

SmoothMap::SmoothMap(ChartManifold domain, ChartManifold target, std::vector<Expression> components)
    : impl_(std::make_shared<Impl>(std::move(domain), std::move(target))) {
  if (static_cast<int>(components.size()) != impl_->target.dim()) {
    throw ValidationError("map needs " + std::to_string(impl_->target.dim()) + " components for target " +
                              impl_->target.name() + ", got " + std::to_string(components.size()),
                          "components");
  }
  for (const auto& c : components) {
    if (c.max_variable() >= impl_->domain.dim()) {
      throw ValidationError("map component " + c.to_string() + " uses a coordinate beyond domain dimension " +
                                std::to_string(impl_->domain.dim()),
                            "components");
    }
  }
  impl_->jets = symbolic::CachedJets(std::move(components), impl_->domain.dim());
}

const std::vector<Expression>& SmoothMap::composed_christoffel() const {
  std::call_once(impl_->christoffel_once, [this] {
    for (const auto& g : impl_->target.christoffel_expr()) {
      impl_->christoffel.push_back(symbolic::substitute(g, components()));
    }
  });
  return impl_->christoffel;
}

const std::vector<Expression>& SmoothMap::composed_metric() const {
  std::call_once(impl_->metric_once, [this] {
    const int n = impl_->target.dim();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) impl_->metric.push_back(symbolic::substitute(impl_->target.g(a, b), components()));
    }
  });
  return impl_->metric;
}

const std::vector<Expression>& SmoothMap::tension_expr() const {
  std::call_once(impl_->tension_once, [this] {
    const int m = impl_->domain.dim();
    const int n = impl_->target.dim();
    const auto& inv = impl_->domain.inverse_metric_expr();
    const auto& gam_m = impl_->domain.christoffel_expr();
    const auto& gam_n = composed_christoffel();
    const auto& phi = components();
    std::vector<std::vector<Expression>> dphi(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < m; ++i) dphi[static_cast<std::size_t>(a)].push_back(phi[static_cast<std::size_t>(a)].derive(i));
    }
    auto d1 = [&](int a, int i) -> const Expression& {
      return dphi[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];
    };
    for (int a = 0; a < n; ++a) {
      Expression tau = Expression::constant(0.0);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          if (inv(i, j).is_zero()) continue;
          Expression h = d1(a, i).derive(j);
          for (int k = 0; k < m; ++k) {
            h = h - gam_m[static_cast<std::size_t>((k * m + i) * m + j)] * d1(a, k);
          }
          for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
              h = h + gam_n[static_cast<std::size_t>((a * n + b) * n + c)] * d1(b, i) * d1(c, j);
            }
          }
          tau = tau + inv(i, j) * h;
        }
      }
      impl_->tension.push_back(tau);
    }
  });
  return impl_->tension;
}

FieldAlongMap::FieldAlongMap(std::vector<Expression> components, int domain_dim)
    : jets_(std::move(components), domain_dim) {
  for (const auto& c : jets_.functions()) {
    if (c.max_variable() >= domain_dim) {
      throw ValidationError("field component " + c.to_string() + " uses a coordinate beyond domain dimension " +
                                std::to_string(domain_dim),
                            "components");
    }
  }
}

std::vector<Expression> random_polynomial_components(const ChartManifold& domain, int target_dim, int degree,
                                                     std::uint64_t seed, double scale,
                                                     const std::vector<double>& offset) {
  const int m = domain.dim();
  const auto& box = domain.sample_box();
  if (!box.bounded()) throw ValidationError("random polynomial needs a bounded domain sample box", domain.name());
  if (degree < 0) throw ValidationError("polynomial degree must be non-negative", "degree");
  std::vector<Expression> u;
  for (int i = 0; i < m; ++i) {
    const auto& iv = box.axes[static_cast<std::size_t>(i)];
    const double c = 0.5 * (iv.lo + iv.hi);
    const double w = 0.5 * (iv.hi - iv.lo);
    u.push_back((Expression::variable(i) - Expression::constant(c)) / Expression::constant(w));
  }
  // exponent tuples with total degree <= degree, graded then lexicographic
  std::vector<std::vector<int>> monomials;
  for (int total = 0; total <= degree; ++total) {
    std::vector<int> cur(static_cast<std::size_t>(m), 0);
    auto rec = [&](auto&& self, int var, int left) -> void {
      if (var == m - 1) {
        cur[static_cast<std::size_t>(var)] = left;
        monomials.push_back(cur);
        return;
      }
      for (int k = left; k >= 0; --k) {
        cur[static_cast<std::size_t>(var)] = k;
        self(self, var + 1, left - k);
      }
    };
    rec(rec, 0, total);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-scale, scale);
  std::vector<Expression> out;
  for (int a = 0; a < target_dim; ++a) {
    Expression acc = Expression::constant(a < static_cast<int>(offset.size()) ? offset[static_cast<std::size_t>(a)] : 0.0);
    for (const auto& mono : monomials) {
      Expression term = Expression::constant(coef(rng));
      for (int i = 0; i < m; ++i) {
        if (mono[static_cast<std::size_t>(i)] > 0) term = term * symbolic::pow(u[static_cast<std::size_t>(i)], mono[static_cast<std::size_t>(i)]);
      }
      acc = acc + term;
    }
    out.push_back(acc);
  }
  return out;
}

MapPoint map_point(const SmoothMap& phi, const Point& p, int order, const std::optional<Frame>& frame) {
  const int m = phi.domain().dim();
  const int n = phi.target().dim();
  MapPoint mp;
  mp.point = p;
  mp.order = order;
  mp.domain = geometry::local_geometry(phi.domain(), p, 1, frame);
  mp.jet = phi.jets().eval(as_span(p), std::max(order, 1));
  mp.image.resize(n);
  for (int a = 0; a < n; ++a) mp.image[a] = mp.jet.value(a);
  try {
    mp.target = geometry::local_geometry(phi.target(), mp.image, 2);
  } catch (const ChartExit& e) {
    throw ChartExit("image of " + describe(p) + " leaves the target chart: " + e.what());
  } catch (const DomainError& e) {
    throw ChartExit("target metric undefined at the image of " + describe(p) + ": " + e.what());
  }
  mp.differential.resize(n, m);
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < m; ++i) mp.differential(a, i) = mp.jet.d(a, i);
  }
  return mp;
}

MapJet differential_at(const SmoothMap& phi, const Point& p, int order) {
  MapPoint mp = map_point(phi, p, order);
  return MapJet{mp.image, mp.differential, mp.jet};
}

double energy_density(const MapPoint& mp) {
  double acc = 0.0;
  const Matrix& h = mp.target.metric.g;
  for (int a = 0; a < mp.domain.frame.rows(); ++a) {
    const Vector w = mp.differential * frame_vector(mp.domain.frame, a);
    acc += w.dot(h * w);
  }
  return acc;
}

double energy_density_at(const SmoothMap& phi, const Point& p, const std::optional<Frame>& frame) {
  return energy_density(map_point(phi, p, 1, frame));
}

Matrix pullback_connection(const MapPoint& mp, const Jet& v) {
  const int m = static_cast<int>(mp.differential.cols());
  const int n = static_cast<int>(mp.differential.rows());
  Vector vv(n);
  for (int a = 0; a < n; ++a) vv[a] = v.value(a);
  Matrix out(n, m);
  for (int i = 0; i < m; ++i) {
    const Vector gam = mp.target.christoffel.contract(mp.differential.col(i), vv);
    for (int a = 0; a < n; ++a) out(a, i) = v.d(a, i) + gam[a];
  }
  return out;
}

Vector pullback_connection_at(const SmoothMap& phi, const FieldAlongMap& v, int direction, const Point& p) {
  if (v.size() != phi.target().dim()) throw ArityError("field along map has wrong number of components");
  if (direction < 0 || direction >= phi.domain().dim()) throw ArityError("direction out of range");
  const MapPoint mp = map_point(phi, p, 1);
  return pullback_connection(mp, v.jets().eval(as_span(p), 1)).col(direction);
}

Vector tension(const MapPoint& mp) {
  const int m = static_cast<int>(mp.differential.cols());
  const int n = static_cast<int>(mp.differential.rows());
  Vector tau = Vector::Zero(n);
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double w = 0.0;
        for (int e = 0; e < m; ++e) w += mp.domain.frame(e, i) * mp.domain.frame(e, j);
        if (w == 0.0) continue;
        double h = mp.jet.d(a, i, j);
        for (int k = 0; k < m; ++k) h -= mp.domain.christoffel(k, i, j) * mp.differential(a, k);
        for (int b = 0; b < n; ++b) {
          for (int c = 0; c < n; ++c) {
            h += mp.target.christoffel(a, b, c) * mp.differential(b, i) * mp.differential(c, j);
          }
        }
        tau[a] += w * h;
      }
    }
  }
  return tau;
}

Vector tension_at(const SmoothMap& phi, const Point& p, const std::optional<Frame>& frame) {
  return tension(map_point(phi, p, 2, frame));
}

Vector rough_laplacian(const MapPoint& mp, const Jet& v) {
  const int m = static_cast<int>(mp.differential.cols());
  const int n = static_cast<int>(mp.differential.rows());
  const auto& gam = mp.target.christoffel;
  const auto& dgam = mp.target.christoffel_derivative;
  Vector vv(n);
  for (int a = 0; a < n; ++a) vv[a] = v.value(a);
  const Matrix w = pullback_connection(mp, v);  // W_j as columns

  Vector out = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double weight = 0.0;
      for (int e = 0; e < m; ++e) weight += mp.domain.frame(e, i) * mp.domain.frame(e, j);
      if (weight == 0.0) continue;
      for (int a = 0; a < n; ++a) {
        // ∂_i W_j
        double acc = v.d(a, i, j);
        for (int b = 0; b < n; ++b) {
          for (int c = 0; c < n; ++c) {
            double dg = 0.0;
            for (int d = 0; d < n; ++d) dg += dgam(d, a, b, c) * mp.differential(d, i);
            acc += dg * mp.differential(b, j) * vv[c] +
                   gam(a, b, c) * (mp.jet.d(b, i, j) * vv[c] + mp.differential(b, j) * v.d(c, i));
          }
        }
        for (int b = 0; b < n; ++b) {
          for (int c = 0; c < n; ++c) acc += gam(a, b, c) * mp.differential(b, i) * w(c, j);
        }
        for (int k = 0; k < m; ++k) acc -= mp.domain.christoffel(k, i, j) * w(a, k);
        out[a] += weight * acc;
      }
    }
  }
  return out;
}

Vector curvature_trace(const MapPoint& mp, const Vector& v) {
  Vector out = Vector::Zero(v.size());
  for (int e = 0; e < mp.domain.frame.rows(); ++e) {
    const Vector x = mp.differential * frame_vector(mp.domain.frame, e);
    out += mp.target.curvature.riemann.apply(v, x, x);
  }
  return out;
}

Vector jacobi_operator(const MapPoint& mp, const Jet& v) {
  const int n = static_cast<int>(mp.differential.rows());
  Vector vv(n);
  for (int a = 0; a < n; ++a) vv[a] = v.value(a);
  return -curvature_trace(mp, vv) - rough_laplacian(mp, v);
}

Vector jacobi_operator_at(const SmoothMap& phi, const FieldAlongMap& v, const Point& p,
                          const std::optional<Frame>& frame) {
  if (v.size() != phi.target().dim()) throw ArityError("field along map has wrong number of components");
  const MapPoint mp = map_point(phi, p, 2, frame);
  return jacobi_operator(mp, v.jets().eval(as_span(p), 2));
}

Vector bitension_at(const SmoothMap& phi, const Point& p, const std::optional<Frame>& frame) {
  const FieldAlongMap tau(phi.tension_expr(), phi.domain().dim());
  return jacobi_operator_at(phi, tau, p, frame);
}

}  // namespace liouville::maps
