#include "liouville/geometry/kernel.hpp"

#include <sstream>

#include "liouville/errors.hpp"

namespace liouville::geometry {

namespace {

std::string describe(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

std::span<const double> as_span(const Point& p) {
  return {p.data(), static_cast<std::size_t>(p.size())};
}

void require_point(const ChartManifold& m, const Point& p) {
  if (p.size() != m.dim()) {
    throw ArityError("point " + describe(p) + " has dimension " + std::to_string(p.size()) +
                     ", manifold " + m.name() + " has dimension " + std::to_string(m.dim()));
  }
  if (!m.in_chart(p)) {
    throw ChartExit("point " + describe(p) + " lies outside the chart of " + m.name());
  }
}

MetricValue metric_from_jet(const ChartManifold& m, const symbolic::JetEvaluator::Jet& jet,
                            const Point& p) {
  const int d = m.dim();
  MetricValue mv;
  mv.g.resize(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      mv.g(i, j) = mv.g(j, i) = jet.value(m.upper_slot(i, j));
    }
  }
  if (!mv.g.allFinite()) {
    throw ChartExit("metric of " + m.name() + " is not finite at " + describe(p));
  }
  for (int k = 1; k <= d; ++k) {
    const double minor = mv.g.topLeftCorner(k, k).determinant();
    if (!(minor > 0.0)) {
      throw NotPositiveDefinite("metric of " + m.name() + " at " + describe(p) +
                                " fails leading principal minor " + std::to_string(k) + " (" +
                                std::to_string(minor) + ")");
    }
  }
  mv.determinant = mv.g.determinant();
  mv.inverse = mv.g.llt().solve(Matrix::Identity(d, d));
  mv.inverse = 0.5 * (mv.inverse + mv.inverse.transpose()).eval();
  return mv;
}

}  // namespace

Vector ChristoffelArray::contract(const Vector& x, const Vector& y) const {
  Vector out = Vector::Zero(dim_);
  for (int k = 0; k < dim_; ++k) {
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) acc += (*this)(k, i, j) * x[i] * y[j];
    }
    out[k] = acc;
  }
  return out;
}

Vector RiemannArray::apply(const Vector& x, const Vector& y, const Vector& z) const {
  Vector out = Vector::Zero(dim_);
  for (int l = 0; l < dim_; ++l) {
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        const double xy = x[i] * y[j];
        if (xy == 0.0) continue;
        for (int k = 0; k < dim_; ++k) acc += (*this)(l, i, j, k) * xy * z[k];
      }
    }
    out[l] = acc;
  }
  return out;
}

Frame gram_schmidt(const Matrix& g) {
  const int d = static_cast<int>(g.rows());
  Frame frame = Frame::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    Vector v = Vector::Unit(d, a);
    for (int b = 0; b < a; ++b) {
      const Vector e = frame.row(b).transpose();
      v -= (e.dot(g * v)) * e;
    }
    const double n = std::sqrt(v.dot(g * v));
    frame.row(a) = (v / n).transpose();
  }
  return frame;
}

LocalGeometry local_geometry(const ChartManifold& m, const Point& p, int order,
                             const std::optional<Frame>& frame) {
  require_point(m, p);
  const int d = m.dim();
  const auto jet = m.metric_jets().eval(as_span(p), std::max(order, 0));
  LocalGeometry geo;
  geo.point = p;
  geo.order = order;
  geo.metric = metric_from_jet(m, jet, p);
  geo.frame = frame ? *frame : gram_schmidt(geo.metric.g);
  if (order < 1) return geo;

  auto dg = [&](int i, int j, int l) { return jet.d(m.upper_slot(i, j), l); };
  // Γ_{l,ij} = ½ (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
  std::vector<double> lower(static_cast<std::size_t>(d * d * d));
  auto low = [&](int l, int i, int j) -> double& {
    return lower[static_cast<std::size_t>((l * d + i) * d + j)];
  };
  for (int l = 0; l < d; ++l) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) low(l, i, j) = 0.5 * (dg(j, l, i) + dg(i, l, j) - dg(i, j, l));
    }
  }
  const Matrix& inv = geo.metric.inverse;
  geo.christoffel = ChristoffelArray(d);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int l = 0; l < d; ++l) acc += inv(k, l) * low(l, i, j);
        geo.christoffel(k, i, j) = acc;
      }
    }
  }
  if (order < 2) return geo;

  auto d2g = [&](int i, int j, int a, int b) { return jet.d(m.upper_slot(i, j), a, b); };
  geo.christoffel_derivative = ChristoffelDerivative(d);
  for (int mm = 0; mm < d; ++mm) {
    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    Matrix dgm(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) dgm(a, b) = dg(a, b, mm);
    }
    const Matrix dinv = -inv * dgm * inv;
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          double acc = 0.0;
          for (int l = 0; l < d; ++l) {
            const double dlow = 0.5 * (d2g(j, l, i, mm) + d2g(i, l, j, mm) - d2g(i, j, l, mm));
            acc += dinv(k, l) * low(l, i, j) + inv(k, l) * dlow;
          }
          geo.christoffel_derivative(mm, k, i, j) = acc;
        }
      }
    }
  }

  const auto& gam = geo.christoffel;
  const auto& dgam = geo.christoffel_derivative;
  RiemannArray r(d);
  for (int l = 0; l < d; ++l) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          double acc = dgam(i, l, j, k) - dgam(j, l, i, k);
          for (int s = 0; s < d; ++s) acc += gam(l, i, s) * gam(s, j, k) - gam(l, j, s) * gam(s, i, k);
          r(l, i, j, k) = acc;
        }
      }
    }
  }
  // Ric(∂_i, ∂_j) = Σ_a g(R(∂_i, e_a) e_a, ∂_j)
  Matrix ric = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const Vector ei = Vector::Unit(d, i);
    Vector sum = Vector::Zero(d);
    for (int a = 0; a < d; ++a) {
      const Vector e = geo.frame.row(a).transpose();
      sum += r.apply(ei, e, e);
    }
    ric.row(i) = (geo.metric.g * sum).transpose();
  }
  geo.curvature = CurvatureValue{std::move(r), std::move(ric)};
  return geo;
}

MetricValue metric_at(const ChartManifold& m, const Point& p) {
  require_point(m, p);
  return metric_from_jet(m, m.metric_jets().eval(as_span(p), 0), p);
}

ChristoffelArray christoffel_at(const ChartManifold& m, const Point& p) {
  return local_geometry(m, p, 1).christoffel;
}

CurvatureValue riemann_at(const ChartManifold& m, const Point& p, const std::optional<Frame>& frame) {
  return local_geometry(m, p, 2, frame).curvature;
}

Vector gradient_at(const ChartManifold& m, const ScalarField& fn, const Point& p) {
  const MetricValue mv = metric_at(m, p);
  const auto jet = fn.jets().eval(as_span(p), 1);
  Vector df(m.dim());
  for (int i = 0; i < m.dim(); ++i) df[i] = jet.d(0, i);
  return mv.inverse * df;
}

Matrix hessian_at(const ChartManifold& m, const ScalarField& fn, const Point& p) {
  const LocalGeometry geo = local_geometry(m, p, 1);
  const auto jet = fn.jets().eval(as_span(p), 2);
  const int d = m.dim();
  Matrix h(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double acc = jet.d(0, i, j);
      for (int k = 0; k < d; ++k) acc -= geo.christoffel(k, i, j) * jet.d(0, k);
      h(i, j) = acc;
    }
  }
  return 0.5 * (h + h.transpose());
}

std::vector<double> divergence_tensor_at(const ChartManifold& m, const CovariantTensorField& alpha,
                                         const Point& p, const std::optional<Frame>& frame) {
  if (alpha.dim() != m.dim()) {
    throw ArityError("tensor dimension does not match manifold " + m.name());
  }
  const LocalGeometry geo = local_geometry(m, p, 1, frame);
  const auto jet = alpha.jets().eval(as_span(p), 1);
  const int d = m.dim();
  const int rank = alpha.rank();
  std::size_t count = 1;
  for (int r = 0; r < rank; ++r) count *= static_cast<std::size_t>(d);

  // (∇_i α)_{s_1..s_p} = ∂_i α_s − Σ_slots Γ^q_{i s_slot} α_{s with slot -> q}
  std::vector<int> multi(static_cast<std::size_t>(rank));
  auto flat_of = [&](const std::vector<int>& idx) {
    std::size_t f = 0;
    for (int v : idx) f = f * static_cast<std::size_t>(d) + static_cast<std::size_t>(v);
    return f;
  };
  std::vector<double> cov(count * static_cast<std::size_t>(d));  // (i, flat)
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rem = flat;
    for (int s = rank - 1; s >= 0; --s) {
      multi[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(d));
      rem /= static_cast<std::size_t>(d);
    }
    for (int i = 0; i < d; ++i) {
      double acc = jet.d(static_cast<int>(flat), i);
      for (int s = 0; s < rank; ++s) {
        std::vector<int> moved = multi;
        for (int q = 0; q < d; ++q) {
          moved[static_cast<std::size_t>(s)] = q;
          acc -= geo.christoffel(q, i, multi[static_cast<std::size_t>(s)]) *
                 jet.value(static_cast<int>(flat_of(moved)));
        }
      }
      cov[static_cast<std::size_t>(i) * count + flat] = acc;
    }
  }

  const std::size_t rest = count / static_cast<std::size_t>(d);
  std::vector<double> out(rest, 0.0);
  for (int a = 0; a < d; ++a) {
    const Vector e = geo.frame.row(a).transpose();
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k < d; ++k) {
        const double w = e[i] * e[k];
        if (w == 0.0) continue;
        for (std::size_t r = 0; r < rest; ++r) {
          out[r] += w * cov[static_cast<std::size_t>(i) * count + static_cast<std::size_t>(k) * rest + r];
        }
      }
    }
  }
  return out;
}

Frame orthonormal_frame_at(const ChartManifold& m, const Point& p) {
  return gram_schmidt(metric_at(m, p).g);
}

double frame_trace(const Frame& frame, const Matrix& t) {
  double acc = 0.0;
  for (int a = 0; a < frame.rows(); ++a) {
    const Vector e = frame.row(a).transpose();
    acc += e.dot(t * e);
  }
  return acc;
}

double norm_g(const Matrix& g, const Vector& v) { return std::sqrt(std::max(0.0, v.dot(g * v))); }

Vector relative_eigenvalues(const Frame& frame, const Matrix& t) {
  const Matrix s = frame * t * frame.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double operator_norm_g(const Frame& frame, const Matrix& t) {
  const Vector ev = relative_eigenvalues(frame, t);
  return ev.size() == 0 ? 0.0 : std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

}  // namespace liouville::geometry
