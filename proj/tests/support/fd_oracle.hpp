#pragma once

// Finite-difference geometry built only from pointwise metric values.
// Shares no code with the jet-based kernel beyond evaluating g.

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace liouville::testing {

using MetricFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct FdGeometry {
  int dim = 0;
  std::vector<double> gamma;   // (k, i, j)
  std::vector<double> riemann; // (l, i, j, k): component l of R(∂i, ∂j)∂k
  Eigen::MatrixXd ricci;       // contraction R^k_{k j i}

  double christoffel(int k, int i, int j) const { return gamma[static_cast<std::size_t>((k * dim + i) * dim + j)]; }
  double rm(int l, int i, int j, int k) const {
    return riemann[static_cast<std::size_t>(((l * dim + i) * dim + j) * dim + k)];
  }
};

inline std::vector<double> fd_christoffel(const MetricFn& g, const Eigen::VectorXd& p, double h) {
  const int d = static_cast<int>(p.size());
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m) {
    Eigen::VectorXd a = p, b = p;
    a[m] += h;
    b[m] -= h;
    dg[static_cast<std::size_t>(m)] = (g(a) - g(b)) / (2.0 * h);
  }
  const Eigen::MatrixXd inv = g(p).inverse();
  std::vector<double> out(static_cast<std::size_t>(d * d * d), 0.0);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int l = 0; l < d; ++l) {
          acc += 0.5 * inv(k, l) *
                 (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                  dg[static_cast<std::size_t>(l)](i, j));
        }
        out[static_cast<std::size_t>((k * d + i) * d + j)] = acc;
      }
  return out;
}

inline FdGeometry fd_geometry(const MetricFn& g, const Eigen::VectorXd& p, double h = 1e-5) {
  const int d = static_cast<int>(p.size());
  FdGeometry geo;
  geo.dim = d;
  geo.gamma = fd_christoffel(g, p, h);
  std::vector<std::vector<double>> dgamma(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m) {
    Eigen::VectorXd a = p, b = p;
    a[m] += h;
    b[m] -= h;
    const auto ga = fd_christoffel(g, a, h);
    const auto gb = fd_christoffel(g, b, h);
    auto& dst = dgamma[static_cast<std::size_t>(m)];
    dst.resize(ga.size());
    for (std::size_t n = 0; n < ga.size(); ++n) dst[n] = (ga[n] - gb[n]) / (2.0 * h);
  }
  auto G = [&](int k, int i, int j) { return geo.christoffel(k, i, j); };
  auto dG = [&](int m, int k, int i, int j) {
    return dgamma[static_cast<std::size_t>(m)][static_cast<std::size_t>((k * d + i) * d + j)];
  };
  geo.riemann.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double acc = dG(i, l, j, k) - dG(j, l, i, k);
          for (int s = 0; s < d; ++s) acc += G(l, i, s) * G(s, j, k) - G(l, j, s) * G(s, i, k);
          geo.riemann[static_cast<std::size_t>(((l * d + i) * d + j) * d + k)] = acc;
        }
  geo.ricci = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) geo.ricci(i, j) += geo.rm(k, k, j, i);
  return geo;
}

}  // namespace liouville::testing
