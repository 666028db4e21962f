#include "liouville/geometry/chart.hpp"

#include "liouville/errors.hpp"

namespace liouville::geometry {

using symbolic::Expression;

bool Box::bounded() const {
  for (const auto& a : axes) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) return false;
  }
  return true;
}

bool Box::contains(const Point& p) const {
  if (p.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const auto& a = axes[static_cast<std::size_t>(i)];
    if (!(p[i] >= a.lo && p[i] <= a.hi)) return false;
  }
  return true;
}

ChartManifold::ChartManifold(std::string name, const symbolic::ExprMatrix& metric, Options options)
    : impl_(std::make_shared<Impl>()) {
  impl_->name = std::move(name);
  impl_->dim = metric.n;
  if (metric.n <= 0) throw ValidationError("manifold dimension must be positive", impl_->name);
  for (int i = 0; i < metric.n; ++i) {
    for (int j = i; j < metric.n; ++j) impl_->upper.push_back(metric(i, j));
  }
  if (options.sample_box.dim() == 0) options.sample_box = Box::uniform(metric.n, -1.0, 1.0);
  if (options.chart_region.dim() == 0) options.chart_region = Box::unbounded(metric.n);
  if (options.periods.empty()) options.periods.assign(static_cast<std::size_t>(metric.n), 0.0);
  if (options.sample_box.dim() != metric.n || options.chart_region.dim() != metric.n ||
      static_cast<int>(options.periods.size()) != metric.n) {
    throw ValidationError("bounds do not match the manifold dimension", impl_->name);
  }
  impl_->options = std::move(options);
  impl_->jets = symbolic::CachedJets(impl_->upper, metric.n);
}

int ChartManifold::upper_slot(int i, int j) const {
  if (i > j) std::swap(i, j);
  const int d = impl_->dim;
  return i * d - i * (i - 1) / 2 + (j - i);
}

const Expression& ChartManifold::g(int i, int j) const {
  return impl_->upper[static_cast<std::size_t>(upper_slot(i, j))];
}

bool ChartManifold::in_chart(const Point& p) const {
  if (p.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  const Box& region = chart_region();
  if (region.dim() != dim()) return true;
  for (int i = 0; i < dim(); ++i) {
    const auto& a = region.axes[static_cast<std::size_t>(i)];
    if (!(p[i] > a.lo && p[i] < a.hi)) return false;
  }
  return true;
}

symbolic::ExprMatrix ChartManifold::metric_matrix() const {
  symbolic::ExprMatrix m(dim());
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j < dim(); ++j) m(i, j) = g(i, j);
  }
  return m;
}

const symbolic::ExprMatrix& ChartManifold::inverse_metric_expr() const {
  std::call_once(impl_->inverse_once, [this] { impl_->inverse = symbolic::inverse(metric_matrix()); });
  return impl_->inverse;
}

const std::vector<Expression>& ChartManifold::christoffel_expr() const {
  std::call_once(impl_->christoffel_once, [this] {
    const int d = dim();
    const auto& inv = inverse_metric_expr();
    std::vector<Expression> out(static_cast<std::size_t>(d * d * d));
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          Expression acc(0.0);
          for (int l = 0; l < d; ++l) {
            if (inv(k, l).is_zero()) continue;
            const Expression lower = g(j, l).derive(i) + g(i, l).derive(j) - g(i, j).derive(l);
            acc = acc + inv(k, l) * lower;
          }
          acc = acc * 0.5;
          out[static_cast<std::size_t>((k * d + i) * d + j)] = acc;
          out[static_cast<std::size_t>((k * d + j) * d + i)] = acc;
        }
      }
    }
    impl_->christoffel = std::move(out);
  });
  return impl_->christoffel;
}

CovariantTensorField::CovariantTensorField(int rank, int dim, std::vector<Expression> components)
    : rank_(rank), dim_(dim) {
  std::size_t expected = 1;
  for (int r = 0; r < rank; ++r) expected *= static_cast<std::size_t>(dim);
  if (rank < 1 || components.size() != expected) {
    throw ValidationError("covariant tensor of rank " + std::to_string(rank) + " needs " +
                              std::to_string(expected) + " components",
                          "tensor");
  }
  jets_ = symbolic::CachedJets(std::move(components), dim);
}

}  // namespace liouville::geometry
