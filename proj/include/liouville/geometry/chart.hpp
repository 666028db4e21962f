#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "liouville/symbolic/expression.hpp"
#include "liouville/symbolic/tape.hpp"

namespace liouville::geometry {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Rows are frame vectors in coordinate components.
using Frame = Eigen::MatrixXd;

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct Box {
  std::vector<Interval> axes;

  static Box unbounded(int dim) { return Box{std::vector<Interval>(static_cast<std::size_t>(dim))}; }
  static Box uniform(int dim, double lo, double hi) {
    return Box{std::vector<Interval>(static_cast<std::size_t>(dim), Interval{lo, hi})};
  }
  int dim() const { return static_cast<int>(axes.size()); }
  bool bounded() const;
  bool contains(const Point& p) const;
};

/// A Riemannian metric on a single coordinate chart. Only the upper
/// triangle of g is stored; g(j, i) returns the same expression as g(i, j).
/// Copies share the lazily built symbolic caches.
class ChartManifold {
 public:
  struct Options {
    /// Box used to draw sample points.
    Box sample_box;
    /// Region where the chart is valid; unbounded when empty.
    Box chart_region;
    /// Per-axis period, 0 for non-periodic coordinates.
    std::vector<double> periods;
  };

  ChartManifold(std::string name, const symbolic::ExprMatrix& metric, Options options);

  const std::string& name() const { return impl_->name; }
  int dim() const { return impl_->dim; }
  const symbolic::Expression& g(int i, int j) const;
  const Box& sample_box() const { return impl_->options.sample_box; }
  const Box& chart_region() const { return impl_->options.chart_region; }
  const std::vector<double>& periods() const { return impl_->options.periods; }
  bool in_chart(const Point& p) const;
  /// Metric entries as a full symmetric matrix of expressions.
  symbolic::ExprMatrix metric_matrix() const;

  /// Jets of the upper-triangle entries, ordered by upper_slot(i, j).
  const symbolic::CachedJets& metric_jets() const { return impl_->jets; }
  int upper_slot(int i, int j) const;

  const symbolic::ExprMatrix& inverse_metric_expr() const;
  /// Symbolic Christoffel symbols, index k*dim*dim + i*dim + j for Γ^k_ij.
  const std::vector<symbolic::Expression>& christoffel_expr() const;

 private:
  struct Impl {
    std::string name;
    int dim = 0;
    std::vector<symbolic::Expression> upper;
    Options options;
    symbolic::CachedJets jets;
    std::once_flag inverse_once;
    symbolic::ExprMatrix inverse;
    std::once_flag christoffel_once;
    std::vector<symbolic::Expression> christoffel;
  };
  std::shared_ptr<Impl> impl_;
};

/// Expression with cached jets, for potentials and test functions.
class ScalarField {
 public:
  ScalarField(symbolic::Expression e, int dim)  // NOLINT
      : expr_(std::move(e)), jets_({expr_}, dim) {}
  const symbolic::Expression& expr() const { return expr_; }
  const symbolic::CachedJets& jets() const { return jets_; }

 private:
  symbolic::Expression expr_;
  symbolic::CachedJets jets_;
};

/// Covariant p-tensor field; components in row-major multi-index order.
class CovariantTensorField {
 public:
  CovariantTensorField(int rank, int dim, std::vector<symbolic::Expression> components);
  int rank() const { return rank_; }
  int dim() const { return dim_; }
  const std::vector<symbolic::Expression>& components() const { return jets_.functions(); }
  const symbolic::CachedJets& jets() const { return jets_; }

 private:
  int rank_;
  int dim_;
  symbolic::CachedJets jets_;
};

}  // namespace liouville::geometry
