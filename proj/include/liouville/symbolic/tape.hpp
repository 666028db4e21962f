#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "liouville/simd/kernels.hpp"
#include "liouville/symbolic/expression.hpp"

namespace liouville::symbolic {

/// A batch of expressions flattened into one topologically ordered
/// instruction list. Shared sub-expressions are evaluated once.
class Tape {
 public:
  struct Instr {
    Op op;
    int lhs = -1;
    int rhs = -1;
    double value = 0.0;
    int index = 0;
  };

  static Tape compile(std::span<const Expression> roots);

  /// Number of coordinates the tape reads (max variable index + 1).
  int input_dim() const { return input_dim_; }
  std::size_t output_count() const { return outputs_.size(); }
  std::size_t instruction_count() const { return code_.size(); }

  /// Throws ArityError if point has fewer than input_dim() entries and
  /// DomainError on division by zero, log of a non-positive number, sqrt of
  /// a negative number or a negative power of zero.
  void eval(std::span<const double> point, std::span<double> out) const;
  std::vector<double> eval(std::span<const double> point) const;

  /// Evaluates the tape at n points at once. inputs[i] points at n values of
  /// coordinate i; outputs[k] receives n values of root k.
  void eval_batch(std::span<const double* const> inputs, std::size_t n,
                  std::span<double* const> outputs, const simd::Kernels& kernels) const;
  void eval_batch(std::span<const double* const> inputs, std::size_t n,
                  std::span<double* const> outputs) const;

 private:
  std::vector<Instr> code_;
  std::vector<int> outputs_;
  int input_dim_ = 0;
};

/// All partial derivatives up to a fixed order of a list of functions,
/// compiled into one tape.
class JetEvaluator {
  struct Layout {
    // offset[k][flat multi-index of length k] -> slot within one function block
    std::vector<std::vector<int>> offset;
    int block = 0;
  };

 public:
  JetEvaluator(std::vector<Expression> functions, int dim, int order);

  class Jet {
   public:
    int dim() const { return dim_; }
    int order() const { return order_; }
    double value(int f) const { return at(f, 0, 0); }
    double d(int f, int i) const;
    double d(int f, int i, int j) const;
    double d(int f, int i, int j, int k) const;
    double d(int f, int i, int j, int k, int l) const;

   private:
    friend class JetEvaluator;
    double at(int f, int order, int flat) const;
    std::shared_ptr<const Layout> layout_;
    int dim_ = 0;
    int order_ = 0;
    std::vector<double> values_;
  };

  Jet eval(std::span<const double> point) const;
  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t function_count() const { return functions_.size(); }

 private:
  std::vector<Expression> functions_;
  int dim_;
  int order_;
  std::shared_ptr<const Layout> layout_;
  Tape tape_;
};

/// Lazily compiled jets of a fixed list of expressions; compiles the highest
/// order requested so far. Safe to share between threads.
class CachedJets {
 public:
  CachedJets() = default;
  CachedJets(std::vector<Expression> functions, int dim);

  const std::vector<Expression>& functions() const { return state_->functions; }
  int dim() const { return state_->dim; }
  std::shared_ptr<const JetEvaluator> evaluator(int order) const;
  JetEvaluator::Jet eval(std::span<const double> point, int order) const;

 private:
  struct State {
    std::vector<Expression> functions;
    int dim = 0;
    std::mutex mutex;
    std::shared_ptr<const JetEvaluator> compiled;
  };
  std::shared_ptr<State> state_;
};

}  // namespace liouville::symbolic
