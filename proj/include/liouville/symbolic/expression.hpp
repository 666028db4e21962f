#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace liouville::symbolic {

enum class Op : std::uint8_t {
  Const,
  Var,
  Neg,
  Exp,
  Log,
  Sqrt,
  Sin,
  Cos,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

bool is_unary(Op op);
bool is_binary(Op op);

class Node;
using NodePtr = std::shared_ptr<const Node>;

/// Interned expression node. Structurally equal nodes share one instance,
/// so pointer identity is structural equality and derivative memos are
/// shared by every expression that reaches the node.
class Node {
 public:
  Op op;
  double value = 0.0;  // Const
  int index = 0;       // Var: coordinate index; Pow: integer exponent
  NodePtr lhs;
  NodePtr rhs;
  std::size_t hash = 0;
  std::uint64_t id = 0;

  NodePtr cached_derivative(int var) const;
  void store_derivative(int var, NodePtr d) const;

 private:
  mutable std::mutex memo_mutex_;
  mutable std::vector<NodePtr> memo_;
};

/// Immutable closed-form scalar expression over chart coordinates x0..x{d-1}.
class Expression {
 public:
  Expression();
  Expression(double c);  // NOLINT(google-explicit-constructor)
  explicit Expression(NodePtr node);

  static Expression constant(double c);
  static Expression variable(int index);

  const NodePtr& node() const { return node_; }
  Op op() const { return node_->op; }

  bool is_constant() const { return node_->op == Op::Const; }
  bool is_zero() const { return is_constant() && node_->value == 0.0; }
  double constant_value() const { return node_->value; }

  /// Largest coordinate index referenced, or -1 for a closed constant.
  int max_variable() const;
  std::size_t node_count() const;
  std::string to_string() const;

  Expression derive(int var) const;
  double eval(std::span<const double> point) const;

  bool same_as(const Expression& other) const { return node_ == other.node_; }

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

  Expression& operator+=(const Expression& b) { return *this = *this + b; }
  Expression& operator-=(const Expression& b) { return *this = *this - b; }
  Expression& operator*=(const Expression& b) { return *this = *this * b; }

 private:
  NodePtr node_;
};

Expression pow(const Expression& base, int exponent);
Expression exp(const Expression& a);
Expression log(const Expression& a);
Expression sqrt(const Expression& a);
Expression sin(const Expression& a);
Expression cos(const Expression& a);

Expression derive(const Expression& e, int var);
double eval(const Expression& e, std::span<const double> point);

/// Replace every coordinate x_i by replacements[i]. Throws ArityError when
/// the expression references a coordinate without a replacement.
Expression substitute(const Expression& e,
                      std::span<const Expression> replacements);

/// Repeated squaring; shared by every evaluation backend so scalar and
/// vector paths round identically.
double ipow(double x, int n);

using ExprVector = std::vector<Expression>;

/// Row-major square matrix of expressions.
struct ExprMatrix {
  int n = 0;
  std::vector<Expression> entries;

  ExprMatrix() = default;
  explicit ExprMatrix(int size) : n(size), entries(static_cast<std::size_t>(size * size)) {}
  Expression& operator()(int i, int j) { return entries[static_cast<std::size_t>(i * n + j)]; }
  const Expression& operator()(int i, int j) const {
    return entries[static_cast<std::size_t>(i * n + j)];
  }
};

Expression determinant(const ExprMatrix& m);
ExprMatrix inverse(const ExprMatrix& m);

}  // namespace liouville::symbolic
