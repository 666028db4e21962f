#include "liouville/symbolic/expression.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "liouville/errors.hpp"
#include "liouville/simd/kernels.hpp"
#include "liouville/symbolic/tape.hpp"

namespace liouville::symbolic {

bool is_unary(Op op) {
  switch (op) {
    case Op::Neg:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
    case Op::Sin:
    case Op::Cos:
    case Op::Pow:
      return true;
    default:
      return false;
  }
}

bool is_binary(Op op) {
  return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

NodePtr Node::cached_derivative(int var) const {
  std::lock_guard lock(memo_mutex_);
  if (var < static_cast<int>(memo_.size())) return memo_[static_cast<std::size_t>(var)];
  return nullptr;
}

void Node::store_derivative(int var, NodePtr d) const {
  std::lock_guard lock(memo_mutex_);
  if (var >= static_cast<int>(memo_.size())) memo_.resize(static_cast<std::size_t>(var) + 1);
  memo_[static_cast<std::size_t>(var)] = std::move(d);
}

namespace {

struct Key {
  Op op;
  std::uint64_t bits;
  int index;
  const Node* lhs;
  const Node* rhs;
  bool operator==(const Key&) const = default;
};

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = static_cast<std::size_t>(k.op);
    h = mix(h, std::hash<std::uint64_t>{}(k.bits));
    h = mix(h, std::hash<int>{}(k.index));
    h = mix(h, std::hash<const void*>{}(k.lhs));
    h = mix(h, std::hash<const void*>{}(k.rhs));
    return h;
  }
};

class NodePool {
 public:
  static NodePool& instance() {
    static NodePool pool;
    return pool;
  }

  NodePtr intern(Op op, double value, int index, NodePtr lhs, NodePtr rhs) {
    Key key{op, std::bit_cast<std::uint64_t>(value), index, lhs.get(), rhs.get()};
    std::lock_guard lock(mutex_);
    auto it = table_.find(key);
    if (it != table_.end()) {
      if (auto alive = it->second.lock()) return alive;
    }
    auto node = std::make_shared<Node>();
    node->op = op;
    node->value = value;
    node->index = index;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    node->hash = KeyHash{}(key);
    node->id = next_id_++;
    table_[key] = node;
    if (++inserts_since_sweep_ > sweep_interval_) sweep();
    return node;
  }

 private:
  void sweep() {
    for (auto it = table_.begin(); it != table_.end();) {
      if (it->second.expired()) {
        it = table_.erase(it);
      } else {
        ++it;
      }
    }
    inserts_since_sweep_ = 0;
    sweep_interval_ = std::max<std::size_t>(65536, table_.size());
  }

  std::mutex mutex_;
  std::unordered_map<Key, std::weak_ptr<const Node>, KeyHash> table_;
  std::uint64_t next_id_ = 1;
  std::size_t inserts_since_sweep_ = 0;
  std::size_t sweep_interval_ = 65536;
};

NodePtr make_const(double c) {
  if (c == 0.0) c = 0.0;  // fold -0
  return NodePool::instance().intern(Op::Const, c, 0, nullptr, nullptr);
}

NodePtr make_var(int i) { return NodePool::instance().intern(Op::Var, 0.0, i, nullptr, nullptr); }

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

NodePtr make_unary(Op op, const NodePtr& a);

NodePtr make_neg(const NodePtr& a) {
  if (a->op == Op::Const) return make_const(-a->value);
  if (a->op == Op::Neg) return a->lhs;
  return NodePool::instance().intern(Op::Neg, 0.0, 0, a, nullptr);
}

NodePtr make_pow(const NodePtr& a, int n) {
  if (n == 0) return make_const(1.0);
  if (n == 1) return a;
  if (a->op == Op::Const && !(a->value == 0.0 && n < 0)) return make_const(ipow(a->value, n));
  return NodePool::instance().intern(Op::Pow, 0.0, n, a, nullptr);
}

NodePtr make_unary(Op op, const NodePtr& a) {
  if (op == Op::Neg) return make_neg(a);
  if (a->op == Op::Const) {
    const double v = a->value;
    switch (op) {
      case Op::Exp: return make_const(std::exp(v));
      case Op::Sin: return make_const(std::sin(v));
      case Op::Cos: return make_const(std::cos(v));
      case Op::Log:
        if (v > 0.0) return make_const(std::log(v));
        break;
      case Op::Sqrt:
        if (v >= 0.0) return make_const(std::sqrt(v));
        break;
      default:
        break;
    }
  }
  return NodePool::instance().intern(op, 0.0, 0, a, nullptr);
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  const bool ca = a->op == Op::Const;
  const bool cb = b->op == Op::Const;
  switch (op) {
    case Op::Add:
      if (ca && cb) return make_const(a->value + b->value);
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      if (b->op == Op::Neg) return make_binary(Op::Sub, a, b->lhs);
      if (a->id > b->id) std::swap(a, b);
      break;
    case Op::Sub:
      if (ca && cb) return make_const(a->value - b->value);
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make_neg(b);
      if (a == b) return make_const(0.0);
      if (b->op == Op::Neg) return make_binary(Op::Add, a, b->lhs);
      break;
    case Op::Mul:
      if (ca && cb) return make_const(a->value * b->value);
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      if (is_const(a, -1.0)) return make_neg(b);
      if (is_const(b, -1.0)) return make_neg(a);
      if (a->id > b->id) std::swap(a, b);
      break;
    case Op::Div:
      if (ca && cb && b->value != 0.0) return make_const(a->value / b->value);
      if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      if (is_const(b, -1.0)) return make_neg(a);
      break;
    default:
      break;
  }
  return NodePool::instance().intern(op, 0.0, 0, std::move(a), std::move(b));
}

NodePtr derive_node(const NodePtr& n, int var);

NodePtr derive_uncached(const NodePtr& n, int var) {
  const NodePtr& a = n->lhs;
  const NodePtr& b = n->rhs;
  switch (n->op) {
    case Op::Const:
      return make_const(0.0);
    case Op::Var:
      return make_const(n->index == var ? 1.0 : 0.0);
    case Op::Neg:
      return make_neg(derive_node(a, var));
    case Op::Exp:
      return make_binary(Op::Mul, n, derive_node(a, var));
    case Op::Log:
      return make_binary(Op::Div, derive_node(a, var), a);
    case Op::Sqrt:
      return make_binary(Op::Div, derive_node(a, var), make_binary(Op::Mul, make_const(2.0), n));
    case Op::Sin:
      return make_binary(Op::Mul, make_unary(Op::Cos, a), derive_node(a, var));
    case Op::Cos:
      return make_neg(make_binary(Op::Mul, make_unary(Op::Sin, a), derive_node(a, var)));
    case Op::Pow: {
      const NodePtr da = derive_node(a, var);
      if (is_const(da, 0.0)) return da;
      const NodePtr scaled =
          make_binary(Op::Mul, make_const(static_cast<double>(n->index)), make_pow(a, n->index - 1));
      return make_binary(Op::Mul, scaled, da);
    }
    case Op::Add:
      return make_binary(Op::Add, derive_node(a, var), derive_node(b, var));
    case Op::Sub:
      return make_binary(Op::Sub, derive_node(a, var), derive_node(b, var));
    case Op::Mul:
      return make_binary(Op::Add, make_binary(Op::Mul, derive_node(a, var), b),
                         make_binary(Op::Mul, a, derive_node(b, var)));
    case Op::Div: {
      const NodePtr db = derive_node(b, var);
      const NodePtr da = derive_node(a, var);
      if (is_const(db, 0.0)) return make_binary(Op::Div, da, b);
      return make_binary(Op::Div, make_binary(Op::Sub, da, make_binary(Op::Mul, n, db)), b);
    }
  }
  return make_const(0.0);
}

NodePtr derive_node(const NodePtr& n, int var) {
  if (n->op == Op::Const) return make_const(0.0);
  if (auto memo = n->cached_derivative(var)) return memo;
  NodePtr d = derive_uncached(n, var);
  n->store_derivative(var, d);
  return d;
}

void collect(const Node* n, std::unordered_set<const Node*>& seen) {
  if (!n || !seen.insert(n).second) return;
  collect(n->lhs.get(), seen);
  collect(n->rhs.get(), seen);
}

void print(const Node* n, std::ostream& os) {
  switch (n->op) {
    case Op::Const: {
      std::ostringstream s;
      s.precision(17);
      s << n->value;
      os << (n->value < 0 ? "(" + s.str() + ")" : s.str());
      return;
    }
    case Op::Var: os << 'x' << n->index; return;
    case Op::Neg: os << "(-"; print(n->lhs.get(), os); os << ')'; return;
    case Op::Exp: os << "exp("; print(n->lhs.get(), os); os << ')'; return;
    case Op::Log: os << "log("; print(n->lhs.get(), os); os << ')'; return;
    case Op::Sqrt: os << "sqrt("; print(n->lhs.get(), os); os << ')'; return;
    case Op::Sin: os << "sin("; print(n->lhs.get(), os); os << ')'; return;
    case Op::Cos: os << "cos("; print(n->lhs.get(), os); os << ')'; return;
    case Op::Pow:
      os << '(';
      print(n->lhs.get(), os);
      os << ")^" << (n->index < 0 ? "(" + std::to_string(n->index) + ")" : std::to_string(n->index));
      return;
    default: {
      const char sym = n->op == Op::Add ? '+' : n->op == Op::Sub ? '-' : n->op == Op::Mul ? '*' : '/';
      os << '(';
      print(n->lhs.get(), os);
      os << ' ' << sym << ' ';
      print(n->rhs.get(), os);
      os << ')';
    }
  }
}

}  // namespace

double ipow(double x, int n) { return simd::ipow(x, n); }

Expression::Expression() : node_(make_const(0.0)) {}
Expression::Expression(double c) : node_(make_const(c)) {}
Expression::Expression(NodePtr node) : node_(std::move(node)) {}

Expression Expression::constant(double c) { return Expression(make_const(c)); }
Expression Expression::variable(int index) { return Expression(make_var(index)); }

int Expression::max_variable() const {
  std::unordered_set<const Node*> seen;
  collect(node_.get(), seen);
  int best = -1;
  for (const Node* n : seen) {
    if (n->op == Op::Var) best = std::max(best, n->index);
  }
  return best;
}

std::size_t Expression::node_count() const {
  std::unordered_set<const Node*> seen;
  collect(node_.get(), seen);
  return seen.size();
}

std::string Expression::to_string() const {
  std::ostringstream os;
  print(node_.get(), os);
  return os.str();
}

Expression Expression::derive(int var) const { return Expression(derive_node(node_, var)); }

double Expression::eval(std::span<const double> point) const {
  const Expression self = *this;
  const Tape tape = Tape::compile(std::span<const Expression>(&self, 1));
  double out = 0.0;
  tape.eval(point, std::span<double>(&out, 1));
  return out;
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Add, a.node(), b.node()));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Sub, a.node(), b.node()));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Mul, a.node(), b.node()));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Div, a.node(), b.node()));
}
Expression operator-(const Expression& a) { return Expression(make_neg(a.node())); }

Expression pow(const Expression& base, int exponent) { return Expression(make_pow(base.node(), exponent)); }
Expression exp(const Expression& a) { return Expression(make_unary(Op::Exp, a.node())); }
Expression log(const Expression& a) { return Expression(make_unary(Op::Log, a.node())); }
Expression sqrt(const Expression& a) { return Expression(make_unary(Op::Sqrt, a.node())); }
Expression sin(const Expression& a) { return Expression(make_unary(Op::Sin, a.node())); }
Expression cos(const Expression& a) { return Expression(make_unary(Op::Cos, a.node())); }

Expression derive(const Expression& e, int var) { return e.derive(var); }
double eval(const Expression& e, std::span<const double> point) { return e.eval(point); }

Expression substitute(const Expression& e, std::span<const Expression> replacements) {
  std::unordered_map<const Node*, NodePtr> memo;
  std::function<NodePtr(const NodePtr&)> rec = [&](const NodePtr& n) -> NodePtr {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    NodePtr out;
    switch (n->op) {
      case Op::Const:
        out = n;
        break;
      case Op::Var:
        if (n->index >= static_cast<int>(replacements.size())) {
          throw ArityError("substitute: coordinate x" + std::to_string(n->index) +
                           " has no replacement (" + std::to_string(replacements.size()) +
                           " given)");
        }
        out = replacements[static_cast<std::size_t>(n->index)].node();
        break;
      case Op::Pow:
        out = make_pow(rec(n->lhs), n->index);
        break;
      default:
        if (is_binary(n->op)) {
          out = make_binary(n->op, rec(n->lhs), rec(n->rhs));
        } else {
          out = make_unary(n->op, rec(n->lhs));
        }
    }
    memo.emplace(n.get(), out);
    return out;
  };
  return Expression(rec(e.node()));
}

namespace {

ExprMatrix minor_of(const ExprMatrix& m, int row, int col) {
  ExprMatrix out(m.n - 1);
  for (int i = 0, r = 0; i < m.n; ++i) {
    if (i == row) continue;
    for (int j = 0, c = 0; j < m.n; ++j) {
      if (j == col) continue;
      out(r, c++) = m(i, j);
    }
    ++r;
  }
  return out;
}

}  // namespace

Expression determinant(const ExprMatrix& m) {
  if (m.n == 0) return Expression(1.0);
  if (m.n == 1) return m(0, 0);
  if (m.n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Expression det(0.0);
  for (int j = 0; j < m.n; ++j) {
    if (m(0, j).is_zero()) continue;
    const Expression term = m(0, j) * determinant(minor_of(m, 0, j));
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

ExprMatrix inverse(const ExprMatrix& m) {
  const Expression det = determinant(m);
  ExprMatrix out(m.n);
  if (m.n == 1) {
    out(0, 0) = Expression(1.0) / m(0, 0);
    return out;
  }
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      const Expression cof = determinant(minor_of(m, j, i));
      out(i, j) = ((i + j) % 2 == 0) ? cof / det : -(cof / det);
    }
  }
  return out;
}

}  // namespace liouville::symbolic
