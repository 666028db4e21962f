#include "liouville/symbolic/tape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>

#include "liouville/errors.hpp"

namespace liouville::symbolic {

namespace {

[[noreturn]] void domain_failure(Op op, double a) {
  std::string what;
  switch (op) {
    case Op::Div: what = "division by zero"; break;
    case Op::Log: what = "log of non-positive value " + std::to_string(a); break;
    case Op::Sqrt: what = "sqrt of negative value " + std::to_string(a); break;
    case Op::Pow: what = "negative power of zero"; break;
    default: what = "invalid operation"; break;
  }
  throw DomainError("expression evaluation: " + what);
}

}  // namespace

Tape Tape::compile(std::span<const Expression> roots) {
  Tape tape;
  std::unordered_map<const Node*, int> slot;
  // Iterative post-order so very deep expressions do not overflow the stack.
  std::vector<std::pair<const Node*, bool>> stack;
  for (const Expression& root : roots) {
    stack.emplace_back(root.node().get(), false);
    while (!stack.empty()) {
      auto [node, expanded] = stack.back();
      stack.pop_back();
      if (slot.count(node)) continue;
      if (!expanded) {
        stack.emplace_back(node, true);
        if (node->rhs && !slot.count(node->rhs.get())) stack.emplace_back(node->rhs.get(), false);
        if (node->lhs && !slot.count(node->lhs.get())) stack.emplace_back(node->lhs.get(), false);
        continue;
      }
      Instr ins{node->op};
      ins.value = node->value;
      ins.index = node->index;
      if (node->lhs) ins.lhs = slot.at(node->lhs.get());
      if (node->rhs) ins.rhs = slot.at(node->rhs.get());
      if (node->op == Op::Var) tape.input_dim_ = std::max(tape.input_dim_, node->index + 1);
      slot.emplace(node, static_cast<int>(tape.code_.size()));
      tape.code_.push_back(ins);
    }
    tape.outputs_.push_back(slot.at(root.node().get()));
  }
  return tape;
}

void Tape::eval(std::span<const double> point, std::span<double> out) const {
  if (static_cast<int>(point.size()) < input_dim_) {
    throw ArityError("expression references x" + std::to_string(input_dim_ - 1) +
                     " but the point has dimension " + std::to_string(point.size()));
  }
  std::vector<double> reg(code_.size());
  for (std::size_t r = 0; r < code_.size(); ++r) {
    const Instr& ins = code_[r];
    const double a = ins.lhs >= 0 ? reg[static_cast<std::size_t>(ins.lhs)] : 0.0;
    const double b = ins.rhs >= 0 ? reg[static_cast<std::size_t>(ins.rhs)] : 0.0;
    double v = 0.0;
    switch (ins.op) {
      case Op::Const: v = ins.value; break;
      case Op::Var: v = point[static_cast<std::size_t>(ins.index)]; break;
      case Op::Neg: v = -a; break;
      case Op::Exp: v = std::exp(a); break;
      case Op::Log:
        if (!(a > 0.0)) domain_failure(Op::Log, a);
        v = std::log(a);
        break;
      case Op::Sqrt:
        if (a < 0.0) domain_failure(Op::Sqrt, a);
        v = std::sqrt(a);
        break;
      case Op::Sin: v = std::sin(a); break;
      case Op::Cos: v = std::cos(a); break;
      case Op::Pow:
        if (ins.index < 0 && a == 0.0) domain_failure(Op::Pow, a);
        v = simd::ipow(a, ins.index);
        break;
      case Op::Add: v = a + b; break;
      case Op::Sub: v = a - b; break;
      case Op::Mul: v = a * b; break;
      case Op::Div:
        if (b == 0.0) domain_failure(Op::Div, b);
        v = a / b;
        break;
    }
    reg[r] = v;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = reg[static_cast<std::size_t>(outputs_[k])];
}

std::vector<double> Tape::eval(std::span<const double> point) const {
  std::vector<double> out(outputs_.size());
  eval(point, out);
  return out;
}

void Tape::eval_batch(std::span<const double* const> inputs, std::size_t n,
                      std::span<double* const> outputs) const {
  eval_batch(inputs, n, outputs, simd::kernels());
}

void Tape::eval_batch(std::span<const double* const> inputs, std::size_t n,
                      std::span<double* const> outputs, const simd::Kernels& k) const {
  if (static_cast<int>(inputs.size()) < input_dim_) {
    throw ArityError("batch evaluation needs " + std::to_string(input_dim_) + " coordinate planes");
  }
  std::vector<double> reg(code_.size() * n);
  auto plane = [&](int r) { return reg.data() + static_cast<std::size_t>(r) * n; };
  for (std::size_t r = 0; r < code_.size(); ++r) {
    const Instr& ins = code_[r];
    double* out = plane(static_cast<int>(r));
    const double* a = ins.lhs >= 0 ? plane(ins.lhs) : nullptr;
    const double* b = ins.rhs >= 0 ? plane(ins.rhs) : nullptr;
    switch (ins.op) {
      case Op::Const: k.fill(ins.value, out, n); break;
      case Op::Var: std::copy_n(inputs[static_cast<std::size_t>(ins.index)], n, out); break;
      case Op::Neg: k.neg(a, out, n); break;
      case Op::Exp: k.exp(a, out, n); break;
      case Op::Log:
        for (std::size_t i = 0; i < n; ++i) {
          if (!(a[i] > 0.0)) domain_failure(Op::Log, a[i]);
        }
        k.log(a, out, n);
        break;
      case Op::Sqrt:
        for (std::size_t i = 0; i < n; ++i) {
          if (a[i] < 0.0) domain_failure(Op::Sqrt, a[i]);
        }
        k.sqrt(a, out, n);
        break;
      case Op::Sin: k.sin(a, out, n); break;
      case Op::Cos: k.cos(a, out, n); break;
      case Op::Pow:
        if (ins.index < 0) {
          for (std::size_t i = 0; i < n; ++i) {
            if (a[i] == 0.0) domain_failure(Op::Pow, a[i]);
          }
        }
        k.ipow(a, ins.index, out, n);
        break;
      case Op::Add: k.add(a, b, out, n); break;
      case Op::Sub: k.sub(a, b, out, n); break;
      case Op::Mul: k.mul(a, b, out, n); break;
      case Op::Div:
        for (std::size_t i = 0; i < n; ++i) {
          if (b[i] == 0.0) domain_failure(Op::Div, b[i]);
        }
        k.div(a, b, out, n);
        break;
    }
  }
  for (std::size_t o = 0; o < outputs_.size(); ++o) {
    std::copy_n(plane(outputs_[o]), n, outputs[o]);
  }
}

namespace {

int ipow_int(int base, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

JetEvaluator::JetEvaluator(std::vector<Expression> functions, int dim, int order)
    : functions_(std::move(functions)), dim_(dim), order_(order) {
  // Enumerate sorted multi-indices per order; map every permutation to the
  // slot of its sorted representative.
  auto layout = std::make_shared<Layout>();
  auto& offset_ = layout->offset;
  std::vector<std::vector<int>> sorted_indices;  // flat list of reps, per slot
  offset_.resize(static_cast<std::size_t>(order_) + 1);
  std::map<std::vector<int>, int> rep_slot;
  for (int k = 0; k <= order_; ++k) {
    const int count = ipow_int(dim_, k);
    offset_[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(count), -1);
    for (int flat = 0; flat < count; ++flat) {
      std::vector<int> idx(static_cast<std::size_t>(k));
      int rem = flat;
      for (int p = k - 1; p >= 0; --p) {
        idx[static_cast<std::size_t>(p)] = rem % dim_;
        rem /= dim_;
      }
      std::vector<int> rep = idx;
      std::sort(rep.begin(), rep.end());
      auto it = rep_slot.find(rep);
      if (it == rep_slot.end()) {
        it = rep_slot.emplace(rep, static_cast<int>(sorted_indices.size())).first;
        sorted_indices.push_back(rep);
      }
      offset_[static_cast<std::size_t>(k)][static_cast<std::size_t>(flat)] = it->second;
    }
  }
  layout->block = static_cast<int>(sorted_indices.size());
  layout_ = layout;

  std::vector<Expression> roots;
  roots.reserve(functions_.size() * sorted_indices.size());
  for (const Expression& f : functions_) {
    // Derivative along a sorted multi-index reuses the one of its prefix.
    std::map<std::vector<int>, Expression> built;
    built.emplace(std::vector<int>{}, f);
    for (const auto& rep : sorted_indices) {
      if (rep.empty()) {
        roots.push_back(f);
        continue;
      }
      std::vector<int> prefix(rep.begin(), rep.end() - 1);
      const Expression d = built.at(prefix).derive(rep.back());
      built.emplace(rep, d);
      roots.push_back(d);
    }
  }
  tape_ = Tape::compile(roots);
}

JetEvaluator::Jet JetEvaluator::eval(std::span<const double> point) const {
  Jet jet;
  jet.layout_ = layout_;
  jet.dim_ = dim_;
  jet.order_ = order_;
  jet.values_.resize(tape_.output_count());
  if (static_cast<int>(point.size()) < dim_) {
    throw ArityError("jet evaluation: point dimension " + std::to_string(point.size()) +
                     " below chart dimension " + std::to_string(dim_));
  }
  tape_.eval(point, jet.values_);
  return jet;
}

double JetEvaluator::Jet::at(int f, int k, int flat) const {
  const int slot = layout_->offset.at(static_cast<std::size_t>(k))[static_cast<std::size_t>(flat)];
  return values_[static_cast<std::size_t>(f * layout_->block + slot)];
}

double JetEvaluator::Jet::d(int f, int i) const { return at(f, 1, i); }
double JetEvaluator::Jet::d(int f, int i, int j) const { return at(f, 2, i * dim_ + j); }
double JetEvaluator::Jet::d(int f, int i, int j, int k) const {
  return at(f, 3, (i * dim_ + j) * dim_ + k);
}
double JetEvaluator::Jet::d(int f, int i, int j, int k, int l) const {
  return at(f, 4, ((i * dim_ + j) * dim_ + k) * dim_ + l);
}

CachedJets::CachedJets(std::vector<Expression> functions, int dim)
    : state_(std::make_shared<State>()) {
  state_->functions = std::move(functions);
  state_->dim = dim;
}

std::shared_ptr<const JetEvaluator> CachedJets::evaluator(int order) const {
  std::lock_guard lock(state_->mutex);
  if (!state_->compiled || state_->compiled->order() < order) {
    state_->compiled = std::make_shared<JetEvaluator>(state_->functions, state_->dim, order);
  }
  return state_->compiled;
}

JetEvaluator::Jet CachedJets::eval(std::span<const double> point, int order) const {
  return evaluator(order)->eval(point);
}

}  // namespace liouville::symbolic
