#include "linmba/semantics.hpp"

#include "linmba/errors.hpp"

#include <algorithm>

namespace linmba {

namespace {

std::uint64_t apply(Op op, std::uint64_t a, std::uint64_t b, Width w) {
  switch (op) {
  case Op::And: return a & b;
  case Op::Xor: return a ^ b;
  case Op::Or: return a | b;
  case Op::Add: return w.reduce(a + b);
  case Op::Sub: return w.reduce(a - b);
  case Op::Mul: return w.reduce(a * b);
  default: return 0;
  }
}

} // namespace

std::uint64_t evaluate(const Expr& e, const Assignment& assignment, Width width) {
  switch (e.op()) {
  case Op::Const: return width.reduce(e.value());
  case Op::Var: {
    auto it = assignment.find(e.name());
    if (it == assignment.end()) throw MissingVariable(e.name());
    return width.reduce(it->second);
  }
  case Op::BitNot: return width.reduce(~evaluate(e.child(), assignment, width));
  case Op::Neg: return width.neg(evaluate(e.child(), assignment, width));
  default:
    return apply(e.op(), evaluate(e.lhs(), assignment, width), evaluate(e.rhs(), assignment, width),
                 width);
  }
}

std::vector<std::vector<std::uint64_t>> enumerate_inputs(unsigned t, unsigned max_vars) {
  if (t > max_vars) throw CapExceeded(t, max_vars);
  std::vector<std::vector<std::uint64_t>> out(std::size_t{1} << t, std::vector<std::uint64_t>(t));
  for (std::size_t k = 0; k < out.size(); ++k)
    for (unsigned i = 0; i < t; ++i) out[k][i] = (k >> i) & 1;
  return out;
}

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& vars, Width width)
    : width_(width) {
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const Expr& n) -> void {
    switch (n.op()) {
    case Op::Const:
      code_.push_back({Op::Const, width.reduce(n.value())});
      max_stack_ = std::max(max_stack_, ++depth);
      return;
    case Op::Var: {
      auto it = std::find(vars.begin(), vars.end(), n.name());
      if (it == vars.end()) throw MissingVariable(n.name());
      code_.push_back({Op::Var, std::uint64_t(it - vars.begin())});
      max_stack_ = std::max(max_stack_, ++depth);
      return;
    }
    case Op::BitNot:
    case Op::Neg:
      self(self, n.child());
      code_.push_back({n.op(), 0});
      return;
    default:
      self(self, n.lhs());
      self(self, n.rhs());
      code_.push_back({n.op(), 0});
      --depth;
      return;
    }
  };
  emit(emit, e);
}

template <typename Fetch> std::uint64_t CompiledExpr::run(Fetch&& fetch) const {
  constexpr std::size_t kInline = 64;
  std::uint64_t inline_stack[kInline] = {};
  std::vector<std::uint64_t> heap;
  std::uint64_t* stack = inline_stack;
  if (max_stack_ > kInline) {
    heap.resize(max_stack_);
    stack = heap.data();
  }
  std::size_t sp = 0;
  const Width w = width_;
  for (const Instr& in : code_) {
    switch (in.op) {
    case Op::Const: stack[sp++] = in.arg; break;
    case Op::Var: stack[sp++] = w.reduce(fetch(in.arg)); break;
    case Op::BitNot: stack[sp - 1] = w.reduce(~stack[sp - 1]); break;
    case Op::Neg: stack[sp - 1] = w.neg(stack[sp - 1]); break;
    default:
      --sp;
      stack[sp - 1] = apply(in.op, stack[sp - 1], stack[sp], w);
      break;
    }
  }
  return stack[0];
}

std::uint64_t CompiledExpr::operator()(std::span<const std::uint64_t> inputs) const {
  return run([&](std::uint64_t i) { return inputs[i]; });
}

std::uint64_t CompiledExpr::at_corner(std::uint64_t k) const {
  return run([k](std::uint64_t i) { return (k >> i) & 1; });
}

SignatureVector signature_vector(const Expr& e, const std::vector<std::string>& vars, Width width,
                                 unsigned max_vars) {
  const auto t = static_cast<unsigned>(vars.size());
  if (t > max_vars) throw CapExceeded(t, max_vars);
  CompiledExpr prog(e, vars, width);
  SignatureVector sig{width, t, std::vector<std::uint64_t>(std::size_t{1} << t)};
  for (std::size_t k = 0; k < sig.values.size(); ++k) sig.values[k] = prog.at_corner(k);
  return sig;
}

std::uint64_t truth_vector(const Expr& bitwise, const std::vector<std::string>& vars) {
  if (vars.size() > 6) throw CapExceeded(static_cast<unsigned>(vars.size()), 6);
  CompiledExpr prog(bitwise, vars, Width(1));
  std::uint64_t tv = 0;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << vars.size()); ++k)
    tv |= prog.at_corner(k) << k;
  return tv;
}

} // namespace linmba
