#include "linmba/linearity.hpp"

#include <algorithm>

namespace linmba {

bool is_pure_bitwise(const Expr& e) noexcept {
  switch (e.op()) {
  case Op::Var: return true;
  case Op::BitNot: return is_pure_bitwise(e.child());
  case Op::And:
  case Op::Xor:
  case Op::Or: return is_pure_bitwise(e.lhs()) && is_pure_bitwise(e.rhs());
  default: return false;
  }
}

namespace {

struct Keyed {
  Expr expr;
  std::string key;
};

void flatten(const Expr& e, Op op, std::vector<Expr>& out) {
  if (e.op() == op) {
    flatten(e.lhs(), op, out);
    flatten(e.rhs(), op, out);
  } else {
    out.push_back(e);
  }
}

// Children are assumed canonical already.
Expr chain(Op op, const Expr& a, const Expr& b) {
  std::vector<Expr> parts;
  flatten(a, op, parts);
  flatten(b, op, parts);
  std::vector<Keyed> keyed;
  keyed.reserve(parts.size());
  for (auto& p : parts) keyed.push_back({p, render(p)});
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const Keyed& x, const Keyed& y) { return x.key < y.key; });
  Expr acc = keyed.front().expr;
  for (std::size_t i = 1; i < keyed.size(); ++i) acc = Expr::binary(op, acc, keyed[i].expr);
  return acc;
}

Expr negate_bitwise(const Expr& e) { return e.op() == Op::BitNot ? e.child() : ~e; }

} // namespace

Expr canonical_bitwise(const Expr& e) {
  switch (e.op()) {
  case Op::BitNot: return negate_bitwise(canonical_bitwise(e.child()));
  case Op::And:
  case Op::Xor:
  case Op::Or: return chain(e.op(), canonical_bitwise(e.lhs()), canonical_bitwise(e.rhs()));
  default: return e;
  }
}

// ---------------------------------------------------------------------------

void LinearForm::add_term(const Expr& bitwise, std::uint64_t coefficient) {
  coefficient = width_.reduce(coefficient);
  auto key = render(bitwise);
  auto [it, fresh] = index_.try_emplace(std::move(key), terms_.size());
  if (fresh) terms_.push_back({bitwise, coefficient});
  else terms_[it->second].coefficient = width_.reduce(terms_[it->second].coefficient + coefficient);
}

void LinearForm::add(const LinearForm& other, std::uint64_t factor) {
  for (const auto& t : other.terms_) add_term(t.bitwise, t.coefficient * factor);
  add_constant(other.constant_ * factor);
}

void LinearForm::scale(std::uint64_t factor) {
  for (auto& t : terms_) t.coefficient = width_.reduce(t.coefficient * factor);
  constant_ = width_.reduce(constant_ * factor);
}

void LinearForm::compact() {
  std::vector<Term> kept;
  index_.clear();
  for (auto& t : terms_) {
    if (t.coefficient == 0) continue;
    index_.emplace(render(t.bitwise), kept.size());
    kept.push_back(std::move(t));
  }
  terms_ = std::move(kept);
}

bool LinearForm::is_constant() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coefficient == 0; });
}

std::size_t LinearForm::summand_count() const noexcept {
  auto n = std::count_if(terms_.begin(), terms_.end(),
                         [](const Term& t) { return t.coefficient != 0; });
  return static_cast<std::size_t>(n) + (constant_ != 0 ? 1 : 0);
}

Expr LinearForm::to_expr() const {
  std::vector<Summand> s;
  s.reserve(terms_.size() + 1);
  for (const auto& t : terms_) s.push_back({t.coefficient, t.bitwise});
  s.push_back({constant_, std::nullopt});
  return build_sum(s, width_);
}

// ---------------------------------------------------------------------------

namespace {

struct NonlinearAt {
  std::vector<unsigned> path;
  std::string reason;
};

// A bitwise operand: either a constant word or a canonical bitwise expression.
struct BitOperand {
  std::optional<std::uint64_t> constant;
  std::optional<Expr> expr;
};

class Normalizer {
public:
  explicit Normalizer(Width w) : w_(w) {}

  LinearForm run(const Expr& e) { return lin(e); }

  std::vector<unsigned> path;

private:
  Width w_;

  [[noreturn]] void fail(const Expr& at, std::string why) {
    throw NonlinearAt{path, why + ": " + render(at, w_)};
  }

  LinearForm sub(const Expr& e, unsigned idx) {
    path.push_back(idx);
    LinearForm out = lin(e);
    path.pop_back();
    return out;
  }

  LinearForm single(const Expr& bitwise) {
    LinearForm f(w_);
    f.add_term(bitwise, 1);
    return f;
  }

  LinearForm constant(std::uint64_t c) {
    LinearForm f(w_);
    f.add_constant(c);
    return f;
  }

  std::optional<BitOperand> as_bitwise(LinearForm f) {
    f.compact();
    if (f.terms().empty()) return BitOperand{f.constant(), std::nullopt};
    if (f.terms().size() != 1) return std::nullopt;
    const auto& t = f.terms().front();
    if (t.coefficient == 1 && f.constant() == 0) return BitOperand{std::nullopt, t.bitwise};
    // -B - 1 is ~B
    if (t.coefficient == w_.mask() && f.constant() == w_.mask())
      return BitOperand{std::nullopt, negate_bitwise(t.bitwise)};
    return std::nullopt;
  }

  LinearForm from_operand(const BitOperand& b) {
    return b.constant ? constant(*b.constant) : single(*b.expr);
  }

  LinearForm lin(const Expr& e) {
    switch (e.op()) {
    case Op::Const: return constant(e.value());
    case Op::Var: return single(e);
    case Op::Neg: {
      LinearForm f = sub(e.child(), 0);
      f.scale(w_.mask());
      return f;
    }
    case Op::BitNot: {
      LinearForm f = sub(e.child(), 0);
      if (auto b = as_bitwise(f)) {
        if (b->constant) return constant(w_.reduce(~*b->constant));
        return single(negate_bitwise(*b->expr));
      }
      // ~a == -a - 1
      f.scale(w_.mask());
      f.add_constant(w_.mask());
      return f;
    }
    case Op::Add:
    case Op::Sub: {
      LinearForm f = sub(e.lhs(), 0);
      f.add(sub(e.rhs(), 1), e.op() == Op::Add ? 1 : w_.mask());
      return f;
    }
    case Op::Mul: {
      LinearForm l = sub(e.lhs(), 0);
      LinearForm r = sub(e.rhs(), 1);
      if (l.is_constant()) {
        r.scale(l.constant());
        return r;
      }
      if (r.is_constant()) {
        l.scale(r.constant());
        return l;
      }
      fail(e, "product of two non-constant factors");
    }
    case Op::And:
    case Op::Xor:
    case Op::Or: {
      auto l = as_bitwise(sub(e.lhs(), 0));
      auto r = as_bitwise(sub(e.rhs(), 1));
      if (!l || !r) fail(e, std::string("arithmetic operand under '") + symbol(e.op()) + "'");
      return combine(e, *l, *r);
    }
    }
    return constant(0);
  }

  LinearForm combine(const Expr& at, const BitOperand& l, const BitOperand& r) {
    const Op op = at.op();
    if (l.constant && r.constant) {
      std::uint64_t a = *l.constant, b = *r.constant;
      return constant(op == Op::And ? (a & b) : op == Op::Or ? (a | b) : (a ^ b));
    }
    if (l.constant || r.constant) {
      std::uint64_t c = l.constant ? *l.constant : *r.constant;
      const Expr& other = l.constant ? *r.expr : *l.expr;
      const bool zero = c == 0, ones = c == w_.mask();
      if (!zero && !ones)
        fail(at, std::string("constant operand ") + render(Expr::constant(c), w_) + " under '" +
                     symbol(op) + "'");
      switch (op) {
      case Op::And: return zero ? constant(0) : single(other);
      case Op::Or: return zero ? single(other) : constant(w_.mask());
      default: return zero ? single(other) : single(negate_bitwise(other));
      }
    }
    return single(chain(op, *l.expr, *r.expr));
  }
};

} // namespace

LinearityReport normalize(const Expr& e, Width width) {
  Normalizer n(width);
  LinearityReport report;
  try {
    LinearForm f = n.run(e);
    f.compact();
    report.verdict = Verdict::Linear;
    report.normalized = f.to_expr();
    report.form = std::move(f);
  } catch (const NonlinearAt& err) {
    report.verdict = Verdict::Nonlinear;
    report.witness_path = err.path;
    report.reason = err.reason + " at " + format_path(err.path);
  }
  return report;
}

std::string format_path(const std::vector<unsigned>& path) {
  if (path.empty()) return "/";
  std::string out;
  for (unsigned p : path) out += "/" + std::to_string(p);
  return out;
}

} // namespace linmba
