#pragma once

#include "linmba/expr.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace linmba {

/// Bitwise expression with commutative chains flattened, operands sorted by
/// rendered text and rebuilt left-associatively; double negations removed.
Expr canonical_bitwise(const Expr& e);

/// True when e contains only variables and ~ & ^ |.
bool is_pure_bitwise(const Expr& e) noexcept;

/// constant + sum of coefficient * bitwise, terms kept in first-insertion
/// order and merged by structural identity of the canonical bitwise part.
class LinearForm {
public:
  struct Term {
    Expr bitwise;
    std::uint64_t coefficient;
  };

  explicit LinearForm(Width width) : width_(width) {}

  Width width() const noexcept { return width_; }
  std::uint64_t constant() const noexcept { return constant_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  /// `bitwise` must already be canonical.
  void add_term(const Expr& bitwise, std::uint64_t coefficient);
  void add_constant(std::uint64_t c) { constant_ = width_.reduce(constant_ + c); }
  void add(const LinearForm& other, std::uint64_t factor = 1);
  void scale(std::uint64_t factor);

  /// Drops zero-coefficient terms, keeping order.
  void compact();
  bool is_constant() const noexcept;
  /// Nonzero terms plus one for a nonzero constant.
  std::size_t summand_count() const noexcept;

  /// Terms in order, constant last.
  Expr to_expr() const;

private:
  Width width_;
  std::uint64_t constant_ = 0;
  std::vector<Term> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class Verdict { Linear, Nonlinear };

struct LinearityReport {
  Verdict verdict = Verdict::Nonlinear;
  std::optional<Expr> normalized;    // present iff Linear
  std::optional<LinearForm> form;    // present iff Linear
  std::string reason;                // empty iff Linear
  std::vector<unsigned> witness_path; // child indices from the root to the offending node

  bool linear() const noexcept { return verdict == Verdict::Linear; }
};

/// Constant folding, ~a -> -a-1 over arithmetic, distribution of constant
/// factors and like-term merging. Nonlinear when a product has two
/// non-constant factors or a bitwise operator cannot be freed of arithmetic.
LinearityReport normalize(const Expr& e, Width width);

/// "/0/1"-style rendering of a witness path ("/" is the root).
std::string format_path(const std::vector<unsigned>& path);

class NotLinear : public std::runtime_error {
public:
  explicit NotLinear(LinearityReport report)
      : std::runtime_error("expression is not a linear MBA: " + report.reason),
        report_(std::move(report)) {}
  const LinearityReport& report() const noexcept { return report_; }

private:
  LinearityReport report_;
};

} // namespace linmba
