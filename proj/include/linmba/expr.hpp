#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace linmba {

/// Word width n in bits, 1..64. All arithmetic happens modulo 2^n.
class Width {
public:
  constexpr Width() = default;
  explicit Width(unsigned bits);

  constexpr unsigned bits() const noexcept { return bits_; }
  constexpr std::uint64_t mask() const noexcept {
    return bits_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits_) - 1;
  }
  constexpr std::uint64_t reduce(std::uint64_t v) const noexcept { return v & mask(); }
  constexpr std::uint64_t neg(std::uint64_t v) const noexcept { return (~v + 1) & mask(); }
  /// True when v, read as a residue, is rendered with a leading minus.
  constexpr bool is_negative(std::uint64_t v) const noexcept {
    return v > (std::uint64_t{1} << (bits_ - 1));
  }

  friend constexpr bool operator==(Width, Width) = default;

private:
  unsigned bits_ = 64;
};

enum class Op : std::uint8_t { Const, Var, BitNot, Neg, And, Xor, Or, Add, Sub, Mul };

bool is_unary(Op op) noexcept;
bool is_binary(Op op) noexcept;
bool is_bitwise(Op op) noexcept; // ~ & ^ |
const char* symbol(Op op) noexcept;

struct Node;

/// Immutable expression tree. Copies share structure.
class Expr {
public:
  Expr(); // Const(0)

  static Expr constant(std::uint64_t value);
  static Expr var(std::string name);
  static Expr unary(Op op, Expr child);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  Op op() const noexcept;
  std::uint64_t value() const noexcept;    // Const only
  const std::string& name() const noexcept; // Var only
  const Expr& child() const noexcept;       // unary operand
  const Expr& lhs() const noexcept;
  const Expr& rhs() const noexcept;

  bool is_const() const noexcept { return op() == Op::Const; }
  bool is_var() const noexcept { return op() == Op::Var; }

  std::size_t node_count() const noexcept;

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b) noexcept;

private:
  friend struct Node;
  struct NullTag {};
  explicit Expr(NullTag) noexcept {}
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Const;
  std::uint64_t value = 0;
  std::string name;
  Expr lhs{Expr::NullTag{}};
  Expr rhs{Expr::NullTag{}};
  std::size_t size = 1;
};

inline Expr operator~(Expr e) { return Expr::unary(Op::BitNot, std::move(e)); }
inline Expr operator-(Expr e) { return Expr::unary(Op::Neg, std::move(e)); }
inline Expr operator&(Expr a, Expr b) { return Expr::binary(Op::And, std::move(a), std::move(b)); }
inline Expr operator^(Expr a, Expr b) { return Expr::binary(Op::Xor, std::move(a), std::move(b)); }
inline Expr operator|(Expr a, Expr b) { return Expr::binary(Op::Or, std::move(a), std::move(b)); }
inline Expr operator+(Expr a, Expr b) { return Expr::binary(Op::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::binary(Op::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::binary(Op::Mul, std::move(a), std::move(b)); }

/// Parses under C precedence: unary ~ - , then *, then + -, then &, ^, |.
/// Literals are decimal or 0x-hex of any length and are reduced mod 2^n.
/// A minus directly in front of a literal folds into a single constant.
/// Throws SyntaxError.
Expr parse(std::string_view text, Width width = Width{});

/// Minimal-parenthesis rendering; parse(render(e)) == e. Residues above
/// 2^(n-1) print with a leading minus and magnitude 2^n - c.
std::string render(const Expr& e, Width width = Width{});

/// Distinct variable names in first-occurrence order (left-to-right DFS).
std::vector<std::string> variables(const Expr& e);

bool is_valid_identifier(std::string_view name) noexcept;

/// Rewrites every variable through `rename`; names not present stay as is.
Expr substitute(const Expr& e, const std::vector<std::pair<std::string, std::string>>& rename);

/// One summand `coefficient * bitwise`, or a bare constant when `bitwise`
/// is empty.
struct Summand {
  std::uint64_t coefficient = 0;
  std::optional<Expr> bitwise;
};

/// Builds `s1 + s2 - s3 ...` with negative coefficients turned into
/// subtraction, unit coefficients dropped and zero summands skipped.
/// An empty sum is Const(0).
Expr build_sum(const std::vector<Summand>& summands, Width width);

/// Number of top-level summands of a `+`/`-` chain (a constant counts as one).
std::size_t term_count(const Expr& e);

} // namespace linmba
