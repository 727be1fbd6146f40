#pragma once

#include "linmba/expr.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace linmba {

inline constexpr unsigned kDefaultMaxVariables = 10;

using Assignment = std::unordered_map<std::string, std::uint64_t>;

/// Values of an expression on all 0/1 inputs. values[k] is the value on the
/// input where variable i (0-based) is bit i of k.
struct SignatureVector {
  Width width;
  unsigned t = 0;
  std::vector<std::uint64_t> values;

  friend bool operator==(const SignatureVector&, const SignatureVector&) = default;
};

/// Evaluates e mod 2^n. Throws MissingVariable.
std::uint64_t evaluate(const Expr& e, const Assignment& assignment, Width width);

/// The 2^t 0/1 tuples in counting order: tuple k gives x_i the bit (k >> i) & 1.
/// Throws CapExceeded when t > max_vars.
std::vector<std::vector<std::uint64_t>> enumerate_inputs(unsigned t,
                                                         unsigned max_vars = kDefaultMaxVariables);

/// Postfix program over indexed variables; the hot path for repeated evaluation.
class CompiledExpr {
public:
  /// Throws MissingVariable when e uses a name outside `vars`.
  CompiledExpr(const Expr& e, const std::vector<std::string>& vars, Width width);

  std::uint64_t operator()(std::span<const std::uint64_t> inputs) const;

  /// Evaluates on the 0/1 input with index k (bit i of k is variable i).
  std::uint64_t at_corner(std::uint64_t k) const;

  Width width() const noexcept { return width_; }

private:
  struct Instr {
    Op op;
    std::uint64_t arg; // constant value or variable index
  };
  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
  Width width_;

  template <typename Fetch> std::uint64_t run(Fetch&& fetch) const;
};

/// Throws CapExceeded when vars.size() > max_vars, MissingVariable when e
/// mentions a name outside vars.
SignatureVector signature_vector(const Expr& e, const std::vector<std::string>& vars, Width width,
                                 unsigned max_vars = kDefaultMaxVariables);

/// 1-bit truth vector of a bitwise expression over `vars`, bit k = value on
/// input k. Requires vars.size() <= 6.
std::uint64_t truth_vector(const Expr& bitwise, const std::vector<std::string>& vars);

} // namespace linmba
