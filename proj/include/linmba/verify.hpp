#pragma once

#include "linmba/expr.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace linmba {

enum class VerdictKind { ProvenLinear, ProvenExhaustive, ProbablySame, Different };

const char* to_string(VerdictKind kind) noexcept;

struct EquivalenceVerdict {
  VerdictKind kind = VerdictKind::ProvenLinear;
  std::uint64_t points = 0; // assignments evaluated
  /// Set for Different: variable values (union order) and both results.
  std::vector<std::pair<std::string, std::uint64_t>> witness;
  std::uint64_t lhs_value = 0;
  std::uint64_t rhs_value = 0;

  bool equivalent() const noexcept { return kind != VerdictKind::Different; }
  /// "x=1, y=0"
  std::string witness_text() const;
};

/// Union of both variable lists, first-occurrence order (e1 first).
std::vector<std::string> union_variables(const Expr& e1, const Expr& e2);

/// Signature comparison over the union of variables; a proof for linear
/// inputs. Throws NotLinear, CapExceeded.
EquivalenceVerdict equivalent_linear(const Expr& e1, const Expr& e2, Width width,
                                     unsigned max_vars = 16);

inline constexpr std::uint64_t kDefaultExhaustiveBudget = std::uint64_t{1} << 24;

/// Every assignment of n-bit values. Throws BudgetExceeded when (2^n)^t
/// exceeds `budget`.
EquivalenceVerdict equivalent_exhaustive(const Expr& e1, const Expr& e2, Width width,
                                         std::uint64_t budget = kDefaultExhaustiveBudget);

inline constexpr std::uint64_t kDefaultSamples = 1000;

/// All 0/1 corners (up to 2^16 of them) plus `samples` uniform assignments.
EquivalenceVerdict equivalent_sampled(const Expr& e1, const Expr& e2, Width width,
                                      std::uint64_t samples = kDefaultSamples,
                                      std::uint64_t seed = 0);

} // namespace linmba
