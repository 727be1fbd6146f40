#pragma once

#include "linmba/expr.hpp"
#include "linmba/linearity.hpp"
#include "linmba/semantics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace linmba {

/// constant + sum over nonempty variable subsets S of coeffs[S] * AND(x_i, i in S).
/// Bit i of a subset mask stands for vars[i].
struct BasisCombination {
  Width width;
  std::vector<std::string> vars;
  std::uint64_t constant = 0;
  std::map<std::uint32_t, std::uint64_t> coeffs; // nonzero entries only

  /// Nonzero coefficients plus one for a nonzero constant.
  std::size_t term_count() const noexcept;

  /// Reconstructed values on all 0/1 inputs (zeta transform over subsets).
  SignatureVector signature() const;

  /// Constant first, then conjunctions by size and index order, e.g.
  /// 49374+3735936685*x+3735936685*y-7471873370*(x&y).
  Expr to_expr() const;
};

/// AND of vars[i] for every bit i of mask, left-associated in index order.
Expr conjunction(std::uint32_t mask, const std::vector<std::string>& vars);

/// Subset masks of t variables ordered by cardinality, then by index list.
std::vector<std::uint32_t> basis_order(unsigned t);

/// Triangular solve over the conjunction basis: subsets are taken by
/// increasing size; each coefficient is read at the subset's own row and
/// then subtracted from every superset row.
BasisCombination solve_basis(const SignatureVector& signature, std::vector<std::string> vars);

/// Removes variables that occur in no nonzero coefficient.
BasisCombination drop_dead_variables(const BasisCombination& c);

/// Reorders variables by name; subsets are remapped accordingly.
BasisCombination sort_variables(const BasisCombination& c);

struct Refinement {
  Expr expr;
  int case_number = 0; // 1..8
  std::size_t terms = 0;
};

/// Lookup-table search for a result with strictly fewer summands than the
/// basis combination of `signature`. Requires signature.t == names.size() <= 3.
std::optional<Refinement> refine(const SignatureVector& signature,
                                 const std::vector<std::string>& names);

struct SimplifyOptions {
  unsigned max_vars = kDefaultMaxVariables;
  /// Skip the linearity gate. The result is then only known to agree with
  /// the input on 0/1 inputs.
  bool allow_nonlinear = false;
};

struct SimplifyResult {
  Expr expr;
  BasisCombination basis; // after dead-variable removal and name ordering
  std::optional<int> refinement_case;
  bool verified_on_corners_only = false;
};

/// Signature vector, basis solve, dead-variable removal, refinement for at
/// most three remaining variables. Throws NotLinear (unless allowed) and
/// CapExceeded.
SimplifyResult simplify_detailed(const Expr& e, Width width, const SimplifyOptions& options = {});

Expr simplify(const Expr& e, Width width, const SimplifyOptions& options = {});

} // namespace linmba
