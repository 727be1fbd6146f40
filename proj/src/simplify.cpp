#include "linmba/simplify.hpp"

#include "linmba/errors.hpp"
#include "linmba/tables.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace linmba {

std::size_t BasisCombination::term_count() const noexcept {
  return coeffs.size() + (constant != 0 ? 1 : 0);
}

SignatureVector BasisCombination::signature() const {
  const auto t = static_cast<unsigned>(vars.size());
  SignatureVector sig{width, t, std::vector<std::uint64_t>(std::size_t{1} << t, constant)};
  for (auto [mask, c] : coeffs)
    for (std::uint64_t k = 0; k < sig.values.size(); ++k)
      if ((k & mask) == mask) sig.values[k] = width.reduce(sig.values[k] + c);
  return sig;
}

Expr conjunction(std::uint32_t mask, const std::vector<std::string>& vars) {
  std::optional<Expr> acc;
  for (unsigned i = 0; i < vars.size(); ++i) {
    if (!(mask >> i & 1)) continue;
    Expr v = Expr::var(vars[i]);
    acc = acc ? *acc & v : v;
  }
  return acc ? *acc : Expr::constant(0);
}

std::vector<std::uint32_t> basis_order(unsigned t) {
  std::vector<std::uint32_t> masks((std::size_t{1} << t) - 1);
  std::iota(masks.begin(), masks.end(), 1u);
  auto indices = [](std::uint32_t m) {
    std::vector<int> out;
    for (int i = 0; m; ++i, m >>= 1)
      if (m & 1) out.push_back(i);
    return out;
  };
  std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return indices(a) < indices(b);
  });
  return masks;
}

Expr BasisCombination::to_expr() const {
  std::vector<Summand> s;
  s.push_back({constant, std::nullopt});
  for (std::uint32_t mask : basis_order(static_cast<unsigned>(vars.size()))) {
    auto it = coeffs.find(mask);
    if (it != coeffs.end()) s.push_back({it->second, conjunction(mask, vars)});
  }
  return build_sum(s, width);
}

BasisCombination solve_basis(const SignatureVector& signature, std::vector<std::string> vars) {
  const unsigned t = signature.t;
  if (signature.values.size() != (std::size_t{1} << t))
    throw LengthMismatch("signature vector length does not match its variable count");
  if (vars.size() != t) throw LengthMismatch("variable list does not match the signature");

  const Width w = signature.width;
  std::vector<std::uint64_t> f = signature.values;
  BasisCombination out{w, std::move(vars), 0, {}};

  // Constant: row 0, present in every row.
  out.constant = f[0];
  for (auto& v : f) v = w.reduce(v - out.constant);

  const std::uint32_t full = (std::uint32_t{1} << t) - 1;
  for (std::uint32_t mask : basis_order(t)) {
    std::uint64_t c = f[mask];
    if (c == 0) continue;
    out.coeffs.emplace(mask, c);
    // every superset of mask, mask itself included
    for (std::uint32_t k = mask;; k = (k + 1) | mask) {
      f[k] = w.reduce(f[k] - c);
      if (k == full) break;
    }
  }
  return out;
}

namespace {

std::uint32_t remap(std::uint32_t mask, const std::vector<int>& new_index) {
  std::uint32_t out = 0;
  for (unsigned i = 0; i < new_index.size(); ++i)
    if ((mask >> i & 1) && new_index[i] >= 0) out |= std::uint32_t{1} << new_index[i];
  return out;
}

BasisCombination reindex(const BasisCombination& c, const std::vector<int>& new_index,
                         std::vector<std::string> new_vars) {
  BasisCombination out{c.width, std::move(new_vars), c.constant, {}};
  for (auto [mask, coeff] : c.coeffs) out.coeffs.emplace(remap(mask, new_index), coeff);
  return out;
}

} // namespace

BasisCombination drop_dead_variables(const BasisCombination& c) {
  std::uint32_t used = 0;
  for (auto [mask, coeff] : c.coeffs) used |= mask;
  std::vector<int> new_index(c.vars.size(), -1);
  std::vector<std::string> kept;
  for (unsigned i = 0; i < c.vars.size(); ++i) {
    if (!(used >> i & 1)) continue;
    new_index[i] = static_cast<int>(kept.size());
    kept.push_back(c.vars[i]);
  }
  return reindex(c, new_index, std::move(kept));
}

BasisCombination sort_variables(const BasisCombination& c) {
  std::vector<std::string> sorted = c.vars;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> new_index(c.vars.size());
  for (unsigned i = 0; i < c.vars.size(); ++i)
    new_index[i] = static_cast<int>(std::find(sorted.begin(), sorted.end(), c.vars[i]) - sorted.begin());
  return reindex(c, new_index, std::move(sorted));
}

// ---------------------------------------------------------------------------
// Refinement

namespace {

struct Piece {
  std::uint64_t coefficient;
  std::uint64_t truth;
};

class Refiner {
public:
  Refiner(const SignatureVector& sig, const std::vector<std::string>& names)
      : w_(sig.width), values_(sig.values), names_(names),
        table_(lookup_table(static_cast<unsigned>(names.size()))) {
    for (auto v : values_)
      if (std::find(unique_.begin(), unique_.end(), v) == unique_.end()) unique_.push_back(v);
    basis_terms_ = solve_basis(sig, names).term_count();
  }

  std::optional<Refinement> run() {
    const std::uint64_t first = values_[0];
    const std::size_t u = unique_.size();

    if (u == 1) {
      if (auto r = accept(1, first, {})) return r;
    }
    if (u == 2 && first == 0) {
      if (auto r = accept(2, 0, {{unique_[1], truth_of({unique_[1]})}})) return r;
    }
    if (u == 2 && unique_[0] != 0 && unique_[1] != 0) {
      for (auto [a, b] : {std::pair{unique_[0], unique_[1]}, std::pair{unique_[1], unique_[0]}}) {
        if (b != w_.reduce(2 * a)) continue;
        // -a * ~g is a where g = 0 and 2a where g = 1; ~g is the entry for a's rows
        Expr term = instantiate(table_, truth_of({a}), names_);
        Expr e = build_sum({{w_.neg(a), term}}, w_);
        if (1 < basis_terms_ && matches(e)) return Refinement{e, 3, 1};
      }
    }
    if (u == 2 && first != 0) {
      std::uint64_t b = unique_[1];
      if (auto r = accept(4, first, {{w_.reduce(b - first), truth_of({b})}})) return r;
    }
    if (first == 0) {
      if (auto r = split_cases(values_, 0)) return r;
    } else if (u >= 3) {
      std::vector<std::uint64_t> shifted(values_.size());
      for (std::size_t k = 0; k < values_.size(); ++k) shifted[k] = w_.reduce(values_[k] - first);
      if (auto r = split_cases(shifted, first)) return r;
    }
    return std::nullopt;
  }

private:
  // Cases 5-7 on a vector whose first entry is zero; a nonzero `constant`
  // marks the shifted vector of case 8.
  std::optional<Refinement> split_cases(const std::vector<std::uint64_t>& vals,
                                        std::uint64_t constant) {
    std::vector<std::uint64_t> nz;
    for (auto v : vals)
      if (v != 0 && std::find(nz.begin(), nz.end(), v) == nz.end()) nz.push_back(v);
    auto tag = [&](int c) { return constant != 0 ? 8 : c; };

    if (nz.size() == 2) {
      return accept(tag(5), constant,
                    {{nz[0], truth_in(vals, {nz[0]})}, {nz[1], truth_in(vals, {nz[1]})}});
    }
    if (nz.size() == 3) {
      for (std::size_t i = 0; i < 3; ++i) {
        std::uint64_t sum = nz[i], b = nz[(i + 1) % 3], c = nz[(i + 2) % 3];
        if (sum != w_.reduce(b + c)) continue;
        if (auto r = accept(tag(6), constant,
                            {{b, truth_in(vals, {b, sum})}, {c, truth_in(vals, {c, sum})}}))
          return r;
      }
      return accept(tag(7), constant,
                    {{nz[0], truth_in(vals, {nz[0]})},
                     {nz[1], truth_in(vals, {nz[1]})},
                     {nz[2], truth_in(vals, {nz[2]})}});
    }
    return std::nullopt;
  }

  bool matches(const Expr& e) const {
    CompiledExpr prog(e, names_, w_);
    for (std::uint64_t k = 0; k < values_.size(); ++k)
      if (prog.at_corner(k) != values_[k]) return false;
    return true;
  }

  std::uint64_t truth_in(const std::vector<std::uint64_t>& vals,
                         std::initializer_list<std::uint64_t> wanted) const {
    std::uint64_t tv = 0;
    for (std::size_t k = 0; k < vals.size(); ++k)
      if (std::find(wanted.begin(), wanted.end(), vals[k]) != wanted.end())
        tv |= std::uint64_t{1} << k;
    return tv;
  }
  std::uint64_t truth_of(std::initializer_list<std::uint64_t> wanted) const {
    return truth_in(values_, wanted);
  }

  // Summands: constant first, then terms by (ones in truth vector, truth vector).
  std::optional<Refinement> accept(int case_number, std::uint64_t constant,
                                   std::vector<Piece> pieces) {
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
      int pa = std::popcount(a.truth), pb = std::popcount(b.truth);
      return pa != pb ? pa < pb : a.truth < b.truth;
    });
    std::vector<Summand> s;
    s.push_back({constant, std::nullopt});
    for (const auto& p : pieces) s.push_back({p.coefficient, instantiate(table_, p.truth, names_)});
    std::size_t terms = pieces.size() + (constant != 0 ? 1 : 0);
    if (pieces.empty() && constant == 0) terms = 1;
    if (terms >= basis_terms_) return std::nullopt;
    return Refinement{build_sum(s, w_), case_number, terms};
  }

  Width w_;
  const std::vector<std::uint64_t>& values_;
  const std::vector<std::string>& names_;
  const LookupTable& table_;
  std::vector<std::uint64_t> unique_;
  std::size_t basis_terms_ = 0;
};

} // namespace

std::optional<Refinement> refine(const SignatureVector& signature,
                                 const std::vector<std::string>& names) {
  if (names.size() != signature.t)
    throw LengthMismatch("variable list does not match the signature");
  if (signature.t == 0 || signature.t > kMaxTableVariables) return std::nullopt;
  return Refiner(signature, names).run();
}

// ---------------------------------------------------------------------------

SimplifyResult simplify_detailed(const Expr& e, Width width, const SimplifyOptions& options) {
  SimplifyResult result;
  LinearityReport report = normalize(e, width);
  if (!report.linear()) {
    if (!options.allow_nonlinear) throw NotLinear(std::move(report));
    result.verified_on_corners_only = true;
  }

  auto vars = variables(e);
  SignatureVector sig = signature_vector(e, vars, width, options.max_vars);
  result.basis = sort_variables(drop_dead_variables(solve_basis(sig, std::move(vars))));

  const auto t = result.basis.vars.size();
  if (t >= 1 && t <= kMaxTableVariables) {
    if (auto r = refine(result.basis.signature(), result.basis.vars)) {
      result.expr = r->expr;
      result.refinement_case = r->case_number;
      return result;
    }
  }
  result.expr = result.basis.to_expr();
  return result;
}

Expr simplify(const Expr& e, Width width, const SimplifyOptions& options) {
  return simplify_detailed(e, width, options).expr;
}

} // namespace linmba
