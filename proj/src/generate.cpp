#include "linmba/generate.hpp"

#include "linmba/errors.hpp"
#include "linmba/semantics.hpp"
#include "linmba/simplify.hpp"
#include "linmba/tables.hpp"

#include <algorithm>
#include <bit>
#include <fstream>

namespace linmba {

std::uint64_t Rng::below(std::uint64_t bound) {
  // rejection sampling
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
  std::uint64_t v;
  do v = next();
  while (v > limit);
  return v % bound;
}

TruthMatrix::TruthMatrix(const std::vector<Expr>& bitwise, const std::vector<std::string>& vars)
    : t_(static_cast<unsigned>(vars.size())) {
  columns_.reserve(bitwise.size());
  for (const auto& e : bitwise) columns_.push_back(truth_vector(e, vars));
}

std::vector<std::uint64_t> TruthMatrix::multiply(const std::vector<std::uint64_t>& y,
                                                 Width width) const {
  if (y.size() != columns_.size())
    throw LengthMismatch("coefficient vector does not match the matrix columns");
  std::vector<std::uint64_t> out(std::size_t{1} << t_, 0);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < columns_.size(); ++j)
      if (at(i, j)) out[i] = width.reduce(out[i] + y[j]);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t random_coefficient(Rng& rng, Width w) {
  for (;;) {
    std::uint64_t v = rng.coin() ? 1 + rng.below(16) : rng.next();
    if (rng.coin()) v |= 1;
    if (rng.coin()) v = w.neg(v);
    v = w.reduce(v);
    if (v != 0) return v;
  }
}

Expr random_tree(const std::vector<std::string>& vars, Rng& rng, int depth) {
  Expr e;
  if (depth == 0 || rng.below(4) == 0) {
    e = Expr::var(vars[rng.below(vars.size())]);
  } else {
    static constexpr Op ops[] = {Op::And, Op::Xor, Op::Or};
    Op op = ops[rng.below(3)];
    e = Expr::binary(op, random_tree(vars, rng, depth - 1), random_tree(vars, rng, depth - 1));
  }
  if (rng.below(4) == 0) e = ~e;
  return e;
}

std::size_t vars_mentioned(const Expr& e) { return variables(e).size(); }

// c*r - c*(basis combination of r). False when r is itself a conjunction,
// which would cancel to nothing.
bool add_zero_component(LinearForm& form, const std::vector<std::string>& vars, Rng& rng) {
  const Width w = form.width();
  Expr r = canonical_bitwise(random_bitwise(vars, rng));
  auto rvars = variables(r);
  auto basis = solve_basis(signature_vector(r, rvars, w, 64), rvars);
  if (basis.constant == 0 && basis.coeffs.size() == 1 && basis.coeffs.begin()->second == 1)
    return false;
  std::uint64_t c = random_coefficient(rng, w);
  form.add_term(r, c);
  for (std::uint32_t mask : basis_order(static_cast<unsigned>(rvars.size()))) {
    auto it = basis.coeffs.find(mask);
    if (it == basis.coeffs.end()) continue;
    form.add_term(canonical_bitwise(conjunction(mask, rvars)), w.neg(w.reduce(c * it->second)));
  }
  form.add_constant(w.neg(w.reduce(c * basis.constant)));
  return true;
}

std::optional<std::size_t> pick_term(const LinearForm& form, Rng& rng) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < form.terms().size(); ++i)
    if (form.terms()[i].coefficient != 0) live.push_back(i);
  if (live.empty()) return std::nullopt;
  return live[rng.below(live.size())];
}

// c*B = c*(B & R) + c*(B & ~R)
bool split_term(LinearForm& form, const std::vector<std::string>& vars, Rng& rng) {
  auto idx = pick_term(form, rng);
  if (!idx) return false;
  const auto term = form.terms()[*idx];
  auto bvars = variables(term.bitwise);
  Expr lo, hi;
  if (bvars.size() <= kMaxTableVariables) {
    const auto& table = lookup_table(static_cast<unsigned>(bvars.size()));
    std::uint64_t tv = truth_vector(term.bitwise, bvars);
    if (std::popcount(tv) < 2) return false;
    std::uint64_t part;
    do part = rng.next() & tv;
    while (part == 0 || part == tv);
    lo = instantiate(table, part, bvars);
    hi = instantiate(table, tv & ~part, bvars);
  } else {
    Expr r = random_bitwise(vars, rng);
    lo = term.bitwise & r;
    hi = term.bitwise & ~r;
  }
  const Width w = form.width();
  form.add_term(term.bitwise, w.neg(term.coefficient));
  form.add_term(canonical_bitwise(lo), term.coefficient);
  form.add_term(canonical_bitwise(hi), term.coefficient);
  return true;
}

// c*B = -c*~B - c
bool complement_term(LinearForm& form, Rng& rng) {
  auto idx = pick_term(form, rng);
  if (!idx) return false;
  const auto term = form.terms()[*idx];
  auto bvars = variables(term.bitwise);
  Expr flipped;
  if (bvars.size() <= kMaxTableVariables) {
    const auto& table = lookup_table(static_cast<unsigned>(bvars.size()));
    std::uint64_t full = (std::uint64_t{1} << (std::size_t{1} << bvars.size())) - 1;
    flipped = instantiate(table, ~truth_vector(term.bitwise, bvars) & full, bvars);
  } else {
    flipped = ~term.bitwise;
  }
  const Width w = form.width();
  const std::uint64_t minus_c = w.neg(term.coefficient);
  form.add_term(term.bitwise, minus_c);
  form.add_term(canonical_bitwise(flipped), minus_c);
  form.add_constant(minus_c);
  return true;
}

// Distinct non-constant truth vectors over t variables, plus the constant.
void check_reachable(std::size_t terms, std::size_t t) {
  if (t >= 3) return;
  const std::size_t cap = (std::size_t{1} << (std::size_t{1} << t)) - 1;
  if (terms > cap)
    throw InvalidSpec("cannot reach " + std::to_string(terms) + " terms with " + std::to_string(t) +
                      " variable(s); at most " + std::to_string(cap) + " distinct summands exist");
}

std::vector<std::string> merged_vars(const Expr& target, const std::vector<std::string>& extra) {
  auto vars = variables(target);
  for (const auto& v : extra) {
    if (!is_valid_identifier(v)) throw InvalidSpec("invalid variable name '" + v + "'");
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  }
  if (vars.empty()) vars.push_back("x");
  return vars;
}

} // namespace

Expr random_bitwise(const std::vector<std::string>& vars, Rng& rng) {
  if (vars.empty()) throw InvalidSpec("a bitwise expression needs at least one variable");
  const auto t = static_cast<unsigned>(vars.size());
  if (t <= kMaxTableVariables) {
    const auto& table = lookup_table(t);
    const std::uint64_t count = table.entries.size();
    for (;;) {
      std::uint64_t tv = rng.below(count);
      if (tv != 0 && tv != count - 1) return instantiate(table, tv, vars);
    }
  }
  for (;;) {
    Expr e = random_tree(vars, rng, 3);
    if (vars_mentioned(e) < 2) continue;
    auto ev = variables(e);
    if (ev.size() <= 6) {
      auto tv = truth_vector(e, ev);
      std::uint64_t full = ev.size() == 6 ? ~std::uint64_t{0}
                                          : (std::uint64_t{1} << (std::size_t{1} << ev.size())) - 1;
      if (tv == 0 || tv == full) continue;
    }
    return e;
  }
}

LinearForm zero_mba_form(const std::vector<std::string>& vars, std::size_t terms, Rng& rng,
                         Width width) {
  if (terms < 2) throw InvalidSpec("a zero MBA needs at least 2 terms");
  if (vars.empty()) throw InvalidSpec("a zero MBA needs at least one variable");
  check_reachable(terms, vars.size());
  LinearForm form(width);
  for (std::size_t attempts = 0; form.summand_count() < terms; ++attempts) {
    if (attempts > 64 * terms)
      throw InvalidSpec("cannot reach " + std::to_string(terms) + " terms with " +
                        std::to_string(vars.size()) + " variable(s)");
    add_zero_component(form, vars, rng);
    form.compact();
  }
  return form;
}

Expr zero_mba(const std::vector<std::string>& vars, std::size_t terms, std::uint64_t seed,
              Width width) {
  Rng rng(seed);
  return zero_mba_form(vars, terms, rng, width).to_expr();
}

Expr encode_affine(const Expr& e, std::uint64_t a, std::uint64_t b, Width width) {
  if ((a & 1) == 0) throw EvenMultiplier();
  auto report = normalize(Expr::constant(width.reduce(a)) * e + Expr::constant(width.reduce(b)),
                          width);
  if (!report.linear()) throw NotLinear(std::move(report));
  return *report.normalized;
}

Expr obfuscate(const GeneratorSpec& spec) {
  const Width w = spec.width;
  if (spec.terms < 2) throw InvalidSpec("at least 2 terms are required");
  if (spec.encode && (spec.encode->a & 1) == 0) throw EvenMultiplier();
  auto report = normalize(spec.target, w);
  if (!report.linear()) throw NotLinear(std::move(report));

  const auto vars = merged_vars(spec.target, spec.vars);
  check_reachable(spec.terms, vars.size());
  const std::string plain = render(*report.normalized, w);
  Rng rng(spec.seed);

  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt > 64)
      throw InvalidSpec("cannot reach " + std::to_string(spec.terms) + " terms with " +
                        std::to_string(vars.size()) + " variable(s)");
    LinearForm form = *report.form;
    std::size_t steps = 0;
    for (std::size_t guard = 0; steps < 2 || form.summand_count() < spec.terms; ++guard) {
      if (guard > 64 * spec.terms) break;
      bool changed = false;
      switch (steps == 0 ? 0 : rng.below(3)) {
      case 0: changed = add_zero_component(form, vars, rng); break;
      case 1: changed = split_term(form, vars, rng); break;
      default: changed = complement_term(form, rng); break;
      }
      form.compact();
      if (changed) ++steps;
    }
    if (form.summand_count() < spec.terms) continue;
    if (render(form.to_expr(), w) == plain) continue;

    if (spec.encode) {
      form.scale(spec.encode->a);
      form.add_constant(spec.encode->b);
    }
    std::vector<Summand> summands;
    for (const auto& t : form.terms()) summands.push_back({t.coefficient, t.bitwise});
    if (form.constant() != 0) summands.push_back({form.constant(), std::nullopt});
    for (std::size_t i = summands.size(); i > 1; --i) std::swap(summands[i - 1], summands[rng.below(i)]);
    return build_sum(summands, w);
  }
}

Expr ground_truth(const GeneratorSpec& spec) {
  Expr target = spec.encode ? encode_affine(spec.target, spec.encode->a, spec.encode->b, spec.width)
                            : spec.target;
  return simplify(target, spec.width);
}

std::vector<std::string> dataset_lines(const std::vector<GeneratorSpec>& batch) {
  std::vector<std::string> lines{kDatasetHeader};
  for (const auto& spec : batch)
    lines.push_back(render(obfuscate(spec), spec.width) + "," +
                    render(ground_truth(spec), spec.width));
  return lines;
}

void emit_dataset(const std::vector<GeneratorSpec>& batch, const std::filesystem::path& path) {
  auto lines = dataset_lines(batch);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace linmba
