#include "linmba/verify.hpp"

#include "linmba/errors.hpp"
#include "linmba/generate.hpp"
#include "linmba/linearity.hpp"
#include "linmba/semantics.hpp"

#include <algorithm>
#include <optional>
#include <thread>

namespace linmba {

const char* to_string(VerdictKind kind) noexcept {
  switch (kind) {
  case VerdictKind::ProvenLinear: return "ProvenLinear";
  case VerdictKind::ProvenExhaustive: return "ProvenExhaustive";
  case VerdictKind::ProbablySame: return "ProbablySame";
  case VerdictKind::Different: return "Different";
  }
  return "?";
}

std::string EquivalenceVerdict::witness_text() const {
  std::string out;
  for (const auto& [name, value] : witness) {
    if (!out.empty()) out += ", ";
    out += name + "=" + std::to_string(value);
  }
  return out;
}

std::vector<std::string> union_variables(const Expr& e1, const Expr& e2) {
  auto vars = variables(e1);
  for (auto& v : variables(e2))
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(std::move(v));
  return vars;
}

namespace {

EquivalenceVerdict different(const std::vector<std::string>& vars,
                             const std::vector<std::uint64_t>& inputs, std::uint64_t a,
                             std::uint64_t b, std::uint64_t points) {
  EquivalenceVerdict v{VerdictKind::Different, points, {}, a, b};
  for (std::size_t i = 0; i < vars.size(); ++i) v.witness.emplace_back(vars[i], inputs[i]);
  return v;
}

std::vector<std::uint64_t> corner(std::uint64_t k, std::size_t t) {
  std::vector<std::uint64_t> in(t);
  for (std::size_t i = 0; i < t; ++i) in[i] = (k >> i) & 1;
  return in;
}

// Assignment number `index` in base 2^n, variable 0 least significant.
void decode(std::uint64_t index, unsigned bits, std::vector<std::uint64_t>& in) {
  const std::uint64_t mask = bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
  for (auto& v : in) {
    v = index & mask;
    index = bits == 64 ? 0 : index >> bits;
  }
}

} // namespace

EquivalenceVerdict equivalent_linear(const Expr& e1, const Expr& e2, Width width,
                                     unsigned max_vars) {
  for (const Expr* e : {&e1, &e2}) {
    auto report = normalize(*e, width);
    if (!report.linear()) throw NotLinear(std::move(report));
  }
  auto vars = union_variables(e1, e2);
  auto s1 = signature_vector(e1, vars, width, max_vars);
  auto s2 = signature_vector(e2, vars, width, max_vars);
  for (std::uint64_t k = 0; k < s1.values.size(); ++k)
    if (s1.values[k] != s2.values[k])
      return different(vars, corner(k, vars.size()), s1.values[k], s2.values[k], k + 1);
  return {VerdictKind::ProvenLinear, s1.values.size(), {}, 0, 0};
}

EquivalenceVerdict equivalent_exhaustive(const Expr& e1, const Expr& e2, Width width,
                                         std::uint64_t budget) {
  auto vars = union_variables(e1, e2);
  const unsigned total_bits = width.bits() * static_cast<unsigned>(vars.size());
  if (total_bits >= 64 || (std::uint64_t{1} << total_bits) > budget)
    throw BudgetExceeded("exhaustive check needs 2^" + std::to_string(total_bits) +
                         " evaluations, budget is " + std::to_string(budget));
  const std::uint64_t points = std::uint64_t{1} << total_bits;
  const CompiledExpr f1(e1, vars, width), f2(e2, vars, width);

  auto scan = [&](std::uint64_t lo, std::uint64_t hi) -> std::optional<std::uint64_t> {
    std::vector<std::uint64_t> in(vars.size());
    for (std::uint64_t i = lo; i < hi; ++i) {
      decode(i, width.bits(), in);
      if (f1(in) != f2(in)) return i;
    }
    return std::nullopt;
  };

  std::optional<std::uint64_t> hit;
  const unsigned workers =
      points < (1u << 16) ? 1u : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  if (workers == 1) {
    hit = scan(0, points);
  } else {
    std::vector<std::optional<std::uint64_t>> found(workers);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (points + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        found[w] = scan(std::min(points, w * chunk), std::min(points, (w + 1) * chunk));
      });
    for (auto& th : pool) th.join();
    for (auto& f : found)
      if (f) {
        hit = f;
        break;
      }
  }

  if (!hit) return {VerdictKind::ProvenExhaustive, points, {}, 0, 0};
  std::vector<std::uint64_t> in(vars.size());
  decode(*hit, width.bits(), in);
  return different(vars, in, f1(in), f2(in), points);
}

EquivalenceVerdict equivalent_sampled(const Expr& e1, const Expr& e2, Width width,
                                      std::uint64_t samples, std::uint64_t seed) {
  auto vars = union_variables(e1, e2);
  const CompiledExpr f1(e1, vars, width), f2(e2, vars, width);
  std::uint64_t points = 0;

  const std::uint64_t corners = vars.size() <= 16 ? std::uint64_t{1} << vars.size() : 0;
  for (std::uint64_t k = 0; k < corners; ++k) {
    auto in = corner(k, vars.size());
    ++points;
    if (auto a = f1(in), b = f2(in); a != b) return different(vars, in, a, b, points);
  }

  Rng rng(seed);
  std::vector<std::uint64_t> in(vars.size());
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& v : in) v = width.reduce(rng.next());
    ++points;
    if (auto a = f1(in), b = f2(in); a != b) return different(vars, in, a, b, points);
  }
  return {VerdictKind::ProbablySame, points, {}, 0, 0};
}

} // namespace linmba
