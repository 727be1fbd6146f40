// Test oracles that do not share code paths with the library under test.
#pragma once

#include "linmba/expr.hpp"
#include "linmba/tables.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using linmba::Expr;
using linmba::Op;
using linmba::Width;

inline std::vector<std::string> names(std::size_t t) {
  static const char* pool[] = {"x", "y", "z", "w", "v", "u", "s", "r"};
  return {pool, pool + t};
}

/// Exact integer evaluation, reduced mod 2^n only at the end. Bitwise
/// operators act on infinite two's complement, which commutes with reduction.
inline mpz_class big_eval(const Expr& e, const std::map<std::string, std::uint64_t>& env) {
  switch (e.op()) {
  case Op::Const: return mpz_class(std::to_string(e.value()));
  case Op::Var: return mpz_class(std::to_string(env.at(e.name())));
  case Op::BitNot: return -big_eval(e.child(), env) - 1;
  case Op::Neg: return -big_eval(e.child(), env);
  default: break;
  }
  mpz_class a = big_eval(e.lhs(), env), b = big_eval(e.rhs(), env);
  switch (e.op()) {
  case Op::And: return a & b;
  case Op::Xor: return a ^ b;
  case Op::Or: return a | b;
  case Op::Add: return a + b;
  case Op::Sub: return a - b;
  default: return a * b;
  }
}

inline std::uint64_t reduce(const mpz_class& v, Width w) {
  mpz_class m;
  mpz_fdiv_r_2exp(m.get_mpz_t(), v.get_mpz_t(), w.bits());
  return std::stoull(m.get_str());
}

/// Any tree over the full operator set.
inline Expr random_tree(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth,
                        Width w) {
  std::uniform_int_distribution<int> pick(0, 11);
  int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
  switch (k) {
  case 0: {
    std::uint64_t v = (rng() % 3 == 0) ? rng() : rng() % 100;
    return Expr::constant(w.reduce(v));
  }
  case 1:
  case 2: return Expr::var(vars[rng() % vars.size()]);
  case 3: return ~random_tree(rng, vars, depth - 1, w);
  case 4: return -random_tree(rng, vars, depth - 1, w);
  default: {
    static constexpr Op ops[] = {Op::And, Op::Xor, Op::Or, Op::Add, Op::Sub, Op::Mul, Op::Add};
    Op op = ops[k - 5];
    return Expr::binary(op, random_tree(rng, vars, depth - 1, w),
                        random_tree(rng, vars, depth - 1, w));
  }
  }
}

/// Bitwise tree using ~ & ^ | only.
inline Expr random_bitwise_tree(std::mt19937_64& rng, const std::vector<std::string>& vars,
                                int depth) {
  if (depth <= 0 || rng() % 4 == 0) {
    Expr v = Expr::var(vars[rng() % vars.size()]);
    return rng() % 4 == 0 ? ~v : v;
  }
  static constexpr Op ops[] = {Op::And, Op::Xor, Op::Or};
  Expr e = Expr::binary(ops[rng() % 3], random_bitwise_tree(rng, vars, depth - 1),
                        random_bitwise_tree(rng, vars, depth - 1));
  return rng() % 5 == 0 ? ~e : e;
}

/// Sum of constant * bitwise terms plus a constant, coefficients anywhere in
/// [0, 2^n).
inline Expr random_linear(std::mt19937_64& rng, const std::vector<std::string>& vars,
                          std::size_t terms, Width w) {
  Expr acc = Expr::constant(w.reduce(rng()));
  for (std::size_t i = 0; i < terms; ++i) {
    std::uint64_t c = rng() % 2 ? w.reduce(rng()) : w.reduce(rng() % 9);
    acc = acc + Expr::constant(c) * random_bitwise_tree(rng, vars, 3);
  }
  return acc;
}

inline std::vector<std::uint64_t> corner_values(std::uint64_t k, std::size_t t) {
  std::vector<std::uint64_t> v(t);
  for (std::size_t i = 0; i < t; ++i) v[i] = (k >> i) & 1;
  return v;
}

inline std::map<std::string, std::uint64_t> bind(const std::vector<std::string>& vars,
                                                 const std::vector<std::uint64_t>& values) {
  std::map<std::string, std::uint64_t> env;
  for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = values[i];
  return env;
}

// Every tree of exactly `size` nodes over ~ & ^ | and the placeholders.
// No deduplication, so this is a literal enumeration of the search space.
inline std::vector<Expr> all_trees(unsigned t, std::size_t size,
                                   std::vector<std::vector<Expr>>& memo) {
  if (memo.size() > size && !memo[size].empty()) return memo[size];
  if (memo.size() <= size) memo.resize(size + 1);
  std::vector<Expr> out;
  if (size == 1) {
    for (auto& n : linmba::placeholder_names(t)) out.push_back(Expr::var(n));
  } else {
    for (auto& c : all_trees(t, size - 1, memo)) out.push_back(~c);
    for (std::size_t i = 1; i + 1 < size; ++i)
      for (auto& a : all_trees(t, i, memo))
        for (auto& b : all_trees(t, size - 1 - i, memo))
          for (Op op : {Op::And, Op::Xor, Op::Or}) out.push_back(Expr::binary(op, a, b));
  }
  memo[size] = out;
  return out;
}

} // namespace testsupport
