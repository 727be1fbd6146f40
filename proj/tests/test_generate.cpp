#include "support.hpp"

#include "linmba/dataset.hpp"
#include "linmba/errors.hpp"
#include "linmba/generate.hpp"
#include "linmba/semantics.hpp"
#include "linmba/simplify.hpp"
#include "linmba/verify.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace linmba;

namespace {

GeneratorSpec spec_for(const std::string& target, std::size_t terms, std::uint64_t seed,
                       Width w = Width{}, std::vector<std::string> extra = {}) {
  GeneratorSpec s;
  s.target = parse(target, w);
  s.terms = terms;
  s.width = w;
  s.seed = seed;
  s.vars = std::move(extra);
  return s;
}

bool exhaustive_zero(const Expr& e, Width w) {
  auto vars = variables(e);
  CompiledExpr prog(e, vars, w);
  const std::uint64_t points = std::uint64_t{1} << (w.bits() * vars.size());
  std::vector<std::uint64_t> in(vars.size());
  for (std::uint64_t i = 0; i < points; ++i) {
    for (std::size_t v = 0; v < in.size(); ++v) in[v] = (i >> (v * w.bits())) & w.mask();
    if (prog(in) != 0) return false;
  }
  return true;
}

} // namespace

TEST_CASE("rng draws are bounded and reproducible") {
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());
  Rng r(9);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[r.below(7)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  CHECK(Rng(3).below(1) == 0);
  // mt19937_64 reference value: the 10000th draw for the default seed
  std::mt19937_64 ref;
  Rng same(5489u);
  for (int i = 0; i < 9999; ++i) (void)same.next(), (void)ref();
  CHECK(same.next() == ref());
}

TEST_CASE("truth matrix") {
  TruthMatrix m({parse("x"), parse("x&y"), parse("~y")}, {"x", "y"});
  CHECK(m.t() == 2);
  CHECK(m.columns() == 3);
  CHECK(m.column_bits() == std::vector<std::uint64_t>{0b1010, 0b1000, 0b0011});
  CHECK(m.at(1, 0));
  CHECK_FALSE(m.at(1, 1));
  CHECK(m.multiply({1, 2, 4}, Width{}) == std::vector<std::uint64_t>{4, 5, 0, 3});
  CHECK_THROWS_AS(m.multiply({1}, Width{}), LengthMismatch);
}

TEST_CASE("zero MBAs vanish everywhere") {
  CHECK(render(simplify(parse("~x+x+1"), Width{})) == "0");
  for (unsigned t = 1; t <= 2; ++t)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Width w8(8);
      const std::size_t terms = t == 1 ? 2 + seed % 2 : 2 + seed % 5;
      Expr z = zero_mba(testsupport::names(t), terms, seed, w8);
      CHECK(term_count(z) >= terms);
      CHECK(exhaustive_zero(z, w8));
    }
  for (unsigned t = 2; t <= 6; ++t)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Width w;
      auto vars = testsupport::names(t);
      Expr z = zero_mba(vars, 6, seed, w);
      auto sig = signature_vector(z, vars, w);
      CHECK(std::all_of(sig.values.begin(), sig.values.end(), [](auto v) { return v == 0; }));
      CHECK(normalize(z, w).linear());
    }
  CHECK_THROWS_AS(zero_mba({"x"}, 1, 0, Width{}), InvalidSpec);
  CHECK_THROWS_AS(zero_mba({"x"}, 4, 0, Width{}), InvalidSpec);
  CHECK_THROWS_AS(zero_mba({"x", "y"}, 16, 0, Width{}), InvalidSpec);
  CHECK(term_count(zero_mba({"x", "y"}, 15, 0, Width{})) == 15);
  CHECK_THROWS_AS(zero_mba({}, 3, 0, Width{}), InvalidSpec);
}

TEST_CASE("random bitwise expressions are never constant") {
  Rng rng(4);
  for (unsigned t = 1; t <= 6; ++t)
    for (int i = 0; i < 50; ++i) {
      Expr e = random_bitwise(testsupport::names(t), rng);
      auto vars = variables(e);
      auto tv = truth_vector(e, vars);
      std::uint64_t full = vars.size() == 6 ? ~std::uint64_t{0}
                                            : (std::uint64_t{1} << (std::size_t{1} << vars.size())) - 1;
      CHECK(tv != 0);
      CHECK(tv != full);
      CHECK(is_pure_bitwise(e));
    }
}

TEST_CASE("obfuscations are equivalent, linear and longer") {
  std::mt19937_64 rng(21);
  const char* targets[] = {"x+y", "49374", "3735936685*x+49374", "3735936685*(x^y)+49374",
                           "3735936685*~x", "x", "0", "-x-y+(x&y)"};
  for (unsigned bits : {8u, 32u, 64u})
    for (const char* target : targets)
      for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Width w(bits);
        auto spec = spec_for(target, 3 + seed % 5, seed, w,
                             seed % 2 ? std::vector<std::string>{"y", "z"} : std::vector<std::string>{"x", "y"});
        Expr out = obfuscate(spec);
        auto norm = normalize(out, w);
        REQUIRE(norm.linear());
        CHECK(norm.form->summand_count() >= spec.terms);
        CHECK(render(out, w) != render(*normalize(spec.target, w).normalized, w));
        auto v = equivalent_sampled(out, spec.target, w, 1000, seed);
        CHECK_MESSAGE(v.equivalent(), target, " -> ", render(out, w));
        CHECK(equivalent_linear(out, spec.target, w).equivalent());
        (void)rng;
      }
}

TEST_CASE("a known four-term x+y rewrite matches generated ones") {
  Expr known = parse("2*((x&y)|(~x&~y))-2*(~x&y)+3*((~x&y)|(x&~y))-2*~y");
  CHECK(equivalent_linear(known, parse("x+y"), Width{}).kind == VerdictKind::ProvenLinear);
  CHECK(term_count(known) == 4);
  Expr ours = obfuscate(spec_for("x+y", 4, 7));
  CHECK(term_count(ours) >= 4);
  CHECK(equivalent_linear(ours, known, Width{}).equivalent());
}

TEST_CASE("constant targets give constant signatures") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Expr out = obfuscate(spec_for("49374", 4, seed, Width{}, {"x", "y"}));
    auto vars = variables(out);
    REQUIRE_FALSE(vars.empty());
    auto sig = signature_vector(out, vars, Width{});
    CHECK(std::all_of(sig.values.begin(), sig.values.end(), [](auto v) { return v == 49374; }));
  }
}

TEST_CASE("round trip to the exact target") {
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto spec = spec_for("3735936685*~x", 4, seed, Width{}, {"y"});
    if (render(simplify(obfuscate(spec), Width{})) == "3735936685*~x") ++exact;
  }
  CHECK(exact == 1000);
}

TEST_CASE("extra variables are involved") {
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (auto& v : variables(obfuscate(spec_for("x", 6, seed, Width{}, {"y", "z"})))) seen.insert(v);
  CHECK(seen == std::set<std::string>{"x", "y", "z"});
  CHECK_THROWS_AS(obfuscate(spec_for("x", 4, 0, Width{}, {"9bad"})), InvalidSpec);
}

TEST_CASE("generation is deterministic") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto spec = spec_for("x+y", 5, seed, Width{}, {"z"});
    CHECK(render(obfuscate(spec)) == render(obfuscate(spec)));
  }
  CHECK(render(obfuscate(spec_for("x+y", 5, 1))) != render(obfuscate(spec_for("x+y", 5, 2))));
}

TEST_CASE("invalid specs") {
  CHECK_THROWS_AS(obfuscate(spec_for("x+y", 1, 0)), InvalidSpec);
  CHECK_THROWS_AS(obfuscate(spec_for("x*y", 4, 0)), NotLinear);
  CHECK_THROWS_AS(obfuscate(spec_for("x", 4, 0)), InvalidSpec);
  CHECK(term_count(obfuscate(spec_for("x", 3, 0))) == 3);
  auto even = spec_for("x+y", 4, 0);
  even.encode = AffineEncoding{4, 1};
  CHECK_THROWS_AS(obfuscate(even), EvenMultiplier);
  CHECK_THROWS_AS(encode_affine(parse("x"), 2, 0, Width{}), EvenMultiplier);
}

TEST_CASE("affine encoding") {
  Width w;
  CHECK(render(encode_affine(parse("x"), 1, 0, w)) == "x");
  CHECK(render(encode_affine(parse("x+y"), 5, 3, w)) == "5*x+5*y+3");
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t a = rng.next() | 1, b = rng.next();
    const std::string expected =
        render(*normalize(Expr::constant(a) * Expr::var("x") + Expr::constant(a) * Expr::var("y") +
                              Expr::constant(b),
                          w)
                    .normalized);
    CHECK(render(encode_affine(parse("x+y"), a, b, w)) == expected);
    // decode check on an obfuscation
    Expr obf = obfuscate(spec_for("x+y", 4, static_cast<std::uint64_t>(i)));
    CHECK(render(simplify(encode_affine(obf, a, b, w), w)) ==
          render(simplify(parse(expected), w)));

    auto spec = spec_for("x+y", 4, static_cast<std::uint64_t>(i));
    spec.encode = AffineEncoding{a, b};
    CHECK(render(simplify(obfuscate(spec), w)) == render(ground_truth(spec)));
    CHECK(render(ground_truth(spec)) == render(simplify(parse(expected), w)));
  }
}

TEST_CASE("datasets") {
  auto dir = std::filesystem::temp_directory_path() / "linmba_generate_test";
  std::filesystem::create_directories(dir);
  std::vector<GeneratorSpec> batch;
  for (std::uint64_t seed : {1, 2, 3}) batch.push_back(spec_for("x+y", 4, seed));
  emit_dataset(batch, dir / "d.csv");

  std::ifstream in(dir / "d.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == kDatasetHeader);
  Dataset data = read_dataset(dir / "d.csv");
  CHECK(data.issues.empty());
  REQUIRE(data.records.size() == 3);
  auto lines = dataset_lines(batch);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(data.records[i].complex + "," + data.records[i].simple == lines[i + 1]);
    CHECK(data.records[i].complex == render(obfuscate(batch[i])));
    CHECK(data.records[i].simple == "x+y");
    CHECK(equivalent_linear(parse(data.records[i].complex), parse(data.records[i].simple), Width{})
              .equivalent());
  }

  emit_dataset({}, dir / "empty.csv");
  std::ifstream empty(dir / "empty.csv");
  std::string all((std::istreambuf_iterator<char>(empty)), {});
  CHECK(all == std::string(kDatasetHeader) + "\n");

  CHECK_THROWS_AS(emit_dataset(batch, dir / "missing" / "x.csv"), IoError);
  std::filesystem::remove_all(dir);
}
