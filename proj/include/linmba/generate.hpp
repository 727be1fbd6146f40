#pragma once

#include "linmba/expr.hpp"
#include "linmba/linearity.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace linmba {

/// Seeded generator with platform-independent draws (the standard
/// distributions are implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  bool coin() { return next() >> 63; }

private:
  std::mt19937_64 engine_;
};

/// 2^t x s matrix of 1-bit evaluations; column j is the truth vector of the
/// j-th bitwise expression, bit i = value on the i-th 0/1 input.
class TruthMatrix {
public:
  TruthMatrix(const std::vector<Expr>& bitwise, const std::vector<std::string>& vars);

  unsigned t() const noexcept { return t_; }
  std::size_t columns() const noexcept { return columns_.size(); }
  bool at(std::size_t row, std::size_t column) const noexcept {
    return columns_[column] >> row & 1;
  }
  const std::vector<std::uint64_t>& column_bits() const noexcept { return columns_; }

  /// A * y mod 2^n.
  std::vector<std::uint64_t> multiply(const std::vector<std::uint64_t>& y, Width width) const;

private:
  unsigned t_;
  std::vector<std::uint64_t> columns_;
};

struct AffineEncoding {
  std::uint64_t a = 1; // must be odd
  std::uint64_t b = 0;
};

struct GeneratorSpec {
  Expr target;
  std::size_t terms = 4;
  Width width;
  std::uint64_t seed = 0;
  std::optional<AffineEncoding> encode;
  std::vector<std::string> vars; // extra variables to involve
};

/// Random bitwise expression over all of `vars`: a lookup-table entry for
/// t <= 3, a random operator tree otherwise. Never constant.
Expr random_bitwise(const std::vector<std::string>& vars, Rng& rng);

/// Linear MBA over `vars` that is identically zero with at least `terms`
/// summands: sums of c*r - c*(basis combination of r). Throws InvalidSpec
/// for terms < 2, empty vars, or a term count the variables cannot reach.
LinearForm zero_mba_form(const std::vector<std::string>& vars, std::size_t terms, Rng& rng,
                         Width width);
Expr zero_mba(const std::vector<std::string>& vars, std::size_t terms, std::uint64_t seed,
              Width width);

/// a*e + b in normalized form. Throws EvenMultiplier, NotLinear.
Expr encode_affine(const Expr& e, std::uint64_t a, std::uint64_t b, Width width);

/// Equivalent, syntactically different linear MBA with at least spec.terms
/// summands. Throws InvalidSpec, EvenMultiplier, NotLinear.
Expr obfuscate(const GeneratorSpec& spec);

/// Canonical form an obfuscation of `spec` simplifies to: the simplified
/// (encoded) target.
Expr ground_truth(const GeneratorSpec& spec);

inline constexpr const char* kDatasetHeader = "# linmba dataset: complex,simple";

/// One `obfuscated,ground-truth` line per spec after a comment header.
/// Throws IoError.
void emit_dataset(const std::vector<GeneratorSpec>& batch, const std::filesystem::path& path);

/// The lines emit_dataset writes, without I/O.
std::vector<std::string> dataset_lines(const std::vector<GeneratorSpec>& batch);

} // namespace linmba
