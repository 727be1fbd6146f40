#pragma once

#include "linmba/expr.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace linmba {

inline constexpr unsigned kMaxTableVariables = 3;
inline constexpr int kTableFormatVersion = 1;
/// Directory for the on-disk table cache; unset means build in memory only.
inline constexpr const char* kTableCacheEnv = "LINMBA_TABLE_CACHE";

/// Minimal bitwise expression for every truth vector over t <= 3 variables.
/// Entries use the placeholders x_1 .. x_t. Bit k of an index is the value on
/// the k-th 0/1 input (x_i = bit i-1 of k).
struct LookupTable {
  unsigned t = 0;
  std::vector<Expr> entries;
};

/// Cost order used for minimality: node count, then the preorder sequence of
/// node classes (~ < & < ^ < | < variable), then rendered text.
struct TableCost {
  std::size_t nodes = 0;
  std::string classes;
  std::string text;

  friend auto operator<=>(const TableCost&, const TableCost&) = default;
};

TableCost table_cost(const Expr& e);

/// Deterministic dynamic program over node counts. t must be 1, 2 or 3.
LookupTable build_lookup_table(unsigned t);

/// truth.size() must be 2^t; throws LengthMismatch otherwise.
const Expr& lookup(const LookupTable& table, const std::vector<bool>& truth);
const Expr& lookup(const LookupTable& table, std::uint64_t truth_index);

/// Process-wide memoized tables, loaded from or written to the cache
/// directory named by LINMBA_TABLE_CACHE when set.
const LookupTable& lookup_table(unsigned t);

/// Placeholder names x_1 .. x_t.
std::vector<std::string> placeholder_names(unsigned t);

/// Entry with placeholders replaced by `names` (names.size() == table.t).
Expr instantiate(const LookupTable& table, std::uint64_t truth_index,
                 const std::vector<std::string>& names);

std::string serialize_tables(const std::vector<LookupTable>& tables);
/// Returns nothing on version mismatch or malformed/unsound content.
std::optional<std::vector<LookupTable>> deserialize_tables(const std::string& text);

/// Loads tables 1..3 from `file`, or builds and writes them when the file
/// is absent or stale.
std::vector<LookupTable> load_or_build_tables(const std::filesystem::path& file);

} // namespace linmba
