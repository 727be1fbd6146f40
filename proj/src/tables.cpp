#include "linmba/tables.hpp"

#include "linmba/errors.hpp"
#include "linmba/semantics.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace linmba {

namespace {

char class_char(Op op) {
  switch (op) {
  case Op::BitNot: return '1';
  case Op::And: return '2';
  case Op::Xor: return '3';
  case Op::Or: return '4';
  default: return '5';
  }
}

void preorder_classes(const Expr& e, std::string& out) {
  out += class_char(e.op());
  if (e.op() == Op::BitNot) preorder_classes(e.child(), out);
  else if (is_binary(e.op())) {
    preorder_classes(e.lhs(), out);
    preorder_classes(e.rhs(), out);
  }
}

std::uint64_t apply_truth(Op op, std::uint64_t a, std::uint64_t b) {
  return op == Op::And ? (a & b) : op == Op::Xor ? (a ^ b) : (a | b);
}

struct Cell {
  Expr expr;
  TableCost cost;
};

} // namespace

TableCost table_cost(const Expr& e) {
  TableCost c;
  c.nodes = e.node_count();
  preorder_classes(e, c.classes);
  c.text = render(e);
  return c;
}

std::vector<std::string> placeholder_names(unsigned t) {
  std::vector<std::string> names;
  for (unsigned i = 1; i <= t; ++i) names.push_back("x_" + std::to_string(i));
  return names;
}

// Children of a minimum-size expression are minimum-size for their own truth
// vectors, and the cost order is monotone under replacing a child by a
// cheaper child of equal size, so combining per-truth optima is exact.
LookupTable build_lookup_table(unsigned t) {
  if (t < 1 || t > kMaxTableVariables)
    throw std::invalid_argument("lookup tables exist for 1 to 3 variables");

  const std::size_t rows = std::size_t{1} << t;
  const std::size_t count = std::size_t{1} << rows;
  const std::uint64_t full = count - 1;

  std::vector<std::optional<Cell>> best(count);
  std::vector<std::vector<std::uint64_t>> by_size(1);
  std::size_t filled = 0;

  auto names = placeholder_names(t);
  for (std::size_t size = 1; filled < count; ++size) {
    std::vector<std::optional<Cell>> round(count);
    auto offer = [&](std::uint64_t tv, const std::string& classes, auto&& make) {
      if (best[tv]) return;
      auto& slot = round[tv];
      if (slot && classes > slot->cost.classes) return;
      Expr e = make();
      TableCost cost{size, classes, render(e)};
      if (!slot || cost < slot->cost) slot = Cell{std::move(e), std::move(cost)};
    };

    if (size == 1) {
      for (unsigned i = 0; i < t; ++i) {
        std::uint64_t tv = 0;
        for (std::size_t k = 0; k < rows; ++k) tv |= std::uint64_t((k >> i) & 1) << k;
        offer(tv, "5", [&] { return Expr::var(names[i]); });
      }
    } else {
      for (std::uint64_t w : by_size[size - 1]) {
        const Cell& c = *best[w];
        offer(~w & full, "1" + c.cost.classes, [&] { return ~c.expr; });
      }
      for (std::size_t i = 1; i + 1 < size; ++i) {
        std::size_t j = size - 1 - i;
        if (j >= by_size.size()) continue;
        for (std::uint64_t a : by_size[i])
          for (std::uint64_t b : by_size[j])
            for (Op op : {Op::And, Op::Xor, Op::Or}) {
              std::uint64_t tv = apply_truth(op, a, b);
              if (best[tv]) continue;
              const Cell& ca = *best[a];
              const Cell& cb = *best[b];
              offer(tv, class_char(op) + ca.cost.classes + cb.cost.classes,
                    [&] { return Expr::binary(op, ca.expr, cb.expr); });
            }
      }
    }

    by_size.emplace_back();
    for (std::uint64_t tv = 0; tv < count; ++tv) {
      if (!round[tv]) continue;
      best[tv] = std::move(round[tv]);
      by_size.back().push_back(tv);
      ++filled;
    }
  }

  LookupTable table{t, {}};
  table.entries.reserve(count);
  for (auto& cell : best) table.entries.push_back(cell->expr);
  return table;
}

const Expr& lookup(const LookupTable& table, std::uint64_t truth_index) {
  if (truth_index >= table.entries.size())
    throw LengthMismatch("truth index out of range for a " + std::to_string(table.t) +
                         "-variable table");
  return table.entries[truth_index];
}

const Expr& lookup(const LookupTable& table, const std::vector<bool>& truth) {
  if (truth.size() != (std::size_t{1} << table.t))
    throw LengthMismatch("truth vector of length " + std::to_string(truth.size()) +
                         " for a " + std::to_string(table.t) + "-variable table");
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < truth.size(); ++k)
    if (truth[k]) idx |= std::uint64_t{1} << k;
  return table.entries[idx];
}

Expr instantiate(const LookupTable& table, std::uint64_t truth_index,
                 const std::vector<std::string>& names) {
  auto placeholders = placeholder_names(table.t);
  std::vector<std::pair<std::string, std::string>> rename;
  for (unsigned i = 0; i < table.t && i < names.size(); ++i)
    rename.emplace_back(placeholders[i], names[i]);
  return substitute(lookup(table, truth_index), rename);
}

// ---------------------------------------------------------------------------
// Cache file:
//   linmba-lookup-tables <version>
//   table <t>
//   <index> <expression>      (2^(2^t) lines)

std::string serialize_tables(const std::vector<LookupTable>& tables) {
  std::ostringstream os;
  os << "linmba-lookup-tables " << kTableFormatVersion << '\n';
  for (const auto& table : tables) {
    os << "table " << table.t << '\n';
    for (std::size_t i = 0; i < table.entries.size(); ++i)
      os << i << ' ' << render(table.entries[i]) << '\n';
  }
  return os.str();
}

std::optional<std::vector<LookupTable>> deserialize_tables(const std::string& text) {
  std::istringstream is(text);
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "linmba-lookup-tables" ||
      version != kTableFormatVersion)
    return std::nullopt;

  std::vector<LookupTable> tables;
  std::string word;
  try {
    while (is >> word) {
      if (word != "table") return std::nullopt;
      unsigned t = 0;
      if (!(is >> t) || t < 1 || t > kMaxTableVariables) return std::nullopt;
      LookupTable table{t, {}};
      const std::size_t count = std::size_t{1} << (std::size_t{1} << t);
      auto names = placeholder_names(t);
      for (std::size_t i = 0; i < count; ++i) {
        std::size_t idx = 0;
        std::string line;
        if (!(is >> idx) || idx != i || !std::getline(is, line)) return std::nullopt;
        Expr e = parse(line);
        if (truth_vector(e, names) != i) return std::nullopt;
        table.entries.push_back(std::move(e));
      }
      tables.push_back(std::move(table));
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return tables;
}

std::vector<LookupTable> load_or_build_tables(const std::filesystem::path& file) {
  {
    std::ifstream in(file);
    if (in) {
      std::stringstream buf;
      buf << in.rdbuf();
      if (auto tables = deserialize_tables(buf.str()); tables && tables->size() == kMaxTableVariables)
        return std::move(*tables);
    }
  }
  std::vector<LookupTable> tables;
  for (unsigned t = 1; t <= kMaxTableVariables; ++t) tables.push_back(build_lookup_table(t));
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::trunc);
  if (out) out << serialize_tables(tables);
  return tables;
}

const LookupTable& lookup_table(unsigned t) {
  static const std::vector<LookupTable> tables = [] {
    if (const char* dir = std::getenv(kTableCacheEnv); dir && *dir)
      return load_or_build_tables(std::filesystem::path(dir) /
                                  ("lookup_tables_v" + std::to_string(kTableFormatVersion) + ".txt"));
    std::vector<LookupTable> built;
    for (unsigned u = 1; u <= kMaxTableVariables; ++u) built.push_back(build_lookup_table(u));
    return built;
  }();
  if (t < 1 || t > kMaxTableVariables)
    throw std::invalid_argument("lookup tables exist for 1 to 3 variables");
  return tables[t - 1];
}

} // namespace linmba
