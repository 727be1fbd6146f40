#include "linmba/dataset.hpp"

#include "linmba/errors.hpp"

#include <algorithm>
#include <fstream>

namespace linmba {

namespace {

std::string trim(const std::string& s) {
  auto space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  auto b = std::find_if_not(s.begin(), s.end(), space);
  auto e = std::find_if_not(s.rbegin(), s.rend(), space).base();
  return b < e ? std::string(b, e) : std::string();
}

} // namespace

Dataset read_dataset(std::istream& in) {
  Dataset out;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    auto comma = text.find(',');
    if (comma == std::string::npos) {
      out.issues.push_back({line, "expected 'complex,simple'"});
      continue;
    }
    if (text.find(',', comma + 1) != std::string::npos) {
      out.issues.push_back({line, "more than one comma"});
      continue;
    }
    DatasetRecord r{trim(text.substr(0, comma)), trim(text.substr(comma + 1)), line};
    if (r.complex.empty() || r.simple.empty()) {
      out.issues.push_back({line, "empty field"});
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records,
                   const std::string& header) {
  if (!header.empty()) out << header << '\n';
  for (const auto& r : records) out << r.complex << ',' << r.simple << '\n';
}

} // namespace linmba
