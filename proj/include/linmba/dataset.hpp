#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace linmba {

/// One `complex,simple` line. `line` is 1-based.
struct DatasetRecord {
  std::string complex;
  std::string simple;
  std::size_t line = 0;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

/// A line that is neither a comment, blank, nor a well-formed record.
struct DatasetIssue {
  std::size_t line = 0;
  std::string message;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  std::vector<DatasetIssue> issues;
};

/// Skips blank lines and lines starting with '#'. Each record line must hold
/// exactly one comma with nonempty fields; other lines become issues. Field
/// text is trimmed, a trailing CR is dropped. Expressions are not parsed here.
Dataset read_dataset(std::istream& in);

/// Throws IoError when the file cannot be opened.
Dataset read_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records,
                   const std::string& header = "");

} // namespace linmba
