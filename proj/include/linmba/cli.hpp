#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace linmba {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int usage = 2;
} // namespace exit_code

/// Per-record outcome of a dataset simplify run.
struct RecordOutcome {
  std::size_t line = 0;
  std::optional<std::string> output;
  bool exact = false;    // output equals the ground truth text, whitespace ignored
  bool semantic = false; // output equivalent to the ground truth
  std::optional<std::string> check; // verdict of output vs input under --check
  std::optional<std::string> error;
  double seconds = 0;    // simplify call only
};

struct RunReport {
  std::size_t total = 0;
  std::size_t solved_exact = 0;
  std::size_t solved_semantic = 0; // includes the exact ones
  std::size_t failed = 0;          // total - solved_semantic
  double mean_seconds = 0;
  double median_seconds = 0;
  double p95_seconds = 0;
  std::vector<RecordOutcome> records;
};

/// Fills counts and runtime statistics from `records`.
RunReport summarize(std::vector<RecordOutcome> records);

/// The `linmba` command line. args excludes the program name. Returns the
/// process exit code: 0 success, 1 failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace linmba
