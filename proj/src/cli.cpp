#include "linmba/cli.hpp"

#include "linmba/dataset.hpp"
#include "linmba/errors.hpp"
#include "linmba/expr.hpp"
#include "linmba/generate.hpp"
#include "linmba/linearity.hpp"
#include "linmba/pool.hpp"
#include "linmba/simplify.hpp"
#include "linmba/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace linmba {

using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_residue(std::string text, Width w) {
  text = strip_spaces(text);
  bool negative = !text.empty() && text[0] == '-';
  if (negative) text.erase(0, 1);
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.erase(0, 2);
  }
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size())
    throw UsageError("invalid number '" + text + "'");
  v = w.reduce(v);
  return negative ? w.neg(v) : v;
}

std::string describe_not_linear(const NotLinear& e) {
  return e.what();
}

std::string describe(const EquivalenceVerdict& v) {
  if (v.equivalent()) return to_string(v.kind);
  return "Different at " + v.witness_text() + ": " + std::to_string(v.lhs_value) + " vs " +
         std::to_string(v.rhs_value);
}

// Linear proof when both sides are linear, sampling otherwise.
EquivalenceVerdict compare(const Expr& a, const Expr& b, Width w) {
  if (normalize(a, w).linear() && normalize(b, w).linear()) {
    try {
      return equivalent_linear(a, b, w);
    } catch (const CapExceeded&) {
    }
  }
  return equivalent_sampled(a, b, w);
}

json verdict_json(const EquivalenceVerdict& v) {
  json j{{"kind", to_string(v.kind)}, {"points", v.points}};
  if (!v.equivalent()) {
    json wit = json::object();
    for (const auto& [name, value] : v.witness) wit[name] = value;
    j["witness"] = wit;
    j["lhs"] = v.lhs_value;
    j["rhs"] = v.rhs_value;
  }
  return j;
}

// ---------------------------------------------------------------------------

struct SimplifyArgs {
  std::string expr;
  std::string dataset;
  unsigned bits = 64;
  bool check = false;
  bool allow_nonlinear = false;
  bool json = false;
  unsigned jobs = 0;
  unsigned max_vars = kDefaultMaxVariables;
};

RecordOutcome simplify_record(const DatasetRecord& rec, const SimplifyArgs& a) {
  RecordOutcome r;
  r.line = rec.line;
  const Width w(a.bits);
  try {
    Expr input = parse(rec.complex, w);
    SimplifyOptions opts{a.max_vars, a.allow_nonlinear};
    auto start = Clock::now();
    Expr result = simplify(input, w, opts);
    r.seconds = seconds_since(start);
    r.output = render(result, w);
    Expr truth = parse(rec.simple, w);
    r.exact = strip_spaces(*r.output) == strip_spaces(rec.simple);
    r.semantic = r.exact || compare(result, truth, w).equivalent();
    if (a.check) {
      auto v = compare(input, result, w);
      r.check = describe(v);
      if (!v.equivalent()) {
        r.exact = r.semantic = false;
        r.error = "check failed: " + *r.check;
      }
    }
    if (!r.semantic && !r.error) r.error = "result differs from ground truth '" + rec.simple + "'";
  } catch (const NotLinear& e) {
    r.error = describe_not_linear(e);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

json report_json(const RunReport& rep, unsigned bits) {
  json records = json::array();
  for (const auto& r : rep.records) {
    json j{{"line", r.line}};
    j["output"] = r.output ? json(*r.output) : json(nullptr);
    j["exact"] = r.exact;
    j["semantic"] = r.semantic;
    j["check"] = r.check ? json(*r.check) : json(nullptr);
    j["error"] = r.error ? json(*r.error) : json(nullptr);
    j["seconds"] = r.seconds;
    records.push_back(std::move(j));
  }
  return json{{"bits", bits},
              {"total", rep.total},
              {"solved_exact", rep.solved_exact},
              {"solved_semantic", rep.solved_semantic},
              {"failed", rep.failed},
              {"runtime_seconds",
               {{"mean", rep.mean_seconds}, {"median", rep.median_seconds}, {"p95", rep.p95_seconds}}},
              {"records", records}};
}

int simplify_dataset(const SimplifyArgs& a, std::ostream& out, std::ostream& err) {
  Dataset data = read_dataset(std::filesystem::path(a.dataset));
  std::vector<RecordOutcome> outcomes(data.records.size());
  parallel_for(data.records.size(), a.jobs ? a.jobs : default_jobs(),
               [&](std::size_t i) { outcomes[i] = simplify_record(data.records[i], a); });
  for (const auto& issue : data.issues)
    outcomes.push_back({issue.line, std::nullopt, false, false, std::nullopt, issue.message, 0});
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const auto& x, const auto& y) { return x.line < y.line; });
  RunReport rep = summarize(std::move(outcomes));

  if (a.json) {
    out << report_json(rep, a.bits).dump(2) << '\n';
  } else {
    for (const auto& r : rep.records) {
      if (r.output) out << *r.output << '\n';
      if (r.error) err << "line " << r.line << ": " << *r.error << '\n';
    }
    out << "# total=" << rep.total << " solved_exact=" << rep.solved_exact
        << " solved_semantic=" << rep.solved_semantic << " failed=" << rep.failed << '\n';
    out << "# runtime_seconds mean=" << rep.mean_seconds << " median=" << rep.median_seconds
        << " p95=" << rep.p95_seconds << '\n';
  }
  return rep.failed == 0 ? exit_code::ok : exit_code::failure;
}

int simplify_one(const SimplifyArgs& a, std::ostream& out, std::ostream& err) {
  const Width w(a.bits);
  Expr input;
  try {
    input = parse(a.expr, w);
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
  SimplifyResult res;
  double secs = 0;
  try {
    auto start = Clock::now();
    res = simplify_detailed(input, w, {a.max_vars, a.allow_nonlinear});
    secs = seconds_since(start);
  } catch (const NotLinear& e) {
    err << "error: " << describe_not_linear(e) << '\n';
    return exit_code::failure;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }

  std::optional<EquivalenceVerdict> verdict;
  if (a.check) verdict = compare(input, res.expr, w);
  const std::string warning = "verified on 0/1 points only";

  if (a.json) {
    json j{{"input", a.expr},
           {"output", render(res.expr, w)},
           {"bits", a.bits},
           {"basis", render(res.basis.to_expr(), w)},
           {"refinement_case", res.refinement_case ? json(*res.refinement_case) : json(nullptr)},
           {"terms", term_count(res.expr)},
           {"seconds", secs}};
    j["check"] = verdict ? verdict_json(*verdict) : json(nullptr);
    j["warning"] = res.verified_on_corners_only ? json(warning) : json(nullptr);
    out << j.dump(2) << '\n';
  } else {
    out << render(res.expr, w) << '\n';
    if (verdict) out << "check: " << describe(*verdict) << '\n';
    if (res.verified_on_corners_only) err << "warning: " << warning << '\n';
  }
  return verdict && !verdict->equivalent() ? exit_code::failure : exit_code::ok;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string target;
  std::size_t terms = 4;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  unsigned bits = 64;
  std::vector<std::string> vars;
  std::string encode;
  std::string out;
  unsigned jobs = 0;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const Width w(a.bits);
  GeneratorSpec base;
  base.target = parse(a.target, w);
  base.terms = a.terms;
  base.width = w;
  base.vars = a.vars;
  if (!a.encode.empty()) {
    if (a.encode == "random") {
      Rng rng(a.seed ^ 0x9e3779b97f4a7c15ull);
      base.encode = AffineEncoding{w.reduce(rng.next() | 1), w.reduce(rng.next())};
    } else {
      auto comma = a.encode.find(',');
      if (comma == std::string::npos) throw UsageError("--encode-affine expects 'a,b' or 'random'");
      base.encode = AffineEncoding{parse_residue(a.encode.substr(0, comma), w),
                                   parse_residue(a.encode.substr(comma + 1), w)};
    }
    if ((base.encode->a & 1) == 0) throw EvenMultiplier();
  }

  const std::string truth = render(ground_truth(base), w);
  std::vector<std::string> lines(a.count);
  std::vector<std::string> failures(a.count);
  parallel_for(a.count, a.jobs ? a.jobs : default_jobs(), [&](std::size_t i) {
    GeneratorSpec spec = base;
    spec.seed = a.seed + i;
    try {
      lines[i] = render(obfuscate(spec), w) + "," + truth;
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) throw InvalidSpec(f);

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::trunc);
    if (!file) throw IoError("cannot open '" + a.out + "' for writing");
  }
  std::ostream& dst = a.out.empty() ? out : file;
  dst << kDatasetHeader << '\n';
  for (const auto& line : lines) dst << line << '\n';
  if (!dst) throw IoError("write failed");

  std::ostream& note = a.out.empty() ? err : out;
  note << "generated " << a.count << " record(s) for " << truth;
  if (!a.out.empty()) note << " into " << a.out;
  note << '\n';
  return exit_code::ok;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> exprs;
  std::string dataset;
  unsigned bits = 64;
  std::string mode = "linear";
  std::uint64_t samples = kDefaultSamples;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultExhaustiveBudget;
};

EquivalenceVerdict run_verify(const Expr& a, const Expr& b, const VerifyArgs& v) {
  const Width w(v.bits);
  if (v.mode == "exhaustive") return equivalent_exhaustive(a, b, w, v.budget);
  if (v.mode == "sample") return equivalent_sampled(a, b, w, v.samples, v.seed);
  return equivalent_linear(a, b, w);
}

int cmd_verify(const VerifyArgs& v, std::ostream& out, std::ostream& err) {
  const Width w(v.bits);
  if (v.dataset.empty()) {
    if (v.exprs.size() != 2) throw UsageError("verify needs two expressions or --dataset");
    try {
      auto verdict = run_verify(parse(v.exprs[0], w), parse(v.exprs[1], w), v);
      out << describe(verdict) << '\n';
      return verdict.equivalent() ? exit_code::ok : exit_code::failure;
    } catch (const NotLinear& e) {
      err << "error: " << describe_not_linear(e) << '\n';
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
    }
    return exit_code::failure;
  }
  if (!v.exprs.empty()) throw UsageError("expressions and --dataset are mutually exclusive");

  Dataset data = read_dataset(std::filesystem::path(v.dataset));
  std::size_t same = 0, different = 0, errors = data.issues.size();
  for (const auto& issue : data.issues) err << "line " << issue.line << ": " << issue.message << '\n';
  for (const auto& rec : data.records) {
    try {
      auto verdict = run_verify(parse(rec.complex, w), parse(rec.simple, w), v);
      if (verdict.equivalent()) {
        ++same;
      } else {
        ++different;
        out << "line " << rec.line << ": " << describe(verdict) << '\n';
      }
    } catch (const NotLinear& e) {
      ++errors;
      err << "line " << rec.line << ": " << describe_not_linear(e) << '\n';
    } catch (const std::exception& e) {
      ++errors;
      err << "line " << rec.line << ": " << e.what() << '\n';
    }
  }
  out << "# checked=" << data.records.size() + data.issues.size() << " equivalent=" << same
      << " different=" << different << " errors=" << errors << '\n';
  return different + errors == 0 ? exit_code::ok : exit_code::failure;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string dataset;
  unsigned bits = 64;
  unsigned repeat = 3;
  bool json = false;
};

int cmd_bench(const BenchArgs& b, std::ostream& out, std::ostream& err) {
  const Width w(b.bits);
  Dataset data = read_dataset(std::filesystem::path(b.dataset));
  struct Item {
    Expr expr;
    std::size_t vars;
  };
  std::vector<Item> items;
  std::size_t failed = data.issues.size();
  for (const auto& issue : data.issues) err << "line " << issue.line << ": " << issue.message << '\n';
  for (const auto& rec : data.records) {
    try {
      Expr e = parse(rec.complex, w);
      simplify(e, w); // warmup, untimed
      items.push_back({e, variables(e).size()});
    } catch (const std::exception& e) {
      ++failed;
      err << "line " << rec.line << ": " << e.what() << '\n';
    }
  }

  // per variable count: total seconds of each repetition
  std::map<std::size_t, std::vector<double>> per_rep;
  std::map<std::size_t, std::size_t> counts;
  for (const auto& it : items) {
    per_rep[it.vars].assign(b.repeat, 0.0);
    ++counts[it.vars];
  }
  for (unsigned r = 0; r < b.repeat; ++r)
    for (const auto& it : items) {
      auto start = Clock::now();
      simplify(it.expr, w);
      per_rep[it.vars][r] += seconds_since(start);
    }

  json groups = json::array();
  double all = 0;
  for (const auto& [t, reps] : per_rep) {
    const double n = static_cast<double>(counts[t]);
    json rep_means = json::array();
    double sum = 0;
    for (double s : reps) {
      rep_means.push_back(s / n);
      sum += s;
    }
    all += sum;
    groups.push_back(json{{"variables", t},
                          {"count", counts[t]},
                          {"mean_seconds", sum / (n * b.repeat)},
                          {"repeat_means", rep_means}});
  }
  const double mean = items.empty() ? 0.0 : all / (static_cast<double>(items.size()) * b.repeat);
  json report{{"bits", b.bits},       {"repeat", b.repeat}, {"total", items.size() + failed},
              {"failed", failed},     {"mean_seconds", mean}, {"groups", groups}};

  if (b.json) {
    out << report.dump(2) << '\n';
  } else {
    out << "# total=" << items.size() + failed << " failed=" << failed << " repeat=" << b.repeat
        << " mean_seconds=" << mean << '\n';
    for (const auto& g : report["groups"])
      out << "t=" << g["variables"].get<std::size_t>() << " count=" << g["count"].get<std::size_t>()
          << " mean_seconds=" << g["mean_seconds"].get<double>() << '\n';
  }
  return failed == 0 ? exit_code::ok : exit_code::failure;
}

} // namespace

RunReport summarize(std::vector<RecordOutcome> records) {
  RunReport rep;
  rep.total = records.size();
  std::vector<double> times;
  for (const auto& r : records) {
    if (r.exact) ++rep.solved_exact;
    if (r.semantic) ++rep.solved_semantic;
    if (r.output) times.push_back(r.seconds);
  }
  rep.failed = rep.total - rep.solved_semantic;
  if (!times.empty()) {
    std::sort(times.begin(), times.end());
    double sum = 0;
    for (double t : times) sum += t;
    rep.mean_seconds = sum / static_cast<double>(times.size());
    const std::size_t n = times.size();
    rep.median_seconds = n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2;
    auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    rep.p95_seconds = times[std::max<std::size_t>(rank, 1) - 1];
  }
  rep.records = std::move(records);
  return rep;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear MBA simplifier and generator", "linmba"};
  app.require_subcommand(1);

  SimplifyArgs sa;
  auto* simp = app.add_subcommand("simplify", "Simplify an expression or a dataset");
  simp->add_option("expr", sa.expr, "Expression to simplify");
  auto* simp_data = simp->add_option("--dataset", sa.dataset, "complex,simple dataset file");
  simp->add_option("--bits", sa.bits, "Word width n")->check(CLI::Range(1, 64));
  simp->add_flag("--check", sa.check, "Verify the result against the input");
  simp->add_flag("--allow-nonlinear", sa.allow_nonlinear, "Skip the linearity gate");
  simp->add_flag("--json", sa.json, "JSON output");
  simp->add_option("--jobs", sa.jobs, "Worker threads for datasets (0 = all cores)");
  simp->add_option("--max-vars", sa.max_vars, "Variable cap")->check(CLI::Range(1, 24));
  simp_data->excludes(simp->get_option("expr"));

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate obfuscated linear MBAs");
  gen->add_option("--target", ga.target, "Target expression")->required();
  gen->add_option("--terms", ga.terms, "Minimum summand count")->check(CLI::Range(2, 4096));
  gen->add_option("--count", ga.count, "Number of records");
  gen->add_option("--seed", ga.seed, "Seed of the first record; record i uses seed+i");
  gen->add_option("--bits", ga.bits, "Word width n")->check(CLI::Range(1, 64));
  gen->add_option("--vars", ga.vars, "Extra variables to involve")->delimiter(',');
  gen->add_option("--encode-affine", ga.encode, "'a,b' or 'random'");
  gen->add_option("--out", ga.out, "Output file (default stdout)");
  gen->add_option("--jobs", ga.jobs, "Worker threads (0 = all cores)");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Check two expressions or a dataset for equivalence");
  ver->add_option("exprs", va.exprs, "Two expressions")->expected(0, 2);
  ver->add_option("--dataset", va.dataset, "complex,simple dataset file");
  ver->add_option("--bits", va.bits, "Word width n")->check(CLI::Range(1, 64));
  ver->add_option("--mode", va.mode, "linear, exhaustive or sample")
      ->check(CLI::IsMember({"linear", "exhaustive", "sample"}));
  ver->add_option("--samples", va.samples, "Random samples in sample mode")->check(CLI::PositiveNumber);
  ver->add_option("--seed", va.seed, "Sampling seed");
  ver->add_option("--budget", va.budget, "Evaluation budget in exhaustive mode");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Time simplification over a dataset");
  bench->add_option("--dataset", ba.dataset, "complex,simple dataset file")->required();
  bench->add_option("--bits", ba.bits, "Word width n")->check(CLI::Range(1, 64));
  bench->add_option("--repeat", ba.repeat, "Timed passes")->check(CLI::Range(1, 1000));
  bench->add_flag("--json", ba.json, "JSON output");

  try {
    // "-x-1" is an expression, not a short flag; -h is the only short flag
    std::vector<std::string> reversed;
    for (auto it = args.rbegin(); it != args.rend(); ++it) {
      bool dash_expr = it->size() > 1 && (*it)[0] == '-' && (*it)[1] != '-' && *it != "-h";
      reversed.push_back(dash_expr ? " " + *it : *it);
    }
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }

  try {
    if (*simp) {
      if (sa.expr.empty() == sa.dataset.empty())
        throw UsageError("simplify needs an expression or --dataset");
      return sa.dataset.empty() ? simplify_one(sa, out, err) : simplify_dataset(sa, out, err);
    }
    if (*gen) return cmd_generate(ga, out, err);
    if (*ver) return cmd_verify(va, out, err);
    return cmd_bench(ba, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const InvalidSpec& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const NotLinear& e) {
    err << "error: " << describe_not_linear(e) << '\n';
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
}

} // namespace linmba
