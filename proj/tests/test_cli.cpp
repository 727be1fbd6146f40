#include "linmba/cli.hpp"
#include "linmba/dataset.hpp"
#include "linmba/expr.hpp"
#include "linmba/generate.hpp"
#include "linmba/verify.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace linmba;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::trunc) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_CASE("simplify one expression") {
  auto r = cli({"simplify", "3735936685*(x^y)+49374"});
  CHECK(r.code == exit_code::ok);
  CHECK(r.out == "49374+3735936685*(x^y)\n");

  r = cli({"simplify", "--check", "(x&y)+(x|y)"});
  CHECK(r.code == exit_code::ok);
  CHECK(r.out == "x+y\ncheck: ProvenLinear\n");

  r = cli({"simplify", "--bits", "8", "x+255*x"});
  CHECK(r.out == "0\n");
}

TEST_CASE("simplify json") {
  auto r = cli({"simplify", "--json", "--check", "3735936685*(x^y)+49374"});
  REQUIRE(r.code == exit_code::ok);
  auto j = json::parse(r.out);
  CHECK(j["output"] == "49374+3735936685*(x^y)");
  CHECK(j["basis"] == "49374+3735936685*x+3735936685*y-7471873370*(x&y)");
  CHECK(j["refinement_case"] == 4);
  CHECK(j["terms"] == 2);
  CHECK(j["bits"] == 64);
  CHECK(j["check"]["kind"] == "ProvenLinear");
  CHECK(j["warning"].is_null());
}

TEST_CASE("nonlinear input") {
  auto r = cli({"simplify", "x*y"});
  CHECK(r.code == exit_code::failure);
  CHECK(r.err.find("error:") == 0);
  CHECK(r.err.find("at /") != std::string::npos);

  r = cli({"simplify", "--allow-nonlinear", "--json", "x*y"});
  CHECK(r.code == exit_code::ok);
  auto j = json::parse(r.out);
  CHECK(j["warning"] == "verified on 0/1 points only");
  CHECK(j["output"] == "x&y");

  r = cli({"simplify", "x+"});
  CHECK(r.code == exit_code::failure);
}

TEST_CASE("exit codes on usage errors") {
  CHECK(cli({"--help"}).code == exit_code::ok);
  CHECK(cli({"simplify", "--help"}).code == exit_code::ok);
  CHECK(cli({}).code == exit_code::usage);
  CHECK(cli({"frobnicate"}).code == exit_code::usage);
  CHECK(cli({"simplify", "--no-such-flag", "x"}).code == exit_code::usage);
  CHECK(cli({"simplify", "--bits", "65", "x"}).code == exit_code::usage);
  CHECK(cli({"simplify", "--bits", "0", "x"}).code == exit_code::usage);
  CHECK(cli({"simplify"}).code == exit_code::usage);
  CHECK(cli({"simplify", "x", "--dataset", "d.csv"}).code == exit_code::usage);
  CHECK(cli({"generate"}).code == exit_code::usage);
  CHECK(cli({"generate", "--target", "x+y", "--encode-affine", "4,1"}).code == exit_code::usage);
  CHECK(cli({"generate", "--target", "x+y", "--encode-affine", "oops"}).code == exit_code::usage);
  CHECK(cli({"generate", "--target", "x*y"}).code == exit_code::usage);
  CHECK(cli({"generate", "--target", "x+"}).code == exit_code::usage);
  CHECK(cli({"generate", "--target", "x+y", "--terms", "1"}).code == exit_code::usage);
  CHECK(cli({"generate", "--target", "x", "--terms", "9"}).code == exit_code::usage);
  CHECK(cli({"verify", "x"}).code == exit_code::usage);
  CHECK(cli({"verify", "--mode", "smt", "x", "x"}).code == exit_code::usage);
  CHECK(cli({"verify", "x", "x", "--dataset", "d.csv"}).code == exit_code::usage);
  CHECK(cli({"bench"}).code == exit_code::usage);
  CHECK(cli({"bench", "--dataset", "d.csv", "--repeat", "0"}).code == exit_code::usage);
}

TEST_CASE("exit codes on runtime failures") {
  CHECK(cli({"simplify", "--dataset", "/nonexistent/d.csv"}).code == exit_code::failure);
  CHECK(cli({"verify", "--dataset", "/nonexistent/d.csv"}).code == exit_code::failure);
  CHECK(cli({"bench", "--dataset", "/nonexistent/d.csv"}).code == exit_code::failure);
  CHECK(cli({"generate", "--target", "x+y", "--out", "/nonexistent/dir/d.csv"}).code ==
        exit_code::failure);
  auto r = cli({"verify", "--mode", "exhaustive", "--bits", "16", "x+y+z", "x"});
  CHECK(r.code == exit_code::failure);
  CHECK(r.err.find("budget") != std::string::npos);
}

TEST_CASE("generate then simplify the dataset") {
  TempDir dir("linmba_cli_generate");
  const auto path = dir.file("d.csv");
  auto g = cli({"generate", "--target", "x+y", "--terms", "4", "--count", "200", "--seed", "7",
                "--out", path});
  REQUIRE(g.code == exit_code::ok);
  CHECK(g.out == "generated 200 record(s) for x+y into " + path + "\n");

  Dataset d = read_dataset(std::filesystem::path(path));
  CHECK(d.issues.empty());
  REQUIRE(d.records.size() == 200);
  std::set<std::string> distinct;
  for (const auto& rec : d.records) {
    CHECK(rec.simple == "x+y");
    CHECK(equivalent_linear(parse(rec.complex), parse(rec.simple), Width{}).equivalent());
    distinct.insert(rec.complex);
  }
  CHECK(distinct.size() > 150);

  auto s = cli({"simplify", "--dataset", path, "--check", "--json"});
  CHECK(s.code == exit_code::ok);
  auto j = json::parse(s.out);
  CHECK(j["total"] == 200);
  CHECK(j["solved_exact"] == 200);
  CHECK(j["solved_semantic"] == 200);
  CHECK(j["failed"] == 0);
  CHECK(j["records"].size() == 200);
  CHECK(j["records"][0]["check"] == "ProvenLinear");
  CHECK(j["runtime_seconds"]["p95"] >= j["runtime_seconds"]["median"]);

  auto text = cli({"simplify", "--dataset", path, "--jobs", "1"});
  CHECK(text.code == exit_code::ok);
  CHECK(text.out.find("# total=200 solved_exact=200 solved_semantic=200 failed=0\n") !=
        std::string::npos);
}

TEST_CASE("generation is deterministic and writes to stdout by default") {
  auto a = cli({"generate", "--target", "x+y", "--count", "5", "--seed", "3", "--jobs", "4"});
  auto b = cli({"generate", "--target", "x+y", "--count", "5", "--seed", "3", "--jobs", "1"});
  CHECK(a.code == exit_code::ok);
  CHECK(a.out == b.out);
  CHECK(a.err == "generated 5 record(s) for x+y\n");
  CHECK(a.out.rfind(std::string(kDatasetHeader) + "\n", 0) == 0);

  auto empty = cli({"generate", "--target", "x+y", "--count", "0"});
  CHECK(empty.code == exit_code::ok);
  CHECK(empty.out == std::string(kDatasetHeader) + "\n");
}

TEST_CASE("random affine encoding simplifies to one encoded target") {
  TempDir dir("linmba_cli_encode");
  const auto path = dir.file("e.csv");
  REQUIRE(cli({"generate", "--target", "x+y", "--count", "50", "--seed", "11", "--encode-affine",
               "random", "--out", path})
              .code == exit_code::ok);
  Dataset d = read_dataset(std::filesystem::path(path));
  REQUIRE(d.records.size() == 50);
  std::set<std::string> simple;
  for (const auto& r : d.records) simple.insert(r.simple);
  REQUIRE(simple.size() == 1);
  const std::string truth = *simple.begin();
  CHECK(truth != "x+y");

  auto s = cli({"simplify", "--dataset", path, "--json"});
  CHECK(s.code == exit_code::ok);
  auto j = json::parse(s.out);
  CHECK(j["solved_exact"] == 50);
  for (const auto& rec : j["records"]) CHECK(rec["output"] == truth);

  auto fixed = cli({"generate", "--target", "x+y", "--encode-affine", "3,-1", "--count", "1"});
  CHECK(fixed.err == "generated 1 record(s) for -1+3*x+3*y\n");
  auto hex = cli({"generate", "--target", "x", "--terms", "3", "--encode-affine", "0x5,0x10",
                  "--count", "1"});
  CHECK(hex.err == "generated 1 record(s) for 16+5*x\n");
}

TEST_CASE("verify pairs") {
  auto r = cli({"verify", "--bits", "32", "3735936685*(x^y)+49374", "49374+3735936685*(x^y)"});
  CHECK(r.code == exit_code::ok);
  CHECK(r.out == "ProvenLinear\n");
  CHECK(cli({"verify", "x", "x"}).out == "ProvenLinear\n");

  r = cli({"verify", "--mode", "exhaustive", "--bits", "4", "x|y", "x+y"});
  CHECK(r.code == exit_code::failure);
  CHECK(r.out == "Different at x=1, y=1: 1 vs 2\n");

  r = cli({"verify", "--mode", "exhaustive", "--bits", "8", "~x", "-x-1"});
  CHECK(r.out == "ProvenExhaustive\n");
  CHECK(cli({"simplify", "-x-1"}).out == "~x\n");
  CHECK(cli({"simplify", "--bits", "8", "-(x&y)-(x|y)"}).out == "-x-y\n");
  r = cli({"verify", "--mode", "sample", "--samples", "10", "x*y", "y*x"});
  CHECK(r.out == "ProbablySame\n");
  r = cli({"verify", "x*y", "y*x"});
  CHECK(r.code == exit_code::failure);
}

TEST_CASE("verify a dataset with one corrupted line") {
  TempDir dir("linmba_cli_verify");
  const auto path = dir.file("d.csv");
  REQUIRE(cli({"generate", "--target", "3735936685*(x^y)+49374", "--count", "20", "--out", path})
              .code == exit_code::ok);
  auto clean = cli({"verify", "--dataset", path});
  CHECK(clean.code == exit_code::ok);
  CHECK(clean.out == "# checked=20 equivalent=20 different=0 errors=0\n");

  // bump one coefficient of the ground truth on the fifth record (line 6)
  std::string text = read_file(path);
  std::size_t at = 0;
  for (int i = 0; i < 6; ++i) at = text.find('\n', at) + 1;
  auto comma = text.rfind(',', at - 2);
  text.replace(comma + 1, at - 1 - (comma + 1), "49375+3735936685*(x^y)");
  write_file(path, text);

  auto bad = cli({"verify", "--dataset", path});
  CHECK(bad.code == exit_code::failure);
  CHECK(bad.out.find("line 6: Different at x=0, y=0: 49374 vs 49375\n") == 0);
  CHECK(bad.out.find("# checked=20 equivalent=19 different=1 errors=0") != std::string::npos);

  auto ex = cli({"verify", "--dataset", path, "--mode", "exhaustive", "--bits", "4"});
  CHECK(ex.code == exit_code::failure);
  CHECK(ex.out.find("different=1") != std::string::npos);
}

TEST_CASE("dataset runs isolate bad records") {
  TempDir dir("linmba_cli_faults");
  const auto path = dir.file("d.csv");
  write_file(path, "# mixed\n(x&y)+(x|y),x+y\nx*y,x&y\nx+,x\nno comma here\n~x+x,-1\n");
  auto r = cli({"simplify", "--dataset", path, "--json"});
  CHECK(r.code == exit_code::failure);
  auto j = json::parse(r.out);
  CHECK(j["total"] == 5);
  CHECK(j["solved_exact"] == 2);
  CHECK(j["failed"] == 3);
  std::vector<std::size_t> lines;
  for (const auto& rec : j["records"]) lines.push_back(rec["line"]);
  CHECK(lines == std::vector<std::size_t>{2, 3, 4, 5, 6});
  CHECK(j["records"][1]["error"].get<std::string>().find("at /") != std::string::npos);
  CHECK(j["records"][3]["error"] == "expected 'complex,simple'");
  CHECK(j["records"][4]["output"] == "-1");

  auto text = cli({"simplify", "--dataset", path});
  CHECK(text.err.find("line 3: ") != std::string::npos);
  CHECK(text.err.find("line 5: expected 'complex,simple'") != std::string::npos);
}

TEST_CASE("report statistics") {
  std::vector<RecordOutcome> recs;
  for (int i = 1; i <= 20; ++i) {
    RecordOutcome r;
    r.line = static_cast<std::size_t>(i);
    r.output = "x";
    r.exact = i <= 15;
    r.semantic = i <= 18;
    r.seconds = i;
    recs.push_back(r);
  }
  RecordOutcome broken;
  broken.error = "bad";
  recs.push_back(broken);
  auto rep = summarize(recs);
  CHECK(rep.total == 21);
  CHECK(rep.solved_exact == 15);
  CHECK(rep.solved_semantic == 18);
  CHECK(rep.failed == 3);
  CHECK(rep.mean_seconds == doctest::Approx(10.5));
  CHECK(rep.median_seconds == doctest::Approx(10.5));
  CHECK(rep.p95_seconds == doctest::Approx(19));
  auto none = summarize({});
  CHECK(none.total == 0);
  CHECK(none.mean_seconds == 0);
}

TEST_CASE("bench") {
  TempDir dir("linmba_cli_bench");
  const auto empty = dir.file("empty.csv");
  write_file(empty, "# nothing\n");
  auto r = cli({"bench", "--dataset", empty, "--json"});
  CHECK(r.code == exit_code::ok);
  auto j = json::parse(r.out);
  CHECK(j["total"] == 0);
  CHECK(j["groups"].empty());

  const auto path = dir.file("d.csv");
  REQUIRE(cli({"generate", "--target", "x+y", "--count", "30", "--out", path}).code == 0);
  std::ofstream(path, std::ios::app) << "x+y+z,x+y+z\n";
  r = cli({"bench", "--dataset", path, "--json", "--repeat", "2"});
  CHECK(r.code == exit_code::ok);
  j = json::parse(r.out);
  CHECK(j["total"] == 31);
  CHECK(j["repeat"] == 2);
  REQUIRE(j["groups"].size() == 2);
  CHECK(j["groups"][0]["variables"] == 2);
  CHECK(j["groups"][0]["count"] == 30);
  CHECK(j["groups"][1]["variables"] == 3);
  CHECK(j["groups"][0]["repeat_means"].size() == 2);
  CHECK(j["mean_seconds"] > 0);

  r = cli({"bench", "--dataset", path});
  CHECK(r.out.find("# total=31 failed=0 repeat=3") == 0);
}

TEST_CASE("bench repeats are stable") {
  TempDir dir("linmba_cli_stability");
  const auto path = dir.file("d.csv");
  REQUIRE(cli({"generate", "--target", "3735936685*(x^y)+49374", "--vars", "x,y,z", "--terms", "6",
               "--count", "1000", "--out", path})
              .code == exit_code::ok);
  auto r = cli({"bench", "--dataset", path, "--json", "--repeat", "3"});
  REQUIRE(r.code == exit_code::ok);
  auto j = json::parse(r.out);
  // per-repeat mean over the whole set, pooled across variable counts
  std::vector<double> means(3, 0.0);
  for (const auto& g : j["groups"])
    for (std::size_t i = 0; i < 3; ++i)
      means[i] += g["repeat_means"][i].get<double>() * g["count"].get<double>() / 1000;
  double mean = 0, var = 0;
  for (double m : means) mean += m / 3;
  for (double m : means) var += (m - mean) * (m - mean) / 3;
  CHECK(mean > 0);
  CHECK(std::sqrt(var) < 0.5 * mean);
}
