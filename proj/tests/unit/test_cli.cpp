#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_error.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "csv_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hetmed::cli;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("hetmed_cli_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  [[nodiscard]] fs::path file(const std::string& name, const std::string& contents) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << contents;
    return p;
  }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string strip_first_line(const std::string& s) { return s.substr(s.find('\n') + 1); }

}  // namespace

TEST_CASE("estimate: medians and oracle MLE") {
  TempDir dir;
  auto r = run_cli({"estimate", "--json", dir.file("a.csv", "value\n1\n2\n3\n").string()});
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["median"] == 2.0);
  CHECK(doc["n"] == 3);
  CHECK(doc["mle"].is_null());
  CHECK(doc["manifest"].contains("artifact_version"));

  r = run_cli({"estimate", "--json", dir.file("b.csv", "value\n1\n2\n3\n4\n").string()});
  CHECK(json::parse(r.out)["median"] == 3.0);

  r = run_cli({"estimate", "--json", "--mle", dir.file("c.csv", "# comment\nvalue,sigma\n0,1\n\n4,2\n").string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["mle"].get<double>() == Catch::Approx(0.8).epsilon(1e-15));

  r = run_cli({"estimate", dir.file("d.csv", "value,sigma\n0,1\n4,2\n").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("median  4") != std::string::npos);
}

TEST_CASE("estimate: error exit codes") {
  TempDir dir;
  CHECK(run_cli({"estimate", (dir.path() / "missing.csv").string()}).code == kIoError);
  auto r = run_cli({"estimate", dir.file("bad.csv", "value\n1\nabc\n3\n").string()});
  CHECK(r.code == kInputError);
  CHECK(r.err.find("row 3") != std::string::npos);
  CHECK(run_cli({"estimate", dir.file("hdr.csv", "x\n1\n").string()}).code == kInputError);
  CHECK(run_cli({"estimate", "--mle", dir.file("nos.csv", "value\n1\n").string()}).code == kMissingData);
  CHECK(run_cli({"estimate", dir.file("neg.csv", "value,sigma\n1,-1\n").string()}).code == kInputError);
}

TEST_CASE("bounds: table and json agree") {
  auto r = run_cli({"bounds", "--profile", "constant:1,n=1000", "--delta", "0.1", "--family", "gaussian", "--json"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  bool found = false;
  for (const auto& row : doc["bounds"]) {
    if (row["bound_name"] == "median_cor1") {
      found = true;
      CHECK(row["trim_index"] == 140);
      CHECK(row["value"].get<double>() == Catch::Approx(0.18598384634474410).epsilon(1e-12));
    }
    if (row["bound_name"] == "devroye_eq4") {
      CHECK(row["applicable"] == false);
      CHECK(row["applicability_note"] == "beta not supplied");
    }
  }
  CHECK(found);

  r = run_cli({"bounds", "--profile", "constant:1,n=1000", "--delta", "0.1", "--beta", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("median_cor1         0.1859838463") != std::string::npos);
  CHECK(r.out.find("beta not supplied") == std::string::npos);
}

TEST_CASE("bounds: small delta makes the lower bound inapplicable") {
  const auto r = run_cli({"bounds", "--profile", "constant:1,n=100", "--delta", "1e-9", "--json"});
  REQUIRE(r.code == 0);
  for (const auto& row : json::parse(r.out)["bounds"]) {
    if (row["bound_name"] == "median_lower_thm2") CHECK(row["applicable"] == false);
  }
}

TEST_CASE("bounds: sigma file and input errors") {
  TempDir dir;
  const auto path = dir.file("s.txt", "sigma\n1\n2\n4\n");
  CHECK(run_cli({"bounds", "--sigmas", path.string(), "--delta", "0.1"}).code == 0);
  CHECK(run_cli({"bounds", "--profile", "wobbly:1,n=10", "--delta", "0.1"}).code == kInputError);
  CHECK(run_cli({"bounds", "--profile", "constant:1", "--delta", "0.1"}).code == kInputError);
  CHECK(run_cli({"bounds", "--profile", "constant:-1,n=5", "--delta", "0.1"}).code == kInputError);
  CHECK(run_cli({"bounds", "--profile", "constant:1,n=5", "--delta", "2"}).code == kInputError);
  CHECK(run_cli({"bounds", "--delta", "0.1"}).code == kInputError);
  CHECK(run_cli({"bounds", "--profile", "constant:1,n=5", "--delta", "0.1", "--family", "weird"}).code ==
        kInputError);
  CHECK(run_cli({"bounds", "--sigmas", (dir.path() / "nope").string(), "--delta", "0.1"}).code == kIoError);
}

TEST_CASE("profile spec and family parsing") {
  const auto [spec, n] = parse_profile_spec("geometric:1,1.2,n=1001");
  CHECK(n == 1001);
  CHECK(spec.kind == hetmed::ProfileSpec::Kind::geometric);
  CHECK(spec.second == 1.2);
  CHECK(parse_family("student_t:4.5").nu == 4.5);
  CHECK(parse_family("student_t").nu == 3.0);
  CHECK_THROWS_AS(parse_family("student_t:-1"), CliError);
  CHECK_THROWS_AS(parse_profile_spec("geometric:1,n=10"), CliError);
}

TEST_CASE("simulate: artifacts, determinism and schema errors") {
  TempDir dir;
  const std::string config = R"({"family": "gaussian", "profile": {"kind": "constant", "sigma": 1},
    "n": 101, "theta": 0.5, "deltas": [0.05, 0.1], "trials": 300, "seed": 7})";
  const auto cfg = dir.file("cfg.json", config);
  const std::string out_dir = (dir.path() / "a").string();
  ::setenv("HETMED_THREADS", "1", 1);
  auto r = run_cli({"simulate", cfg.string(), "--out", out_dir});
  REQUIRE(r.code == 0);
  const std::string coverage_one = slurp(dir.path() / "a" / "coverage.csv");
  const std::string quantiles_one = slurp(dir.path() / "a" / "quantiles.csv");
  ::setenv("HETMED_THREADS", "3", 1);
  r = run_cli({"simulate", cfg.string(), "--out", out_dir});
  ::unsetenv("HETMED_THREADS");
  REQUIRE(r.code == 0);
  CHECK(slurp(dir.path() / "a" / "coverage.csv") == coverage_one);
  CHECK(slurp(dir.path() / "a" / "quantiles.csv") == quantiles_one);
  const std::string coverage = slurp(dir.path() / "a" / "coverage.csv");
  CHECK(strip_first_line(coverage).rfind(
            "bound_name,delta,bound_value,trials,exceedances,empirical,ci_low,ci_high,verdict\n", 0) == 0);
  CHECK(strip_first_line(slurp(dir.path() / "a" / "quantiles.csv")).rfind("estimator,q50,q90,q99\n", 0) == 0);

  const json manifest = json::parse(slurp(dir.path() / "a" / "manifest.json"));
  for (const char* key : {"command", "config", "seed", "artifact_version", "started", "finished"}) {
    CHECK(manifest.contains(key));
  }
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["config"]["theta"] == 0.5);

  auto bad = dir.file("bad.json", R"({"family": "gaussian", "profile": {"kind": "constant", "sigma": 1, "colour": 2},
    "n": 10, "deltas": [0.1], "trials": 5, "seed": 1, "extra": true})");
  r = run_cli({"simulate", bad.string(), "--out", (dir.path() / "c").string()});
  CHECK(r.code == kInputError);
  CHECK(r.err.find("'extra'") != std::string::npos);
  CHECK(r.err.find("'profile.colour'") != std::string::npos);

  CHECK(run_cli({"simulate", dir.file("junk.json", "{not json").string()}).code == kInputError);
  CHECK(run_cli({"simulate", (dir.path() / "absent.json").string()}).code == kIoError);
  auto neg = dir.file("neg.json", R"({"family": "gaussian", "profile": {"kind": "constant", "sigma": 1},
    "n": -3, "deltas": [0.1], "trials": 5, "seed": 1})");
  CHECK(run_cli({"simulate", neg.string()}).code == kInputError);
}

TEST_CASE("simulate: one trial is consistent") {
  TempDir dir;
  const auto cfg = dir.file("one.json", R"({"family": {"name": "student_t", "nu": 4},
    "profile": {"kind": "polynomial", "exponent": 1}, "n": 50, "deltas": [0.1], "trials": 1, "seed": 3})");
  CHECK(run_cli({"simulate", cfg.string(), "--out", dir.path().string()}).code == 0);
}

TEST_CASE("verify subcommands") {
  auto r = run_cli({"verify", "lemma1", "--n-list", "20,40,100", "--delta-list", "0.05,0.1,0.25", "--p-mode", "half"});
  CHECK(r.code == 0);
  r = run_cli({"verify", "lemma1", "--n-list", "40", "--delta-list", "0.5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("report-only") != std::string::npos);
  CHECK(run_cli({"verify", "lemma1", "--p-mode", "sometimes"}).code == kInputError);
  CHECK(run_cli({"verify", "lemma1", "--n-list", "2", "--delta-list", "0.01"}).code == kInputError);

  CHECK(run_cli({"verify", "lemma2", "--cases", "2000", "--max-n", "31", "--seed", "7"}).code == 0);
  CHECK(run_cli({"verify", "cor2", "--grid", "100", "--cases", "10"}).code == 0);
  CHECK(run_cli({"verify", "cor2", "--grid", "1"}).code == kInputError);
  CHECK(run_cli({"verify", "dominance", "--max-n", "3"}).code == kInputError);

  const auto a = run_cli({"verify", "dominance", "--cases", "200", "--max-n", "300", "--seed", "11"});
  const auto b = run_cli({"verify", "dominance", "--cases", "200", "--max-n", "300", "--seed", "11"});
  CHECK(a.out == b.out);
  CHECK(a.code == b.code);
}

TEST_CASE("usage errors and help") {
  CHECK(run_cli({}).code == kInputError);
  CHECK(run_cli({"frobnicate"}).code == kInputError);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"bounds", "--profile", "constant:1,n=5"}).code == kInputError);
}

TEST_CASE("full-precision formatting") {
  CHECK(format_full(0.1) == "0.10000000000000001");
  CHECK(format_full(std::nan("")) == "nan");
}
