#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "oracles.hpp"
#include "slslab/cli.hpp"
#include "slslab/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = slslab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("slslab_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::vector<std::string> kOptimum{"--i01", "3",     "--i02", "2.58",     "--k1",
                                        "0.339", "--k2",  "0.234", "--delta", "0.990",
                                        "--mu1", "0.023374", "--mu2", "0.031014", "--n", "30"};

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

}  // namespace

TEST_CASE("expect prints the expected gain") {
  const Result r = run(with({"expect"}, kOptimum));
  REQUIRE(r.code == 0);
  CHECK(std::abs(std::stod(r.out) - 2.00) <= 0.02);

  const Result m = run(with({"expect", "--method", "matrix"}, kOptimum));
  REQUIRE(m.code == 0);
  CHECK(std::stod(m.out) == doctest::Approx(std::stod(r.out)).epsilon(1e-10));

  const Result zero = run({"expect", "--i01", "3", "--i02", "2.58", "--k1", "0.339", "--k2",
                           "0.234", "--delta", "0.99", "--mu1", "0", "--mu2", "0", "--n", "30"});
  REQUIRE(zero.code == 0);
  CHECK(std::stod(zero.out) == 0.0);

  const Result j = run(with({"expect", "--json"}, kOptimum));
  REQUIRE(j.code == 0);
  CHECK(json::parse(j.out).at("expected_gain").get<double>() == std::stod(r.out));
}

TEST_CASE("expect rejects inadmissible coupling") {
  auto args = with({"expect"}, kOptimum);
  args.insert(args.end(), {"--delta", "1.0"});
  const Result r = run(args);
  CHECK(r.code == 2);
  CHECK(r.err.find("delta") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"expect", "--i01", "1"}).code == 2);
  CHECK(run({"expect", "--i01", "abc"}).code == 2);
  CHECK(run(with({"expect", "--method", "cubic"}, kOptimum)).code == 2);
  CHECK(run({"simulate", "--params", "1,2,3", "--out", "/tmp/unused.json"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
}

TEST_CASE("config file values yield to explicit flags") {
  TempDir dir("config");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# optimum design\n"
           "i01 = 3\ni02 = 2.58\nk1 = 0.339\nk2 = 0.234\ndelta = 0.990\n"
           "mu1 = 0.023374\nmu2 = 0.031014\nn = 5\n";
  }
  const Result short_run = run({"expect", "--config", dir / "run.cfg"});
  REQUIRE(short_run.code == 0);
  const Result overridden = run({"expect", "--config", dir / "run.cfg", "--n", "30"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out == run(with({"expect"}, kOptimum)).out);
  CHECK(std::stod(short_run.out) < std::stod(overridden.out));
  CHECK(run({"expect", "--config", dir / "missing.cfg"}).code == 2);
}

TEST_CASE("frontier outputs") {
  TempDir dir("frontier");
  const std::string out = dir / "a";
  const Result r = run({"frontier", "--candidates", "1", "--seed", "4", "--out-dir", out});
  CHECK((r.code == 0 || r.code == 3));
  const auto cc = slslab::io::read_csv(fs::path(out) / "frontier_ccsls.csv");
  const auto two = slslab::io::read_csv(fs::path(out) / "frontier_2sls.csv");
  REQUIRE(cc.size() == 2);
  REQUIRE(two.size() == 2);
  CHECK(cc[0] == std::vector<std::string>{"idx", "i01", "i02", "k1", "k2", "delta", "mean", "std"});
  CHECK(cc[1][1] == two[1][1]);
  CHECK(std::stod(two[1][5]) == 0.0);

  const json manifest = load(fs::path(out) / "manifest.json");
  CHECK(manifest.at("command") == "frontier");
  CHECK(manifest.at("outputs").size() == 3);
  CHECK(manifest.at("config").at("candidates") == "1");
}

TEST_CASE("frontier at the reference moments prefers the coupled design") {
  TempDir dir("dominance");
  const Result r = run({"frontier", "--out-dir", dir / "f"});
  REQUIRE(r.code == 0);
  const json sel = load(fs::path(dir / "f") / "selection.json");
  REQUIRE(sel.at("ccsls").at("feasible").get<bool>());
  REQUIRE(sel.at("2sls").at("feasible").get<bool>());
  CHECK(sel.at("ccsls").at("std").get<double>() < sel.at("2sls").at("std").get<double>());
  CHECK(sel.at("ccsls_lower_risk").get<bool>());
  const auto rows = slslab::io::read_csv(fs::path(dir / "f") / "frontier_ccsls.csv");
  CHECK(rows.size() == 5001);
}

TEST_CASE("frontier reports infeasible targets") {
  TempDir dir("infeasible");
  const Result r = run({"frontier", "--candidates", "50", "--g-target", "1000", "--out-dir",
                        dir / "f"});
  CHECK(r.code == 3);
  const json sel = load(fs::path(dir / "f") / "selection.json");
  CHECK_FALSE(sel.at("ccsls").at("feasible").get<bool>());
}

TEST_CASE("frontier reruns and replays are bit-identical") {
  TempDir dir("replay");
  const std::string a = dir / "a", b = dir / "b", c = dir / "c";
  REQUIRE(run({"frontier", "--candidates", "300", "--seed", "9", "--out-dir", a}).code == 0);
  REQUIRE(run({"frontier", "--candidates", "300", "--seed", "9", "--out-dir", b}).code == 0);
  REQUIRE(run({"replay", (fs::path(a) / "manifest.json").string(), "--redirect", c}).code == 0);
  for (const char* f : {"frontier_ccsls.csv", "frontier_2sls.csv", "selection.json"}) {
    const std::string ref = slurp(fs::path(a) / f);
    REQUIRE_FALSE(ref.empty());
    CHECK(ref == slurp(fs::path(b) / f));
    CHECK(ref == slurp(fs::path(c) / f));
  }
}

TEST_CASE("simulate writes a reproducible report") {
  TempDir dir("simulate");
  const std::vector<std::string> base{"simulate", "--params", "3,2.58,0.339,0.234,0.990",
                                      "--paths", "1", "--seed", "7"};
  REQUIRE(run(with(base, {"--out", dir / "one.json"})).code == 0);
  REQUIRE(run(with(base, {"--out", dir / "two.json"})).code == 0);
  CHECK(slurp(dir / "one.json") == slurp(dir / "two.json"));

  const json rep = load(dir / "one.json");
  CHECK(rep.at("n_paths") == 1);
  CHECK(rep.at("seed") == 7);
  CHECK(rep.contains("mean_g_surviving"));
  CHECK(rep.contains("l_max_q95"));

  const json manifest = load(dir / "one.manifest.json");
  CHECK(manifest.at("outputs").at(0) == dir / "one.json");
  REQUIRE(run({"replay", dir / "one.manifest.json", "--redirect", dir / "re"}).code == 0);
  CHECK(slurp(dir / "one.json") == slurp(fs::path(dir / "re") / "one.json"));
}

TEST_CASE("simulate with a leverage cap") {
  TempDir dir("cap");
  REQUIRE(run({"simulate", "--params", "3,3,0.713,0.381,0", "--paths", "3000", "--leverage-cap",
               "2", "--out", dir / "r.json"})
              .code == 0);
  const json rep = load(dir / "r.json");
  CHECK(rep.at("leverage_cap").get<double>() == 2.0);
  CHECK(rep.at("max_stage_leverage").get<double>() <= 2.0 + 1e-9);
}

TEST_CASE("trend demo trace") {
  TempDir dir("trend");
  REQUIRE(run({"trend-demo", "--out", dir / "t.csv"}).code == 0);
  const auto rows = slslab::io::read_csv(dir / "t.csv");
  REQUIRE(rows.size() == 253);
  CHECK(rows[0] == std::vector<std::string>{"k", "S", "rho", "x", "I", "saturated_flag", "g"});
  std::vector<double> history;
  double g = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const double x = std::stod(row[3]);
    const double inv = std::stod(row[4]);
    const double rho = std::stod(row[2]);
    REQUIRE(std::abs(inv) <= 2.0);
    REQUIRE(x == oracle::windowed_sum(history, 15));
    REQUIRE((row[5] == "1") == (std::abs(10.0 * x) > 2.0));
    REQUIRE(std::abs(rho - 0.0023) <= 0.075);
    g += inv * rho;
    REQUIRE(std::stod(row[6]) == doctest::Approx(g).epsilon(1e-12));
    history.push_back(rho);
  }
  CHECK(load(dir / "t.manifest.json").at("command") == "trend-demo");

  REQUIRE(run({"trend-demo", "--slope", "0", "--out", dir / "flat.csv"}).code == 0);
  const auto flat = slslab::io::read_csv(dir / "flat.csv");
  for (std::size_t i = 1; i < flat.size(); ++i) {
    REQUIRE(std::stod(flat[i][4]) == 0.0);
    REQUIRE(std::stod(flat[i][6]) == 0.0);
  }
  CHECK(run({"trend-demo", "--isat", "0", "--out", dir / "bad.csv"}).code == 2);
}

TEST_CASE("unwritable output is an I/O failure") {
  TempDir dir("io");
  { std::ofstream blocker(dir / "file"); }
  const Result r = run({"simulate", "--params", "1,1,1,1,0.5", "--paths", "2", "--out",
                        dir / "file/sub/r.json"});
  CHECK(r.code == 1);
}

TEST_CASE("numbers round-trip through the text formats") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789e10, -7.25}) {
    CHECK(std::stod(slslab::io::format_number(v)) == v);
  }
  CHECK(slslab::io::format_number(std::numeric_limits<double>::infinity()) == "inf");
}
