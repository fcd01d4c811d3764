#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "fgl/io.hpp"

using namespace fgl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fgl_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// Runs the CLI in-process with stdout discarded.
int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fgl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::map<std::string, std::string> read_record(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream f(path);
  std::string line;
  while (std::getline(f, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace

TEST_CASE("gen writes one truth file, L observation files and a manifest, deterministically") {
  TempDir a, b;
  REQUIRE(run_cli({"gen", "--p", "20", "--L", "3", "--m", "2", "--n", "100", "--seed", "7", "--out", a / "x"}) == 0);
  REQUIRE(run_cli({"gen", "--p", "20", "--L", "3", "--m", "2", "--n", "100", "--seed", "7", "--out", b / "x"}) == 0);
  int smc = 0, obs = 0;
  for (const auto& e : fs::directory_iterator(a / "x")) {
    smc += e.path().extension() == ".smc";
    obs += e.path().extension() == ".obs";
    CHECK(slurp(e.path().string()) == slurp(b / ("x/" + e.path().filename().string())));
  }
  CHECK(smc == 1);
  CHECK(obs == 3);
  CHECK(fs::exists(a / "x/manifest.json"));
}

TEST_CASE("generated data runs through cov, solve and metrics") {
  TempDir d;
  REQUIRE(run_cli({"gen", "--p", "15", "--L", "3", "--m", "2", "--n", "80", "--seed", "3", "--out", d / "g"}) == 0);
  REQUIRE(run_cli({"cov", d / "g/class_1.obs", d / "g/class_2.obs", d / "g/class_3.obs", "--out", d / "S.smc"}) == 0);
  const auto s = read_smc_file(d / "S.smc");
  CHECK(s.dim() == 15);
  CHECK(s.size() == 3);

  REQUIRE(run_cli({"solve", "--input", d / "S.smc", "--tol", "1e-6", "--out", d / "est", "--trace",
                   d / "trace.jsonl"}) == 0);
  const auto rec = read_record(d / "est.record");
  CHECK(std::stod(rec.at("eta")) <= 1e-6);
  CHECK(rec.at("converged") == "1");
  CHECK(fs::file_size(d / "trace.jsonl") > 0);

  REQUIRE(run_cli({"solve", "--input", d / "S.smc", "--solver", "admm", "--tol", "1e-6", "--out", d / "adm",
                   "--trace", d / "trace.txt"}) == 0);
  CHECK(std::stod(read_record(d / "adm.record").at("eta")) <= 1e-6);

  REQUIRE(run_cli({"metrics", "--est", d / "g/truth.smc", "--truth", d / "g/truth.smc", "--out", d / "m.rec"}) == 0);
  std::ifstream f(d / "m.rec");
  const auto m = read_metrics_record(f);
  CHECK(m.sse == 0.0);
  CHECK(m.fp_edges == 0);
  CHECK(m.tp_edges == m.true_edges);
  CHECK(m.fp_diff == 0);
  CHECK(m.tp_diff == m.true_diff);
}

TEST_CASE("bench on the identity instance") {
  TempDir d;
  write_smc_file(d / "I.smc", MatrixCollection::identity(5, 3));
  REQUIRE(run_cli({"bench", "--input", d / "I.smc", "--lambda1", "0.1", "0.2", "--lambda2", "0.05", "--out",
                   d / "b"}) == 0);
  std::ifstream js(d / "b.jsonl");
  std::string line;
  std::vector<cli::BenchRow> rows;
  while (std::getline(js, line)) {
    const auto j = nlohmann::json::parse(line);
    rows.push_back(cli::bench_row_from_json(j));
    CHECK(cli::to_json(rows.back()) == j);
  }
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) CHECK(r.converged);
  CHECK(rows[0].grid == 0);
  CHECK(rows[3].grid == 1);
  for (const auto& r : rows) {
    if (r.solver == "admm") {
      REQUIRE(r.delta.has_value());
      CHECK(std::abs(*r.delta) <= 1e-7);
    }
  }
  // CSV has a header plus one line per row.
  std::ifstream cs(d / "b.csv");
  int lines = 0;
  while (std::getline(cs, line)) ++lines;
  CHECK(lines == 5);
}

TEST_CASE("bench rows round-trip through JSON including failures and metrics") {
  cli::BenchRow r;
  r.grid = 3;
  r.solver = "rppa";
  r.lambda1 = 0.1;
  r.lambda2 = 1.0 / 3.0;
  r.error = "boom";
  r.eta = std::numeric_limits<double>::infinity();
  r.objective = std::numeric_limits<double>::infinity();
  r.seconds = 0.123456789012345678;
  r.metrics = EdgeMetrics{};
  r.metrics->sse = 2.0 / 7.0;
  r.delta = -1e-13;
  const auto back = cli::bench_row_from_json(nlohmann::json::parse(cli::to_json(r).dump()));
  CHECK(back.lambda2 == r.lambda2);
  CHECK(back.seconds == r.seconds);
  CHECK(std::isinf(back.eta));
  CHECK(back.error == "boom");
  CHECK(back.metrics->sse == r.metrics->sse);
  CHECK(*back.delta == *r.delta);
}

TEST_CASE("exit codes and config precedence") {
  TempDir d;
  write_smc_file(d / "I.smc", MatrixCollection::identity(4, 2));
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"solve"}) == 1);
  CHECK(run_cli({"solve", "--input", d / "missing.smc"}) == 1);
  CHECK(run_cli({"solve", "--input", d / "I.smc", "--solver", "mgl"}) == 1);
  CHECK(run_cli({"solve", "--input", d / "I.smc", "--tol", "-1"}) == 1);

  std::ofstream(d / "bad.smc") << "SMC 1 2 2\n1 0\n";
  CHECK(run_cli({"solve", "--input", d / "bad.smc"}) == 1);

  std::ofstream(d / "nonid.smc") << "SMC 1 2 2\n1 0.5\n0.5 1\n2 -0.3\n-0.3 1\n";
  CHECK(run_cli({"solve", "--input", d / "nonid.smc", "--max-iter", "1", "--warm-start", "0", "--tol", "1e-12"}) == 2);
  CHECK(run_cli({"solve", "--input", d / "nonid.smc", "--solver", "admm", "--max-iter", "2"}) == 2);

  // The config file wins over the flag.
  std::ofstream(d / "c.toml") << "[solve]\nsolver = \"admm\"\ntol = 1e-4\n";
  REQUIRE(run_cli({"solve", "--input", d / "nonid.smc", "--config", d / "c.toml", "--tol", "1e-12", "--out",
                   d / "cfg"}) == 0);
  const auto rec = read_record(d / "cfg.record");
  CHECK(rec.at("solver") == "admm");
  CHECK(std::stod(rec.at("eta")) <= 1e-4);
  CHECK(std::stod(rec.at("eta")) > 1e-12);

  std::ofstream(d / "unknown.toml") << "bogus = 1\n";
  CHECK(run_cli({"solve", "--input", d / "I.smc", "--config", d / "unknown.toml"}) == 1);

  CHECK(run_cli({"gen", "--out", "/proc/forbidden/dir", "--p", "10", "--m", "1", "--n", "5"}) == 1);
}
