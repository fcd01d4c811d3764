#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgl/admm.hpp"
#include "fgl/data.hpp"
#include "fgl/rppa.hpp"

namespace fgl::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNotConverged = 2 };

struct GenOptions {
  int p = 100;
  int num_classes = 3;
  int m = 5;
  int n = 100;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

/// Writes truth.smc, class_<l>.obs for l = 1..L and manifest.json into out_dir.
/// Returns the written paths.
std::vector<std::string> cmd_gen(const GenOptions& o);

/// Sample covariances of OBS files, or log-entropy covariances when the
/// inputs hold term counts.
MatrixCollection cmd_cov(const std::vector<std::string>& inputs, bool counts);

struct SolverOptions {
  std::string solver = "rppa";  // rppa | admm
  double tol = 1e-6;
  double sigma0 = 1.0;
  int max_iter = 0;             // 0 keeps the solver default
  int warm_start = 200;         // rPPA only
};

SolverReport run_solver(const ProblemData& data, const SolverOptions& o);

/// One solver run of a bench grid.
struct BenchRow {
  int grid = 0;
  std::string solver;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool converged = false;
  std::string error;  // empty unless the solver threw
  int iterations = 0;
  int newton = 0;
  double seconds = 0.0;
  double eta = 0.0;
  double objective = 0.0;
  long nnz = 0;
  double density = 0.0;
  std::optional<EdgeMetrics> metrics;  // with a truth file
  std::optional<double> delta;         // ADMM rows of a two-solver grid point
};

nlohmann::json to_json(const BenchRow& r);
BenchRow bench_row_from_json(const nlohmann::json& j);
std::string bench_csv_header(bool with_metrics);
std::string to_csv(const BenchRow& r, bool with_metrics);

struct BenchOptions {
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<std::string> solvers{"rppa", "admm"};
  SolverOptions solver;
};

/// Runs every solver on every (lambda1, lambda2) of the product grid, in
/// grid order. Failures become rows with converged = false and an error.
std::vector<BenchRow> cmd_bench(const MatrixCollection& s, const BenchOptions& o,
                                const MatrixCollection* truth = nullptr);

void write_bench_table(std::ostream& out, const std::vector<BenchRow>& rows);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace fgl::cli
