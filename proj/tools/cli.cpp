#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "fgl/io.hpp"

namespace fgl::cli {
namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << std::setprecision(std::numeric_limits<double>::max_digits10);
  return f;
}

// JSON has no infinity; an infeasible objective is stored as the string "inf".
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

double number_from(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_trace(const std::string& path, const SolverReport& r) {
  auto f = open_out(path);
  if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0)
    write_trace_jsonl(f, r);
  else
    write_trace_text(f, r);
}

// Values from the config file replace whatever the command line set.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  const auto items = CLI::ConfigTOML().from_config(in);
  for (const auto& item : items) {
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub.get_name())) continue;
    // Section open/close markers.
    if (item.name == "++" || item.name == "--" || item.name == "config") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + item.name);
    } catch (const CLI::OptionNotFound&) {
      throw CLI::ValidationError("config", "unknown key '" + item.name + "' for " + sub.get_name());
    }
    opt->clear();
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

}  // namespace

std::vector<std::string> cmd_gen(const GenOptions& o) {
  if (o.n < 2) throw std::invalid_argument("gen: --n must be at least 2");
  const SyntheticInstance inst = gen_nearest_neighbour(o.p, o.num_classes, o.m, o.seed, o.n);
  fs::create_directories(o.out_dir);
  std::vector<std::string> files;
  const std::string truth = (fs::path(o.out_dir) / "truth.smc").string();
  write_smc_file(truth, inst.true_precisions);
  files.push_back(truth);
  nlohmann::json obs = nlohmann::json::array();
  for (int l = 0; l < o.num_classes; ++l) {
    const std::string name = "class_" + std::to_string(l + 1) + ".obs";
    write_obs_file((fs::path(o.out_dir) / name).string(), inst.samples[static_cast<std::size_t>(l)]);
    files.push_back((fs::path(o.out_dir) / name).string());
    obs.push_back(name);
  }
  const nlohmann::json manifest = {{"p", o.p},
                                   {"L", o.num_classes},
                                   {"m", o.m},
                                   {"n", o.n},
                                   {"seed", o.seed},
                                   {"base_edges", inst.base_edges},
                                   {"true_edges", inst.n_edges_true},
                                   {"truth", "truth.smc"},
                                   {"observations", obs}};
  const std::string mpath = (fs::path(o.out_dir) / "manifest.json").string();
  open_out(mpath) << manifest.dump(2) << '\n';
  files.push_back(mpath);
  return files;
}

MatrixCollection cmd_cov(const std::vector<std::string>& inputs, bool counts) {
  if (inputs.empty()) throw std::invalid_argument("cov: no input files");
  std::vector<Matrix> data;
  for (const auto& path : inputs) data.push_back(read_obs_file(path));
  if (counts) return log_entropy_covariances(data);
  std::vector<Matrix> covs;
  for (const auto& d : data) {
    if (d.cols() != data.front().cols()) throw std::invalid_argument("cov: inputs differ in dimension");
    covs.push_back(sample_covariance(d));
  }
  return MatrixCollection(std::move(covs));
}

SolverReport run_solver(const ProblemData& data, const SolverOptions& o) {
  if (o.solver == "rppa") {
    RppaParams p;
    p.tol = o.tol;
    p.sigma0 = o.sigma0;
    p.warm_start_iters = o.warm_start;
    if (o.max_iter > 0) p.max_outer = o.max_iter;
    return rppa_solve(data, p);
  }
  if (o.solver == "admm") {
    AdmmParams p;
    p.tol = o.tol;
    p.sigma0 = o.sigma0;
    if (o.max_iter > 0) p.max_iter = o.max_iter;
    return admm_solve(data, p);
  }
  throw std::invalid_argument("unknown solver '" + o.solver + "'");
}

nlohmann::json to_json(const BenchRow& r) {
  nlohmann::json j = {{"grid", r.grid},         {"solver", r.solver},       {"lambda1", r.lambda1},
                      {"lambda2", r.lambda2},   {"converged", r.converged}, {"error", r.error},
                      {"iterations", r.iterations}, {"newton", r.newton},   {"seconds", r.seconds},
                      {"eta", number(r.eta)},   {"objective", number(r.objective)},
                      {"nnz", r.nnz},           {"density", r.density}};
  j["delta"] = r.delta ? number(*r.delta) : nlohmann::json(nullptr);
  if (r.metrics) {
    const auto& m = *r.metrics;
    j["metrics"] = {{"tp_edges", m.tp_edges}, {"fp_edges", m.fp_edges}, {"true_edges", m.true_edges},
                    {"selected_edges", m.selected_edges}, {"sse", m.sse}, {"tp_diff", m.tp_diff},
                    {"fp_diff", m.fp_diff}, {"true_diff", m.true_diff}, {"nnz", m.nnz},
                    {"density", m.density}};
  }
  return j;
}

BenchRow bench_row_from_json(const nlohmann::json& j) {
  BenchRow r;
  r.grid = j.at("grid").get<int>();
  r.solver = j.at("solver").get<std::string>();
  r.lambda1 = j.at("lambda1").get<double>();
  r.lambda2 = j.at("lambda2").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.iterations = j.at("iterations").get<int>();
  r.newton = j.at("newton").get<int>();
  r.seconds = j.at("seconds").get<double>();
  r.eta = number_from(j.at("eta"));
  r.objective = number_from(j.at("objective"));
  r.nnz = j.at("nnz").get<long>();
  r.density = j.at("density").get<double>();
  if (!j.at("delta").is_null()) r.delta = number_from(j.at("delta"));
  if (j.contains("metrics")) {
    const auto& k = j.at("metrics");
    EdgeMetrics m;
    m.tp_edges = k.at("tp_edges").get<long>();
    m.fp_edges = k.at("fp_edges").get<long>();
    m.true_edges = k.at("true_edges").get<long>();
    m.selected_edges = k.at("selected_edges").get<long>();
    m.sse = k.at("sse").get<double>();
    m.tp_diff = k.at("tp_diff").get<long>();
    m.fp_diff = k.at("fp_diff").get<long>();
    m.true_diff = k.at("true_diff").get<long>();
    m.nnz = k.at("nnz").get<long>();
    m.density = k.at("density").get<double>();
    r.metrics = m;
  }
  return r;
}

std::string bench_csv_header(bool with_metrics) {
  std::string h = "grid,solver,lambda1,lambda2,converged,iterations,newton,seconds,eta,objective,nnz,density,delta";
  if (with_metrics) h += ",tp_edges,fp_edges,true_edges,selected_edges,sse,tp_diff,fp_diff,true_diff";
  return h;
}

std::string to_csv(const BenchRow& r, bool with_metrics) {
  std::ostringstream s;
  s << r.grid << ',' << r.solver << ',' << fmt(r.lambda1) << ',' << fmt(r.lambda2) << ',' << (r.converged ? 1 : 0)
    << ',' << r.iterations << ',' << r.newton << ',' << fmt(r.seconds) << ',' << fmt(r.eta) << ','
    << fmt(r.objective) << ',' << r.nnz << ',' << fmt(r.density) << ',' << (r.delta ? fmt(*r.delta) : "");
  if (with_metrics && r.metrics) {
    const auto& m = *r.metrics;
    s << ',' << m.tp_edges << ',' << m.fp_edges << ',' << m.true_edges << ',' << m.selected_edges << ','
      << fmt(m.sse) << ',' << m.tp_diff << ',' << m.fp_diff << ',' << m.true_diff;
  } else if (with_metrics) {
    s << ",,,,,,,,";
  }
  return s.str();
}

std::vector<BenchRow> cmd_bench(const MatrixCollection& s, const BenchOptions& o, const MatrixCollection* truth) {
  if (o.lambda1.empty() || o.lambda2.empty()) throw std::invalid_argument("bench: empty lambda grid");
  if (!(o.solver.tol > 0.0)) throw std::invalid_argument("bench: tol must be positive");
  std::vector<BenchRow> rows;
  int grid = 0;
  for (double l1 : o.lambda1) {
    for (double l2 : o.lambda2) {
      const ProblemData data{s, l1, l2};
      const std::size_t first = rows.size();
      for (const auto& name : o.solvers) {
        BenchRow row;
        row.grid = grid;
        row.solver = name;
        row.lambda1 = l1;
        row.lambda2 = l2;
        SolverOptions so = o.solver;
        so.solver = name;
        try {
          const SolverReport rep = run_solver(data, so);
          row.converged = rep.converged;
          row.iterations = rep.outer_iterations;
          row.newton = rep.total_newton;
          row.seconds = rep.seconds;
          row.eta = rep.eta;
          row.objective = rep.objective;
          row.nnz = nnz_mass(rep.Theta);
          row.density = static_cast<double>(row.nnz) / static_cast<double>(s.dim() * s.dim() * s.size());
          if (truth) row.metrics = edge_metrics(rep.Theta, *truth);
        } catch (const std::exception& e) {
          row.converged = false;
          row.error = e.what();
          row.eta = std::numeric_limits<double>::infinity();
          row.objective = std::numeric_limits<double>::infinity();
        }
        rows.push_back(std::move(row));
      }
      // Delta = (obj_A - obj_P) / (1 + |obj_A| + |obj_P|) on the ADMM row.
      const BenchRow* primal = nullptr;
      BenchRow* dual = nullptr;
      for (std::size_t k = first; k < rows.size(); ++k) {
        if (rows[k].solver == "rppa") primal = &rows[k];
        if (rows[k].solver == "admm") dual = &rows[k];
      }
      if (primal && dual && primal->error.empty() && dual->error.empty())
        dual->delta = relative_objective_gap(dual->objective, primal->objective);
      ++grid;
    }
  }
  return rows;
}

void write_bench_table(std::ostream& out, const std::vector<BenchRow>& rows) {
  char line[256];
  std::snprintf(line, sizeof line, "%4s %-5s %10s %10s %6s %6s %11s %10s %22s %8s %8s %10s\n", "grid", "algo",
                "lambda1", "lambda2", "iter", "newton", "time", "eta", "objective", "nnz", "density", "delta");
  out << line;
  for (const auto& r : rows) {
    const std::string delta = r.delta ? fmt(*r.delta, "%.2e") : "-";
    std::snprintf(line, sizeof line, "%4d %-5s %10.4g %10.4g %6d %6d %11s %10.3e %22.14e %8ld %8.4f %10s%s\n",
                  r.grid, r.solver.c_str(), r.lambda1, r.lambda2, r.iterations, r.newton,
                  format_hms(r.seconds).c_str(), r.eta, r.objective, r.nnz, r.density, delta.c_str(),
                  r.error.empty() ? (r.converged ? "" : "  NOT CONVERGED") : "  FAILED");
    out << line;
    if (!r.error.empty()) out << "      error: " << r.error << '\n';
  }
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Fused multiple graphical Lasso: rPPA and ADMM solvers with a synthetic data pipeline", "fgl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand help for every subcommand");

  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "TOML file whose keys override the command line")->check(CLI::ExistingFile);
  };

  // gen
  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Simulate a nearest-neighbour network and Gaussian samples");
  g->add_option("--p", gen.p, "Number of variables")->check(CLI::PositiveNumber);
  g->add_option("--L", gen.num_classes, "Number of classes")->check(CLI::Range(2, 1 << 20));
  g->add_option("--m", gen.m, "Neighbours per node in the base graph")->check(CLI::NonNegativeNumber);
  g->add_option("--n", gen.n, "Observations per class")->check(CLI::Range(2, 1 << 30));
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out_dir, "Output directory");
  add_config(g);

  // cov
  std::vector<std::string> cov_inputs;
  std::string cov_out;
  bool cov_counts = false;
  auto* c = app.add_subcommand("cov", "Per-class covariances from OBS files, one per class");
  c->add_option("inputs", cov_inputs, "OBS files in class order")->required()->check(CLI::ExistingFile);
  c->add_option("--out", cov_out, "Output SMC file")->required();
  c->add_flag("--counts", cov_counts, "Inputs are term counts; apply log-entropy weighting");
  add_config(c);

  // solve
  std::string solve_in, solve_out, solve_trace;
  double s_l1 = 0.1, s_l2 = 0.05;
  SolverOptions s_opt;
  auto* s = app.add_subcommand("solve", "Solve one FGL instance");
  s->add_option("--input", solve_in, "Covariance SMC file")->required()->check(CLI::ExistingFile);
  s->add_option("--lambda1", s_l1, "Sparsity penalty")->check(CLI::NonNegativeNumber);
  s->add_option("--lambda2", s_l2, "Fusion penalty")->check(CLI::NonNegativeNumber);
  s->add_option("--tol", s_opt.tol, "KKT residual tolerance")->check(CLI::PositiveNumber);
  s->add_option("--solver", s_opt.solver, "rppa or admm")->check(CLI::IsMember({"rppa", "admm"}));
  s->add_option("--sigma0", s_opt.sigma0, "Initial penalty parameter")->check(CLI::PositiveNumber);
  s->add_option("--max-iter", s_opt.max_iter, "Iteration cap (outer for rppa), 0 = default");
  s->add_option("--warm-start", s_opt.warm_start, "ADMM warm-start iterations for rppa");
  s->add_option("--out", solve_out, "Output prefix: <out>.smc and <out>.record");
  s->add_option("--trace", solve_trace, "Per-iteration trace; JSON lines if the name ends in .jsonl");
  add_config(s);

  // metrics
  std::string m_est, m_truth, m_out;
  double zero_tol = 1e-6, diff_tol = 1e-6;
  auto* m = app.add_subcommand("metrics", "Edge recovery metrics of an estimate against the truth");
  m->add_option("--est", m_est, "Estimated precisions (SMC)")->required()->check(CLI::ExistingFile);
  m->add_option("--truth", m_truth, "True precisions (SMC)")->required()->check(CLI::ExistingFile);
  m->add_option("--out", m_out, "Record file (default stdout)");
  m->add_option("--zero-tol", zero_tol, "Entries above this magnitude count as edges");
  m->add_option("--diff-tol", diff_tol, "Consecutive differences above this count as differential edges");
  add_config(m);

  // bench
  std::string b_in, b_out, b_truth;
  BenchOptions b_opt;
  b_opt.lambda1 = {0.1};
  b_opt.lambda2 = {0.05};
  auto* b = app.add_subcommand("bench", "Run solvers over a lambda grid and compare");
  b->add_option("--input", b_in, "Covariance SMC file")->required()->check(CLI::ExistingFile);
  b->add_option("--lambda1", b_opt.lambda1, "Sparsity penalties")->expected(1, -1);
  b->add_option("--lambda2", b_opt.lambda2, "Fusion penalties")->expected(1, -1);
  b->add_option("--solver", b_opt.solvers, "Solvers to run")->expected(1, -1)->check(CLI::IsMember({"rppa", "admm"}));
  b->add_option("--tol", b_opt.solver.tol, "KKT residual tolerance")->check(CLI::PositiveNumber);
  b->add_option("--sigma0", b_opt.solver.sigma0, "Initial penalty parameter")->check(CLI::PositiveNumber);
  b->add_option("--max-iter", b_opt.solver.max_iter, "Iteration cap, 0 = default");
  b->add_option("--truth", b_truth, "True precisions; adds TP/FP/SSE columns")->check(CLI::ExistingFile);
  b->add_option("--out", b_out, "Output prefix: <out>.jsonl and <out>.csv");
  add_config(b);

  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    if (!config.empty()) apply_config(*sub, config);

    if (sub == g) {
      for (const auto& f : cmd_gen(gen)) std::cout << f << '\n';
      return kOk;
    }
    if (sub == c) {
      write_smc_file(cov_out, cmd_cov(cov_inputs, cov_counts));
      return kOk;
    }
    if (sub == s) {
      const ProblemData data{read_smc_file(solve_in), s_l1, s_l2};
      const SolverReport rep = run_solver(data, s_opt);
      if (!solve_out.empty()) {
        write_smc_file(solve_out + ".smc", rep.Theta);
        auto f = open_out(solve_out + ".record");
        write_report_record(f, rep);
      }
      if (!solve_trace.empty()) write_trace(solve_trace, rep);
      write_report_record(std::cout, rep);
      if (!rep.converged) {
        std::cerr << "fgl: " << rep.solver << " did not reach tol " << s_opt.tol << " (eta = " << rep.eta << ")\n";
        return kNotConverged;
      }
      return kOk;
    }
    if (sub == m) {
      const EdgeMetrics em = edge_metrics(read_smc_file(m_est), read_smc_file(m_truth), zero_tol, diff_tol);
      if (m_out.empty()) {
        write_metrics_record(std::cout, em);
      } else {
        auto f = open_out(m_out);
        write_metrics_record(f, em);
      }
      return kOk;
    }
    if (sub == b) {
      const MatrixCollection cov = read_smc_file(b_in);
      std::optional<MatrixCollection> truth;
      if (!b_truth.empty()) truth = read_smc_file(b_truth);
      const auto rows = cmd_bench(cov, b_opt, truth ? &*truth : nullptr);
      write_bench_table(std::cout, rows);
      if (!b_out.empty()) {
        auto js = open_out(b_out + ".jsonl");
        auto cs = open_out(b_out + ".csv");
        cs << bench_csv_header(truth.has_value()) << '\n';
        for (const auto& r : rows) {
          js << to_json(r).dump() << '\n';
          cs << to_csv(r, truth.has_value()) << '\n';
        }
      }
      for (const auto& r : rows)
        if (!r.converged) return kNotConverged;
      return kOk;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const SolverError& e) {
    std::cerr << "fgl: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "fgl: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace fgl::cli
