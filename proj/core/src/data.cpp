#include "fgl/data.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "fgl/io.hpp"

namespace fgl {
namespace {

// Uniform on [-1, -0.5] U [0.5, 1].
double draw_edge_weight(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.5, 1.0);
  std::bernoulli_distribution neg(0.5);
  const double w = mag(rng);
  return neg(rng) ? -w : w;
}

}  // namespace

Matrix sample_covariance(const Matrix& observations) {
  const Eigen::Index n = observations.rows();
  if (n < 2) throw std::invalid_argument("sample_covariance: need at least two observations");
  const Vector mean = observations.colwise().mean().transpose();
  const Matrix centered = observations.rowwise() - mean.transpose();
  Matrix s = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return 0.5 * (s + s.transpose());
}

std::vector<std::pair<int, int>> mutual_knn_edges(const Matrix& points, int m) {
  const int n = static_cast<int>(points.rows());
  if (m < 0 || m >= n) throw std::invalid_argument("mutual_knn_edges: need 0 <= m < number of points");
  std::vector<std::vector<char>> is_nn(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) dist[static_cast<std::size_t>(j)] = (points.row(i) - points.row(j)).squaredNorm();
    std::iota(order.begin(), order.end(), 0);
    // Ties broken by index so the graph is a function of the points alone.
    auto closer = [&](int a, int b) {
      const double da = dist[static_cast<std::size_t>(a)], db = dist[static_cast<std::size_t>(b)];
      return da < db || (da == db && a < b);
    };
    order.erase(std::remove(order.begin(), order.end(), i), order.end());
    std::partial_sort(order.begin(), order.begin() + m, order.end(), closer);
    for (int t = 0; t < m; ++t) is_nn[static_cast<std::size_t>(i)][static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = 1;
    order.resize(static_cast<std::size_t>(n));
  }
  std::vector<std::pair<int, int>> edges;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (is_nn[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
          is_nn[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
        edges.emplace_back(i, j);
  return edges;
}

SyntheticInstance gen_nearest_neighbour(int p, int num_classes, int m, std::uint64_t seed, int n_samples) {
  if (p < 1 || m < 0 || p < m + 1) throw std::invalid_argument("gen_nearest_neighbour: need p >= m + 1");
  if (num_classes < 2) throw std::invalid_argument("gen_nearest_neighbour: need at least two classes");
  if (n_samples < 0) throw std::invalid_argument("gen_nearest_neighbour: negative sample count");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix points(p, 2);
  for (int i = 0; i < p; ++i) {
    points(i, 0) = unit(rng);
    points(i, 1) = unit(rng);
  }
  const auto edges = mutual_knn_edges(points, m);
  const int base = static_cast<int>(edges.size());

  Matrix shared = Matrix::Zero(p, p);
  for (const auto& [i, j] : edges) {
    const double w = draw_edge_weight(rng);
    shared(i, j) = w;
    shared(j, i) = w;
  }

  const long total_pairs = static_cast<long>(p) * (p - 1) / 2;
  const int extra = (base + 3) / 4;
  if (base + extra > total_pairs) throw std::invalid_argument("gen_nearest_neighbour: graph too dense for heterogeneity edges");

  SyntheticInstance inst;
  inst.seed = seed;
  inst.m = m;
  inst.base_edges = base;
  std::uniform_int_distribution<int> pick(0, p - 1);
  std::vector<Matrix> precisions;
  for (int l = 0; l < num_classes; ++l) {
    Matrix omega = shared;
    for (int t = 0; t < extra; ++t) {
      int i = 0, j = 0;
      do {
        i = pick(rng);
        j = pick(rng);
      } while (i == j || omega(i, j) != 0.0);
      const double w = draw_edge_weight(rng);
      omega(i, j) = w;
      omega(j, i) = w;
    }
    inst.n_edges_true += base + extra;
    // Diagonal dominance, then unit diagonal.
    const Vector diag = omega.cwiseAbs().rowwise().sum().array() + 0.1;
    omega.diagonal() = diag;
    const Vector scale = diag.cwiseSqrt().cwiseInverse();
    omega = scale.asDiagonal() * omega * scale.asDiagonal();
    omega.diagonal().setOnes();
    precisions.push_back(std::move(omega));
  }
  inst.true_precisions = MatrixCollection(std::move(precisions));

  if (n_samples > 0) {
    for (int l = 0; l < num_classes; ++l)
      inst.samples.push_back(sample_gaussian(inst.true_precisions[static_cast<std::size_t>(l)], n_samples,
                                             seed * 1000003ULL + static_cast<std::uint64_t>(l) + 1));
  }
  return inst;
}

Matrix sample_gaussian(const Matrix& precision, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_gaussian: negative sample count");
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("sample_gaussian: precision is not positive definite");
  const Eigen::Index p = precision.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix z(p, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < p; ++r) z(r, c) = gauss(rng);
  // precision = L L^T; x = L^{-T} z has covariance precision^{-1}.
  const Matrix x = llt.matrixU().solve(z);
  return x.transpose();
}

Vector log_entropy_weights(const Matrix& stacked) {
  const Eigen::Index docs = stacked.rows();
  if (docs < 2) throw std::invalid_argument("log_entropy_weights: need at least two documents");
  const double log_docs = std::log(static_cast<double>(docs));
  Vector e(stacked.cols());
  for (Eigen::Index j = 0; j < stacked.cols(); ++j) {
    const double total = stacked.col(j).sum();
    if (!(total > 0.0)) throw std::invalid_argument("log_entropy_weights: term " + std::to_string(j) + " never occurs");
    double ent = 0.0;
    for (Eigen::Index i = 0; i < docs; ++i) {
      const double pij = stacked(i, j) / total;
      if (pij > 0.0) ent += pij * std::log(pij);
    }
    e(j) = 1.0 + ent / log_docs;
  }
  return e;
}

MatrixCollection log_entropy_covariances(const std::vector<Matrix>& counts) {
  if (counts.empty()) throw std::invalid_argument("log_entropy_covariances: no classes");
  const Eigen::Index terms = counts.front().cols();
  Eigen::Index docs = 0;
  for (const auto& c : counts) {
    if (c.cols() != terms) throw std::invalid_argument("log_entropy_covariances: classes differ in term count");
    if ((c.array() < 0.0).any()) throw std::invalid_argument("log_entropy_covariances: negative count");
    docs += c.rows();
  }
  Matrix stacked(docs, terms);
  Eigen::Index row = 0;
  for (const auto& c : counts) {
    stacked.middleRows(row, c.rows()) = c;
    row += c.rows();
  }
  const Vector e = log_entropy_weights(stacked);
  std::vector<Matrix> covs;
  for (const auto& c : counts) {
    const Matrix weighted = c.unaryExpr([](double v) { return std::log1p(v); }) * e.asDiagonal();
    covs.push_back(sample_covariance(weighted));
  }
  return MatrixCollection(std::move(covs));
}

long nnz_mass(const MatrixCollection& x, double mass) {
  std::vector<double> mags;
  mags.reserve(x.dim() * x.dim() * x.size());
  for (const auto& m : x.matrices())
    for (Eigen::Index k = 0; k < m.size(); ++k) mags.push_back(std::abs(m.data()[k]));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double total = std::accumulate(mags.begin(), mags.end(), 0.0);
  if (!(total > 0.0)) return 0;
  const double target = mass * total * (1.0 - 1e-12);
  double acc = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    acc += mags[k];
    if (acc >= target) return static_cast<long>(k + 1);
  }
  return static_cast<long>(mags.size());
}

EdgeMetrics edge_metrics(const MatrixCollection& est, const MatrixCollection& truth, double zero_tol,
                         double diff_tol) {
  require_same_shape(est, truth, "edge_metrics");
  EdgeMetrics r;
  const auto p = static_cast<Eigen::Index>(est.dim());
  const std::size_t num = est.size();
  for (std::size_t l = 0; l < num; ++l) {
    for (Eigen::Index j = 1; j < p; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double e = est[l](i, j), t = truth[l](i, j);
        const bool selected = std::abs(e) > zero_tol;
        const bool real = t != 0.0;
        r.selected_edges += selected;
        r.true_edges += real;
        r.tp_edges += selected && real;
        r.fp_edges += selected && !real;
        r.sse += (e - t) * (e - t);
        if (l + 1 < num) {
          const bool est_diff = std::abs(e - est[l + 1](i, j)) > diff_tol;
          const bool true_diff = std::abs(t - truth[l + 1](i, j)) > diff_tol;
          r.true_diff += true_diff;
          r.tp_diff += est_diff && true_diff;
          r.fp_diff += est_diff && !true_diff;
        }
      }
    }
  }
  r.nnz = nnz_mass(est);
  r.density = static_cast<double>(r.nnz) / static_cast<double>(est.dim() * est.dim() * num);
  return r;
}

void write_metrics_record(std::ostream& out, const EdgeMetrics& m) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "tp_edges=" << m.tp_edges << '\n'
      << "fp_edges=" << m.fp_edges << '\n'
      << "true_edges=" << m.true_edges << '\n'
      << "selected_edges=" << m.selected_edges << '\n'
      << "sse=" << m.sse << '\n'
      << "tp_diff=" << m.tp_diff << '\n'
      << "fp_diff=" << m.fp_diff << '\n'
      << "true_diff=" << m.true_diff << '\n'
      << "nnz=" << m.nnz << '\n'
      << "density=" << m.density << '\n';
}

EdgeMetrics read_metrics_record(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("metrics record: line without '='");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(std::string("metrics record: missing key ") + key);
    return it->second;
  };
  EdgeMetrics m;
  m.tp_edges = std::stol(get("tp_edges"));
  m.fp_edges = std::stol(get("fp_edges"));
  m.true_edges = std::stol(get("true_edges"));
  m.selected_edges = std::stol(get("selected_edges"));
  m.sse = std::stod(get("sse"));
  m.tp_diff = std::stol(get("tp_diff"));
  m.fp_diff = std::stol(get("fp_diff"));
  m.true_diff = std::stol(get("true_diff"));
  m.nnz = std::stol(get("nnz"));
  m.density = std::stod(get("density"));
  return m;
}

}  // namespace fgl
