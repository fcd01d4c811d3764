#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fgl/linalg.hpp"

namespace fgl {

/// Ground truth of a nearest-neighbour network simulation.
struct SyntheticInstance {
  MatrixCollection true_precisions;
  std::vector<Matrix> samples;  // one N x p block per class; empty unless requested
  std::uint64_t seed = 0;
  int m = 0;
  int base_edges = 0;      // edges of the shared mutual m-NN graph
  int n_edges_true = 0;    // nonzero i < j entries summed over classes
};

/// Unbiased sample covariance of the rows; requires N >= 2.
Matrix sample_covariance(const Matrix& observations);

/// Mutual m-nearest-neighbour graph on p uniform points of the unit square,
/// with ceil(M/4) extra random edges per class. Each precision is made
/// diagonally dominant and rescaled to unit diagonal. When n_samples > 0,
/// draws that many Gaussian observations per class.
SyntheticInstance gen_nearest_neighbour(int p, int num_classes, int m, std::uint64_t seed,
                                        int n_samples = 0);

/// Edges (i < j) of the mutual m-NN graph for the given points (rows of an n x 2 matrix).
std::vector<std::pair<int, int>> mutual_knn_edges(const Matrix& points, int m);

/// N draws of N(0, precision^{-1}); throws std::invalid_argument unless precision is PD.
Matrix sample_gaussian(const Matrix& precision, int n, std::uint64_t seed);

/// Log-entropy weighting of per-class term counts (documents x terms), then
/// per-class sample covariances of e_j * ln(1 + count).
MatrixCollection log_entropy_covariances(const std::vector<Matrix>& counts);

/// Log-entropy weights e_j of the stacked count matrix.
Vector log_entropy_weights(const Matrix& stacked_counts);

struct EdgeMetrics {
  long tp_edges = 0;
  long fp_edges = 0;
  long true_edges = 0;
  long selected_edges = 0;
  double sse = 0.0;
  long tp_diff = 0;
  long fp_diff = 0;
  long true_diff = 0;
  long nnz = 0;
  double density = 0.0;
};

/// Number of entries carrying 99.9% of the l1 mass, largest first.
long nnz_mass(const MatrixCollection& x, double mass = 0.999);

EdgeMetrics edge_metrics(const MatrixCollection& est, const MatrixCollection& truth, double zero_tol = 1e-6,
                         double diff_tol = 1e-6);

void write_metrics_record(std::ostream& out, const EdgeMetrics& m);
EdgeMetrics read_metrics_record(std::istream& in);

}  // namespace fgl
