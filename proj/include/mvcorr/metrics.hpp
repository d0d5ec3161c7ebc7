#pragma once

// Evaluation: subspace affinity between column spaces, k-means with
// Hungarian-matched accuracy, and 1-NN matching on unit-normalized vectors.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mvcorr::metrics {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct Affinity {
  double value = 0.0;
  bool degenerate = false;  ///< one side had rank 0
};

/// sqrt(mean of squared principal-angle cosines) between the column spaces of
/// x (samples × k) and y (samples × k').
Affinity affinity_checked(const Matrix& x, const Matrix& y);
double affinity(const Matrix& x, const Matrix& y);

/// Mean over views of affinity(ground_truth[l], embeddings[l]).
double reconstruction_affinity(std::span<const Matrix> ground_truth, std::span<const Matrix> embeddings);

/// Mean affinity over unordered pairs of views.
double inter_set_affinity(std::span<const Matrix> embeddings);

struct AffinityReport {
  double r_a = 0.0;
  double r_s = 0.0;
  std::vector<double> per_view;  ///< reconstruction affinity of each view
};
AffinityReport affinity_report(std::span<const Matrix> ground_truth, std::span<const Matrix> embeddings);

struct KMeansResult {
  std::vector<int> assignments;
  Matrix centers;
  double inertia = 0.0;
  std::vector<double> inertia_history;  ///< after each assignment step of the winning restart
  int iterations = 0;
};

/// Lloyd iterations from k-means++ seeding, best of `restarts` by inertia.
/// Points are rows.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10, int max_iter = 300);

struct ClusterEval {
  std::vector<int> assignments;
  double accuracy = 0.0;
  std::vector<std::pair<int, int>> permutation;  ///< (cluster label, class label) pairs of the matching
};

/// Accuracy under the best one-to-one cluster→class matching (Kuhn–Munkres).
ClusterEval hungarian_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Minimum-cost assignment for a rows ≤ cols cost matrix; result[i] is the
/// column given to row i.
std::vector<int> solve_assignment(const Matrix& cost);

/// Fraction of probes whose nearest gallery row (Euclidean, after unit
/// normalization of every row) carries the same label. Ties go to the lowest
/// gallery index.
double nn_match(const Matrix& gallery, const std::vector<int>& gallery_labels, const Matrix& probes,
                const std::vector<int>& probe_labels);

}  // namespace mvcorr::metrics
