#include "mvcorr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mvcorr/errors.hpp"
#include "mvcorr/kernels.hpp"
#include "mvcorr/linalg.hpp"
#include "mvcorr/rng.hpp"

namespace mvcorr::metrics {

Affinity affinity_checked(const Matrix& x, const Matrix& y) {
  require(x.size() > 0 && y.size() > 0, "affinity: empty input");
  require(x.rows() == y.rows(), "affinity: sample counts differ");
  const Eigen::VectorXd cosines = linalg::principal_angle_cosines(x, y);
  if (cosines.size() == 0) return {0.0, true};
  return {std::sqrt(cosines.squaredNorm() / static_cast<double>(cosines.size())), false};
}

double affinity(const Matrix& x, const Matrix& y) { return affinity_checked(x, y).value; }

AffinityReport affinity_report(std::span<const Matrix> ground_truth, std::span<const Matrix> embeddings) {
  require(ground_truth.size() == embeddings.size(), "reconstruction_affinity: view counts differ");
  require(!embeddings.empty(), "reconstruction_affinity: no views");
  AffinityReport r;
  for (std::size_t l = 0; l < embeddings.size(); ++l) r.per_view.push_back(affinity(ground_truth[l], embeddings[l]));
  double sum = 0.0;
  for (double a : r.per_view) sum += a;
  r.r_a = sum / static_cast<double>(r.per_view.size());
  r.r_s = embeddings.size() >= 2 ? inter_set_affinity(embeddings) : 0.0;
  return r;
}

double reconstruction_affinity(std::span<const Matrix> ground_truth, std::span<const Matrix> embeddings) {
  require(ground_truth.size() == embeddings.size(), "reconstruction_affinity: view counts differ");
  require(!embeddings.empty(), "reconstruction_affinity: no views");
  double sum = 0.0;
  for (std::size_t l = 0; l < embeddings.size(); ++l) sum += affinity(ground_truth[l], embeddings[l]);
  return sum / static_cast<double>(embeddings.size());
}

double inter_set_affinity(std::span<const Matrix> embeddings) {
  require(embeddings.size() >= 2, "inter_set_affinity: need at least 2 views");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t l = 0; l < embeddings.size(); ++l)
    for (std::size_t k = l + 1; k < embeddings.size(); ++k, ++pairs) sum += affinity(embeddings[l], embeddings[k]);
  return sum / static_cast<double>(pairs);
}

namespace {

Matrix plus_plus_init(const Matrix& points, int k, Rng& rng) {
  const Index n = points.rows();
  Matrix centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Index>(rng.index(static_cast<std::size_t>(n))));
  Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      // Points already chosen have zero weight and can never be drawn again.
      const double target = rng.uniform(0.0, total);
      double cum = 0.0;
      pick = -1;
      for (Index i = 0; i < n; ++i) {
        if (d2(i) == 0.0) continue;
        cum += d2(i);
        pick = i;
        if (cum > target) break;
      }
    } else {
      pick = static_cast<Index>(rng.index(static_cast<std::size_t>(n)));
    }
    centers.row(c) = points.row(pick);
    d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

KMeansResult lloyd(const Matrix& points, int k, Rng rng, int max_iter) {
  KMeansResult r;
  r.centers = plus_plus_init(points, k, rng);
  std::vector<int> previous;
  for (int it = 0; it < max_iter; ++it) {
    const kernels::Assignment a = kernels::assign_nearest(points, r.centers);
    r.inertia = a.sq_distance.sum();
    r.inertia_history.push_back(r.inertia);
    r.iterations = it + 1;
    if (a.index == previous) break;
    previous = a.index;
    r.assignments = a.index;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < points.rows(); ++i) {
      const int c = a.index[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    // Empty clusters keep their previous center.
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        r.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  r.assignments = previous;
  return r;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts, int max_iter) {
  require(k >= 1, "kmeans: k must be positive");
  require(points.rows() >= k, "kmeans: fewer points than clusters");
  require(restarts >= 1 && max_iter >= 1, "kmeans: restarts and max_iter must be positive");
  linalg::require_finite(points, "kmeans");

  const Rng root(seed);
  std::vector<KMeansResult> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r)
    runs[static_cast<std::size_t>(r)] = lloyd(points, k, root.split(static_cast<std::uint64_t>(r)), max_iter);

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  return std::move(runs[best]);
}

std::vector<int> solve_assignment(const Matrix& cost) {
  // Shortest augmenting path with potentials; 1-based internally.
  const Index n = cost.rows();
  const Index m = cost.cols();
  require(n >= 1 && n <= m, "solve_assignment: need 1 <= rows <= cols");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(m + 1), 0.0);
  std::vector<Index> p(static_cast<std::size_t>(m + 1), 0), way(static_cast<std::size_t>(m + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= m; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (used[uj]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[uj];
        if (cur < minv[uj]) {
          minv[uj] = cur;
          way[uj] = j0;
        }
        if (minv[uj] < delta) {
          delta = minv[uj];
          j1 = j;
        }
      }
      for (Index j = 0; j <= m; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (used[uj]) {
          u[static_cast<std::size_t>(p[uj])] += delta;
          v[uj] -= delta;
        } else {
          minv[uj] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> result(static_cast<std::size_t>(n), -1);
  for (Index j = 1; j <= m; ++j)
    if (p[static_cast<std::size_t>(j)] != 0) result[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = static_cast<int>(j - 1);
  return result;
}

ClusterEval hungarian_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  require(!predicted.empty(), "hungarian_accuracy: empty input");
  require(predicted.size() == truth.size(), "hungarian_accuracy: length mismatch");

  std::map<int, Index> pred_ids, true_ids;
  for (int p : predicted) pred_ids.emplace(p, 0);
  for (int t : truth) true_ids.emplace(t, 0);
  Index next = 0;
  for (auto& [label, id] : pred_ids) id = next++;
  next = 0;
  for (auto& [label, id] : true_ids) id = next++;

  const Index size = std::max<Index>(static_cast<Index>(pred_ids.size()), static_cast<Index>(true_ids.size()));
  Matrix counts = Matrix::Zero(size, size);
  for (std::size_t i = 0; i < predicted.size(); ++i) counts(pred_ids[predicted[i]], true_ids[truth[i]]) += 1.0;

  const std::vector<int> match = solve_assignment(counts.maxCoeff() - counts.array());

  std::vector<int> pred_label(static_cast<std::size_t>(size), 0), true_label(static_cast<std::size_t>(size), 0);
  for (const auto& [label, id] : pred_ids) pred_label[static_cast<std::size_t>(id)] = label;
  for (const auto& [label, id] : true_ids) true_label[static_cast<std::size_t>(id)] = label;

  ClusterEval out;
  out.assignments = predicted;
  double matched = 0.0;
  for (Index r = 0; r < size; ++r) {
    const Index c = match[static_cast<std::size_t>(r)];
    if (r < static_cast<Index>(pred_ids.size()) && c < static_cast<Index>(true_ids.size())) {
      out.permutation.emplace_back(pred_label[static_cast<std::size_t>(r)], true_label[static_cast<std::size_t>(c)]);
      matched += counts(r, c);
    }
  }
  out.accuracy = matched / static_cast<double>(predicted.size());
  return out;
}

double nn_match(const Matrix& gallery, const std::vector<int>& gallery_labels, const Matrix& probes,
                const std::vector<int>& probe_labels) {
  require(gallery.rows() >= 1, "nn_match: empty gallery");
  require(probes.rows() >= 1, "nn_match: no probes");
  require(gallery.cols() == probes.cols(), "nn_match: dimension mismatch");
  require(static_cast<Index>(gallery_labels.size()) == gallery.rows(), "nn_match: gallery label count mismatch");
  require(static_cast<Index>(probe_labels.size()) == probes.rows(), "nn_match: probe label count mismatch");

  auto unit_rows = [](const Matrix& x) {
    Matrix out = x;
    for (Index i = 0; i < out.rows(); ++i) {
      const double n = out.row(i).norm();
      if (n > 0.0) out.row(i) /= n;
    }
    return out;
  };
  const kernels::Assignment nearest = kernels::assign_nearest(unit_rows(probes), unit_rows(gallery));
  Index hits = 0;
  for (Index p = 0; p < probes.rows(); ++p)
    if (gallery_labels[static_cast<std::size_t>(nearest.index[static_cast<std::size_t>(p)])] ==
        probe_labels[static_cast<std::size_t>(p)])
      ++hits;
  return static_cast<double>(hits) / static_cast<double>(probes.rows());
}

}  // namespace mvcorr::metrics
