#include "mvcorr/kernels.hpp"

#include <limits>

#include "mvcorr/errors.hpp"

namespace mvcorr::kernels {

namespace {

// Sample-major copies so that a row of X_l is contiguous.
std::vector<Matrix> transposed(std::span<const Matrix> views) {
  std::vector<Matrix> out;
  out.reserve(views.size());
  for (const Matrix& v : views) out.emplace_back(v.transpose());
  return out;
}

void check_views(std::span<const Matrix> views) {
  require(!views.empty(), "gram_sum: no views");
  for (const Matrix& v : views)
    require(v.rows() == views[0].rows() && v.cols() == views[0].cols(), "gram_sum: views differ in shape");
}

inline double gram_entry(const std::vector<Matrix>& xt, Index i, Index j) {
  double s = 0.0;
  for (const Matrix& x : xt) {
    const double* a = x.col(i).data();
    const double* b = x.col(j).data();
    for (Index n = 0; n < x.rows(); ++n) s += a[n] * b[n];
  }
  return s;
}

inline void nearest_one(const Matrix& points, const Matrix& centers, Index p, Assignment& out) {
  double best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (Index k = 0; k < centers.rows(); ++k) {
    const double d = (points.row(p) - centers.row(k)).squaredNorm();
    if (d < best) {
      best = d;
      best_k = static_cast<int>(k);
    }
  }
  out.index[static_cast<std::size_t>(p)] = best_k;
  out.sq_distance(p) = best;
}

void check_assign(const Matrix& points, const Matrix& centers) {
  require(centers.rows() >= 1, "assign_nearest: no centers");
  require(points.cols() == centers.cols(), "assign_nearest: dimension mismatch");
}

}  // namespace

Matrix gram_sum(std::span<const Matrix> views) {
  check_views(views);
  const auto xt = transposed(views);
  const Index d = views[0].rows();
  Matrix g(d, d);
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double s = gram_entry(xt, i, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

Assignment assign_nearest(const Matrix& points, const Matrix& centers) {
  check_assign(points, centers);
  Assignment out{std::vector<int>(static_cast<std::size_t>(points.rows())), Eigen::VectorXd(points.rows())};
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < points.rows(); ++p) nearest_one(points, centers, p, out);
  return out;
}

namespace reference {

Matrix gram_sum(std::span<const Matrix> views) {
  check_views(views);
  const auto xt = transposed(views);
  const Index d = views[0].rows();
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double s = gram_entry(xt, i, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

Assignment assign_nearest(const Matrix& points, const Matrix& centers) {
  check_assign(points, centers);
  Assignment out{std::vector<int>(static_cast<std::size_t>(points.rows())), Eigen::VectorXd(points.rows())};
  for (Index p = 0; p < points.rows(); ++p) nearest_one(points, centers, p, out);
  return out;
}

}  // namespace reference

}  // namespace mvcorr::kernels
