#include "mvcorr/covariance.hpp"

#include "mvcorr/kernels.hpp"

namespace mvcorr::cov {

namespace {

void check_views(std::span<const Matrix> views, const char* what) {
  require(views.size() >= 2, std::string(what) + ": need at least 2 views");
  for (const Matrix& v : views) {
    require(v.rows() == views[0].rows() && v.cols() == views[0].cols(), std::string(what) + ": view shape mismatch");
    require(v.rows() >= 1 && v.cols() >= 1, std::string(what) + ": empty view");
    linalg::require_finite(v, what);
  }
}

}  // namespace

Matrix center_columns(const Matrix& x) {
  require(x.cols() >= 2, "center_columns: need at least 2 samples");
  linalg::require_finite(x, "center_columns");
  const Eigen::VectorXd mean = x.rowwise().mean();
  return x.colwise() - mean;
}

Matrix within_view_cov(std::span<const Matrix> views) {
  check_views(views, "within_view_cov");
  return kernels::gram_sum(views) / static_cast<double>(views.size());
}

Matrix total_view_cov(std::span<const Matrix> views) {
  check_views(views, "total_view_cov");
  Matrix total = views[0];
  for (std::size_t l = 1; l < views.size(); ++l) total += views[l];
  return kernels::gram_sum(std::span<const Matrix>(&total, 1)) / static_cast<double>(views.size());
}

Matrix between_view_cov(const Matrix& r_t, const Matrix& r_w) {
  require(r_t.rows() == r_w.rows() && r_t.cols() == r_w.cols(), "between_view_cov: shape mismatch");
  return r_t - r_w;
}

Matrix shrink(const Matrix& r_w, double nu) {
  require(nu >= 0.0 && nu <= 1.0, "shrink: nu must lie in [0,1]");
  require(r_w.rows() == r_w.cols() && r_w.rows() >= 1, "shrink: matrix must be square");
  const double d = static_cast<double>(r_w.rows());
  Matrix out = (1.0 - nu) * r_w;
  out.diagonal().array() += nu * r_w.trace() / d;
  return out;
}

CovarianceSet estimate_centered(std::span<const Matrix> views, double nu) {
  CovarianceSet c;
  c.r_w = within_view_cov(views);
  c.r_t = total_view_cov(views);
  c.r_b = between_view_cov(c.r_t, c.r_w);
  c.r_w_shrunk = shrink(c.r_w, nu);
  c.m = static_cast<int>(views.size());
  c.n = views[0].cols();
  c.nu = nu;
  return c;
}

CovarianceSet estimate(std::span<const Matrix> views, double nu) {
  check_views(views, "estimate");
  std::vector<Matrix> centered;
  centered.reserve(views.size());
  for (const Matrix& v : views) centered.push_back(center_columns(v));
  return estimate_centered(centered, nu);
}

}  // namespace mvcorr::cov
