#pragma once

// Batch covariance estimation for multi-view data. Views are d×N matrices
// (features × samples). Covariances are not divided by N−1; the 1/m factor is
// kept so that r_t = r_b + r_w holds exactly.

#include <span>
#include <vector>

#include "mvcorr/linalg.hpp"

namespace mvcorr::cov {

using linalg::Index;
using linalg::Matrix;

struct CovarianceSet {
  Matrix r_w;
  Matrix r_w_shrunk;
  Matrix r_t;
  Matrix r_b;
  int m = 0;
  Index n = 0;
  double nu = 0.0;

  Index dim() const { return r_w.rows(); }
};

/// Subtracts each row's mean (each feature centered across samples).
Matrix center_columns(const Matrix& x);

/// (1/m) Σ_l X_l X_lᵀ.
Matrix within_view_cov(std::span<const Matrix> views);

/// (1/m) (Σ_l X_l)(Σ_l X_l)ᵀ. Linear in the number of views.
Matrix total_view_cov(std::span<const Matrix> views);

/// r_t − r_w, i.e. (1/m) Σ_{l≠k} X_l X_kᵀ without forming the pairs.
Matrix between_view_cov(const Matrix& r_t, const Matrix& r_w);

/// (1−ν) r_w + ν Tr(r_w) I / d.
Matrix shrink(const Matrix& r_w, double nu);

/// Centers every view, then fills all four covariances.
CovarianceSet estimate(std::span<const Matrix> views, double nu);

/// Same as estimate() for views that are already centered.
CovarianceSet estimate_centered(std::span<const Matrix> views, double nu);

}  // namespace mvcorr::cov
