#pragma once

// The multi-view correlation objective
//
//   rho = Tr(R̃_w⁻¹ R_b) / (d (m − 1)),
//
// i.e. the mean generalized eigenvalue of (R_b, R̃_w) divided by m − 1, which
// is bounded above by one. Training minimizes 1 − rho.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mvcorr/covariance.hpp"
#include "mvcorr/linalg.hpp"

namespace mvcorr::objective {

using linalg::EigenPair;
using linalg::Index;
using linalg::Matrix;

/// Shrunk within-view covariance could not be factorized.
class ShrinkageRequired : public std::runtime_error {
 public:
  explicit ShrinkageRequired(const linalg::NotPositiveDefinite& e)
      : std::runtime_error(std::string("shrunk within-view covariance is not positive-definite (") + e.what() +
                           "); increase the shrinkage parameter nu") {}
};

struct MvCorrResult {
  double rho = 0.0;
  double loss = 1.0;
  std::optional<EigenPair> subspace;
  int m = 0;
  Index d = 0;
};

MvCorrResult mv_corr(const cov::CovarianceSet& cov, bool with_subspace = false);

/// Full generalized eigenbasis W of (R_b, R̃_w), eigenvalues descending.
EigenPair shared_subspace(const cov::CovarianceSet& cov);

struct LossGradient {
  double rho = 0.0;
  double loss = 1.0;
  std::vector<Matrix> grads;  ///< ∂(1 − rho)/∂H_l, one d×N matrix per view
};

/// Loss and its exact gradient with respect to the raw (uncentered) view
/// embeddings. Centering, the 1/m covariances and the trace-dependent
/// shrinkage target are all differentiated through.
LossGradient loss_and_grad(std::span<const Matrix> embeddings, double nu);

std::vector<Matrix> grad_loss(std::span<const Matrix> embeddings, double nu);

/// 1 − rho of the given raw embeddings (centers internally).
double loss_value(std::span<const Matrix> embeddings, double nu);

}  // namespace mvcorr::objective
