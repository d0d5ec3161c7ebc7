#pragma once

// Synthetic multi-view data with a known number K of components shared by
// every view.
//
// Per view l: x_s = A_s s + η, x_b = A_b b, with A = O·diag(exp(g)), O having
// orthonormal columns and g ~ N(0,1). Both parts are z-normalized, the noise
// of view l is mixed with that of the cyclically next view
// (x_b ← α x_b^l + (1−α) x_b^{l+1}), and y = β x_s + (1−β) x_b is
// z-normalized again.
//
// With classes > 1 every class c gets its own signal generator: its own
// mappings A_s^{l,c} and a latent offset μ_c ~ class_separation·N(0, I_K).
// Samples are assigned to classes round-robin.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mvcorr/bootstrap.hpp"
#include "mvcorr/rng.hpp"

namespace mvcorr::synth {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct SynthParams {
  Index n = 20000;
  Index dim = 64;
  Index k = 10;
  int m_views = 4;
  double alpha = 0.5;
  double beta = 0.7;
  int classes = 1;
  double class_separation = 3.0;
  double noise_sigma = 0.1;  ///< standard deviation of the view-specific signal noise η
  std::uint64_t seed = 1;
};

/// Throws ContractViolation unless k < dim, m_views ≥ 2, n ≥ 2, classes ≥ 1 and
/// alpha, beta ∈ [0,1].
void validate(const SynthParams& p);

struct SyntheticDataset {
  std::vector<Matrix> measurements;  ///< per view, dim × n
  std::vector<Matrix> signal;        ///< per view, k × n latent source before mapping
  std::vector<int> labels;           ///< class of each sample
  SynthParams params;
};

SyntheticDataset generate(const SynthParams& params);

/// D×K matrix with orthonormal columns from Gram-Schmidt on Gaussian draws.
Matrix random_orthonormal(Index rows, Index cols, Rng& rng);

/// Each row to zero mean and unit (population) variance across columns.
Matrix z_normalize_rows(const Matrix& x);

bootstrap::MultiViewDataset to_multiview_dataset(const SyntheticDataset& synth);

}  // namespace mvcorr::synth
