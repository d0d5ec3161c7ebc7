#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (namespace
// kernels) and a serial reference (namespace kernels::reference) that the
// tests compare against bit-for-bit: the parallel loops only split over
// independent outputs, so per-output summation order is identical.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mvcorr::kernels {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Σ_l X_l X_lᵀ over d×N views. Each entry sums view index ascending, then
/// sample index ascending.
Matrix gram_sum(std::span<const Matrix> views);

/// Nearest row of `centers` (k×d) for every row of `points` (N×d) by squared
/// Euclidean distance; ties go to the lowest center index.
struct Assignment {
  std::vector<int> index;
  Eigen::VectorXd sq_distance;
};
Assignment assign_nearest(const Matrix& points, const Matrix& centers);

namespace reference {
Matrix gram_sum(std::span<const Matrix> views);
Assignment assign_nearest(const Matrix& points, const Matrix& centers);
}  // namespace reference

}  // namespace mvcorr::kernels
