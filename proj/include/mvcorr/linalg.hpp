#pragma once

// Dense symmetric kernels: Cholesky, cyclic Jacobi eigensolver, the
// Cholesky-whitened generalized eigenproblem, power-iteration spectral norm
// and principal angles between column spaces.
//
// Eigen is used as the dense container and for plain products; the
// factorizations themselves are written here.

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "mvcorr/errors.hpp"

namespace mvcorr::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenvalues sorted descending; columns of `vectors` in matching order.
struct EigenPair {
  Vector values;
  Matrix vectors;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(Index pivot, double value)
      : std::runtime_error("matrix is not positive-definite: pivot " + std::to_string(pivot) +
                           " has value " + std::to_string(value)),
        pivot_(pivot) {}
  Index pivot() const { return pivot_; }

 private:
  Index pivot_;
};

/// Tolerance used for every "is symmetric" precondition, relative to max|a|.
inline constexpr double kSymmetryTol = 1e-10;

double max_abs(const Matrix& a);
bool is_symmetric(const Matrix& a, double rel_tol = kSymmetryTol);
void require_finite(const Matrix& a, const char* what);

/// Lower-triangular L with L Lᵀ = a. Throws NotPositiveDefinite naming the first
/// non-positive pivot.
Matrix cholesky(const Matrix& a);

/// Solves L X = B for lower-triangular L.
Matrix solve_lower(const Matrix& l, const Matrix& b);
/// Solves Lᵀ X = B for lower-triangular L.
Matrix solve_lower_transposed(const Matrix& l, const Matrix& b);
/// Solves (L Lᵀ) X = B given the Cholesky factor.
Matrix cholesky_solve(const Matrix& l, const Matrix& b);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
EigenPair sym_eig(const Matrix& a);

/// Solves b v = λ w v for symmetric b and SPD w. Returned vectors are
/// w-orthonormal (Vᵀ w V = I).
EigenPair gev_solve(const Matrix& b, const Matrix& w);

/// Largest singular value by power iteration on aᵀa from a fixed-seed start.
double spectral_norm(const Matrix& a);

/// Orthonormal basis for the column space of x via Gram-Schmidt with one
/// re-orthogonalization pass. Columns whose residual falls below 1e-10 of
/// their original norm are dropped.
Matrix orthonormal_basis(const Matrix& x);

/// Cosines of the principal angles between span(x) and span(y), clamped to
/// [0,1], descending. Length is min of the two effective ranks.
Vector principal_angle_cosines(const Matrix& x, const Matrix& y);

}  // namespace mvcorr::linalg
