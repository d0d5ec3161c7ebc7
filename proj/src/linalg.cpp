#include "mvcorr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mvcorr/rng.hpp"

namespace mvcorr::linalg {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiTol = 1e-15;
constexpr double kPowerTol = 1e-8;
constexpr std::uint64_t kPowerSeed = 0x5eed5eedULL;
constexpr double kRankTol = 1e-10;

void require_square_symmetric(const Matrix& a, const char* what) {
  require(a.rows() >= 1 && a.rows() == a.cols(), std::string(what) + ": matrix must be square and nonempty");
  require_finite(a, what);
  require(is_symmetric(a), std::string(what) + ": matrix must be symmetric");
}

}  // namespace

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, max_abs(a));
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j + 1; i < a.rows(); ++i)
      if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
  return true;
}

void require_finite(const Matrix& a, const char* what) {
  require(a.allFinite(), std::string(what) + ": non-finite entry");
}

Matrix cholesky(const Matrix& a) {
  require_square_symmetric(a, "cholesky");
  const Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0)) throw NotPositiveDefinite(j, pivot);
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Matrix solve_lower(const Matrix& l, const Matrix& b) {
  require(l.rows() == l.cols() && l.rows() == b.rows(), "solve_lower: shape mismatch");
  const Index n = l.rows();
  Matrix x = b;
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index i = 0; i < n; ++i) {
      double s = x(i, c);
      for (Index k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

Matrix solve_lower_transposed(const Matrix& l, const Matrix& b) {
  require(l.rows() == l.cols() && l.rows() == b.rows(), "solve_lower_transposed: shape mismatch");
  const Index n = l.rows();
  Matrix x = b;
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index i = n - 1; i >= 0; --i) {
      double s = x(i, c);
      for (Index k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

Matrix cholesky_solve(const Matrix& l, const Matrix& b) { return solve_lower_transposed(l, solve_lower(l, b)); }

EigenPair sym_eig(const Matrix& input) {
  require_square_symmetric(input, "sym_eig");
  const Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);

  const double norm2 = a.squaredNorm();
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (Index q = 1; q < n; ++q)
      for (Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (off <= kJacobiTol * kJacobiTol * norm2 || off == 0.0) break;

    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle phi with cot(2 phi) = theta zeroes a(p,q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return a(x, x) > a(y, y); });

  EigenPair out{Vector(n), Matrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

EigenPair gev_solve(const Matrix& b, const Matrix& w) {
  require_square_symmetric(b, "gev_solve(b)");
  require_square_symmetric(w, "gev_solve(w)");
  require(b.rows() == w.rows(), "gev_solve: dimension mismatch");
  const Matrix l = cholesky(w);
  // C = L⁻¹ b L⁻ᵀ
  const Matrix y = solve_lower(l, b);
  Matrix c = solve_lower(l, y.transpose());
  c = 0.5 * (c + c.transpose());
  EigenPair whitened = sym_eig(c);
  return {whitened.values, solve_lower_transposed(l, whitened.vectors)};
}

double spectral_norm(const Matrix& a) {
  require(a.size() > 0, "spectral_norm: empty matrix");
  require_finite(a, "spectral_norm");
  if (max_abs(a) == 0.0) return 0.0;

  // Power iteration on the Gram matrix, squaring the operator each step so
  // that step k applies (aᵀa)^(2^k). Close leading singular values would
  // otherwise need far more than the iteration cap.
  Matrix g = a.transpose() * a;
  Rng rng(kPowerSeed);
  Vector x(a.cols());
  for (Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  x.normalize();

  const Index cap = 10 * std::max(a.rows(), a.cols());
  double sigma2 = (a * x).squaredNorm();
  for (Index it = 0; it < cap; ++it) {
    Vector y = g * x;
    const double ny = y.norm();
    if (ny == 0.0) break;
    x = y / ny;
    const double next = (a * x).squaredNorm();
    const bool done = std::abs(next - sigma2) <= kPowerTol * next;
    sigma2 = next;
    if (done) break;
    g = g * g;
    g /= max_abs(g);
  }
  return std::sqrt(sigma2);
}

Matrix orthonormal_basis(const Matrix& x) {
  require_finite(x, "orthonormal_basis");
  Matrix basis(x.rows(), x.cols());
  Index rank = 0;
  for (Index j = 0; j < x.cols(); ++j) {
    const double original = x.col(j).norm();
    if (original == 0.0) continue;
    Vector v = x.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Index k = 0; k < rank; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    const double residual = v.norm();
    if (residual <= kRankTol * original) continue;
    basis.col(rank++) = v / residual;
  }
  return basis.leftCols(rank);
}

Vector principal_angle_cosines(const Matrix& x, const Matrix& y) {
  require(x.rows() == y.rows(), "principal_angle_cosines: row count mismatch");
  const Matrix u = orthonormal_basis(x);
  const Matrix v = orthonormal_basis(y);
  if (u.cols() == 0 || v.cols() == 0) return Vector(0);

  const Matrix s = u.transpose() * v;
  const Matrix gram = s.rows() <= s.cols() ? Matrix(s * s.transpose()) : Matrix(s.transpose() * s);
  const EigenPair eig = sym_eig(0.5 * (gram + gram.transpose()));
  Vector cosines(eig.values.size());
  for (Index i = 0; i < cosines.size(); ++i) cosines(i) = std::clamp(std::sqrt(std::max(0.0, eig.values(i))), 0.0, 1.0);
  return cosines;
}

}  // namespace mvcorr::linalg
