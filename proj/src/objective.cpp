#include "mvcorr/objective.hpp"

namespace mvcorr::objective {

namespace {

Matrix factor_shrunk(const Matrix& r_w_shrunk) {
  try {
    return linalg::cholesky(r_w_shrunk);
  } catch (const linalg::NotPositiveDefinite& e) {
    throw ShrinkageRequired(e);
  }
}

double normalizer(const cov::CovarianceSet& cov) {
  require(cov.m >= 2, "mv_corr: need at least 2 views");
  return static_cast<double>(cov.dim()) * static_cast<double>(cov.m - 1);
}

}  // namespace

MvCorrResult mv_corr(const cov::CovarianceSet& cov, bool with_subspace) {
  const double scale = normalizer(cov);
  const Matrix l = factor_shrunk(cov.r_w_shrunk);
  MvCorrResult out;
  out.rho = linalg::cholesky_solve(l, cov.r_b).trace() / scale;
  out.loss = 1.0 - out.rho;
  out.m = cov.m;
  out.d = cov.dim();
  if (with_subspace) out.subspace = shared_subspace(cov);
  return out;
}

EigenPair shared_subspace(const cov::CovarianceSet& cov) {
  try {
    return linalg::gev_solve(cov.r_b, cov.r_w_shrunk);
  } catch (const linalg::NotPositiveDefinite& e) {
    throw ShrinkageRequired(e);
  }
}

LossGradient loss_and_grad(std::span<const Matrix> embeddings, double nu) {
  require(embeddings.size() >= 2, "grad_loss: need at least 2 views");
  require(embeddings[0].cols() >= 2, "grad_loss: need at least 2 samples");

  std::vector<Matrix> centered;
  centered.reserve(embeddings.size());
  for (const Matrix& h : embeddings) centered.push_back(cov::center_columns(h));
  const cov::CovarianceSet c = cov::estimate_centered(centered, nu);

  const Index d = c.dim();
  const double m = static_cast<double>(c.m);
  const double scale = normalizer(c);

  const Matrix l = factor_shrunk(c.r_w_shrunk);
  Matrix inv = linalg::cholesky_solve(l, Matrix::Identity(d, d));
  inv = 0.5 * (inv + inv.transpose());

  LossGradient out;
  out.rho = (inv * c.r_b).trace() / scale;
  out.loss = 1.0 - out.rho;

  // f = Tr(R̃⁻¹ R_b);  df = <R̃⁻¹, dR_t> − <R̃⁻¹ + C_w, dR_w>, where C_w is the
  // pullback of R̃⁻¹ R_b R̃⁻¹ through the shrinkage map.
  Matrix g_w = inv * c.r_b * inv;
  g_w = 0.5 * (g_w + g_w.transpose());
  Matrix c_w = (1.0 - nu) * g_w;
  c_w.diagonal().array() += nu * g_w.trace() / static_cast<double>(d);
  const Matrix within_weight = inv + c_w;

  Matrix total = centered[0];
  for (std::size_t k = 1; k < centered.size(); ++k) total += centered[k];
  const Matrix shared = inv * total;

  const double coeff = -2.0 / (m * scale);
  out.grads.reserve(centered.size());
  for (const Matrix& x : centered) {
    Matrix g = coeff * (shared - within_weight * x);
    // Pull back through centering (right-multiplication by I − 11ᵀ/N).
    const Eigen::VectorXd mean = g.rowwise().mean();
    g.colwise() -= mean;
    out.grads.push_back(std::move(g));
  }
  return out;
}

std::vector<Matrix> grad_loss(std::span<const Matrix> embeddings, double nu) {
  return loss_and_grad(embeddings, nu).grads;
}

double loss_value(std::span<const Matrix> embeddings, double nu) {
  return 1.0 - mv_corr(cov::estimate(embeddings, nu)).rho;
}

}  // namespace mvcorr::objective
