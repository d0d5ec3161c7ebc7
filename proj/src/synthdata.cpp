#include "mvcorr/synthdata.hpp"

#include <cmath>

#include "mvcorr/errors.hpp"
#include "mvcorr/linalg.hpp"

namespace mvcorr::synth {

namespace {

Matrix mapping(Index rows, Index cols, Rng& rng) {
  Matrix o = random_orthonormal(rows, cols, rng);
  for (Index j = 0; j < cols; ++j) o.col(j) *= std::exp(rng.normal());
  return o;
}

}  // namespace

void validate(const SynthParams& p) {
  require(p.n >= 2, "synth: n must be at least 2");
  require(p.k >= 1 && p.k < p.dim, "synth: need 1 <= k < dim");
  require(p.m_views >= 2, "synth: need at least 2 views");
  require(p.classes >= 1, "synth: classes must be positive");
  require(p.alpha >= 0.0 && p.alpha <= 1.0, "synth: alpha must lie in [0,1]");
  require(p.beta >= 0.0 && p.beta <= 1.0, "synth: beta must lie in [0,1]");
  require(p.noise_sigma >= 0.0, "synth: noise_sigma must be non-negative");
}

Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  require(cols <= rows, "random_orthonormal: more columns than rows");
  for (;;) {
    Matrix q = linalg::orthonormal_basis(rng.normal_matrix(rows, cols));
    if (q.cols() == cols) return q;
  }
}

Matrix z_normalize_rows(const Matrix& x) {
  Matrix out = x.colwise() - x.rowwise().mean();
  const double n = static_cast<double>(x.cols());
  for (Index i = 0; i < out.rows(); ++i) {
    const double sd = std::sqrt(out.row(i).squaredNorm() / n);
    if (sd > 0.0) out.row(i) /= sd;
  }
  return out;
}

SyntheticDataset generate(const SynthParams& p) {
  validate(p);
  const Rng root(p.seed);
  const auto views = static_cast<std::size_t>(p.m_views);
  const auto classes = static_cast<std::size_t>(p.classes);

  SyntheticDataset out;
  out.params = p;
  out.labels.resize(static_cast<std::size_t>(p.n));
  for (Index i = 0; i < p.n; ++i) out.labels[static_cast<std::size_t>(i)] = static_cast<int>(i % p.classes);

  // Shared latent source, identical for every view.
  Rng signal_rng = root.split(0);
  std::vector<Eigen::VectorXd> offsets(classes, Eigen::VectorXd::Zero(p.k));
  if (p.classes > 1)
    for (auto& mu : offsets) mu = p.class_separation * signal_rng.normal_matrix(p.k, 1);
  Matrix s = signal_rng.normal_matrix(p.k, p.n);
  for (Index i = 0; i < p.n; ++i) s.col(i) += offsets[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])];

  std::vector<Matrix> x_s(views);
  std::vector<Matrix> x_b(views);
#pragma omp parallel for schedule(static)
  for (std::size_t l = 0; l < views; ++l) {
    Rng rng = root.split(1 + l);
    std::vector<Matrix> a_s;
    for (std::size_t c = 0; c < classes; ++c) a_s.push_back(mapping(p.dim, p.k, rng));
    const Matrix a_b = mapping(p.dim, p.dim, rng);

    Matrix signal(p.dim, p.n);
    if (classes == 1) {
      signal = a_s[0] * s;
    } else {
      for (Index i = 0; i < p.n; ++i)
        signal.col(i) = a_s[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])] * s.col(i);
    }
    signal += p.noise_sigma * rng.normal_matrix(p.dim, p.n);
    x_s[l] = z_normalize_rows(signal);
    x_b[l] = z_normalize_rows(a_b * rng.normal_matrix(p.dim, p.n));
  }

  out.measurements.resize(views);
  for (std::size_t l = 0; l < views; ++l) {
    const Matrix noise = p.alpha * x_b[l] + (1.0 - p.alpha) * x_b[(l + 1) % views];
    out.measurements[l] = z_normalize_rows(p.beta * x_s[l] + (1.0 - p.beta) * noise);
  }
  out.signal.assign(views, s);
  return out;
}

bootstrap::MultiViewDataset to_multiview_dataset(const SyntheticDataset& synth) {
  const Index dim = synth.measurements.front().rows();
  const Index n = synth.measurements.front().cols();
  bootstrap::MultiViewDataset data(dim);
  for (Index i = 0; i < n; ++i) {
    bootstrap::Instance inst;
    inst.id = static_cast<int>(i);
    inst.label = synth.labels[static_cast<std::size_t>(i)];
    for (const Matrix& view : synth.measurements) inst.views.emplace_back(view.col(i));
    data.add(std::move(inst));
  }
  return data;
}

}  // namespace mvcorr::synth
