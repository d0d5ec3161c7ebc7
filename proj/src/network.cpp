#include "mvcorr/network.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "mvcorr/errors.hpp"
#include "mvcorr/objective.hpp"
#include "mvcorr/rng.hpp"
#include "mvcorr/tensor_io.hpp"

namespace mvcorr::nn {

namespace {

Matrix sigmoid(const Matrix& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

struct ForwardCache {
  std::vector<Matrix> activations;  // activations[0] is the input
  Eigen::VectorXd norms;            // column norms of the last activation
  Matrix output;
};

ForwardCache forward_cached(const SubNetwork& net, const Matrix& x) {
  require(x.rows() == net.input_dim(), "forward: input has " + std::to_string(x.rows()) + " rows, network expects " +
                                           std::to_string(net.input_dim()));
  ForwardCache c;
  c.activations.reserve(net.layers.size() + 1);
  c.activations.push_back(x);
  for (const Layer& layer : net.layers) {
    Matrix z = layer.weight * c.activations.back();
    z.colwise() += layer.bias;
    c.activations.push_back(sigmoid(z));
  }
  const Matrix& top = c.activations.back();
  c.norms = top.colwise().norm().transpose();
  c.output = top;
  for (Index j = 0; j < top.cols(); ++j)
    if (c.norms(j) > 0.0) c.output.col(j) /= c.norms(j);
  return c;
}

std::vector<Layer> backward(const SubNetwork& net, const ForwardCache& c, const Matrix& grad_output) {
  // Unit-norm layer: ∂u/∂a = (I − uuᵀ)/‖a‖ per column.
  Matrix da(grad_output.rows(), grad_output.cols());
  for (Index j = 0; j < grad_output.cols(); ++j) {
    if (c.norms(j) == 0.0) {
      da.col(j).setZero();
      continue;
    }
    const auto u = c.output.col(j);
    da.col(j) = (grad_output.col(j) - u * u.dot(grad_output.col(j))) / c.norms(j);
  }

  std::vector<Layer> grads(net.layers.size());
  for (std::size_t k = net.layers.size(); k-- > 0;) {
    const Matrix& a = c.activations[k + 1];
    const Matrix dz = (da.array() * a.array() * (1.0 - a.array())).matrix();
    grads[k].weight = dz * c.activations[k].transpose();
    grads[k].bias = dz.rowwise().sum();
    if (k > 0) da = net.layers[k].weight.transpose() * dz;
  }
  return grads;
}

std::vector<Layer> zeros_like(const SubNetwork& net) {
  std::vector<Layer> out;
  for (const Layer& l : net.layers) out.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  return out;
}

void check_batch(const MultiViewModel& model, const bootstrap::ViewBatch& batch) {
  require(batch.m() == model.subnets.size(), "batch has " + std::to_string(batch.m()) + " slots, model has " +
                                                 std::to_string(model.subnets.size()) + " sub-networks");
}

}  // namespace

Matrix forward(const SubNetwork& net, const Matrix& x) { return forward_cached(net, x).output; }

MultiViewModel init_model(int m, const std::vector<int>& widths, Index input_dim, std::uint64_t seed) {
  require(m >= 2, "init_model: m must be at least 2");
  require(!widths.empty(), "init_model: need at least one layer");
  require(input_dim >= 1, "init_model: input dimension must be positive");
  for (int w : widths) require(w >= 1, "init_model: layer widths must be positive");

  const Rng root(seed);
  MultiViewModel model;
  for (int s = 0; s < m; ++s) {
    Rng rng = root.split(static_cast<std::uint64_t>(s));
    SubNetwork net;
    Index fan_in = input_dim;
    for (int w : widths) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      Layer layer{Matrix(w, fan_in), Vector::Zero(w)};
      for (Index j = 0; j < layer.weight.cols(); ++j)
        for (Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = rng.uniform(-bound, bound);
      net.layers.push_back(std::move(layer));
      fan_in = w;
    }
    model.velocity.push_back(zeros_like(net));
    model.subnets.push_back(std::move(net));
  }
  return model;
}

bool EarlyStopping::update(double loss) {
  if (loss < best_ - delta_) {
    best_ = loss;
    wait_ = 0;
    return false;
  }
  ++wait_;
  return wait_ >= patience_;
}

BatchGradient batch_gradient(const MultiViewModel& model, const bootstrap::ViewBatch& batch, double nu) {
  check_batch(model, batch);
  const std::size_t m = model.subnets.size();
  std::vector<ForwardCache> caches(m);
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < m; ++s) caches[s] = forward_cached(model.subnets[s], batch.slots[s]);

  std::vector<Matrix> outputs;
  outputs.reserve(m);
  for (const ForwardCache& c : caches) outputs.push_back(c.output);
  const objective::LossGradient lg = objective::loss_and_grad(outputs, nu);

  BatchGradient out;
  out.loss = lg.loss;
  out.rho = lg.rho;
  out.grads.resize(m);
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < m; ++s) out.grads[s] = backward(model.subnets[s], caches[s], lg.grads[s]);
  return out;
}

double batch_loss(const MultiViewModel& model, const bootstrap::ViewBatch& batch, double nu) {
  check_batch(model, batch);
  std::vector<Matrix> outputs;
  for (std::size_t s = 0; s < model.subnets.size(); ++s) outputs.push_back(forward(model.subnets[s], batch.slots[s]));
  return objective::loss_value(outputs, nu);
}

namespace {

bool finite_state(const MultiViewModel& model, const bootstrap::ViewBatch& batch) {
  for (const Matrix& x : batch.slots)
    if (!x.allFinite()) return false;
  for (const SubNetwork& net : model.subnets)
    for (const Layer& l : net.layers)
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

}  // namespace

TrainReport train(MultiViewModel& model, const bootstrap::MultiViewDataset& data, const TrainConfig& cfg) {
  require(cfg.lr >= 0.0, "train: learning rate must be non-negative");
  require(cfg.momentum >= 0.0 && cfg.momentum < 1.0, "train: momentum must lie in [0,1)");
  require(cfg.nu >= 0.0 && cfg.nu <= 1.0, "train: nu must lie in [0,1]");
  require(cfg.max_epochs >= 1, "train: max_epochs must be positive");
  require(data.dim() == model.input_dim(), "train: dataset dimension " + std::to_string(data.dim()) +
                                               " does not match model input dimension " +
                                               std::to_string(model.input_dim()));
  if (data.empty()) throw bootstrap::EmptyDataset();

  TrainReport report;
  report.batch_size = cfg.batch.value_or(bootstrap::batch_size_for(static_cast<int>(model.d())));
  report.batches_per_epoch = (data.size() + report.batch_size - 1) / report.batch_size;

  Rng rng(cfg.seed);
  EarlyStopping stopper(cfg.early_stop_delta, cfg.early_stop_patience);
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    double rho_sum = 0.0;
    for (std::size_t b = 0; b < report.batches_per_epoch; ++b) {
      const bootstrap::ViewBatch batch = bootstrap::sample_batch(data, model.m(), report.batch_size, rng);
      BatchGradient g;
      try {
        g = batch_gradient(model, batch, cfg.nu);
      } catch (const ContractViolation&) {
        // Non-finite activations are rejected by the objective; report them as divergence.
        if (finite_state(model, batch)) throw;
        throw TrainingDiverged(epoch + 1, b + 1, std::numeric_limits<double>::quiet_NaN());
      }
      if (!std::isfinite(g.loss)) throw TrainingDiverged(epoch + 1, b + 1, g.loss);

      const double lr = cfg.lr / (1.0 + cfg.decay * static_cast<double>(model.steps));
      for (std::size_t s = 0; s < model.subnets.size(); ++s) {
        for (std::size_t k = 0; k < model.subnets[s].layers.size(); ++k) {
          Layer& p = model.subnets[s].layers[k];
          Layer& v = model.velocity[s][k];
          const Layer& d = g.grads[s][k];
          v.weight = cfg.momentum * v.weight - lr * d.weight;
          v.bias = cfg.momentum * v.bias - lr * d.bias;
          p.weight += v.weight;
          p.bias += v.bias;
        }
      }
      ++model.steps;
      loss_sum += g.loss;
      rho_sum += g.rho;
    }
    const double n = static_cast<double>(report.batches_per_epoch);
    model.history.push_back({loss_sum / n, rho_sum / n});
    report.epochs_run = epoch + 1;
    if (stopper.update(loss_sum / n)) {
      report.stopped_early = true;
      break;
    }
  }
  return report;
}

int pick_subnet(const MultiViewModel& model, std::uint64_t seed) {
  Rng rng(seed);
  return static_cast<int>(rng.index(model.subnets.size()));
}

Matrix embed(const MultiViewModel& model, const Matrix& x, std::optional<int> subnet_index, std::uint64_t seed) {
  const int idx = subnet_index.value_or(pick_subnet(model, seed));
  require(idx >= 0 && idx < model.m(), "embed: sub-network index " + std::to_string(idx) + " out of range");
  return forward(model.subnets[static_cast<std::size_t>(idx)], x);
}

void save_checkpoint(const MultiViewModel& model, std::ostream& out) {
  const std::size_t n_layers = model.subnets.front().layers.size();
  out << "MVCM1 " << model.m() << ' ' << model.d() << ' ' << n_layers << '\n';
  for (const SubNetwork& net : model.subnets) {
    for (const Layer& l : net.layers) {
      out << l.weight.rows() << ' ' << l.weight.cols() << '\n';
      for (Index i = 0; i < l.weight.rows(); ++i)
        for (Index j = 0; j < l.weight.cols(); ++j) io::write_f64(out, l.weight(i, j));
      for (Index i = 0; i < l.bias.size(); ++i) io::write_f64(out, l.bias(i));
    }
  }
}

MultiViewModel load_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw io::FormatError("missing checkpoint header");
  std::istringstream hs(line);
  std::string magic;
  int m = 0;
  Index d = 0;
  std::size_t n_layers = 0;
  if (!(hs >> magic >> m >> d >> n_layers) || magic != "MVCM1" || m < 1 || d < 1 || n_layers < 1)
    throw io::FormatError("bad checkpoint header: '" + line + "'");

  MultiViewModel model;
  for (int s = 0; s < m; ++s) {
    SubNetwork net;
    for (std::size_t k = 0; k < n_layers; ++k) {
      if (!std::getline(in, line)) throw io::FormatError("truncated checkpoint");
      std::istringstream ds(line);
      Index rows = 0, cols = 0;
      if (!(ds >> rows >> cols) || rows < 1 || cols < 1) throw io::FormatError("bad layer dims: '" + line + "'");
      if (k > 0 && cols != net.layers.back().weight.rows()) throw io::FormatError("layer shapes do not chain");
      Layer l{Matrix(rows, cols), Vector(rows)};
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) l.weight(i, j) = io::read_f64(in);
      for (Index i = 0; i < rows; ++i) l.bias(i) = io::read_f64(in);
      net.layers.push_back(std::move(l));
    }
    if (net.output_dim() != d) throw io::FormatError("final layer width does not match header d");
    if (!model.subnets.empty())
      for (std::size_t k = 0; k < n_layers; ++k) {
        const Matrix& ref = model.subnets.front().layers[k].weight;
        if (net.layers[k].weight.rows() != ref.rows() || net.layers[k].weight.cols() != ref.cols())
          throw io::FormatError("sub-networks differ in layer shapes");
      }
    model.velocity.push_back(zeros_like(net));
    model.subnets.push_back(std::move(net));
  }
  return model;
}

}  // namespace mvcorr::nn
