#pragma once

// m fully-connected sub-networks with identical shapes and independent
// weights, trained jointly on the mv-corr loss over bootstrapped view batches.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvcorr/bootstrap.hpp"

namespace mvcorr::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Layer {
  Matrix weight;  ///< out × in
  Vector bias;    ///< out
};

/// Sigmoid at every layer; the last layer's output columns are scaled to unit
/// L2 norm (all-zero columns stay zero).
struct SubNetwork {
  std::vector<Layer> layers;

  Index input_dim() const { return layers.front().weight.cols(); }
  Index output_dim() const { return layers.back().weight.rows(); }
};

Matrix forward(const SubNetwork& net, const Matrix& x);

struct EpochStats {
  double loss = 0.0;
  double rho = 0.0;
};

struct MultiViewModel {
  std::vector<SubNetwork> subnets;
  std::vector<std::vector<Layer>> velocity;  ///< momentum buffers, same shapes as the layers
  std::vector<EpochStats> history;
  std::uint64_t steps = 0;

  int m() const { return static_cast<int>(subnets.size()); }
  Index d() const { return subnets.front().output_dim(); }
  Index input_dim() const { return subnets.front().input_dim(); }
};

/// Weights uniform in ±1/√fan_in, zero biases, independent per sub-network.
MultiViewModel init_model(int m, const std::vector<int>& widths, Index input_dim, std::uint64_t seed);

struct TrainConfig {
  double lr = 0.01;
  double momentum = 0.9;
  double decay = 1e-6;
  double nu = 0.2;
  int max_epochs = 100;
  double early_stop_delta = 1e-3;
  int early_stop_patience = 5;
  std::optional<std::size_t> batch;  ///< defaults to batch_size_for(d)
  std::uint64_t seed = 0;
};

/// Stop once the loss has failed to beat the best seen by `delta` for
/// `patience` consecutive epochs.
class EarlyStopping {
 public:
  EarlyStopping(double delta, int patience) : delta_(delta), patience_(patience) {}
  /// Returns true when training should stop after this epoch.
  bool update(double loss);
  int waited() const { return wait_; }

 private:
  double delta_;
  int patience_;
  double best_ = std::numeric_limits<double>::infinity();
  int wait_ = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, std::size_t batch, double loss)
      : std::runtime_error("non-finite loss " + std::to_string(loss) + " at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch)) {}
};

struct TrainReport {
  int epochs_run = 0;
  bool stopped_early = false;
  std::size_t batch_size = 0;
  std::size_t batches_per_epoch = 0;
};

/// Runs SGD with momentum and inverse-time decay until early stopping or
/// cfg.max_epochs. Appends one EpochStats per epoch to model.history.
TrainReport train(MultiViewModel& model, const bootstrap::MultiViewDataset& data, const TrainConfig& cfg);

/// Gradient of the batch loss with respect to every parameter, laid out like
/// the model's layers. Exposed for gradient checking.
struct BatchGradient {
  double loss = 0.0;
  double rho = 0.0;
  std::vector<std::vector<Layer>> grads;
};
BatchGradient batch_gradient(const MultiViewModel& model, const bootstrap::ViewBatch& batch, double nu);

/// Batch loss 1 − rho for the given slot assignment.
double batch_loss(const MultiViewModel& model, const bootstrap::ViewBatch& batch, double nu);

/// Embeds with a single sub-network. Without an index one is picked from `seed`.
Matrix embed(const MultiViewModel& model, const Matrix& x, std::optional<int> subnet_index = std::nullopt,
             std::uint64_t seed = 0);
int pick_subnet(const MultiViewModel& model, std::uint64_t seed);

/// Checkpoint: "MVCM1 m d n_layers\n", then for each sub-network and layer a
/// "rows cols\n" line followed by the row-major little-endian float64 weight
/// block and the bias block. Optimizer state and history are not stored.
void save_checkpoint(const MultiViewModel& model, std::ostream& out);
MultiViewModel load_checkpoint(std::istream& in);

}  // namespace mvcorr::nn
