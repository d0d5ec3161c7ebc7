#pragma once

// View bootstrapping: each training batch draws n instances, and for each
// instance m views with replacement. Slots carry no view identity.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mvcorr/rng.hpp"

namespace mvcorr::bootstrap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Instance {
  int id = 0;
  int label = 0;
  std::vector<Vector> views;  ///< each of length dim; view labels are not kept
};

class MultiViewDataset {
 public:
  explicit MultiViewDataset(Index dim) : dim_(dim) {}

  /// Throws ContractViolation if the instance has no views or a view has the wrong length.
  void add(Instance instance);

  Index dim() const { return dim_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  const Instance& operator[](std::size_t i) const { return instances_[i]; }
  const std::vector<Instance>& instances() const { return instances_; }

 private:
  Index dim_;
  std::vector<Instance> instances_;
};

/// n instances × m slots × D features, stored slot-major: slots[s] is D×n and
/// column i holds the view drawn for instance i in slot s.
struct ViewBatch {
  std::vector<Matrix> slots;
  std::vector<int> instance_ids;

  std::size_t m() const { return slots.size(); }
  Index n() const { return slots.empty() ? 0 : slots[0].cols(); }
};

/// ceil(d ln d).
std::size_t batch_size_for(int d);

enum class BudgetMode { Theoretical, Practical };

/// Theoretical: floor(√d). Practical: max(2, round(d^{2/5})).
int max_subnetworks(int d, BudgetMode mode);

/// Thrown when sampling from an empty dataset.
class EmptyDataset : public std::runtime_error {
 public:
  EmptyDataset() : std::runtime_error("cannot sample a batch from an empty dataset") {}
};

ViewBatch sample_batch(const MultiViewDataset& data, int m, std::size_t n, Rng& rng);

}  // namespace mvcorr::bootstrap
