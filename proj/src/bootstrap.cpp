#include "mvcorr/bootstrap.hpp"

#include <cmath>

#include "mvcorr/errors.hpp"

namespace mvcorr::bootstrap {

void MultiViewDataset::add(Instance instance) {
  require(!instance.views.empty(), "MultiViewDataset: instance has no views");
  for (const Vector& v : instance.views) require(v.size() == dim_, "MultiViewDataset: view dimension mismatch");
  instances_.push_back(std::move(instance));
}

std::size_t batch_size_for(int d) {
  require(d >= 2, "batch_size_for: d must be at least 2");
  const double dd = static_cast<double>(d);
  return static_cast<std::size_t>(std::ceil(dd * std::log(dd)));
}

int max_subnetworks(int d, BudgetMode mode) {
  require(d >= 1, "max_subnetworks: d must be positive");
  if (mode == BudgetMode::Theoretical) {
    int r = static_cast<int>(std::sqrt(static_cast<double>(d)));
    while ((r + 1) * (r + 1) <= d) ++r;
    while (r * r > d) --r;
    return r;
  }
  return std::max(2, static_cast<int>(std::lround(std::pow(static_cast<double>(d), 0.4))));
}

ViewBatch sample_batch(const MultiViewDataset& data, int m, std::size_t n, Rng& rng) {
  require(m >= 2, "sample_batch: m must be at least 2");
  require(n >= 1, "sample_batch: n must be positive");
  if (data.empty()) throw EmptyDataset();

  ViewBatch batch;
  batch.slots.assign(static_cast<std::size_t>(m), Matrix(data.dim(), static_cast<Index>(n)));
  batch.instance_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Instance& inst = data[rng.index(data.size())];
    batch.instance_ids[i] = inst.id;
    for (int s = 0; s < m; ++s) {
      const Vector& v = inst.views[rng.index(inst.views.size())];
      batch.slots[static_cast<std::size_t>(s)].col(static_cast<Index>(i)) = v;
    }
  }
  return batch;
}

}  // namespace mvcorr::bootstrap
