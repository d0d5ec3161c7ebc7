#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "mvcorr/bootstrap.hpp"
#include "mvcorr/errors.hpp"

using namespace mvcorr;
using namespace mvcorr::bootstrap;

namespace {

// Instance i has `views` views; view v is the constant vector 100 i + v.
MultiViewDataset tagged_dataset(int instances, int views, Index dim = 3) {
  MultiViewDataset data(dim);
  for (int i = 0; i < instances; ++i) {
    Instance inst;
    inst.id = i;
    for (int v = 0; v < views; ++v) inst.views.push_back(Vector::Constant(dim, 100.0 * i + v));
    data.add(std::move(inst));
  }
  return data;
}

}  // namespace

TEST(BatchSize, PaperValues) {
  EXPECT_EQ(batch_size_for(64), 267u);
  EXPECT_EQ(batch_size_for(16), 45u);
  EXPECT_EQ(batch_size_for(2), 2u);
}

TEST(BatchSize, MatchesFormulaOverGrid) {
  for (int d = 2; d <= 512; ++d)
    EXPECT_EQ(batch_size_for(d), static_cast<std::size_t>(std::ceil(d * std::log(static_cast<double>(d))))) << d;
}

TEST(BatchSize, RejectsTinyDimension) {
  EXPECT_THROW(batch_size_for(1), ContractViolation);
  EXPECT_THROW(batch_size_for(0), ContractViolation);
}

TEST(MaxSubnetworks, PaperValues) {
  EXPECT_EQ(max_subnetworks(64, BudgetMode::Theoretical), 8);
  EXPECT_EQ(max_subnetworks(40, BudgetMode::Theoretical), 6);
  EXPECT_EQ(max_subnetworks(64, BudgetMode::Practical), 5);
}

TEST(MaxSubnetworks, PracticalNeverExceedsTheoretical) {
  for (int d = 6; d <= 256; ++d)
    EXPECT_LE(max_subnetworks(d, BudgetMode::Practical), max_subnetworks(d, BudgetMode::Theoretical)) << d;
  EXPECT_EQ(max_subnetworks(4, BudgetMode::Theoretical), 2);
  EXPECT_EQ(max_subnetworks(4, BudgetMode::Practical), 2);
  EXPECT_EQ(max_subnetworks(5, BudgetMode::Theoretical), 2);
  EXPECT_EQ(max_subnetworks(5, BudgetMode::Practical), 2);
}

TEST(Dataset, RejectsEmptyInstanceAndWrongLength) {
  MultiViewDataset data(3);
  EXPECT_THROW(data.add(Instance{}), ContractViolation);
  Instance bad;
  bad.views.push_back(Vector::Zero(4));
  EXPECT_THROW(data.add(bad), ContractViolation);
}

TEST(SampleBatch, SingleViewIsRepeated) {
  const MultiViewDataset data = tagged_dataset(1, 1);
  Rng rng(1);
  const ViewBatch b = sample_batch(data, 4, 5, rng);
  ASSERT_EQ(b.m(), 4u);
  ASSERT_EQ(b.n(), 5);
  for (const Matrix& slot : b.slots) EXPECT_EQ(slot, Matrix::Zero(3, 5));
}

TEST(SampleBatch, SameSeedSameBatch) {
  const MultiViewDataset data = tagged_dataset(20, 6);
  Rng a(7), b(7);
  const ViewBatch x = sample_batch(data, 3, 11, a);
  const ViewBatch y = sample_batch(data, 3, 11, b);
  EXPECT_EQ(x.instance_ids, y.instance_ids);
  for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(x.slots[s], y.slots[s]);
}

TEST(SampleBatch, ColumnsBelongToTheSampledInstance) {
  const MultiViewDataset data = tagged_dataset(30, 5);
  Rng rng(2);
  const ViewBatch b = sample_batch(data, 4, 50, rng);
  for (Index j = 0; j < b.n(); ++j) {
    const int id = b.instance_ids[static_cast<std::size_t>(j)];
    for (const Matrix& slot : b.slots) {
      const double v = slot(0, j) - 100.0 * id;
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 5.0);
    }
  }
}

TEST(SampleBatch, ViewFrequenciesAreUniform) {
  const MultiViewDataset data = tagged_dataset(1, 10, 1);
  Rng rng(3);
  const int draws = 100000;
  const ViewBatch b = sample_batch(data, 2, draws / 2, rng);
  std::map<int, int> counts;
  for (const Matrix& slot : b.slots)
    for (Index j = 0; j < b.n(); ++j) ++counts[static_cast<int>(slot(0, j))];
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  ASSERT_EQ(counts.size(), 10u);
  for (const auto& [view, c] : counts) EXPECT_LT(std::abs(c - draws * 0.1), 3.0 * sigma) << "view " << view;
}

TEST(SampleBatch, InstancesAreDrawnWithReplacement) {
  const MultiViewDataset data = tagged_dataset(3, 2);
  Rng rng(4);
  const ViewBatch b = sample_batch(data, 2, 30, rng);
  std::vector<int> ids = b.instance_ids;
  std::sort(ids.begin(), ids.end());
  EXPECT_LT(std::unique(ids.begin(), ids.end()) - ids.begin(), 30);
}

TEST(SampleBatch, RelabelingViewsRelabelsDrawsOnly) {
  // Reversing each instance's view order changes which vector lands in a slot
  // but not the draw sequence: slot entries map through the same permutation.
  MultiViewDataset a = tagged_dataset(8, 4), b(3);
  for (const Instance& inst : a.instances()) {
    Instance rev = inst;
    std::reverse(rev.views.begin(), rev.views.end());
    b.add(rev);
  }
  Rng ra(5), rb(5);
  const ViewBatch x = sample_batch(a, 3, 40, ra);
  const ViewBatch y = sample_batch(b, 3, 40, rb);
  EXPECT_EQ(x.instance_ids, y.instance_ids);
  for (std::size_t s = 0; s < 3; ++s)
    for (Index j = 0; j < 40; ++j) {
      const double base = 100.0 * x.instance_ids[static_cast<std::size_t>(j)];
      EXPECT_EQ(x.slots[s](0, j) - base, 3.0 - (y.slots[s](0, j) - base));
    }
}

TEST(SampleBatch, Errors) {
  MultiViewDataset empty(3);
  Rng rng(6);
  EXPECT_THROW(sample_batch(empty, 2, 4, rng), EmptyDataset);
  const MultiViewDataset data = tagged_dataset(2, 2);
  EXPECT_THROW(sample_batch(data, 1, 4, rng), ContractViolation);
}
