#pragma once

// On-disk containers.
//
// Tensor file: ASCII line "MVT1 <N> <M> <D>\n" followed by N·M·D float64
// values, little-endian, instance-major, then view, then feature.
// Labels file: one integer per line.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvcorr/bootstrap.hpp"

namespace mvcorr::io {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_f64(std::ostream& out, double value);
double read_f64(std::istream& in);

struct Tensor {
  Index n = 0;
  Index m = 0;
  Index d = 0;
  std::vector<double> values;

  double& at(Index i, Index v, Index f) { return values[static_cast<std::size_t>((i * m + v) * d + f)]; }
  double at(Index i, Index v, Index f) const { return values[static_cast<std::size_t>((i * m + v) * d + f)]; }
};

/// Packs M views (each d×N) into an N×M×d tensor.
Tensor tensor_from_views(const std::vector<Matrix>& views);
/// Unpacks into M matrices of shape d×N.
std::vector<Matrix> views_from_tensor(const Tensor& t);

void write_tensor(std::ostream& out, const Tensor& t);
Tensor read_tensor(std::istream& in);

void write_labels(std::ostream& out, const std::vector<int>& labels);
std::vector<int> read_labels(std::istream& in);

/// Every instance gets all of its views; instance ids are row indices.
bootstrap::MultiViewDataset dataset_from_tensor(const Tensor& t, const std::vector<int>& labels);

/// Writes through `path.tmp` and renames into place; nothing is left at
/// `path` if the writer throws.
void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

Tensor load_tensor(const std::filesystem::path& path);
std::vector<int> load_labels(const std::filesystem::path& path);

}  // namespace mvcorr::io
