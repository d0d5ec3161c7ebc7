#include "mvcorr/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mvcorr/errors.hpp"

namespace mvcorr::io {

void write_f64(std::ostream& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffU);
  out.write(bytes, 8);
}

double read_f64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("unexpected end of binary block");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

Tensor tensor_from_views(const std::vector<Matrix>& views) {
  require(!views.empty(), "tensor_from_views: no views");
  Tensor t;
  t.m = static_cast<Index>(views.size());
  t.d = views[0].rows();
  t.n = views[0].cols();
  t.values.resize(static_cast<std::size_t>(t.n * t.m * t.d));
  for (Index v = 0; v < t.m; ++v) {
    const Matrix& x = views[static_cast<std::size_t>(v)];
    require(x.rows() == t.d && x.cols() == t.n, "tensor_from_views: view shape mismatch");
    for (Index i = 0; i < t.n; ++i)
      for (Index f = 0; f < t.d; ++f) t.at(i, v, f) = x(f, i);
  }
  return t;
}

std::vector<Matrix> views_from_tensor(const Tensor& t) {
  std::vector<Matrix> views(static_cast<std::size_t>(t.m), Matrix(t.d, t.n));
  for (Index i = 0; i < t.n; ++i)
    for (Index v = 0; v < t.m; ++v)
      for (Index f = 0; f < t.d; ++f) views[static_cast<std::size_t>(v)](f, i) = t.at(i, v, f);
  return views;
}

void write_tensor(std::ostream& out, const Tensor& t) {
  out << "MVT1 " << t.n << ' ' << t.m << ' ' << t.d << '\n';
  for (double x : t.values) write_f64(out, x);
}

Tensor read_tensor(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("missing tensor header");
  std::istringstream hs(header);
  std::string magic;
  Tensor t;
  if (!(hs >> magic >> t.n >> t.m >> t.d) || magic != "MVT1") throw FormatError("bad tensor header: '" + header + "'");
  if (t.n < 1 || t.m < 1 || t.d < 1) throw FormatError("tensor dimensions must be positive");
  t.values.resize(static_cast<std::size_t>(t.n * t.m * t.d));
  for (double& x : t.values) x = read_f64(in);
  return t;
}

void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int l : labels) out << l << '\n';
}

std::vector<int> read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(line, &used);
    } catch (const std::exception&) {
      throw FormatError("bad label line: '" + line + "'");
    }
    if (used != line.size()) throw FormatError("bad label line: '" + line + "'");
    labels.push_back(value);
  }
  return labels;
}

bootstrap::MultiViewDataset dataset_from_tensor(const Tensor& t, const std::vector<int>& labels) {
  require(labels.empty() || static_cast<Index>(labels.size()) == t.n, "dataset_from_tensor: label count mismatch");
  bootstrap::MultiViewDataset data(t.d);
  for (Index i = 0; i < t.n; ++i) {
    bootstrap::Instance inst;
    inst.id = static_cast<int>(i);
    inst.label = labels.empty() ? 0 : labels[static_cast<std::size_t>(i)];
    inst.views.reserve(static_cast<std::size_t>(t.m));
    for (Index v = 0; v < t.m; ++v) {
      Eigen::VectorXd x(t.d);
      for (Index f = 0; f < t.d; ++f) x(f) = t.at(i, v, f);
      inst.views.push_back(std::move(x));
    }
    data.add(std::move(inst));
  }
  return data;
}

void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw;
    }
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError(path, "write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path, "rename failed");
  }
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  try {
    return read_tensor(in);
  } catch (const FormatError& e) {
    throw IoError(path, e.what());
  }
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  try {
    return read_labels(in);
  } catch (const FormatError& e) {
    throw IoError(path, e.what());
  }
}

}  // namespace mvcorr::io
