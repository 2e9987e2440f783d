#include "vark/matrix.hpp"

#include <utility>

#include "vark/error.hpp"

namespace vark {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::WidthMismatch, "matrix data size does not match rows * cols");
  }
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace vark
