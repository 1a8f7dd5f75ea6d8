#pragma once

#include <cstdint>
#include <vector>

namespace rpcs {

using index_t = std::int64_t;

// Column-major dense matrix of doubles. Column-major is load-bearing: the hot
// kernels walk column prefixes, and contiguous columns keep their summation
// order independent of the thread count.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(index_t rows, index_t cols);  // zero-initialized
  // Takes ownership of `data`, laid out column-major, size rows*cols.
  // Rejects size mismatches and non-finite entries.
  DenseMatrix(index_t rows, index_t cols, std::vector<double> data);

  static DenseMatrix identity(index_t n);

  index_t rows() const noexcept { return rows_; }
  index_t cols() const noexcept { return cols_; }

  double& operator()(index_t i, index_t j) noexcept { return data_[static_cast<std::size_t>(j) * rows_ + i]; }
  double operator()(index_t i, index_t j) const noexcept { return data_[static_cast<std::size_t>(j) * rows_ + i]; }

  double* col(index_t j) noexcept { return data_.data() + static_cast<std::size_t>(j) * rows_; }
  const double* col(index_t j) const noexcept { return data_.data() + static_cast<std::size_t>(j) * rows_; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool all_finite() const noexcept;

private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<double> data_;
};

// Upper-triangular Cholesky factor S with W = S^T S. Only linalg.cpp builds
// these; strictly-lower entries are exact zeros.
struct CholeskyFactor {
  DenseMatrix s;
  index_t dim() const noexcept { return s.rows(); }
};

}  // namespace rpcs
