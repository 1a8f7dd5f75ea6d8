#include "core/dense_matrix.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace rpcs {

DenseMatrix::DenseMatrix(index_t rows, index_t cols) {
  if (rows < 0 || cols < 0) fail_invalid("matrix dimensions must be nonnegative");
  rows_ = rows;
  cols_ = cols;
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

DenseMatrix::DenseMatrix(index_t rows, index_t cols, std::vector<double> data) {
  if (rows < 0 || cols < 0) fail_invalid("matrix dimensions must be nonnegative");
  const std::size_t want = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (data.size() != want)
    fail_invalid("matrix data size " + std::to_string(data.size()) + " does not match " +
                 std::to_string(rows) + "x" + std::to_string(cols));
  rows_ = rows;
  cols_ = cols;
  data_ = std::move(data);
  if (!all_finite()) fail_invalid("matrix data contains a non-finite entry");
}

DenseMatrix DenseMatrix::identity(index_t n) {
  DenseMatrix m(n, n);
  for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace rpcs
