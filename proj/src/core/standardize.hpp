#pragma once

#include <vector>

#include "core/dense_matrix.hpp"

namespace rpcs {

// Design matrix with columns centered to mean 0 and scaled to unit sample
// standard deviation (divisor n-1), plus the centered response. The response
// is centered only, never scaled. Means/scales are kept so callers can map
// results back to the raw data.
struct StandardizedData {
  DenseMatrix x;
  std::vector<double> y_tilde;
  index_t n = 0;
  index_t p = 0;
  std::vector<double> column_means;
  std::vector<double> column_scales;
  double y_bar = 0.0;
};

// Throws a data error naming the column index when a column is constant
// (sample SD below 1e-12 relative to the column's magnitude); n < 3 or shape
// mismatch is an invalid-argument error.
StandardizedData standardize(const DenseMatrix& x_raw, const std::vector<double>& y_raw);

}  // namespace rpcs
