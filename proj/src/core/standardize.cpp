#include "core/standardize.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace rpcs {

StandardizedData standardize(const DenseMatrix& x_raw, const std::vector<double>& y_raw) {
  const index_t n = x_raw.rows();
  const index_t p = x_raw.cols();
  if (n < 3) fail_invalid("standardize: need at least 3 observations, got " + std::to_string(n));
  if (p < 1) fail_invalid("standardize: design matrix has no columns");
  if (static_cast<index_t>(y_raw.size()) != n)
    fail_invalid("standardize: response length " + std::to_string(y_raw.size()) +
                 " does not match row count " + std::to_string(n));
  for (double v : y_raw)
    if (!std::isfinite(v)) fail_invalid("standardize: response contains a non-finite value");

  StandardizedData out;
  out.n = n;
  out.p = p;
  out.x = DenseMatrix(n, p);
  out.column_means.resize(p);
  out.column_scales.resize(p);

  for (index_t j = 0; j < p; ++j) {
    const double* src = x_raw.col(j);
    double sum = 0.0;
    for (index_t i = 0; i < n; ++i) sum += src[i];
    const double mean = sum / static_cast<double>(n);

    double ss = 0.0, amax = 0.0;
    for (index_t i = 0; i < n; ++i) {
      const double d = src[i] - mean;
      ss += d * d;
      amax = std::max(amax, std::abs(src[i]));
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd <= 1e-12 * std::max(1.0, amax))
      fail_data("standardize: column " + std::to_string(j) + " is constant");

    out.column_means[j] = mean;
    out.column_scales[j] = sd;
    double* dst = out.x.col(j);
    for (index_t i = 0; i < n; ++i) dst[i] = (src[i] - mean) / sd;
  }

  double ysum = 0.0;
  for (index_t i = 0; i < n; ++i) ysum += y_raw[i];
  out.y_bar = ysum / static_cast<double>(n);
  out.y_tilde.resize(n);
  for (index_t i = 0; i < n; ++i) out.y_tilde[i] = y_raw[i] - out.y_bar;
  return out;
}

}  // namespace rpcs
