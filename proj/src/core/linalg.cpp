#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "core/errors.hpp"
#include "core/threads.hpp"

namespace rpcs {

double dot(const double* a, const double* b, index_t n) noexcept {
  double acc = 0.0;
  for (index_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

namespace {
// Tile width for gram_ridge. Fixed so the work split (and thus each entry's
// exact instruction sequence) never depends on the thread count.
constexpr index_t kGramTile = 48;
}  // namespace

DenseMatrix gram_ridge(const DenseMatrix& x, double lambda, int threads) {
  const index_t n = x.rows();
  const index_t p = x.cols();
  if (n == 0) fail_invalid("gram_ridge: x has no rows");
  if (p == 0) fail_invalid("gram_ridge: x has no columns");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail_invalid("gram_ridge: lambda must be positive and finite");

  DenseMatrix w(n, n);
  const index_t ntiles = (n + kGramTile - 1) / kGramTile;
  const int nt = resolve_threads(threads);

  // Each tile owns output columns [t0, t1): disjoint writes, and for every
  // entry the j-sum runs 0..p-1 in order no matter which thread takes it.
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt) if (nt > 1)
  for (index_t tile = 0; tile < ntiles; ++tile) {
    const index_t t0 = tile * kGramTile;
    const index_t t1 = std::min(t0 + kGramTile, n);
    for (index_t j = 0; j < p; ++j) {
      const double* xj = x.col(j);
      for (index_t i = t0; i < t1; ++i) {
        const double c = xj[i];
        double* wi = w.col(i);
        for (index_t l = 0; l <= i; ++l) wi[l] += c * xj[l];
      }
    }
  }

  for (index_t i = 0; i < n; ++i) {
    w(i, i) += lambda;
    for (index_t l = 0; l < i; ++l) w(i, l) = w(l, i);
  }
  return w;
}

CholeskyFactor cholesky(const DenseMatrix& w) {
  const index_t n = w.rows();
  if (n == 0 || w.cols() != n) fail_invalid("cholesky: matrix must be square and nonempty");

  double max_diag = 0.0;
  for (index_t i = 0; i < n; ++i) max_diag = std::max(max_diag, w(i, i));
  const double pivot_floor = 1e-12 * max_diag;

  DenseMatrix s(n, n);
  for (index_t j = 0; j < n; ++j) {
    double* sj = s.col(j);
    for (index_t i = 0; i < j; ++i) {
      const double v = (w(i, j) - dot(s.col(i), sj, i)) / s(i, i);
      sj[i] = v;
    }
    const double pivot = w(j, j) - dot(sj, sj, j);
    if (!(pivot > pivot_floor) || !std::isfinite(pivot)) {
      char detail[96];
      std::snprintf(detail, sizeof(detail), " (value %.3g, floor %.3g)", pivot, pivot_floor);
      fail_numeric("cholesky: pivot " + std::to_string(j) + " is not positive" + detail);
    }
    sj[j] = std::sqrt(pivot);
  }
  return CholeskyFactor{std::move(s)};
}

void solve_transposed_triangular_into(const CholeskyFactor& f, const double* b, double* u) {
  const index_t n = f.dim();
  for (index_t i = 0; i < n; ++i) {
    const double* si = f.s.col(i);
    u[i] = (b[i] - dot(si, u, i)) / si[i];
  }
}

std::vector<double> solve_transposed_triangular(const CholeskyFactor& f, const std::vector<double>& b) {
  if (static_cast<index_t>(b.size()) != f.dim())
    fail_invalid("solve_transposed_triangular: rhs length does not match factor dimension");
  std::vector<double> u(b.size());
  solve_transposed_triangular_into(f, b.data(), u.data());
  return u;
}

void solve_triangular_into(const CholeskyFactor& f, const double* b, double* w) {
  const index_t n = f.dim();
  std::copy(b, b + n, w);
  for (index_t k = n - 1; k >= 0; --k) {
    const double* sk = f.s.col(k);
    const double v = w[k] / sk[k];
    w[k] = v;
    for (index_t l = 0; l < k; ++l) w[l] -= v * sk[l];
  }
}

std::vector<double> solve_triangular(const CholeskyFactor& f, const std::vector<double>& b) {
  if (static_cast<index_t>(b.size()) != f.dim())
    fail_invalid("solve_triangular: rhs length does not match factor dimension");
  std::vector<double> w(b.size());
  solve_triangular_into(f, b.data(), w.data());
  return w;
}

DenseMatrix invert_spd(const DenseMatrix& w, int threads) {
  const CholeskyFactor f = cholesky(w);
  const index_t n = f.dim();
  DenseMatrix inv(n, n);
  const int nt = resolve_threads(threads);

#pragma omp parallel num_threads(nt) if (nt > 1)
  {
    std::vector<double> e(n, 0.0), u(n);
#pragma omp for schedule(static)
    for (index_t j = 0; j < n; ++j) {
      e[j] = 1.0;
      solve_transposed_triangular_into(f, e.data(), u.data());
      solve_triangular_into(f, u.data(), inv.col(j));
      e[j] = 0.0;
    }
  }

  // Mirror the upper triangle so round-off cannot break symmetry.
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < j; ++i) inv(j, i) = inv(i, j);
  return inv;
}

}  // namespace rpcs
