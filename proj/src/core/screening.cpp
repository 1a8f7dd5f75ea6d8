#include "core/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "core/errors.hpp"
#include "core/linalg.hpp"
#include "core/threads.hpp"

namespace rpcs {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail_invalid("lambda must be positive and finite");
}

// Degenerate response: a constant y centers to ~0 and every ridge quantity
// loses meaning. Threshold scales with n and the centering round-off floor.
void check_response(const StandardizedData& d) {
  const double yss = dot(d.y_tilde.data(), d.y_tilde.data(), d.n);
  const double floor = static_cast<double>(d.n) * 1e-24 * (1.0 + d.y_bar * d.y_bar);
  if (yss <= floor) fail_data("response is constant after centering");
}

}  // namespace

RpcComponents rpc_fast(const StandardizedData& data, double lambda, int threads) {
  check_lambda(lambda);
  check_response(data);
  const index_t n = data.n;
  const index_t p = data.p;
  const int nt = resolve_threads(threads);

  const DenseMatrix w = gram_ridge(data.x, lambda, nt);
  const CholeskyFactor s = cholesky(w);
  const std::vector<double> theta = solve_transposed_triangular(s, data.y_tilde);

  const double theta_ss = dot(theta.data(), theta.data(), n);
  if (!(theta_ss > 0.0)) fail_data("response is degenerate: theta'theta is zero");

  RpcComponents out;
  out.lambda = lambda;
  out.s_lambda = lambda * theta_ss;
  out.v_y = 1.0 / out.s_lambda;
  out.v_iy.resize(p);
  out.v_i.resize(p);
  out.scores.resize(p);
  out.xi.resize(p);

  const double v_y = out.v_y;
  index_t bad_column = -1;

#pragma omp parallel num_threads(nt) if (nt > 1)
  {
    std::vector<double> u(n);
#pragma omp for schedule(static)
    for (index_t i = 0; i < p; ++i) {
      solve_transposed_triangular_into(s, data.x.col(i), u.data());
      const double a = dot(u.data(), theta.data(), n);
      const double b = dot(u.data(), u.data(), n);
      const double xi = (1.0 - b) / lambda;
      double v_i = xi + v_y * a * a;  // = 1/lambda + v_y*a^2 - b/lambda
      if (v_i <= 0.0) {
        if (v_i < -1e-10) {
#pragma omp critical
          bad_column = i;
          v_i = 1e-15;  // placeholder; the error below fires after the loop
        } else {
          v_i = 1e-15;  // round-off on a mathematically positive quantity
        }
      }
      out.v_iy[i] = -v_y * a;
      out.v_i[i] = v_i;
      out.xi[i] = xi;
      out.scores[i] = -out.v_iy[i] / std::sqrt(v_i * v_y);
    }
  }
  if (bad_column >= 0)
    fail_numeric("ridge partial correlation breakdown at column " + std::to_string(bad_column));
  return out;
}

RpcComponents rpc_oracle(const StandardizedData& data, double lambda) {
  check_lambda(lambda);
  check_response(data);
  const index_t n = data.n;
  const index_t p = data.p;
  if (p + 1 > 2000) fail_invalid("rpc_oracle: p too large for direct inversion");

  // Bordered Gram matrix of [y~ X] with the ridge on the X block only.
  DenseMatrix bordered(p + 1, p + 1);
  const double* y = data.y_tilde.data();
  bordered(0, 0) = dot(y, y, n);
  for (index_t i = 0; i < p; ++i) {
    const double v = dot(y, data.x.col(i), n);
    bordered(0, i + 1) = v;
    bordered(i + 1, 0) = v;
  }
  for (index_t i = 0; i < p; ++i)
    for (index_t j = i; j < p; ++j) {
      double v = dot(data.x.col(i), data.x.col(j), n);
      if (i == j) v += lambda;
      bordered(i + 1, j + 1) = v;
      bordered(j + 1, i + 1) = v;
    }

  const DenseMatrix inv = invert_spd(bordered, 1);

  RpcComponents out;
  out.lambda = lambda;
  out.v_y = inv(0, 0);
  out.v_iy.resize(p);
  out.v_i.resize(p);
  out.scores.resize(p);
  out.xi.resize(p);
  for (index_t i = 0; i < p; ++i) {
    out.v_iy[i] = inv(0, i + 1);
    out.v_i[i] = inv(i + 1, i + 1);
    out.scores[i] = -out.v_iy[i] / std::sqrt(out.v_i[i] * out.v_y);
  }

  // xi and the ridge residual sum of squares through the primal route, kept
  // deliberately separate from the bordered inverse above.
  DenseMatrix ridge_gram(p, p);
  for (index_t i = 0; i < p; ++i)
    for (index_t j = i; j < p; ++j) {
      double v = dot(data.x.col(i), data.x.col(j), n);
      if (i == j) v += lambda;
      ridge_gram(i, j) = v;
      ridge_gram(j, i) = v;
    }
  const DenseMatrix ridge_inv = invert_spd(ridge_gram, 1);
  std::vector<double> xty(p);
  for (index_t i = 0; i < p; ++i) xty[i] = dot(data.x.col(i), y, n);
  double fitted = 0.0;
  for (index_t i = 0; i < p; ++i) fitted += xty[i] * dot(ridge_inv.col(i), xty.data(), p);
  out.s_lambda = bordered(0, 0) - fitted;
  for (index_t i = 0; i < p; ++i) out.xi[i] = ridge_inv(i, i);
  return out;
}

std::vector<double> holp_scores(const StandardizedData& data, double lambda, int threads) {
  check_lambda(lambda);
  check_response(data);
  const index_t n = data.n;
  const index_t p = data.p;
  const int nt = resolve_threads(threads);

  const DenseMatrix w = gram_ridge(data.x, lambda, nt);
  const CholeskyFactor s = cholesky(w);
  const std::vector<double> theta = solve_transposed_triangular(s, data.y_tilde);
  // beta_i = u_i'theta = X_i' W^{-1} y~; one back substitution gives
  // W^{-1} y~ directly, then each coefficient is a single dot product.
  const std::vector<double> wy = solve_triangular(s, theta);

  std::vector<double> beta(p);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (index_t i = 0; i < p; ++i) beta[i] = dot(data.x.col(i), wy.data(), n);
  return beta;
}

std::vector<double> sis_scores(const StandardizedData& data) {
  check_response(data);
  const index_t n = data.n;
  const index_t p = data.p;
  const double* y = data.y_tilde.data();
  const double yss = dot(y, y, n);

  std::vector<double> r(p);
  for (index_t i = 0; i < p; ++i) {
    const double* x = data.x.col(i);
    r[i] = dot(x, y, n) / std::sqrt(dot(x, x, n) * yss);
  }
  return r;
}

ScreenResult fr_screen(const StandardizedData& data, index_t k) {
  const index_t n = data.n;
  const index_t p = data.p;
  if (k < 1 || k > std::min(n - 2, p))
    fail_invalid("fr_screen: k must lie in [1, min(n-2, p)], got " + std::to_string(k));
  check_response(data);

  // Working copies get orthogonalized in place, one selected direction at a
  // time. A column whose residual mass drops to round-off is ineligible: it
  // is numerically inside the current span.
  DenseMatrix c = data.x;
  std::vector<double> r = data.y_tilde;
  std::vector<char> active(p, 1);
  const double eligibility_floor = 1e-12 * static_cast<double>(n - 1);

  ScreenResult out;
  out.method = Method::fr;
  out.scores.assign(p, 0.0);
  out.p = p;

  for (index_t step = 0; step < k; ++step) {
    index_t best = -1;
    double best_gain = -1.0;
    for (index_t j = 0; j < p; ++j) {
      if (!active[j]) continue;
      const double* cj = c.col(j);
      const double css = dot(cj, cj, n);
      if (css <= eligibility_floor) continue;
      const double cr = dot(cj, r.data(), n);
      const double gain = cr * cr / css;
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
      }
    }
    if (best < 0)
      fail_data("fr_screen: no eligible column left at step " + std::to_string(step) +
                "; remaining columns are numerically dependent on the selection");

    out.selected.push_back(best);
    out.scores[best] = best_gain;
    active[best] = 0;

    double* q = c.col(best);
    const double qnorm = std::sqrt(dot(q, q, n));
    for (index_t i = 0; i < n; ++i) q[i] /= qnorm;
    const double qr = dot(q, r.data(), n);
    for (index_t i = 0; i < n; ++i) r[i] -= qr * q[i];
    for (index_t j = 0; j < p; ++j) {
      if (!active[j]) continue;
      double* cj = c.col(j);
      const double qc = dot(q, cj, n);
      for (index_t i = 0; i < n; ++i) cj[i] -= qc * q[i];
    }
  }
  out.k = k;
  return out;
}

ScreenResult select_top_k(const std::vector<double>& scores, index_t k, Method method,
                          std::vector<double> lambdas) {
  const index_t p = static_cast<index_t>(scores.size());
  if (p < 1) fail_invalid("select_top_k: empty score vector");
  if (k < 1 || k > p)
    fail_invalid("select_top_k: k must lie in [1, p] with p=" + std::to_string(p) + ", got " +
                 std::to_string(k));

  std::vector<index_t> order(p);
  std::iota(order.begin(), order.end(), index_t{0});
  std::sort(order.begin(), order.end(), [&scores](index_t a, index_t b) {
    const double sa = std::abs(scores[a]);
    const double sb = std::abs(scores[b]);
    if (sa != sb) return sa > sb;
    return a < b;
  });
  order.resize(k);

  ScreenResult out;
  out.method = method;
  out.lambda_used = std::move(lambdas);
  out.scores = scores;
  out.selected = std::move(order);
  out.k = k;
  out.p = p;
  return out;
}

ScreenResult union_submodels(const std::vector<ScreenResult>& results) {
  if (results.empty()) fail_invalid("union_submodels: no results to combine");
  const index_t p = results.front().p;
  for (const auto& r : results)
    if (r.p != p) fail_invalid("union_submodels: results disagree on the number of columns");

  ScreenResult out;
  out.method = Method::set_union;
  out.p = p;
  std::vector<char> seen(p, 0);
  for (const auto& r : results) {
    for (double l : r.lambda_used) out.lambda_used.push_back(l);
    for (index_t idx : r.selected) {
      if (idx < 0 || idx >= p) fail_invalid("union_submodels: index out of range");
      if (!seen[idx]) {
        seen[idx] = 1;
        out.selected.push_back(idx);
      }
    }
  }
  out.k = static_cast<index_t>(out.selected.size());
  return out;
}

std::array<double, 3> lambda_presets(index_t n, index_t p) {
  if (n < 2 || p < 1) fail_invalid("lambda_presets: need n >= 2 and p >= 1");
  const double dn = static_cast<double>(n);
  const double dp = static_cast<double>(p);
  return {dp / dn, dn * std::log(dn) / dp, dn / dp};
}

}  // namespace rpcs
