#pragma once

#include <array>
#include <vector>

#include "core/standardize.hpp"

namespace rpcs {

// All ridge quantities from the bordered precision matrix
//   [[y~'y~, y~'X], [X'y~, X'X + lambda I]]^{-1}
// in one pass: v_y is its (0,0) entry, v_iy[i] its (0,i+1), v_i[i] its
// (i+1,i+1). scores[i] = -v_iy[i]/sqrt(v_i[i]*v_y) is the ridge partial
// correlation. xi[i] is the i-th diagonal of (X'X+lambda I)^{-1} and s_lambda
// the ridge residual sum of squares; v_y*s_lambda = 1. A global positive
// scaling of all v's cancels in scores, so no sample-size factor appears.
struct RpcComponents {
  double lambda = 0.0;
  double v_y = 0.0;
  std::vector<double> v_iy;
  std::vector<double> v_i;
  std::vector<double> scores;
  std::vector<double> xi;
  double s_lambda = 0.0;
};

enum class Method { rpc, holp, sis, fr, set_union };

struct ScreenResult {
  Method method = Method::rpc;
  std::vector<double> lambda_used;       // empty, one, or several
  std::vector<double> scores;            // ranking criterion; empty for set_union
  std::vector<index_t> selected;         // descending |score|, ties by index
  index_t k = 0;
  index_t p = 0;
};

// Fast path: one n x n Cholesky factorization, then one triangular solve per
// column. O(n^3 + n^2 p) total; the column loop is parallel with bit-stable
// results for any thread count.
RpcComponents rpc_fast(const StandardizedData& data, double lambda, int threads = 0);

// Reference path: builds the (p+1) x (p+1) bordered matrix and inverts it
// directly; xi and s_lambda come from a separate (X'X+lambda I)^{-1} so the
// two implementations share nothing past standardization. O(p^3), small
// problems only.
RpcComponents rpc_oracle(const StandardizedData& data, double lambda);

// Ridge regression coefficients X'(XX'+lambda I)^{-1} y~, the HOLP screening
// criterion (rank by absolute value).
std::vector<double> holp_scores(const StandardizedData& data, double lambda, int threads = 0);

// Marginal Pearson correlation of each column with the response.
std::vector<double> sis_scores(const StandardizedData& data);

// Greedy forward selection; at each step takes the eligible column with the
// largest squared residual correlation (ties to the lowest index), then
// orthogonalizes the working set against it. scores holds each selected
// column's residual-sum-of-squares reduction at entry, 0 for unselected.
// Requires 1 <= k <= min(n-2, p).
ScreenResult fr_screen(const StandardizedData& data, index_t k);

// Indices of the k largest |scores|, descending |score| with ascending-index
// tie-break. method/lambdas label the returned result.
ScreenResult select_top_k(const std::vector<double>& scores, index_t k,
                          Method method = Method::rpc, std::vector<double> lambdas = {});

// Set union of selected sets, ordered by first appearance across the inputs.
ScreenResult union_submodels(const std::vector<ScreenResult>& results);

// The three benchmark ridge levels: p/n, n*ln(n)/p, n/p.
std::array<double, 3> lambda_presets(index_t n, index_t p);

}  // namespace rpcs
