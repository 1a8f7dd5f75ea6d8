#pragma once

#include <vector>

#include "core/dense_matrix.hpp"

namespace rpcs {

// Every kernel here sums in a fixed order that does not depend on the thread
// count: parallel loops only ever split disjoint output ranges, never a
// reduction. That is what makes screening scores bit-identical across
// --threads settings.

// Plain sequential dot product; the one summation order used everywhere.
double dot(const double* a, const double* b, index_t n) noexcept;

// W = X X^T + lambda I for n x p X. O(n^2 p / 2), tiled over output columns.
DenseMatrix gram_ridge(const DenseMatrix& x, double lambda, int threads);

// Upper-triangular factor S with W = S^T S. Reads the upper triangle of W.
// Throws a numeric error naming the pivot index when a pivot falls at or
// below 1e-12 * max(diag W).
CholeskyFactor cholesky(const DenseMatrix& w);

// Solve S^T u = b (forward substitution; S^T is lower triangular).
void solve_transposed_triangular_into(const CholeskyFactor& f, const double* b, double* u);
std::vector<double> solve_transposed_triangular(const CholeskyFactor& f, const std::vector<double>& b);

// Solve S w = b (back substitution).
void solve_triangular_into(const CholeskyFactor& f, const double* b, double* w);
std::vector<double> solve_triangular(const CholeskyFactor& f, const std::vector<double>& b);

// Inverse of a symmetric positive definite matrix via its Cholesky factor.
// Exactly symmetric by construction.
DenseMatrix invert_spd(const DenseMatrix& w, int threads);

}  // namespace rpcs
