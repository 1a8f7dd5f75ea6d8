#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/dense_matrix.hpp"
#include "core/rng.hpp"

namespace rpcs {

// The seven benchmark covariance designs. Rows of X are i.i.d. N(0, Sigma):
//   IID            Sigma = I
//   COMPOUND       Sigma = rho 11' + (1-rho) I, 0 <= rho < 1
//   AR1            Sigma_ij = rho^|i-j|, |rho| < 1
//   FACTOR         Sigma = FF' + I, F a fresh p x factor_k standard normal draw
//   GROUP          3 groups of 3: column = shared z_g + 0.1 * own noise;
//                  columns past the first 9 are independent standard normal
//   EXTREME        X_j = (Z_j + W_j)/sqrt(2) for j < 9 with 9 independent W's,
//                  X_j = (Z_j + sum of all W's)/2 past that; the unimportant
//                  block is strongly correlated with the signal columns
//   SPARSE_FACTOR  Sigma = FF' + 0.01 I with F p x 5, nonzero only in rows
//                  0..24 (row block [5m, 5m+5) loads factor m alone)
enum class Design { iid, compound, ar1, factor, group, extreme, sparse_factor };

enum class ErrorLaw { normal, shifted_exp, scaled_t20 };

struct SimSetting {
  Design design = Design::iid;
  index_t n = 0;
  index_t p = 0;
  double r_squared = 0.0;
  ErrorLaw error_law = ErrorLaw::normal;
  double rho = 0.5;        // COMPOUND / AR1 only
  index_t factor_k = 10;   // FACTOR only
  std::uint64_t seed = 0;
};

// Throws invalid-argument for out-of-range fields (n >= 3, design-specific
// minimum p, r_squared in (0,1), rho range, factor_k >= 1).
void validate_setting(const SimSetting& s);

struct GeneratedDataset {
  DenseMatrix x;
  std::vector<double> y;
  std::vector<index_t> true_support;  // indices with beta_j = 1
  std::vector<double> beta;           // length p
  double sigma = 0.0;                 // calibrated noise standard deviation
  double v_signal = 0.0;              // Var(x'beta) used for the calibration
};

// Coefficient pattern: beta_j = 1 on the first 9 columns (first 25 for
// SPARSE_FACTOR, covering every row of F that carries loadings), 0 elsewhere.
std::vector<index_t> true_support_for(const SimSetting& s);

// Draws the n x p design. v_signal_out (optional) receives Var(x'beta): the
// analytic value for the fixed-covariance designs, or the value implied by
// the realized loadings for FACTOR/SPARSE_FACTOR.
DenseMatrix make_design(const SimSetting& s, Pcg32& rng, double* v_signal_out = nullptr);

// Var(x'beta) in closed form. FACTOR/SPARSE_FACTOR depend on the realized
// loadings and are rejected here.
double analytic_signal_variance(const SimSetting& s);

// Entrywise Sigma for the fixed-covariance designs (IID/COMPOUND/AR1/GROUP/
// EXTREME); used by distributional validation. Factor designs are rejected.
DenseMatrix analytic_covariance(const SimSetting& s);

// sigma = sqrt(V (1 - R^2) / R^2) so that Var(x'beta)/Var(y) = R^2 exactly.
double calibrate_noise_sd(double v_signal, double r_squared);

// One unit-variance error draw per observation.
double sample_error(ErrorLaw law, Pcg32& rng);

// Full dataset: design draw, then n error draws, y = X beta + sigma * eps.
// Deterministic given the setting (seed included).
GeneratedDataset generate(const SimSetting& s);

// JSON round-trip. Field names match the struct; design and error_law as
// upper-snake strings. rho/factor_k are emitted only where meaningful and
// default to 0.5/10 when absent. Malformed documents raise config errors
// naming the offending field.
SimSetting sim_setting_from_json(const nlohmann::json& j);
nlohmann::json sim_setting_to_json(const SimSetting& s);

std::string design_name(Design d);
Design design_from_name(const std::string& name);
std::string error_law_name(ErrorLaw law);
ErrorLaw error_law_from_name(const std::string& name);

}  // namespace rpcs
