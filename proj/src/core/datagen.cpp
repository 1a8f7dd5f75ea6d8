#include "core/datagen.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace rpcs {

namespace {

constexpr index_t kSupportSmall = 9;
constexpr index_t kSupportSparse = 25;
constexpr index_t kSparseFactors = 5;

index_t min_p_for(Design d) {
  switch (d) {
    case Design::extreme: return 10;
    case Design::sparse_factor: return kSupportSparse;
    default: return kSupportSmall;
  }
}

void draw_normals(Pcg32& rng, double* dst, index_t count) {
  for (index_t i = 0; i < count; ++i) dst[i] = rng.next_normal();
}

}  // namespace

void validate_setting(const SimSetting& s) {
  if (s.n < 3) fail_invalid("setting: n must be at least 3");
  if (s.p < min_p_for(s.design))
    fail_invalid("setting: design " + design_name(s.design) + " needs p >= " +
                 std::to_string(min_p_for(s.design)));
  if (!(s.r_squared > 0.0) || !(s.r_squared < 1.0))
    fail_invalid("setting: r_squared must lie strictly between 0 and 1");
  if (s.design == Design::compound && !(s.rho >= 0.0 && s.rho < 1.0))
    fail_invalid("setting: COMPOUND needs rho in [0, 1)");
  if (s.design == Design::ar1 && !(std::abs(s.rho) < 1.0))
    fail_invalid("setting: AR1 needs |rho| < 1");
  if (s.design == Design::factor && s.factor_k < 1)
    fail_invalid("setting: FACTOR needs factor_k >= 1");
}

std::vector<index_t> true_support_for(const SimSetting& s) {
  const index_t size = (s.design == Design::sparse_factor) ? kSupportSparse : kSupportSmall;
  std::vector<index_t> t(size);
  for (index_t i = 0; i < size; ++i) t[i] = i;
  return t;
}

double analytic_signal_variance(const SimSetting& s) {
  const double t = static_cast<double>(kSupportSmall);
  switch (s.design) {
    case Design::iid:
      return t;
    case Design::compound:
      return t + s.rho * t * (t - 1.0);
    case Design::ar1: {
      // sum over j,k in the contiguous support of rho^|j-k|
      double v = t;
      for (index_t d = 1; d < kSupportSmall; ++d)
        v += 2.0 * static_cast<double>(kSupportSmall - d) * std::pow(s.rho, static_cast<double>(d));
      return v;
    }
    case Design::group:
      // 9 variances of 1.01 plus 18 within-group covariance pairs of 1.
      return 9.0 * 1.01 + 18.0;
    case Design::extreme:
      // The 9 signal columns are mutually independent with unit variance.
      return 9.0;
    case Design::factor:
    case Design::sparse_factor:
      fail_invalid("signal variance for factor designs depends on the realized loadings");
  }
  fail_invalid("unknown design");
}

DenseMatrix analytic_covariance(const SimSetting& s) {
  validate_setting(s);
  const index_t p = s.p;
  DenseMatrix sigma(p, p);
  switch (s.design) {
    case Design::iid:
      for (index_t i = 0; i < p; ++i) sigma(i, i) = 1.0;
      break;
    case Design::compound:
      for (index_t j = 0; j < p; ++j)
        for (index_t i = 0; i < p; ++i) sigma(i, j) = (i == j) ? 1.0 : s.rho;
      break;
    case Design::ar1:
      for (index_t j = 0; j < p; ++j)
        for (index_t i = 0; i < p; ++i) sigma(i, j) = std::pow(s.rho, static_cast<double>(std::abs(i - j)));
      break;
    case Design::group:
      for (index_t j = 0; j < p; ++j)
        for (index_t i = 0; i < p; ++i) {
          if (i == j)
            sigma(i, j) = (i < kSupportSmall) ? 1.01 : 1.0;
          else if (i < kSupportSmall && j < kSupportSmall && i / 3 == j / 3)
            sigma(i, j) = 1.0;
        }
      break;
    case Design::extreme: {
      const double cross = 1.0 / (2.0 * std::sqrt(2.0));  // cov(signal, unimportant)
      for (index_t j = 0; j < p; ++j)
        for (index_t i = 0; i < p; ++i) {
          if (i < kSupportSmall && j < kSupportSmall)
            sigma(i, j) = (i == j) ? 1.0 : 0.0;
          else if (i >= kSupportSmall && j >= kSupportSmall)
            sigma(i, j) = (i == j) ? 2.5 : 2.25;
          else
            sigma(i, j) = cross;
        }
      break;
    }
    case Design::factor:
    case Design::sparse_factor:
      fail_invalid("covariance for factor designs depends on the realized loadings");
  }
  return sigma;
}

DenseMatrix make_design(const SimSetting& s, Pcg32& rng, double* v_signal_out) {
  validate_setting(s);
  const index_t n = s.n;
  const index_t p = s.p;
  DenseMatrix x(n, p);
  double v_signal = 0.0;

  switch (s.design) {
    case Design::iid: {
      for (index_t j = 0; j < p; ++j) draw_normals(rng, x.col(j), n);
      v_signal = analytic_signal_variance(s);
      break;
    }
    case Design::compound: {
      std::vector<double> g(n);
      draw_normals(rng, g.data(), n);
      const double a = std::sqrt(s.rho);
      const double b = std::sqrt(1.0 - s.rho);
      for (index_t j = 0; j < p; ++j) {
        double* xj = x.col(j);
        draw_normals(rng, xj, n);
        for (index_t i = 0; i < n; ++i) xj[i] = a * g[i] + b * xj[i];
      }
      v_signal = analytic_signal_variance(s);
      break;
    }
    case Design::ar1: {
      const double carry = s.rho;
      const double fresh = std::sqrt(1.0 - s.rho * s.rho);
      draw_normals(rng, x.col(0), n);
      for (index_t j = 1; j < p; ++j) {
        double* xj = x.col(j);
        const double* prev = x.col(j - 1);
        draw_normals(rng, xj, n);
        for (index_t i = 0; i < n; ++i) xj[i] = carry * prev[i] + fresh * xj[i];
      }
      v_signal = analytic_signal_variance(s);
      break;
    }
    case Design::factor: {
      const index_t k = s.factor_k;
      DenseMatrix f(p, k);
      draw_normals(rng, f.data().data(), p * k);
      DenseMatrix g(n, k);
      draw_normals(rng, g.data().data(), n * k);
      for (index_t j = 0; j < p; ++j) {
        double* xj = x.col(j);
        draw_normals(rng, xj, n);
        for (index_t m = 0; m < k; ++m) {
          const double load = f(j, m);
          const double* gm = g.col(m);
          for (index_t i = 0; i < n; ++i) xj[i] += load * gm[i];
        }
      }
      // V = ||F' beta||^2 + |t| under the realized loadings
      v_signal = static_cast<double>(kSupportSmall);
      for (index_t m = 0; m < k; ++m) {
        double colsum = 0.0;
        for (index_t j = 0; j < kSupportSmall; ++j) colsum += f(j, m);
        v_signal += colsum * colsum;
      }
      break;
    }
    case Design::group: {
      std::vector<double> z(n);
      for (index_t g = 0; g < 3; ++g) {
        draw_normals(rng, z.data(), n);
        for (index_t m = 0; m < 3; ++m) {
          double* xj = x.col(3 * g + m);
          draw_normals(rng, xj, n);
          for (index_t i = 0; i < n; ++i) xj[i] = z[i] + 0.1 * xj[i];
        }
      }
      for (index_t j = kSupportSmall; j < p; ++j) draw_normals(rng, x.col(j), n);
      v_signal = analytic_signal_variance(s);
      break;
    }
    case Design::extreme: {
      DenseMatrix w(n, kSupportSmall);
      draw_normals(rng, w.data().data(), n * kSupportSmall);
      std::vector<double> wsum(n, 0.0);
      for (index_t m = 0; m < kSupportSmall; ++m) {
        const double* wm = w.col(m);
        for (index_t i = 0; i < n; ++i) wsum[i] += wm[i];
      }
      const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
      for (index_t j = 0; j < p; ++j) {
        double* xj = x.col(j);
        draw_normals(rng, xj, n);
        if (j < kSupportSmall) {
          const double* wj = w.col(j);
          for (index_t i = 0; i < n; ++i) xj[i] = (xj[i] + wj[i]) * inv_sqrt2;
        } else {
          for (index_t i = 0; i < n; ++i) xj[i] = (xj[i] + wsum[i]) * 0.5;
        }
      }
      v_signal = analytic_signal_variance(s);
      break;
    }
    case Design::sparse_factor: {
      DenseMatrix f(p, kSparseFactors);
      for (index_t m = 0; m < kSparseFactors; ++m) {
        double* fm = f.col(m);
        for (index_t j = 5 * m; j < 5 * (m + 1); ++j) fm[j] = rng.next_normal();
      }
      DenseMatrix g(n, kSparseFactors);
      draw_normals(rng, g.data().data(), n * kSparseFactors);
      for (index_t j = 0; j < p; ++j) {
        double* xj = x.col(j);
        draw_normals(rng, xj, n);
        for (index_t i = 0; i < n; ++i) xj[i] *= 0.1;
        if (j < kSupportSparse) {
          const index_t m = j / 5;  // the only factor this row loads on
          const double load = f(j, m);
          const double* gm = g.col(m);
          for (index_t i = 0; i < n; ++i) xj[i] += load * gm[i];
        }
      }
      // V = ||F' beta||^2 + 25 * 0.01; the support covers every loaded row.
      v_signal = 0.01 * static_cast<double>(kSupportSparse);
      for (index_t m = 0; m < kSparseFactors; ++m) {
        double colsum = 0.0;
        for (index_t j = 5 * m; j < 5 * (m + 1); ++j) colsum += f(j, m);
        v_signal += colsum * colsum;
      }
      break;
    }
  }

  if (v_signal_out) *v_signal_out = v_signal;
  return x;
}

double calibrate_noise_sd(double v_signal, double r_squared) {
  if (!(r_squared > 0.0) || !(r_squared < 1.0))
    fail_invalid("calibrate_noise_sd: r_squared must lie strictly between 0 and 1");
  if (!(v_signal > 0.0)) fail_invalid("calibrate_noise_sd: signal variance must be positive");
  return std::sqrt(v_signal * (1.0 - r_squared) / r_squared);
}

double sample_error(ErrorLaw law, Pcg32& rng) {
  switch (law) {
    case ErrorLaw::normal: return rng.next_normal();
    case ErrorLaw::shifted_exp: return rng.next_exponential() - 1.0;
    case ErrorLaw::scaled_t20: return rng.next_t20_unit_variance();
  }
  fail_invalid("unknown error law");
}

GeneratedDataset generate(const SimSetting& s) {
  validate_setting(s);
  Pcg32 rng(s.seed, 0);

  GeneratedDataset ds;
  double v_signal = 0.0;
  ds.x = make_design(s, rng, &v_signal);
  ds.v_signal = v_signal;
  ds.sigma = calibrate_noise_sd(v_signal, s.r_squared);
  ds.true_support = true_support_for(s);
  ds.beta.assign(s.p, 0.0);
  for (index_t j : ds.true_support) ds.beta[j] = 1.0;

  ds.y.resize(s.n);
  for (index_t i = 0; i < s.n; ++i) {
    double signal = 0.0;
    for (index_t j : ds.true_support) signal += ds.x(i, j);
    ds.y[i] = signal;
  }
  for (index_t i = 0; i < s.n; ++i) ds.y[i] += ds.sigma * sample_error(s.error_law, rng);
  return ds;
}

std::string design_name(Design d) {
  switch (d) {
    case Design::iid: return "IID";
    case Design::compound: return "COMPOUND";
    case Design::ar1: return "AR1";
    case Design::factor: return "FACTOR";
    case Design::group: return "GROUP";
    case Design::extreme: return "EXTREME";
    case Design::sparse_factor: return "SPARSE_FACTOR";
  }
  fail_invalid("unknown design");
}

Design design_from_name(const std::string& name) {
  if (name == "IID") return Design::iid;
  if (name == "COMPOUND") return Design::compound;
  if (name == "AR1") return Design::ar1;
  if (name == "FACTOR") return Design::factor;
  if (name == "GROUP") return Design::group;
  if (name == "EXTREME") return Design::extreme;
  if (name == "SPARSE_FACTOR") return Design::sparse_factor;
  fail_config("unknown design name \"" + name + "\"");
}

std::string error_law_name(ErrorLaw law) {
  switch (law) {
    case ErrorLaw::normal: return "NORMAL";
    case ErrorLaw::shifted_exp: return "SHIFTED_EXP";
    case ErrorLaw::scaled_t20: return "SCALED_T20";
  }
  fail_invalid("unknown error law");
}

ErrorLaw error_law_from_name(const std::string& name) {
  if (name == "NORMAL") return ErrorLaw::normal;
  if (name == "SHIFTED_EXP") return ErrorLaw::shifted_exp;
  if (name == "SCALED_T20") return ErrorLaw::scaled_t20;
  fail_config("unknown error law \"" + name + "\"");
}

namespace {

template <typename T>
T require_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) fail_config(std::string("setting: missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail_config(std::string("setting: field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

SimSetting sim_setting_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail_config("setting must be a JSON object");
  SimSetting s;
  s.design = design_from_name(require_field<std::string>(j, "design"));
  s.n = require_field<index_t>(j, "n");
  s.p = require_field<index_t>(j, "p");
  s.r_squared = require_field<double>(j, "r_squared");
  if (j.contains("error_law")) s.error_law = error_law_from_name(j.at("error_law").get<std::string>());
  if (j.contains("rho")) {
    if (!j.at("rho").is_number()) fail_config("setting: field \"rho\" has the wrong type");
    s.rho = j.at("rho").get<double>();
  }
  if (j.contains("factor_k")) {
    if (!j.at("factor_k").is_number_integer()) fail_config("setting: field \"factor_k\" has the wrong type");
    s.factor_k = j.at("factor_k").get<index_t>();
  }
  s.seed = require_field<std::uint64_t>(j, "seed");
  validate_setting(s);
  return s;
}

nlohmann::json sim_setting_to_json(const SimSetting& s) {
  nlohmann::json j{
      {"design", design_name(s.design)}, {"n", s.n},       {"p", s.p},
      {"r_squared", s.r_squared},        {"error_law", error_law_name(s.error_law)},
      {"seed", s.seed},
  };
  if (s.design == Design::compound || s.design == Design::ar1) j["rho"] = s.rho;
  if (s.design == Design::factor) j["factor_k"] = s.factor_k;
  return j;
}

}  // namespace rpcs
