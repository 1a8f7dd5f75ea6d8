#include "rpcscreen/rpcscreen.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/harness.hpp"
#include "core/screening.hpp"
#include "core/standardize.hpp"

namespace {

thread_local std::string g_last_error;

rpcs_status map_kind(rpcs::ErrorKind kind) {
  switch (kind) {
    case rpcs::ErrorKind::invalid_argument: return RPCS_ERROR_INVALID_ARGUMENT;
    case rpcs::ErrorKind::data: return RPCS_ERROR_DATA;
    case rpcs::ErrorKind::numeric: return RPCS_ERROR_NUMERIC;
    case rpcs::ErrorKind::config: return RPCS_ERROR_CONFIG;
  }
  return RPCS_ERROR_INTERNAL;
}

template <typename Fn>
rpcs_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RPCS_OK;
  } catch (const rpcs::Error& e) {
    g_last_error = e.what();
    return map_kind(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RPCS_ERROR_NOMEM;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RPCS_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return RPCS_ERROR_INTERNAL;
  }
}

rpcs_status fail_null(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return RPCS_ERROR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct rpcs_dataset {
  rpcs::StandardizedData data;
};

struct rpcs_result {
  std::vector<int64_t> selected;
  std::vector<double> scores;
  bool has_scores = false;
};

extern "C" {

const char* rpcs_version(void) { return "1.0.0"; }

const char* rpcs_last_error(void) { return g_last_error.c_str(); }

rpcs_status rpcs_dataset_create(const double* x, int64_t n, int64_t p, const double* y,
                                rpcs_dataset** out) {
  if (!out) return fail_null("out");
  *out = nullptr;
  if (!x) return fail_null("x");
  if (!y) return fail_null("y");
  return guarded([&] {
    if (n < 1 || p < 1) rpcs::fail_invalid("dataset dimensions must be positive");
    rpcs::DenseMatrix xm(n, p, std::vector<double>(x, x + static_cast<std::size_t>(n) * p));
    std::vector<double> yv(y, y + n);
    auto ds = std::make_unique<rpcs_dataset>();
    ds->data = rpcs::standardize(xm, yv);
    *out = ds.release();
  });
}

void rpcs_dataset_destroy(rpcs_dataset* ds) { delete ds; }

int64_t rpcs_dataset_rows(const rpcs_dataset* ds) { return ds ? ds->data.n : 0; }

int64_t rpcs_dataset_cols(const rpcs_dataset* ds) { return ds ? ds->data.p : 0; }

rpcs_status rpcs_lambda_presets(int64_t n, int64_t p, double out[3]) {
  if (!out) return fail_null("out");
  return guarded([&] {
    const auto presets = rpcs::lambda_presets(n, p);
    out[0] = presets[0];
    out[1] = presets[1];
    out[2] = presets[2];
  });
}

void rpcs_result_destroy(rpcs_result* r) { delete r; }

int64_t rpcs_result_size(const rpcs_result* r) {
  return r ? static_cast<int64_t>(r->selected.size()) : 0;
}

const int64_t* rpcs_result_selected(const rpcs_result* r) {
  return r ? r->selected.data() : nullptr;
}

const double* rpcs_result_scores(const rpcs_result* r) {
  return (r && r->has_scores) ? r->scores.data() : nullptr;
}

namespace {

rpcs_result* wrap_result(rpcs::ScreenResult&& sel) {
  auto out = std::make_unique<rpcs_result>();
  out->selected.assign(sel.selected.begin(), sel.selected.end());
  if (!sel.scores.empty()) {
    out->scores = std::move(sel.scores);
    out->has_scores = true;
  }
  return out.release();
}

}  // namespace

rpcs_status rpcs_screen_rpc(const rpcs_dataset* ds, double lambda, int64_t k, int threads,
                            rpcs_result** out) {
  if (!out) return fail_null("out");
  *out = nullptr;
  if (!ds) return fail_null("ds");
  return guarded([&] {
    rpcs::RpcComponents comps = rpcs::rpc_fast(ds->data, lambda, threads);
    *out = wrap_result(rpcs::select_top_k(comps.scores, k, rpcs::Method::rpc, {lambda}));
  });
}

rpcs_status rpcs_screen_rpc_union(const rpcs_dataset* ds, const double* lambdas,
                                  int64_t n_lambdas, int64_t k, int threads, rpcs_result** out) {
  if (!out) return fail_null("out");
  *out = nullptr;
  if (!ds) return fail_null("ds");
  if (!lambdas) return fail_null("lambdas");
  return guarded([&] {
    if (n_lambdas < 1) rpcs::fail_invalid("need at least one lambda");
    std::vector<rpcs::ScreenResult> parts;
    parts.reserve(n_lambdas);
    for (int64_t i = 0; i < n_lambdas; ++i) {
      rpcs::RpcComponents comps = rpcs::rpc_fast(ds->data, lambdas[i], threads);
      parts.push_back(rpcs::select_top_k(comps.scores, k, rpcs::Method::rpc, {lambdas[i]}));
    }
    *out = wrap_result(rpcs::union_submodels(parts));
  });
}

rpcs_status rpcs_screen_holp(const rpcs_dataset* ds, double lambda, int64_t k, int threads,
                             rpcs_result** out) {
  if (!out) return fail_null("out");
  *out = nullptr;
  if (!ds) return fail_null("ds");
  return guarded([&] {
    std::vector<double> beta = rpcs::holp_scores(ds->data, lambda, threads);
    *out = wrap_result(rpcs::select_top_k(beta, k, rpcs::Method::holp, {lambda}));
  });
}

rpcs_status rpcs_screen_sis(const rpcs_dataset* ds, int64_t k, rpcs_result** out) {
  if (!out) return fail_null("out");
  *out = nullptr;
  if (!ds) return fail_null("ds");
  return guarded([&] {
    std::vector<double> r = rpcs::sis_scores(ds->data);
    *out = wrap_result(rpcs::select_top_k(r, k, rpcs::Method::sis));
  });
}

rpcs_status rpcs_screen_fr(const rpcs_dataset* ds, int64_t k, rpcs_result** out) {
  if (!out) return fail_null("out");
  *out = nullptr;
  if (!ds) return fail_null("ds");
  return guarded([&] { *out = wrap_result(rpcs::fr_screen(ds->data, k)); });
}

rpcs_status rpcs_simulate_plan_json(const char* plan_json, int threads, uint64_t seed_override,
                                    int has_seed_override, char** metrics_json_out,
                                    char** table_text_out, char** table_csv_out) {
  if (metrics_json_out) *metrics_json_out = nullptr;
  if (table_text_out) *table_text_out = nullptr;
  if (table_csv_out) *table_csv_out = nullptr;
  if (!plan_json) return fail_null("plan_json");
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(plan_json);
    } catch (const nlohmann::json::exception& e) {
      rpcs::fail_config(std::string("plan document is not valid JSON: ") + e.what());
    }
    const bool is_array = doc.is_array();
    std::vector<rpcs::BenchmarkPlan> plans = rpcs::plans_from_json_document(doc);

    std::vector<std::pair<std::string, rpcs::MetricsSummary>> labeled;
    nlohmann::json metrics = nlohmann::json::array();
    std::vector<std::string> used_labels;
    for (rpcs::BenchmarkPlan& plan : plans) {
      if (has_seed_override) plan.setting.seed = seed_override;
      rpcs::MetricsSummary summary = rpcs::run_plan(plan, threads);
      std::string label = rpcs::design_name(plan.setting.design);
      int suffix = 2;
      while (std::find(used_labels.begin(), used_labels.end(), label) != used_labels.end())
        label = rpcs::design_name(plan.setting.design) + "#" + std::to_string(suffix++);
      used_labels.push_back(label);
      metrics.push_back(rpcs::metrics_to_json(summary));
      labeled.emplace_back(std::move(label), std::move(summary));
    }

    if (metrics_json_out) {
      const std::string text = is_array ? metrics.dump(2) : metrics.front().dump(2);
      *metrics_json_out = dup_string(text);
    }
    if (table_text_out)
      *table_text_out = dup_string(rpcs::emit_table(labeled, rpcs::TableFormat::text));
    if (table_csv_out)
      *table_csv_out = dup_string(rpcs::emit_table(labeled, rpcs::TableFormat::csv));
  });
}

void rpcs_free_string(char* s) { std::free(s); }

}  // extern "C"
