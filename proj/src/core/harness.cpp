#include "core/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/errors.hpp"
#include "core/threads.hpp"

namespace rpcs {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

void validate_plan(const BenchmarkPlan& plan) {
  validate_setting(plan.setting);
  if (plan.replications < 1) fail_invalid("plan: replications must be at least 1");
  if (plan.methods.empty()) fail_invalid("plan: method list is empty");
  const index_t k = plan.k.value_or(plan.setting.n);
  if (k < 1 || k > plan.setting.p)
    fail_invalid("plan: submodel size k must lie in [1, p], got " + std::to_string(k));
}

ScreenResult run_method(const MethodSpec& spec, const StandardizedData& data, index_t k,
                        int threads) {
  const auto presets = lambda_presets(data.n, data.p);
  switch (spec.kind) {
    case MethodKind::rpc1:
    case MethodKind::rpc2:
    case MethodKind::rpc3: {
      const int slot = spec.kind == MethodKind::rpc1 ? 0 : (spec.kind == MethodKind::rpc2 ? 1 : 2);
      const double lambda = spec.lambda.value_or(presets[slot]);
      RpcComponents comps = rpc_fast(data, lambda, threads);
      return select_top_k(comps.scores, k, Method::rpc, {lambda});
    }
    case MethodKind::urpc: {
      std::vector<ScreenResult> parts;
      parts.reserve(3);
      for (double lambda : presets) {
        RpcComponents comps = rpc_fast(data, lambda, threads);
        parts.push_back(select_top_k(comps.scores, k, Method::rpc, {lambda}));
      }
      return union_submodels(parts);
    }
    case MethodKind::holp: {
      const double lambda = spec.lambda.value_or(presets[2]);
      std::vector<double> beta = holp_scores(data, lambda, threads);
      return select_top_k(beta, k, Method::holp, {lambda});
    }
    case MethodKind::sis: {
      std::vector<double> r = sis_scores(data);
      return select_top_k(r, k, Method::sis);
    }
    case MethodKind::fr: {
      const index_t k_fr = std::min(k, std::min(data.n - 2, data.p));
      return fr_screen(data, k_fr);
    }
  }
  fail_invalid("unknown method kind");
}

}  // namespace

std::string method_kind_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::rpc1: return "RPC1";
    case MethodKind::rpc2: return "RPC2";
    case MethodKind::rpc3: return "RPC3";
    case MethodKind::urpc: return "URPC";
    case MethodKind::holp: return "HOLP";
    case MethodKind::sis: return "SIS";
    case MethodKind::fr: return "FR";
  }
  fail_invalid("unknown method kind");
}

MethodKind method_kind_from_name(const std::string& name) {
  std::string u(name);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "RPC1") return MethodKind::rpc1;
  if (u == "RPC2") return MethodKind::rpc2;
  if (u == "RPC3") return MethodKind::rpc3;
  if (u == "URPC") return MethodKind::urpc;
  if (u == "HOLP") return MethodKind::holp;
  if (u == "SIS") return MethodKind::sis;
  if (u == "FR") return MethodKind::fr;
  fail_config("unknown method \"" + name + "\"");
}

ReplicationResult run_replication(const SimSetting& setting, std::uint64_t rep_index,
                                  const std::vector<MethodSpec>& methods, index_t k,
                                  int threads) {
  SimSetting rep_setting = setting;
  rep_setting.seed = mix_seed(setting.seed, rep_index);
  const GeneratedDataset ds = generate(rep_setting);
  const StandardizedData data = standardize(ds.x, ds.y);

  std::vector<char> in_support(setting.p, 0);
  for (index_t j : ds.true_support) in_support[j] = 1;
  const double support_size = static_cast<double>(ds.true_support.size());

  ReplicationResult result;
  result.outcomes.reserve(methods.size());
  for (const MethodSpec& spec : methods) {
    const auto t0 = clock_type::now();
    ScreenResult sel = run_method(spec, data, k, threads);
    const double elapsed = ms_since(t0);

    index_t hits = 0;
    for (index_t idx : sel.selected) hits += in_support[idx];
    MethodOutcome outcome;
    outcome.covered = hits == static_cast<index_t>(ds.true_support.size());
    outcome.tpr = static_cast<double>(hits) / support_size;
    outcome.elapsed_ms = elapsed;
    outcome.selected = std::move(sel.selected);
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

MetricsSummary aggregate(const SimSetting& setting, index_t k,
                         const std::vector<MethodSpec>& methods,
                         const std::vector<ReplicationResult>& reps) {
  if (reps.empty()) fail_invalid("aggregate: no replication results");
  const index_t r = static_cast<index_t>(reps.size());

  MetricsSummary summary;
  summary.setting = setting;
  summary.replications = r;
  summary.k = k;
  summary.methods.resize(methods.size());

  for (std::size_t m = 0; m < methods.size(); ++m) {
    index_t covered = 0;
    double tpr_sum = 0.0, ms_sum = 0.0;
    for (const ReplicationResult& rep : reps) {
      if (rep.outcomes.size() != methods.size())
        fail_invalid("aggregate: replication outcome count does not match the method list");
      covered += rep.outcomes[m].covered ? 1 : 0;
      tpr_sum += rep.outcomes[m].tpr;
      ms_sum += rep.outcomes[m].elapsed_ms;
    }
    MethodSummary& ms = summary.methods[m];
    ms.spec = methods[m];
    ms.label = method_kind_name(methods[m].kind);
    ms.cp = static_cast<double>(covered) / static_cast<double>(r);
    ms.tpr = tpr_sum / static_cast<double>(r);
    ms.mean_runtime_ms = ms_sum / static_cast<double>(r);
    ms.replications = r;
    // Full coverage in every replication forces a perfect true positive rate.
    if (ms.cp == 1.0 && std::abs(ms.tpr - 1.0) > 1e-12)
      fail_numeric("aggregate: coverage 1 with true positive rate " + std::to_string(ms.tpr));
  }
  return summary;
}

MetricsSummary run_plan(const BenchmarkPlan& plan, int threads) {
  validate_plan(plan);
  const index_t k = plan.k.value_or(plan.setting.n);
  const index_t r = plan.replications;
  const int nt = resolve_threads(threads);
  // Parallelism across replications; inside a replication the column loops
  // run single-threaded so the machine is never oversubscribed.
  const int outer = static_cast<int>(std::min<index_t>(nt, r));
  const int inner = outer > 1 ? 1 : nt;

  std::vector<ReplicationResult> reps(r);
  bool failed = false;
  std::string failure;

#pragma omp parallel for schedule(dynamic, 1) num_threads(outer) if (outer > 1)
  for (index_t i = 0; i < r; ++i) {
    bool skip;
#pragma omp atomic read
    skip = failed;
    if (skip) continue;
    try {
      reps[i] = run_replication(plan.setting, static_cast<std::uint64_t>(i), plan.methods, k, inner);
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (!failed) {
          failed = true;
          failure = "replication " + std::to_string(i) + ": " + e.what();
        }
      }
    }
  }
  if (failed) fail_numeric("plan aborted: " + failure);

  // Fill the lambda labels once: they depend only on (n, p), which are plan
  // constants.
  MetricsSummary summary = aggregate(plan.setting, k, plan.methods, reps);
  const auto presets = lambda_presets(plan.setting.n, plan.setting.p);
  for (MethodSummary& ms : summary.methods) {
    switch (ms.spec.kind) {
      case MethodKind::rpc1: ms.lambdas_used = {ms.spec.lambda.value_or(presets[0])}; break;
      case MethodKind::rpc2: ms.lambdas_used = {ms.spec.lambda.value_or(presets[1])}; break;
      case MethodKind::rpc3: ms.lambdas_used = {ms.spec.lambda.value_or(presets[2])}; break;
      case MethodKind::urpc: ms.lambdas_used = {presets[0], presets[1], presets[2]}; break;
      case MethodKind::holp: ms.lambdas_used = {ms.spec.lambda.value_or(presets[2])}; break;
      case MethodKind::sis:
      case MethodKind::fr: break;
    }
  }
  return summary;
}

std::string emit_table(const std::vector<std::pair<std::string, MetricsSummary>>& summaries,
                       TableFormat format) {
  if (summaries.empty()) fail_invalid("emit_table: nothing to format");

  // Row order: methods in first-appearance order across the summaries.
  std::vector<std::string> row_labels;
  for (const auto& [label, summary] : summaries)
    for (const MethodSummary& ms : summary.methods)
      if (std::find(row_labels.begin(), row_labels.end(), ms.label) == row_labels.end())
        row_labels.push_back(ms.label);

  auto cell = [](const MetricsSummary& summary, const std::string& label, bool tpr) -> std::string {
    for (const MethodSummary& ms : summary.methods)
      if (ms.label == label) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", 100.0 * (tpr ? ms.tpr : ms.cp));
        return buf;
      }
    return "-";
  };

  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << "method";
    for (const auto& [label, summary] : summaries) out << "," << label << "_tpr," << label << "_cp";
    out << "\n";
    for (const std::string& row : row_labels) {
      out << row;
      for (const auto& [label, summary] : summaries)
        out << "," << cell(summary, row, true) << "," << cell(summary, row, false);
      out << "\n";
    }
    return out.str();
  }

  constexpr int name_w = 8;
  constexpr int col_w = 7;
  std::string header1(name_w, ' ');
  std::string header2 = "method  ";
  header2.resize(name_w, ' ');
  for (const auto& [label, summary] : summaries) {
    std::string group = label;
    if (static_cast<int>(group.size()) > 2 * col_w) group.resize(2 * col_w);
    const int pad = 2 * col_w - static_cast<int>(group.size());
    header1 += std::string(pad / 2 + (pad % 2), ' ') + group + std::string(pad / 2, ' ');
    for (const char* sub : {"TPR", "CP"}) {
      std::string c(sub);
      c.insert(c.begin(), col_w - c.size(), ' ');
      header2 += c;
    }
  }
  out << header1 << "\n" << header2 << "\n";
  for (const std::string& row : row_labels) {
    std::string name = row;
    name.resize(name_w, ' ');
    out << name;
    for (const auto& [label, summary] : summaries) {
      for (bool tpr : {true, false}) {
        std::string c = cell(summary, row, tpr);
        c.insert(c.begin(), col_w - c.size(), ' ');
        out << c;
      }
    }
    out << "\n";
  }
  return out.str();
}

BenchmarkPlan plan_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail_config("plan must be a JSON object");
  BenchmarkPlan plan;
  if (!j.contains("setting")) fail_config("plan: missing field \"setting\"");
  plan.setting = sim_setting_from_json(j.at("setting"));
  if (!j.contains("replications") || !j.at("replications").is_number_integer())
    fail_config("plan: field \"replications\" must be an integer");
  plan.replications = j.at("replications").get<index_t>();
  if (j.contains("k")) {
    if (!j.at("k").is_number_integer()) fail_config("plan: field \"k\" must be an integer");
    plan.k = j.at("k").get<index_t>();
  }
  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
    fail_config("plan: field \"methods\" must be a nonempty array");
  for (const auto& entry : j.at("methods")) {
    MethodSpec spec;
    if (entry.is_string()) {
      spec.kind = method_kind_from_name(entry.get<std::string>());
    } else if (entry.is_object()) {
      if (!entry.contains("method") || !entry.at("method").is_string())
        fail_config("plan: method entry missing string field \"method\"");
      spec.kind = method_kind_from_name(entry.at("method").get<std::string>());
      if (entry.contains("lambda")) {
        if (!entry.at("lambda").is_number()) fail_config("plan: method field \"lambda\" must be a number");
        const double lambda = entry.at("lambda").get<double>();
        if (!(lambda > 0.0)) fail_config("plan: method field \"lambda\" must be positive");
        if (spec.kind == MethodKind::urpc || spec.kind == MethodKind::sis || spec.kind == MethodKind::fr)
          fail_config("plan: method \"" + method_kind_name(spec.kind) + "\" does not take a lambda");
        spec.lambda = lambda;
      }
    } else {
      fail_config("plan: method entries must be strings or objects");
    }
    plan.methods.push_back(spec);
  }
  validate_plan(plan);
  return plan;
}

std::vector<BenchmarkPlan> plans_from_json_document(const nlohmann::json& j) {
  std::vector<BenchmarkPlan> plans;
  if (j.is_array()) {
    if (j.empty()) fail_config("plan document: empty array");
    for (const auto& entry : j) plans.push_back(plan_from_json(entry));
  } else {
    plans.push_back(plan_from_json(j));
  }
  return plans;
}

nlohmann::json metrics_to_json(const MetricsSummary& m) {
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodSummary& ms : m.methods) {
    nlohmann::json entry{{"method", ms.label},
                         {"cp", ms.cp},
                         {"tpr", ms.tpr},
                         {"mean_runtime_ms", ms.mean_runtime_ms},
                         {"replications", ms.replications}};
    if (!ms.lambdas_used.empty()) entry["lambda"] = ms.lambdas_used;
    methods.push_back(std::move(entry));
  }
  return nlohmann::json{{"setting", sim_setting_to_json(m.setting)},
                        {"replications", m.replications},
                        {"k", m.k},
                        {"methods", std::move(methods)}};
}

}  // namespace rpcs
