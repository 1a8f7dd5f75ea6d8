#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/datagen.hpp"
#include "core/screening.hpp"

namespace rpcs {

// RPC1/RPC2/RPC3 run ridge partial correlation at the p/n, n*ln(n)/p and n/p
// levels; URPC unions the three. HOLP defaults to the n/p level. An explicit
// lambda overrides the preset for the single-level methods.
enum class MethodKind { rpc1, rpc2, rpc3, urpc, holp, sis, fr };

struct MethodSpec {
  MethodKind kind = MethodKind::rpc1;
  std::optional<double> lambda;
};

struct BenchmarkPlan {
  SimSetting setting;  // seed acts as the base seed for all replications
  index_t replications = 0;
  std::vector<MethodSpec> methods;
  std::optional<index_t> k;  // submodel size, default n
};

struct MethodOutcome {
  bool covered = false;   // true support entirely inside the selection
  double tpr = 0.0;       // |selection intersect support| / |support|
  double elapsed_ms = 0.0;
  std::vector<index_t> selected;
};

struct ReplicationResult {
  std::vector<MethodOutcome> outcomes;  // one per plan method, in plan order
};

struct MethodSummary {
  MethodSpec spec;
  std::string label;
  std::vector<double> lambdas_used;  // empty for SIS/FR
  double cp = 0.0;
  double tpr = 0.0;
  double mean_runtime_ms = 0.0;
  index_t replications = 0;
};

struct MetricsSummary {
  SimSetting setting;
  index_t replications = 0;
  index_t k = 0;
  std::vector<MethodSummary> methods;
};

std::string method_kind_name(MethodKind kind);
MethodKind method_kind_from_name(const std::string& name);

// One replication: dataset from the derived seed mix(base, rep_index), one
// shared standardization, then every method on the same data. Timing covers
// the method's own screening work only. k is clamped to min(k, n-2, p) for
// forward regression, which cannot run past the centered-design rank.
ReplicationResult run_replication(const SimSetting& setting, std::uint64_t rep_index,
                                  const std::vector<MethodSpec>& methods, index_t k,
                                  int threads = 1);

// Deterministic fold of per-replication outcomes, in replication order.
MetricsSummary aggregate(const SimSetting& setting, index_t k,
                         const std::vector<MethodSpec>& methods,
                         const std::vector<ReplicationResult>& reps);

// Runs all replications (in parallel across replications when threads > 1;
// outcomes are independent of the schedule) and aggregates. A failure in any
// replication aborts the whole run with the replication index in the message.
MetricsSummary run_plan(const BenchmarkPlan& plan, int threads = 0);

enum class TableFormat { text, csv };

// Rows = methods, one TPR/CP column pair per labeled summary, percentages
// with one decimal.
std::string emit_table(const std::vector<std::pair<std::string, MetricsSummary>>& summaries,
                       TableFormat format);

// Plan documents: a single plan object or an array of them. Method specs are
// either bare strings ("RPC1") or {"method": "HOLP", "lambda": 0.5}.
BenchmarkPlan plan_from_json(const nlohmann::json& j);
std::vector<BenchmarkPlan> plans_from_json_document(const nlohmann::json& j);
nlohmann::json metrics_to_json(const MetricsSummary& m);

}  // namespace rpcs
