// Command-line front end. All numerical work goes through the shared
// library's C interface; this file owns file formats and exit codes only.
//
// Exit codes: 0 success, 2 usage or malformed plan, 3 file I/O,
// 4 data validation, 5 numeric failure (and anything internal).

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <rpcscreen/rpcscreen.h>

#include "csv.hpp"

namespace {

using nlohmann::json;
using rpcs_cli::CsvFormatError;
using rpcs_cli::CsvMatrix;
using rpcs_cli::IoError;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;
constexpr int kExitNumeric = 5;

struct CliFailure {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, std::string message) { throw CliFailure{code, std::move(message)}; }

int exit_code_for(rpcs_status st) {
  switch (st) {
    case RPCS_OK: return 0;
    case RPCS_ERROR_CONFIG: return kExitUsage;
    case RPCS_ERROR_INVALID_ARGUMENT:
    case RPCS_ERROR_DATA: return kExitData;
    case RPCS_ERROR_NUMERIC:
    case RPCS_ERROR_NOMEM:
    case RPCS_ERROR_INTERNAL: break;
  }
  return kExitNumeric;
}

void check(rpcs_status st) {
  if (st != RPCS_OK) fail(exit_code_for(st), rpcs_last_error());
}

struct DatasetDeleter {
  void operator()(rpcs_dataset* ds) const { rpcs_dataset_destroy(ds); }
};
struct ResultDeleter {
  void operator()(rpcs_result* r) const { rpcs_result_destroy(r); }
};
using DatasetPtr = std::unique_ptr<rpcs_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<rpcs_result, ResultDeleter>;

// Shortest round-trip decimal form, identical to the JSON rendering so the
// two output formats never disagree on a digit.
std::string number_repr(double v) { return json(v).dump(); }

struct LoadedData {
  std::vector<double> x;  // column-major
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::vector<std::string> names;  // empty when the file had no header
  std::vector<double> y;
};

CsvMatrix read_csv_checked(const std::string& path) {
  try {
    return rpcs_cli::read_csv_matrix(path);
  } catch (const IoError& e) {
    fail(kExitIo, e.what());
  } catch (const CsvFormatError& e) {
    fail(kExitData, e.what());
  }
}

std::int64_t resolve_y_column(const CsvMatrix& x, const std::string& spec) {
  const bool numeric = !spec.empty() && std::all_of(spec.begin(), spec.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
  if (numeric) {
    const std::int64_t idx = std::stoll(spec);
    if (idx >= x.cols)
      fail(kExitData, "--y-col index " + spec + " out of range for " + std::to_string(x.cols) +
                          " columns");
    return idx;
  }
  if (x.header.empty()) fail(kExitData, "--y-col by name needs a CSV header row");
  for (std::int64_t j = 0; j < x.cols; ++j)
    if (x.header[j] == spec) return j;
  fail(kExitData, "--y-col column \"" + spec + "\" not found in header");
}

LoadedData load_inputs(const std::string& x_path, const std::string& y_path,
                       const std::string& y_col) {
  const CsvMatrix xm = read_csv_checked(x_path);
  LoadedData data;
  data.n = xm.rows;

  if (!y_path.empty()) {
    const CsvMatrix ym = read_csv_checked(y_path);
    if (ym.cols != 1)
      fail(kExitData, "response file \"" + y_path + "\" must have exactly one column, found " +
                          std::to_string(ym.cols));
    if (ym.rows != xm.rows)
      fail(kExitData, "response has " + std::to_string(ym.rows) + " rows but the design has " +
                          std::to_string(xm.rows));
    data.y = ym.values;
    data.p = xm.cols;
    data.x = xm.values;
    data.names = xm.header;
  } else {
    const std::int64_t yj = resolve_y_column(xm, y_col);
    if (xm.cols < 2) fail(kExitData, "design needs at least one predictor besides --y-col");
    data.p = xm.cols - 1;
    data.y.assign(xm.values.begin() + yj * xm.rows, xm.values.begin() + (yj + 1) * xm.rows);
    data.x.reserve(static_cast<std::size_t>(data.p) * xm.rows);
    for (std::int64_t j = 0; j < xm.cols; ++j) {
      if (j == yj) continue;
      data.x.insert(data.x.end(), xm.values.begin() + j * xm.rows,
                    xm.values.begin() + (j + 1) * xm.rows);
      if (!xm.header.empty()) data.names.push_back(xm.header[j]);
    }
  }
  if (!data.names.empty() && static_cast<std::int64_t>(data.names.size()) != data.p)
    fail(kExitData, "header width does not match the predictor count");
  return data;
}

DatasetPtr make_dataset(const LoadedData& data) {
  rpcs_dataset* ds = nullptr;
  check(rpcs_dataset_create(data.x.data(), data.n, data.p, data.y.data(), &ds));
  return DatasetPtr(ds);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitIo, "cannot open \"" + path + "\" for writing");
  out << content;
  if (!out) fail(kExitIo, "write failure on \"" + path + "\"");
}

double resolve_lambda(const std::string& spec, std::int64_t n, std::int64_t p) {
  if (spec == "rpc1" || spec == "rpc2" || spec == "rpc3") {
    double presets[3];
    check(rpcs_lambda_presets(n, p, presets));
    return presets[spec == "rpc1" ? 0 : (spec == "rpc2" ? 1 : 2)];
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(spec, &used);
    if (used != spec.size() || !(v > 0.0)) throw std::invalid_argument(spec);
    return v;
  } catch (const std::exception&) {
    fail(kExitUsage, "--lambda must be a positive number or one of rpc1|rpc2|rpc3, got \"" +
                         spec + "\"");
  }
}

// ---------------------------------------------------------------- screen --

int cmd_screen(const std::string& x_path, const std::string& y_path, const std::string& y_col,
               const std::string& method, const std::string& lambda_spec, std::int64_t k,
               const std::string& out_path, const std::string& format, int threads) {
  const LoadedData data = load_inputs(x_path, y_path, y_col);
  const DatasetPtr ds = make_dataset(data);

  std::optional<double> lambda;
  if (method == "rpc") {
    if (lambda_spec.empty()) fail(kExitUsage, "--method rpc requires --lambda");
    lambda = resolve_lambda(lambda_spec, data.n, data.p);
  } else if (method == "holp") {
    lambda = resolve_lambda(lambda_spec.empty() ? "rpc3" : lambda_spec, data.n, data.p);
  } else if (!lambda_spec.empty()) {
    fail(kExitUsage, "--method " + method + " does not take --lambda");
  }

  rpcs_result* raw = nullptr;
  const auto t0 = std::chrono::steady_clock::now();
  if (method == "rpc")
    check(rpcs_screen_rpc(ds.get(), *lambda, k, threads, &raw));
  else if (method == "holp")
    check(rpcs_screen_holp(ds.get(), *lambda, k, threads, &raw));
  else if (method == "sis")
    check(rpcs_screen_sis(ds.get(), k, &raw));
  else
    check(rpcs_screen_fr(ds.get(), k, &raw));
  const ResultPtr result(raw);
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  json manifest{{"command", "screen"}, {"input", x_path}, {"n", data.n}, {"p", data.p},
                {"method", method},    {"k", k},           {"elapsed_ms", elapsed_ms}};
  if (lambda) manifest["lambda"] = *lambda;

  const std::int64_t count = rpcs_result_size(result.get());
  const std::int64_t* selected = rpcs_result_selected(result.get());
  const double* scores = rpcs_result_scores(result.get());

  if (format == "json") {
    json selection = json::array();
    for (std::int64_t r = 0; r < count; ++r) {
      const std::int64_t col = selected[r];
      json rec{{"rank", r + 1}, {"column", col}, {"score", scores[col]},
               {"abs_score", std::abs(scores[col])}};
      if (!data.names.empty()) rec["name"] = data.names[col];
      selection.push_back(std::move(rec));
    }
    const std::string payload = json{{"manifest", manifest}, {"selection", selection}}.dump(2) + "\n";
    if (out_path.empty())
      std::cout << payload;
    else
      write_file(out_path, payload);
    return 0;
  }

  std::string payload = "rank,column,name,score,abs_score\n";
  for (std::int64_t r = 0; r < count; ++r) {
    const std::int64_t col = selected[r];
    payload += std::to_string(r + 1);
    payload += ',';
    payload += std::to_string(col);
    payload += ',';
    if (!data.names.empty()) payload += data.names[col];
    payload += ',';
    payload += number_repr(scores[col]);
    payload += ',';
    payload += number_repr(std::abs(scores[col]));
    payload += '\n';
  }
  if (out_path.empty()) {
    std::cout << payload << "# manifest: " << manifest.dump() << "\n";
  } else {
    write_file(out_path, payload);
    write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
  }
  return 0;
}

// -------------------------------------------------------------- simulate --

int cmd_simulate(const std::string& plan_path, const std::string& out_dir, int threads,
                 std::optional<std::uint64_t> seed) {
  std::ifstream in(plan_path, std::ios::binary);
  if (!in) fail(kExitIo, "cannot open \"" + plan_path + "\"");
  std::string plan_text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(kExitIo, "read failure on \"" + plan_path + "\"");

  char* metrics = nullptr;
  char* table_text = nullptr;
  char* table_csv = nullptr;
  check(rpcs_simulate_plan_json(plan_text.c_str(), threads, seed.value_or(0), seed.has_value(),
                                &metrics, &table_text, &table_csv));
  const std::unique_ptr<char, decltype(&rpcs_free_string)> m(metrics, rpcs_free_string);
  const std::unique_ptr<char, decltype(&rpcs_free_string)> tt(table_text, rpcs_free_string);
  const std::unique_ptr<char, decltype(&rpcs_free_string)> tc(table_csv, rpcs_free_string);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(kExitIo, "cannot create output directory \"" + out_dir + "\": " + ec.message());
  const auto dir = std::filesystem::path(out_dir);
  write_file((dir / "metrics.json").string(), std::string(m.get()) + "\n");
  write_file((dir / "table.txt").string(), tt.get());
  write_file((dir / "table.csv").string(), tc.get());

  std::cout << tt.get();
  return 0;
}

// --------------------------------------------------------------- compare --

int cmd_compare(const std::string& x_path, const std::string& y_path, std::int64_t k,
                const std::string& out_path, int threads) {
  const LoadedData data = load_inputs(x_path, y_path, "");
  const DatasetPtr ds = make_dataset(data);

  double presets[3];
  check(rpcs_lambda_presets(data.n, data.p, presets));

  struct Entry {
    std::string name;
    std::optional<double> lambda;
    ResultPtr result;
  };
  std::vector<Entry> entries;
  auto run = [&](const std::string& name, std::optional<double> lambda, auto&& call) {
    rpcs_result* raw = nullptr;
    check(call(&raw));
    entries.push_back(Entry{name, lambda, ResultPtr(raw)});
  };
  run("RPC1", presets[0], [&](rpcs_result** out) {
    return rpcs_screen_rpc(ds.get(), presets[0], k, threads, out);
  });
  run("RPC2", presets[1], [&](rpcs_result** out) {
    return rpcs_screen_rpc(ds.get(), presets[1], k, threads, out);
  });
  run("RPC3", presets[2], [&](rpcs_result** out) {
    return rpcs_screen_rpc(ds.get(), presets[2], k, threads, out);
  });
  run("URPC", std::nullopt, [&](rpcs_result** out) {
    return rpcs_screen_rpc_union(ds.get(), presets, 3, k, threads, out);
  });
  run("HOLP", presets[2], [&](rpcs_result** out) {
    return rpcs_screen_holp(ds.get(), presets[2], k, threads, out);
  });
  run("SIS", std::nullopt, [&](rpcs_result** out) { return rpcs_screen_sis(ds.get(), k, out); });

  auto selected_set = [](const Entry& e) {
    const std::int64_t* sel = rpcs_result_selected(e.result.get());
    return std::vector<std::int64_t>(sel, sel + rpcs_result_size(e.result.get()));
  };
  auto jaccard = [](std::vector<std::int64_t> a, std::vector<std::int64_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::int64_t> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    const double uni = static_cast<double>(a.size() + b.size() - inter.size());
    return uni == 0.0 ? 1.0 : static_cast<double>(inter.size()) / uni;
  };

  json methods = json::array();
  for (const Entry& e : entries) {
    json entry{{"method", e.name}, {"selected", selected_set(e)}};
    if (e.lambda) entry["lambda"] = *e.lambda;
    if (e.name == "URPC") entry["lambda"] = std::vector<double>{presets[0], presets[1], presets[2]};
    methods.push_back(std::move(entry));
  }
  json jac = json::object();
  for (const Entry& a : entries) {
    json row = json::object();
    for (const Entry& b : entries)
      if (a.name != b.name) row[b.name] = jaccard(selected_set(a), selected_set(b));
    jac[a.name] = std::move(row);
  }
  const json payload{{"manifest", json{{"command", "compare"}, {"input", x_path}, {"n", data.n},
                                       {"p", data.p}, {"k", k}}},
                     {"methods", methods},
                     {"jaccard", jac}};

  if (out_path.empty()) {
    std::cout << payload.dump(2) << "\n";
    return 0;
  }
  write_file(out_path, payload.dump(2) + "\n");

  // Human-readable overlap matrix on stdout when the JSON went to a file.
  std::cout << "pairwise Jaccard overlap (k=" << k << ")\n        ";
  for (const Entry& e : entries) std::cout << e.name << std::string(8 - e.name.size(), ' ');
  std::cout << "\n";
  for (const Entry& a : entries) {
    std::cout << a.name << std::string(8 - a.name.size(), ' ');
    for (const Entry& b : entries) {
      char buf[16];
      if (a.name == b.name)
        std::snprintf(buf, sizeof buf, "%-8s", "-");
      else
        std::snprintf(buf, sizeof buf, "%-8.3f", jaccard(selected_set(a), selected_set(b)));
      std::cout << buf;
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable screening for high-dimensional linear regression"};
  app.set_version_flag("--version", std::string(rpcs_version()));
  app.require_subcommand(1);

  std::string x_path, y_path, y_col, method, lambda_spec, out_path, format = "csv";
  std::string plan_path, out_dir = ".";
  std::int64_t k = 0;
  int threads = 0;
  std::optional<std::uint64_t> seed;

  CLI::App* screen = app.add_subcommand("screen", "Rank and select predictors for one dataset");
  screen->add_option("--x", x_path, "Design matrix CSV (rows = observations)")->required();
  auto* yopt = screen->add_option("--y", y_path, "Response CSV (single column)");
  auto* ycol = screen->add_option("--y-col", y_col, "Response column of --x (name or 0-based index)");
  yopt->excludes(ycol);
  screen->add_option("--method", method, "rpc|holp|sis|fr")
      ->required()
      ->check(CLI::IsMember({"rpc", "holp", "sis", "fr"}));
  screen->add_option("--lambda", lambda_spec,
                     "Ridge level: positive number or rpc1|rpc2|rpc3 (required for rpc; "
                     "holp defaults to rpc3)");
  screen->add_option("--k", k, "Submodel size")->required()->check(CLI::PositiveNumber);
  screen->add_option("--out", out_path, "Write output here instead of stdout");
  screen->add_option("--format", format, "csv|json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  screen->add_option("--threads", threads, "Worker threads (default: RPC_THREADS or hardware)")
      ->check(CLI::PositiveNumber);

  CLI::App* simulate = app.add_subcommand("simulate", "Run a benchmark plan document");
  simulate->add_option("--plan", plan_path, "BenchmarkPlan JSON (object or array)")->required();
  simulate->add_option("--out-dir", out_dir, "Directory for metrics.json/table.txt/table.csv (default .)");
  simulate->add_option("--threads", threads, "Worker threads (default: RPC_THREADS or hardware)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Override every plan's base seed");

  CLI::App* compare = app.add_subcommand("compare", "Run all screening methods on one dataset");
  compare->add_option("--x", x_path, "Design matrix CSV")->required();
  compare->add_option("--y", y_path, "Response CSV (single column)")->required();
  compare->add_option("--k", k, "Submodel size")->required()->check(CLI::PositiveNumber);
  compare->add_option("--out", out_path, "Write the JSON report here");
  compare->add_option("--threads", threads, "Worker threads (default: RPC_THREADS or hardware)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "rpcscreen: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (screen->parsed()) {
      if (y_path.empty() && y_col.empty())
        fail(kExitUsage, "screen needs --y or --y-col");
      return cmd_screen(x_path, y_path, y_col, method, lambda_spec, k, out_path, format, threads);
    }
    if (simulate->parsed()) return cmd_simulate(plan_path, out_dir, threads, seed);
    return cmd_compare(x_path, y_path, k, out_path, threads);
  } catch (const CliFailure& f) {
    std::cerr << "rpcscreen: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "rpcscreen: " << e.what() << "\n";
    return kExitNumeric;
  }
}
