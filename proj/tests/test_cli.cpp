// Drives the installed binary as a subprocess and checks output bytes and
// exit codes. RPCS_CLI_PATH is injected by the build.

#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/datagen.hpp"
#include "core/screening.hpp"
#include "core/standardize.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_counter = 0;

// Executes `cli args`, capturing both streams. Commands run through /bin/sh,
// so env-var prefixes in `prefix` work too.
RunResult run_cli(const std::string& args, const std::string& prefix = "") {
    std::string out_path = "/tmp/rpcs_cli_out_" + std::to_string(run_counter);
    std::string err_path = "/tmp/rpcs_cli_err_" + std::to_string(run_counter);
    ++run_counter;
    std::string cmd = prefix + RPCS_CLI_PATH " " + args + " >" + out_path +
                      " 2>" + err_path;
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

struct TempDir {
    std::string path;
    TempDir() {
        char tmpl[] = "/tmp/rpcs_cli_XXXXXX";
        path = mkdtemp(tmpl);
    }
    ~TempDir() {
        std::string cmd = "rm -rf " + path;
        if (std::system(cmd.c_str()) != 0) std::perror("rm");
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// Toy design whose response duplicates column "c" (index 2): every screen
// must rank that column first.
const char* kToyCsv =
    "a,b,c,y\n"
    "1,4,2,2\n"
    "2,5,1,1\n"
    "3,6,7,7\n"
    "4,8,3,3\n"
    "5,9,9,9\n"
    "6,7,5,5\n";

// First data line of the ranked CSV output: "1,<column>,<name>,...".
std::int64_t top_ranked_column(const std::string& csv_out) {
    std::istringstream in(csv_out);
    std::string line;
    REQUIRE(std::getline(in, line));  // header
    REQUIRE(std::getline(in, line));
    std::size_t c1 = line.find(',');
    std::size_t c2 = line.find(',', c1 + 1);
    return std::stoll(line.substr(c1 + 1, c2 - c1 - 1));
}

// Ranked scores keyed by column index, parsed from the CSV output.
std::vector<double> scores_by_column(const std::string& csv_out, std::int64_t p) {
    std::vector<double> scores(static_cast<std::size_t>(p), 0.0);
    std::istringstream in(csv_out);
    std::string line;
    REQUIRE(std::getline(in, line));
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream cells(line);
        std::string rank, column, name, score;
        std::getline(cells, rank, ',');
        std::getline(cells, column, ',');
        std::getline(cells, name, ',');
        std::getline(cells, score, ',');
        scores[static_cast<std::size_t>(std::stoll(column))] = std::stod(score);
    }
    return scores;
}

std::string strip_manifest_lines(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("# manifest:", 0) != 0) out << line << "\n";
    return out.str();
}

}  // namespace

TEST_CASE("every method ranks a duplicated response column first") {
    TempDir dir;
    write_file(dir.path + "/toy.csv", kToyCsv);
    for (std::string args : {
             std::string("--method sis"),
             std::string("--method rpc --lambda rpc3"),
             std::string("--method rpc --lambda 0.5"),
             std::string("--method holp"),
             std::string("--method fr"),
         }) {
        RunResult r = run_cli("screen --x " + dir.path + "/toy.csv --y-col y " +
                              args + " --k 2");
        CAPTURE(args);
        CHECK(r.exit_code == 0);
        CHECK(r.err.empty());
        CHECK(top_ranked_column(r.out) == 2);
        CHECK(r.out.find("# manifest:") != std::string::npos);
    }
}

TEST_CASE("the response can come from its own file") {
    TempDir dir;
    write_file(dir.path + "/x.csv", "1,4\n2,5\n3,6\n4,8\n5,9\n6,7\n");
    write_file(dir.path + "/y.csv", "2\n4\n6\n8\n10\n12\n");
    RunResult r = run_cli("screen --x " + dir.path + "/x.csv --y " + dir.path +
                          "/y.csv --method sis --k 1");
    CHECK(r.exit_code == 0);
    CHECK(top_ranked_column(r.out) == 0);
}

TEST_CASE("json output carries the manifest and the ranked selection") {
    TempDir dir;
    write_file(dir.path + "/toy.csv", kToyCsv);
    RunResult r = run_cli("screen --x " + dir.path + "/toy.csv --y-col y "
                          "--method rpc --lambda rpc1 --k 3 --format json");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["manifest"]["command"] == "screen");
    CHECK(j["manifest"]["n"] == 6);
    CHECK(j["manifest"]["p"] == 3);
    CHECK(j["manifest"]["method"] == "rpc");
    CHECK(j["manifest"]["lambda"] == 0.5);  // p/n
    REQUIRE(j["selection"].size() == 3);
    CHECK(j["selection"][0]["column"] == 2);
    CHECK(j["selection"][0]["name"] == "c");
    CHECK(j["selection"][0]["rank"] == 1);
}

TEST_CASE("output lands in a file when asked, with a manifest sidecar") {
    TempDir dir;
    write_file(dir.path + "/toy.csv", kToyCsv);
    std::string out = dir.path + "/sel.csv";
    RunResult r = run_cli("screen --x " + dir.path + "/toy.csv --y-col y "
                          "--method sis --k 2 --out " + out);
    CHECK(r.exit_code == 0);
    std::string content = slurp(out);
    CHECK(content.find("rank,column,name,score,abs_score") == 0);
    CHECK(content.find("# manifest") == std::string::npos);
    json manifest = json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["k"] == 2);
    CHECK(manifest["method"] == "sis");
}

TEST_CASE("missing input files exit 3 with a one-line message") {
    RunResult r = run_cli("screen --x /tmp/rpcs_no_such_file.csv --y-col 0 "
                          "--method sis --k 1");
    CHECK(r.exit_code == 3);
    CHECK(r.out.empty());
    CHECK(r.err.find("rpcs_no_such_file.csv") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("unusable data exits 4") {
    TempDir dir;
    write_file(dir.path + "/ragged.csv", "1,2,3\n4,5\n");
    RunResult ragged = run_cli("screen --x " + dir.path +
                               "/ragged.csv --y-col 0 --method sis --k 1");
    CHECK(ragged.exit_code == 4);
    CHECK(ragged.err.find("line 2") != std::string::npos);

    write_file(dir.path + "/text.csv", "h1,h2\n1,2\n3,oops\n");
    RunResult text = run_cli("screen --x " + dir.path +
                             "/text.csv --y-col 0 --method sis --k 1");
    CHECK(text.exit_code == 4);

    write_file(dir.path + "/const.csv", "a,b,y\n1,7,1\n2,7,2\n3,7,3\n4,7,4\n");
    RunResult constant = run_cli("screen --x " + dir.path +
                                 "/const.csv --y-col y --method sis --k 1");
    CHECK(constant.exit_code == 4);

    write_file(dir.path + "/toy.csv", kToyCsv);
    RunResult big_k = run_cli("screen --x " + dir.path +
                              "/toy.csv --y-col y --method sis --k 99");
    CHECK(big_k.exit_code == 4);

    write_file(dir.path + "/y2.csv", "1,2\n3,4\n5,6\n");
    write_file(dir.path + "/x3.csv", "1,2\n2,3\n3,5\n");
    RunResult wide_y = run_cli("screen --x " + dir.path + "/x3.csv --y " +
                               dir.path + "/y2.csv --method sis --k 1");
    CHECK(wide_y.exit_code == 4);
}

TEST_CASE("usage mistakes exit 2") {
    TempDir dir;
    write_file(dir.path + "/toy.csv", kToyCsv);
    const std::string base = "screen --x " + dir.path + "/toy.csv --y-col y ";
    CHECK(run_cli(base + "--method rpc --k 2").exit_code == 2);          // no lambda
    CHECK(run_cli(base + "--method sis --lambda 1 --k 2").exit_code == 2);
    CHECK(run_cli(base + "--method fr --lambda 1 --k 2").exit_code == 2);
    CHECK(run_cli(base + "--method nonsense --k 2").exit_code == 2);
    CHECK(run_cli(base + "--method rpc --lambda -3 --k 2").exit_code == 2);
    CHECK(run_cli(base + "--method rpc --lambda rpc9 --k 2").exit_code == 2);
    CHECK(run_cli(base + "--method sis --k 2 --format yaml").exit_code == 2);
    CHECK(run_cli("screen --x " + dir.path + "/toy.csv --method sis --k 2").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    RunResult both = run_cli("screen --x " + dir.path + "/toy.csv --y " +
                             dir.path + "/toy.csv --y-col y --method sis --k 2");
    CHECK(both.exit_code == 2);
}

TEST_CASE("numeric breakdown exits 5") {
    TempDir dir;
    write_file(dir.path + "/toy.csv", kToyCsv);
    // A denormal ridge leaves the n x n system rank-deficient (p < n), so
    // the factorization must fail rather than fabricate scores.
    RunResult r = run_cli("screen --x " + dir.path + "/toy.csv --y-col y "
                          "--method rpc --lambda 1e-300 --k 2");
    CHECK(r.exit_code == 5);
    CHECK(r.err.find("pivot") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("screen --help").exit_code == 0);
}

TEST_CASE("scores printed by the binary equal the library's bit for bit") {
    rpcs::SimSetting s;
    s.design = rpcs::Design::ar1;
    s.n = 50;
    s.p = 200;
    s.r_squared = 0.4;
    s.seed = 616;
    rpcs::GeneratedDataset g = rpcs::generate(s);

    TempDir dir;
    std::ostringstream csv;
    csv.precision(17);
    for (rpcs::index_t i = 0; i < s.n; ++i) {
        for (rpcs::index_t j = 0; j < s.p; ++j) csv << g.x(i, j) << ",";
        csv << g.y[i] << "\n";
    }
    write_file(dir.path + "/gen.csv", csv.str());

    RunResult r = run_cli("screen --x " + dir.path + "/gen.csv --y-col 200 "
                          "--method rpc --lambda 2.5 --k 200");
    REQUIRE(r.exit_code == 0);
    std::vector<double> cli_scores = scores_by_column(r.out, s.p);

    rpcs::StandardizedData d = rpcs::standardize(g.x, g.y);
    rpcs::RpcComponents c = rpcs::rpc_fast(d, 2.5, 1);
    for (rpcs::index_t j = 0; j < s.p; ++j)
        CHECK(cli_scores[static_cast<std::size_t>(j)] == c.scores[j]);
}

TEST_CASE("output bytes do not depend on the thread count") {
    rpcs::SimSetting s;
    s.design = rpcs::Design::compound;
    s.n = 60;
    s.p = 500;
    s.r_squared = 0.3;
    s.seed = 2718;
    rpcs::GeneratedDataset g = rpcs::generate(s);

    TempDir dir;
    std::ostringstream csv;
    csv.precision(17);
    for (rpcs::index_t i = 0; i < s.n; ++i) {
        for (rpcs::index_t j = 0; j < s.p; ++j) csv << g.x(i, j) << ",";
        csv << g.y[i] << "\n";
    }
    write_file(dir.path + "/gen.csv", csv.str());

    const std::string base = "screen --x " + dir.path + "/gen.csv --y-col 500 "
                             "--method rpc --lambda rpc2 --k 60 ";
    RunResult t1 = run_cli(base + "--threads 1");
    RunResult t4 = run_cli(base + "--threads 4");
    RunResult env = run_cli(base, "RPC_THREADS=2 ");
    REQUIRE(t1.exit_code == 0);
    REQUIRE(t4.exit_code == 0);
    REQUIRE(env.exit_code == 0);
    // Ranked rows must be byte-identical; the manifest differs only in its
    // timing field.
    CHECK(strip_manifest_lines(t1.out) == strip_manifest_lines(t4.out));
    CHECK(strip_manifest_lines(t1.out) == strip_manifest_lines(env.out));
}

TEST_CASE("compare reports consistent selections on an easy problem") {
    TempDir dir;
    write_file(dir.path + "/x.csv", "a,b,c\n1,4,2\n2,5,1\n3,6,7\n4,8,3\n5,9,9\n6,7,5\n");
    write_file(dir.path + "/y.csv", "2\n1\n7\n3\n9\n5\n");
    RunResult r = run_cli("compare --x " + dir.path + "/x.csv --y " + dir.path +
                          "/y.csv --k 2");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["methods"].size() == 6);
    for (const auto& m : j["methods"]) {
        CHECK(m["selected"][0] == 2);  // column c duplicates y
    }
    for (const auto& [a, row] : j["jaccard"].items()) {
        for (const auto& [b, v] : row.items()) {
            CHECK(v.get<double>() >= 0.0);
            CHECK(v.get<double>() <= 1.0);
            CHECK(v == j["jaccard"][b][a]);
        }
    }
    CHECK(j["jaccard"]["RPC1"]["RPC2"] == 1.0);
}

TEST_CASE("compare writes its report to a file and a table to stdout") {
    TempDir dir;
    write_file(dir.path + "/x.csv", "a,b,c\n1,4,2\n2,5,1\n3,6,7\n4,8,3\n5,9,9\n6,7,5\n");
    write_file(dir.path + "/y.csv", "2\n1\n7\n3\n9\n5\n");
    std::string out = dir.path + "/report.json";
    RunResult r = run_cli("compare --x " + dir.path + "/x.csv --y " + dir.path +
                          "/y.csv --k 2 --out " + out);
    REQUIRE(r.exit_code == 0);
    json j = json::parse(slurp(out));
    CHECK(j.contains("jaccard"));
    CHECK(r.out.find("RPC1") != std::string::npos);  // human-readable matrix
}

TEST_CASE("simulate writes metrics, tables, and honors the seed override") {
    TempDir dir;
    write_file(dir.path + "/plan.json", R"({
        "setting": {"design": "IID", "n": 30, "p": 40, "r_squared": 0.5, "seed": 11},
        "replications": 2,
        "methods": ["RPC1", "SIS"],
        "k": 40
    })");
    RunResult r = run_cli("simulate --plan " + dir.path + "/plan.json --out-dir " + dir.path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("RPC1") != std::string::npos);

    json metrics = json::parse(slurp(dir.path + "/metrics.json"));
    // k = p means every column is selected: full coverage by construction.
    CHECK(metrics["methods"][0]["cp"] == 1.0);
    CHECK(metrics["methods"][0]["tpr"] == 1.0);
    CHECK(metrics["methods"][1]["cp"] == 1.0);

    std::string table_csv = slurp(dir.path + "/table.csv");
    CHECK(table_csv.find("method,IID_tpr,IID_cp") != std::string::npos);
    CHECK(table_csv.find("RPC1,100.0,100.0") != std::string::npos);
    CHECK(table_csv.find("SIS,100.0,100.0") != std::string::npos);
    CHECK(slurp(dir.path + "/table.txt").find("IID") != std::string::npos);

    RunResult again = run_cli("simulate --plan " + dir.path + "/plan.json --out-dir " +
                              dir.path);
    REQUIRE(again.exit_code == 0);
    json rerun = json::parse(slurp(dir.path + "/metrics.json"));
    json first = metrics;
    for (auto& m : rerun["methods"]) m.erase("mean_runtime_ms");
    for (auto& m : first["methods"]) m.erase("mean_runtime_ms");
    CHECK(rerun == first);
}

TEST_CASE("simulate results change with the seed but not the thread count") {
    TempDir dir;
    write_file(dir.path + "/plan.json", R"({
        "setting": {"design": "AR1", "n": 40, "p": 120, "r_squared": 0.3, "seed": 5},
        "replications": 4,
        "methods": ["RPC1"],
        "k": 12
    })");
    RunResult a = run_cli("simulate --plan " + dir.path + "/plan.json --out-dir " +
                          dir.path + "/a --threads 1");
    RunResult b = run_cli("simulate --plan " + dir.path + "/plan.json --out-dir " +
                          dir.path + "/b --threads 4");
    RunResult c = run_cli("simulate --plan " + dir.path + "/plan.json --out-dir " +
                          dir.path + "/c --seed 999");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    REQUIRE(c.exit_code == 0);
    auto masked = [](const std::string& path) {
        json j = json::parse(slurp(path));
        for (auto& m : j["methods"]) m.erase("mean_runtime_ms");
        return j;
    };
    CHECK(masked(dir.path + "/a/metrics.json") == masked(dir.path + "/b/metrics.json"));
    json ja = json::parse(slurp(dir.path + "/a/metrics.json"));
    json jc = json::parse(slurp(dir.path + "/c/metrics.json"));
    CHECK(ja["setting"]["seed"] != jc["setting"]["seed"]);
}

TEST_CASE("simulate rejects bad plans with the right exits") {
    TempDir dir;
    CHECK(run_cli("simulate --plan " + dir.path + "/absent.json").exit_code == 3);

    write_file(dir.path + "/broken.json", "{nope");
    CHECK(run_cli("simulate --plan " + dir.path + "/broken.json").exit_code == 2);

    write_file(dir.path + "/missing.json", R"({"replications": 2, "methods": ["SIS"]})");
    RunResult missing = run_cli("simulate --plan " + dir.path + "/missing.json");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("setting") != std::string::npos);

    write_file(dir.path + "/badmethod.json", R"({
        "setting": {"design": "IID", "n": 20, "p": 30, "r_squared": 0.5, "seed": 1},
        "replications": 1, "methods": ["RPC9"]
    })");
    CHECK(run_cli("simulate --plan " + dir.path + "/badmethod.json").exit_code == 2);
}
