#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixcop/cli/commands.hpp"
#include "mixcop/cli/csv.hpp"
#include "mixcop/cli/manifest.hpp"
#include "mixcop/errors.hpp"

using namespace mixcop;
using namespace mixcop::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("mixcop_test_" + tag + "_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_tsv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, '\t')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// n rows of independent standard normals, or a latent AR(1) chain.
void write_gaussian_csv(const fs::path& p, int n, int d, double rho, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::ofstream out(p);
    for (int j = 0; j < d; ++j) out << (j ? "," : "") << "v" << j;
    out << '\n';
    const double c = std::sqrt(1 - rho * rho);
    for (int i = 0; i < n; ++i) {
        double prev = normal(gen);
        out << prev;
        for (int j = 1; j < d; ++j) {
            prev = rho * prev + c * normal(gen);
            out << ',' << prev;
        }
        out << '\n';
    }
}

}  // namespace

TEST_CASE("csv parsing") {
    std::istringstream in("a, b ,\"c\"\n1,2.5,\n NA ,-3e-1,7\n4,NaN,8\n");
    const Table t = read_csv(in);
    REQUIRE(t.names == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.values.rows() == 3);
    CHECK(t.values(0, 1) == 2.5);
    CHECK(std::isnan(t.values(0, 2)));
    CHECK(std::isnan(t.values(1, 0)));
    CHECK(t.values(1, 1) == -0.3);
    CHECK(std::isnan(t.values(2, 1)));
    CHECK(t.values(2, 2) == 8.0);
}

TEST_CASE("csv errors carry line numbers") {
    auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_csv(in);
        } catch (const ParseError& e) {
            return static_cast<long>(e.line());
        }
        return -1L;
    };
    CHECK(line_of("") == 1);
    CHECK(line_of("a,b\n1,2\n3\n") == 3);
    CHECK(line_of("a,b\n1,2\n3,x\n") == 3);
    CHECK(line_of("a,a\n1,2\n") == 1);
    CHECK(line_of("a,\n1,2\n") == 1);
    CHECK(line_of("a,b\n") == 1);
    CHECK_THROWS_AS(read_csv_file("/nonexistent/file.csv"), Error);
}

TEST_CASE("manifest parsing") {
    std::istringstream in(
        "# columns\n"
        "age = continuous\n"
        "grade = ordinal 3\n"
        "\n"
        "option.tau = b   # trailing comment\n"
        "option.lambda_path = 0.05, 0.1 0.2\n"
        "option.hbic_cn = 1.5\n"
        "option.seed = 42\n");
    const Manifest m = parse_manifest(in);
    REQUIRE(m.columns.size() == 2);
    CHECK(m.columns[1].kind == ColumnKind::Ordinal);
    CHECK(m.columns[1].levels == 3);
    CHECK(m.find("age") != nullptr);
    CHECK(m.find("nope") == nullptr);
    CHECK(m.tau == TauVariant::B);
    CHECK(m.lambda_path == std::vector<double>{0.05, 0.1, 0.2});
    CHECK(m.hbic_cn == 1.5);
    CHECK(m.seed == 42u);
}

TEST_CASE("manifest errors") {
    auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_manifest(in);
        } catch (const ParseError& e) {
            return static_cast<long>(e.line());
        }
        return -1L;
    };
    CHECK(line_of("a = continuous\nb = banana\n") == 2);
    CHECK(line_of("a = ordinal 1\n") == 1);
    CHECK(line_of("a = ordinal x\n") == 1);
    CHECK(line_of("just text\n") == 1);
    CHECK(line_of("a = continuous\na = continuous\n") == 2);
    CHECK(line_of("option.tau = c\n") == 1);
    CHECK(line_of("option.lambda_path = 0.1, -2\n") == 1);
    CHECK(line_of("option.unknown = 3\n") == 1);
    CHECK_THROWS_AS(parse_tau_variant("x"), DomainError);
    CHECK_THROWS_AS(parse_lambda_list(""), DomainError);
}

TEST_CASE("resolve_specs") {
    Eigen::MatrixXd data(6, 3);
    data << 0, 1.5, 1, 1, 2.5, 2, 2, 0.1, 3, 0, 0.2, 4, 1, 9.0, 5, 2, 1.1, 6;
    std::istringstream in("c = continuous\n");
    const Manifest m = parse_manifest(in);
    const auto specs = resolve_specs(m, {"a", "b", "c"}, data);
    CHECK(specs[0].kind == ColumnKind::Ordinal);
    CHECK(specs[0].levels == 3);
    CHECK(specs[1].kind == ColumnKind::Continuous);
    CHECK(specs[2].kind == ColumnKind::Continuous);

    std::istringstream bad("zzz = continuous\n");
    CHECK_THROWS_AS(resolve_specs(parse_manifest(bad), {"a", "b", "c"}, data), DomainError);
}

TEST_CASE("estimate on comonotone data") {
    TempDir dir("como");
    std::string csv = "x,y\n";
    for (int i = 0; i < 40; ++i) csv += std::to_string(i) + "," + std::to_string(std::exp(0.1 * i)) + "\n";
    write_file(dir.path / "data.csv", csv);
    RunOptions opts;
    opts.data = dir.path / "data.csv";
    opts.out_dir = dir.path / "out";
    const auto report = cmd_estimate(opts);
    CHECK(report["status"] == "ok");
    CHECK(report["clamped_entries"] == 1);
    const auto corr = read_tsv(opts.out_dir / "correlation.tsv");
    REQUIRE(corr.size() == 3);
    CHECK(corr[0] == std::vector<std::string>{"variable", "x", "y"});
    CHECK(std::stod(corr[1][2]) == 1.0 - 1e-6);
    CHECK(corr[1][2] == "0.999999");
    const auto entries = read_tsv(opts.out_dir / "entries.tsv");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0] == std::vector<std::string>{"variable_a", "variable_b", "method", "tau", "estimate", "clamped"});
    CHECK(entries[1][2] == "continuous-continuous");
    CHECK(entries[1][5] == "1");
    CHECK(nlohmann::json::parse(slurp(opts.out_dir / "report.json")) == report);
}

TEST_CASE("estimate errors") {
    TempDir dir("err");
    write_file(dir.path / "empty.csv", "");
    RunOptions opts;
    opts.data = dir.path / "empty.csv";
    opts.out_dir = dir.path / "out";
    try {
        cmd_estimate(opts);
        FAIL("expected StageFailure");
    } catch (const StageFailure& f) {
        CHECK(f.stage() == "read_data");
        CHECK(f.kind() == "parse_error");
        CHECK(error_summary("estimate", f)["line"] == 1);
    }

    // Two 4-level ordinal columns have no bridge.
    std::string csv = "a,b,c\n";
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<int> lv(0, 3);
    for (int i = 0; i < 50; ++i) csv += std::to_string(lv(gen)) + "," + std::to_string(lv(gen)) + "," + std::to_string(i * 0.37) + "\n";
    write_file(dir.path / "ord.csv", csv);
    opts.data = dir.path / "ord.csv";
    try {
        cmd_estimate(opts);
        FAIL("expected StageFailure");
    } catch (const StageFailure& f) {
        CHECK(f.kind() == "unsupported_pair");
        const auto summary = error_summary("estimate", f);
        CHECK(summary["pairs"] == nlohmann::json::array({{"a", "b"}}));
        CHECK(summary["status"] == "error");
    }
    opts.allow_partial = true;
    const auto report = cmd_estimate(opts);
    CHECK(report["missing_entries"] == 1);
    const auto corr = read_tsv(opts.out_dir / "correlation.tsv");
    CHECK(corr[1][2] == "NA");

    opts.allow_partial = false;
    opts.allow_sin_fallback = true;
    const auto fb = cmd_estimate(opts);
    CHECK(fb["missing_entries"] == 0);
    CHECK(read_tsv(opts.out_dir / "entries.tsv")[1][2] == "sin-fallback");
}

TEST_CASE("graph on independent data") {
    TempDir dir("indep");
    write_gaussian_csv(dir.path / "data.csv", 500, 4, 0.0, 3);
    RunOptions opts;
    opts.data = dir.path / "data.csv";
    opts.out_dir = dir.path / "out";
    const auto report = cmd_graph(opts);
    // HBIC keeps the smallest penalty here; whatever survives must be weak.
    const auto edges = read_tsv(opts.out_dir / "edges.tsv");
    CHECK(edges.size() == static_cast<std::size_t>(report["edges"].get<int>()) + 1);
    for (std::size_t e = 1; e < edges.size(); ++e) CHECK(std::abs(std::stod(edges[e][3])) < 0.05);
    const auto trace = read_tsv(opts.out_dir / "hbic_trace.tsv");
    CHECK(trace.size() == 11);
    CHECK(trace[0] == std::vector<std::string>{"lambda", "hbic", "edges"});
    const std::string dot = slurp(opts.out_dir / "graph.dot");
    std::size_t dashes = 0;
    for (auto pos = dot.find("--"); pos != std::string::npos; pos = dot.find("--", pos + 2)) ++dashes;
    CHECK(dashes == edges.size() - 1);
    for (const char* f : {"correlation.tsv", "projected_correlation.tsv", "precision.tsv", "report.json"})
        CHECK(fs::exists(opts.out_dir / f));
}

TEST_CASE("graph on a chain") {
    TempDir dir("chain");
    write_gaussian_csv(dir.path / "data.csv", 2000, 5, 0.5, 4);
    RunOptions opts;
    opts.data = dir.path / "data.csv";
    opts.out_dir = dir.path / "out";
    cmd_graph(opts);
    const auto edges = read_tsv(opts.out_dir / "edges.tsv");
    REQUIRE(edges.size() >= 5);
    // Every chain link is selected with a clearly positive partial correlation;
    // any extra (shrinkage-induced) edge is much weaker.
    int links = 0;
    for (std::size_t e = 1; e < edges.size(); ++e) {
        const int a = std::stoi(edges[e][0].substr(1));
        const int b = std::stoi(edges[e][1].substr(1));
        const double pc = std::stod(edges[e][3]);
        if (b == a + 1) {
            ++links;
            CHECK(pc > 0.3);
        } else {
            CHECK(std::abs(pc) < 0.1);
        }
    }
    CHECK(links == 4);
    CHECK(slurp(opts.out_dir / "graph.dot").find("\"v0\" -- \"v1\" [label=\"0.") != std::string::npos);

    opts.lambda_path = {0.2, 0.9};
    opts.hbic_cn = 2.0;
    const auto r = cmd_graph(opts);
    CHECK(r["hbic_cn"] == 2.0);
    CHECK(read_tsv(opts.out_dir / "hbic_trace.tsv").size() == 3);
}

TEST_CASE("simulate") {
    TempDir dir("sim");
    RunOptions opts;
    opts.out_dir = dir.path / "a";
    opts.scenario = "7";
    try {
        cmd_simulate(opts);
        FAIL("expected StageFailure");
    } catch (const StageFailure& f) {
        CHECK(f.kind() == "domain_error");
        CHECK(f.stage() == "simulate");
    }

    opts.scenario = "1";
    opts.reps = 2;
    opts.n = 30;
    opts.seed = 5;
    opts.threads = 2;
    const auto report = cmd_simulate(opts);
    CHECK(report["curves"] == 15);
    const auto rows = read_tsv(opts.out_dir / "scenario1_curves.tsv");
    CHECK(rows.size() == 1 + 15 * 10);
    CHECK(rows[0] == std::vector<std::string>{"p", "bin_low", "bin_high", "mse", "reps"});
    CHECK(rows[1][0] == "2");
    CHECK(rows.back()[0] == "16");

    RunOptions again = opts;
    again.out_dir = dir.path / "b";
    again.threads = 1;
    cmd_simulate(again);
    CHECK(slurp(opts.out_dir / "scenario1_curves.tsv") == slurp(again.out_dir / "scenario1_curves.tsv"));
    CHECK(slurp(opts.out_dir / "scenario1_baseline.tsv") == slurp(again.out_dir / "scenario1_baseline.tsv"));
}

#ifdef MIXCOP_BINARY
TEST_CASE("binary exit codes and error summary") {
    TempDir dir("bin");
    write_file(dir.path / "empty.csv", "");
    const std::string bin = MIXCOP_BINARY;
    const std::string err = (dir.path / "err.json").string();
    const int bad = std::system((bin + " estimate --data " + (dir.path / "empty.csv").string() + " --out-dir " +
                                 (dir.path / "o").string() + " 2> " + err + " > /dev/null")
                                    .c_str());
    CHECK(bad != 0);
    const auto summary = nlohmann::json::parse(slurp(err));
    CHECK(summary["status"] == "error");
    CHECK(summary["error"] == "parse_error");

    write_gaussian_csv(dir.path / "data.csv", 200, 3, 0.3, 9);
    const std::string out = (dir.path / "ok.json").string();
    const int ok = std::system((bin + " estimate --data " + (dir.path / "data.csv").string() + " --tau b --out-dir " +
                                (dir.path / "o").string() + " > " + out)
                                   .c_str());
    CHECK(ok == 0);
    CHECK(nlohmann::json::parse(slurp(out))["tau"] == "b");
}
#endif
