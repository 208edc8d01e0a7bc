#include "mixcop/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mixcop/cli/csv.hpp"
#include "mixcop/cli/manifest.hpp"
#include "mixcop/errors.hpp"
#include "mixcop/estimator.hpp"
#include "mixcop/glasso.hpp"
#include "mixcop/simulate.hpp"

namespace mixcop::cli {

namespace {

using nlohmann::json;

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageFailure&) {
        throw;
    } catch (const ParseError& e) {
        throw StageFailure(name, "parse_error", e.what(), {{"line", e.line()}});
    } catch (const DegenerateColumnError& e) {
        throw StageFailure(name, "degenerate_column", e.what(), {{"column", e.column()}});
    } catch (const UnsupportedPairError& e) {
        throw StageFailure(name, "unsupported_pair", e.what(), {{"columns", {e.j(), e.k()}}});
    } catch (const DomainError& e) {
        throw StageFailure(name, "domain_error", e.what());
    } catch (const ConvergenceError& e) {
        throw StageFailure(name, "convergence_error", e.what());
    } catch (const Error& e) {
        throw StageFailure(name, "error", e.what());
    } catch (const std::exception& e) {
        throw StageFailure(name, "internal_error", e.what());
    }
}

std::string fmt(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

void write_matrix(const std::filesystem::path& path, const std::vector<std::string>& names,
                  const Eigen::MatrixXd& m) {
    std::ofstream out = open_output(path);
    out << "variable";
    for (const auto& n : names) out << '\t' << n;
    out << '\n';
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        out << names[static_cast<std::size_t>(j)];
        for (Eigen::Index k = 0; k < m.cols(); ++k) out << '\t' << fmt(m(j, k));
        out << '\n';
    }
}

void write_entries(const std::filesystem::path& path, const std::vector<std::string>& names,
                   const LatentCorrelationMatrix& r) {
    std::ofstream out = open_output(path);
    out << "variable_a\tvariable_b\tmethod\ttau\testimate\tclamped\n";
    for (Eigen::Index j = 0; j < r.dim(); ++j) {
        for (Eigen::Index k = j + 1; k < r.dim(); ++k) {
            const EntryInfo& e = r.entry(j, k);
            out << names[static_cast<std::size_t>(j)] << '\t' << names[static_cast<std::size_t>(k)] << '\t'
                << to_string(e.method) << '\t' << (e.method == EntryMethod::Missing ? std::string("NA") : fmt(e.tau))
                << '\t' << fmt(r.values(j, k)) << '\t' << (e.clamped ? 1 : 0) << '\n';
        }
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

std::string quote_dot(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

struct Estimated {
    Table table;
    std::vector<ColumnSpec> specs;
    TauVariant variant = TauVariant::A;
    Manifest manifest;
    LatentCorrelationMatrix r;
};

json column_report(const std::vector<ColumnSpec>& specs) {
    json cols = json::array();
    for (const ColumnSpec& s : specs) {
        json c = {{"name", s.name}, {"kind", s.kind == ColumnKind::Ordinal ? "ordinal" : "continuous"}};
        if (s.kind == ColumnKind::Ordinal) c["levels"] = s.levels;
        cols.push_back(c);
    }
    return cols;
}

Estimated run_estimate(const RunOptions& opts, bool allow_partial) {
    Estimated est;
    est.table = stage("read_data", [&] { return read_csv_file(opts.data); });
    if (!opts.manifest.empty()) {
        est.manifest = stage("read_manifest", [&] { return read_manifest_file(opts.manifest); });
    }
    est.specs = stage("resolve_columns", [&] { return resolve_specs(est.manifest, est.table.names, est.table.values); });
    est.variant = opts.tau ? *opts.tau : est.manifest.tau.value_or(TauVariant::A);

    EstimatorOptions eo;
    eo.variant = est.variant;
    eo.allow_sin_fallback = opts.allow_sin_fallback;
    eo.allow_partial = true;  // collect every unsupported pair before deciding
    eo.threads = opts.threads;
    est.r = stage("estimate", [&] { return estimate_latent_correlation(est.table.values, est.specs, eo); });

    if (est.r.has_missing() && !allow_partial) {
        json pairs = json::array();
        std::string listing;
        for (Eigen::Index j = 0; j < est.r.dim(); ++j) {
            for (Eigen::Index k = j + 1; k < est.r.dim(); ++k) {
                if (est.r.entry(j, k).method != EntryMethod::Missing) continue;
                const auto& a = est.table.names[static_cast<std::size_t>(j)];
                const auto& b = est.table.names[static_cast<std::size_t>(k)];
                pairs.push_back({a, b});
                listing += (listing.empty() ? "" : ", ") + a + "/" + b;
            }
        }
        throw StageFailure("estimate", "unsupported_pair",
                           "no estimate for " + std::to_string(pairs.size()) + " pair(s): " + listing +
                               " (use --allow-partial or --allow-sin-fallback)",
                           {{"pairs", pairs}});
    }
    return est;
}

json base_report(const char* command, const RunOptions& opts, const Estimated& est) {
    json report = {
        {"command", command},
        {"status", "ok"},
        {"rows", est.table.values.rows()},
        {"columns", column_report(est.specs)},
        {"tau", est.variant == TauVariant::A ? "a" : "b"},
        {"clamped_entries", est.r.clamped_count()},
        {"allow_partial", opts.allow_partial},
        {"allow_sin_fallback", opts.allow_sin_fallback},
    };
    int missing = 0;
    for (Eigen::Index j = 0; j < est.r.dim(); ++j)
        for (Eigen::Index k = j + 1; k < est.r.dim(); ++k)
            if (est.r.entry(j, k).method == EntryMethod::Missing) ++missing;
    report["missing_entries"] = missing;
    return report;
}

void write_estimate_outputs(const RunOptions& opts, const Estimated& est) {
    stage("write_output", [&] {
        std::filesystem::create_directories(opts.out_dir);
        write_matrix(opts.out_dir / "correlation.tsv", est.table.names, est.r.values);
        write_entries(opts.out_dir / "entries.tsv", est.table.names, est.r);
    });
}

}  // namespace

json cmd_estimate(const RunOptions& opts) {
    const Estimated est = run_estimate(opts, opts.allow_partial);
    write_estimate_outputs(opts, est);
    json report = base_report("estimate", opts, est);
    report["outputs"] = {"correlation.tsv", "entries.tsv", "report.json"};
    stage("write_output", [&] { write_json(opts.out_dir / "report.json", report); });
    return report;
}

json cmd_graph(const RunOptions& opts) {
    const Estimated est = run_estimate(opts, false);
    write_estimate_outputs(opts, est);
    const auto& names = est.table.names;

    const Eigen::MatrixXd projected = stage("project", [&] { return project_psd(est.r.values); });

    GlassoConfig cfg;
    cfg.lambda_path = !opts.lambda_path.empty() ? opts.lambda_path : est.manifest.lambda_path;
    cfg.hbic_cn = opts.hbic_cn ? opts.hbic_cn : est.manifest.hbic_cn;
    cfg.threads = opts.threads;
    const int n = static_cast<int>(est.table.values.rows());
    const PrecisionEstimate prec = stage("glasso", [&] { return select_hbic(projected, n, cfg); });

    stage("write_output", [&] {
        write_matrix(opts.out_dir / "projected_correlation.tsv", names, projected);
        write_matrix(opts.out_dir / "precision.tsv", names, prec.omega);

        std::ofstream edges = open_output(opts.out_dir / "edges.tsv");
        edges << "variable_a\tvariable_b\tprecision\tpartial_correlation\n";
        std::ofstream dot = open_output(opts.out_dir / "graph.dot");
        dot << "graph latent {\n";
        for (const auto& name : names) dot << "  " << quote_dot(name) << ";\n";
        for (const auto& [j, k] : prec.edges) {
            const double w = prec.omega(j, k);
            const double pc = -w / std::sqrt(prec.omega(j, j) * prec.omega(k, k));
            const auto& a = names[static_cast<std::size_t>(j)];
            const auto& b = names[static_cast<std::size_t>(k)];
            edges << a << '\t' << b << '\t' << fmt(w) << '\t' << fmt(pc) << '\n';
            char label[32];
            std::snprintf(label, sizeof label, "%.2f", pc);
            dot << "  " << quote_dot(a) << " -- " << quote_dot(b) << " [label=\"" << label << "\"];\n";
        }
        dot << "}\n";

        std::ofstream trace = open_output(opts.out_dir / "hbic_trace.tsv");
        trace << "lambda\thbic\tedges\n";
        for (const HbicPoint& p : prec.hbic_trace) trace << fmt(p.lambda) << '\t' << fmt(p.hbic) << '\t' << p.edges << '\n';
    });

    json report = base_report("graph", opts, est);
    report["chosen_lambda"] = prec.chosen_lambda;
    report["edges"] = prec.edges.size();
    report["hbic_cn"] = cfg.hbic_cn ? *cfg.hbic_cn : std::log(std::log(static_cast<double>(n)));
    report["outputs"] = {"correlation.tsv",   "entries.tsv",   "projected_correlation.tsv",
                         "precision.tsv",     "edges.tsv",     "graph.dot",
                         "hbic_trace.tsv",    "report.json"};
    stage("write_output", [&] { write_json(opts.out_dir / "report.json", report); });
    return report;
}

json cmd_simulate(const RunOptions& opts) {
    json report = {{"command", "simulate"}, {"status", "ok"}, {"scenario", opts.scenario}};
    stage("simulate", [&] {
        std::filesystem::create_directories(opts.out_dir);
        if (opts.scenario == "1" || opts.scenario == "2") {
            ScenarioConfig cfg;
            cfg.p_values = opts.p_values;
            cfg.n = opts.n;
            cfg.reps = opts.reps;
            cfg.threads = opts.threads;
            if (opts.seed) cfg.seed = *opts.seed;
            const ScenarioResult res = opts.scenario == "1" ? scenario1(cfg) : scenario2(cfg);
            const std::string stem = "scenario" + opts.scenario;
            std::ofstream curves = open_output(opts.out_dir / (stem + "_curves.tsv"));
            write_curves_tsv(curves, res.curves);
            std::ofstream base = open_output(opts.out_dir / (stem + "_baseline.tsv"));
            write_baseline_tsv(base, res.baseline);
            report["seed"] = cfg.seed;
            report["n"] = cfg.n;
            report["reps"] = cfg.reps;
            report["curves"] = res.curves.size();
            report["outputs"] = {stem + "_curves.tsv", stem + "_baseline.tsv", "report.json"};
        } else if (opts.scenario == "concentration") {
            ConcentrationConfig cfg;
            cfg.threads = opts.threads;
            if (opts.seed) cfg.seed = *opts.seed;
            const ConcentrationResult res = concentration_check(cfg);
            std::ofstream out = open_output(opts.out_dir / "concentration.tsv");
            write_concentration_tsv(out, res);
            report["seed"] = cfg.seed;
            report["slope"] = res.slope;
            report["outputs"] = {"concentration.tsv", "report.json"};
        } else {
            throw DomainError("unknown scenario '" + opts.scenario + "' (expected 1, 2 or concentration)");
        }
        write_json(opts.out_dir / "report.json", report);
    });
    return report;
}

json error_summary(const std::string& command, const StageFailure& failure) {
    json j = {{"status", "error"},
              {"command", command},
              {"stage", failure.stage()},
              {"error", failure.kind()},
              {"message", failure.what()}};
    if (failure.details().is_object()) {
        for (const auto& [key, value] : failure.details().items()) j[key] = value;
    }
    return j;
}

}  // namespace mixcop::cli
