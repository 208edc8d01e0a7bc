#include "mixcop/cli/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mixcop/errors.hpp"

namespace mixcop::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw DomainError(what + ": cannot parse '" + text + "'");
    }
    return v;
}

}  // namespace

const ColumnSpec* Manifest::find(const std::string& name) const {
    for (const ColumnSpec& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

TauVariant parse_tau_variant(const std::string& text) {
    if (text == "a" || text == "A") return TauVariant::A;
    if (text == "b" || text == "B") return TauVariant::B;
    throw DomainError("tau variant must be 'a' or 'b', got '" + text + "'");
}

std::vector<double> parse_lambda_list(const std::string& text) {
    std::string normalized = text;
    for (char& c : normalized)
        if (c == ',') c = ' ';
    std::istringstream in(normalized);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        const double v = parse_number(token, "lambda path");
        if (!(v > 0.0)) throw DomainError("lambda path values must be positive");
        out.push_back(v);
    }
    if (out.empty()) throw DomainError("lambda path is empty");
    return out;
}

Manifest parse_manifest(std::istream& in) {
    Manifest m;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'name = kind'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("missing name before '='", line_no);
        if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no);

        try {
            if (key.rfind("option.", 0) == 0) {
                const std::string opt = key.substr(7);
                if (opt == "tau") {
                    m.tau = parse_tau_variant(value);
                } else if (opt == "lambda_path") {
                    m.lambda_path = parse_lambda_list(value);
                } else if (opt == "hbic_cn") {
                    m.hbic_cn = parse_number(value, "hbic_cn");
                } else if (opt == "seed") {
                    std::uint64_t s = 0;
                    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
                    if (ec != std::errc() || ptr != value.data() + value.size()) {
                        throw DomainError("seed must be a nonnegative integer");
                    }
                    m.seed = s;
                } else {
                    throw DomainError("unknown option '" + key + "'");
                }
                continue;
            }

            if (!seen.insert(key).second) throw DomainError("column '" + key + "' declared twice");
            std::istringstream words(value);
            std::string kind;
            words >> kind;
            if (kind == "continuous") {
                std::string extra;
                if (words >> extra) throw DomainError("unexpected '" + extra + "' after 'continuous'");
                m.columns.push_back(ColumnSpec::continuous(key));
            } else if (kind == "ordinal") {
                std::string levels_text, extra;
                if (!(words >> levels_text)) throw DomainError("ordinal needs a level count");
                if (words >> extra) throw DomainError("unexpected '" + extra + "' after level count");
                int levels = 0;
                const auto [ptr, ec] = std::from_chars(levels_text.data(), levels_text.data() + levels_text.size(), levels);
                if (ec != std::errc() || ptr != levels_text.data() + levels_text.size() || levels < 2) {
                    throw DomainError("ordinal level count must be an integer >= 2");
                }
                m.columns.push_back(ColumnSpec::ordinal(key, levels));
            } else {
                throw DomainError("kind must be 'continuous' or 'ordinal N', got '" + value + "'");
            }
        } catch (const DomainError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return m;
}

Manifest read_manifest_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest '" + path.string() + "'");
    return parse_manifest(in);
}

std::vector<ColumnSpec> resolve_specs(const Manifest& manifest, const std::vector<std::string>& names,
                                      const Eigen::MatrixXd& data) {
    const std::set<std::string> present(names.begin(), names.end());
    for (const ColumnSpec& c : manifest.columns) {
        if (!present.count(c.name)) throw DomainError("manifest column '" + c.name + "' is not in the data");
    }
    std::vector<ColumnSpec> specs = infer_column_specs(data, names);
    for (ColumnSpec& s : specs) {
        if (const ColumnSpec* declared = manifest.find(s.name)) s = *declared;
    }
    return specs;
}

}  // namespace mixcop::cli
