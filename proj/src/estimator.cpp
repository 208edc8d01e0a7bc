#include "mixcop/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "mixcop/errors.hpp"
#include "mixcop/parallel.hpp"

namespace mixcop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PreparedColumn {
    std::vector<double> values;  // recoded for ordinal columns
    bool ordinal = false;
    int levels = 0;  // observed levels after recoding
    CutoffVector cutoffs;
};

PreparedColumn prepare_column(const Eigen::MatrixXd& data, Eigen::Index j, const ColumnSpec& spec) {
    PreparedColumn col;
    col.values.resize(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double v = data(i, j);
        if (std::isinf(v)) {
            throw DomainError("column '" + spec.name + "' contains an infinite value");
        }
        col.values[static_cast<std::size_t>(i)] = v;
    }

    std::set<double> distinct;
    for (double v : col.values)
        if (!std::isnan(v)) distinct.insert(v);
    if (distinct.size() < 2) {
        throw DegenerateColumnError("column '" + spec.name + "' has fewer than two distinct observed values", j);
    }
    if (spec.kind == ColumnKind::Continuous) return col;

    if (spec.levels < 2) {
        throw DomainError("column '" + spec.name + "': ordinal level count must be at least 2");
    }
    col.ordinal = true;
    col.levels = recode_ordinal(col.values);
    if (col.levels > spec.levels) {
        throw DomainError("column '" + spec.name + "' has " + std::to_string(col.levels) +
                          " distinct values but is declared with " + std::to_string(spec.levels) + " levels");
    }
    std::vector<int> codes;
    for (double v : col.values)
        if (!std::isnan(v)) codes.push_back(static_cast<int>(v));
    col.cutoffs = estimate_cutoffs(codes, col.levels);
    return col;
}

EntryMethod method_for(const BridgeKind& kind) {
    if (kind.variant == BridgeVariant::TauB1stOrder) {
        return kind.type == PairType::OrdinalOrdinal ? EntryMethod::TauBBinaryBinary
                                                     : EntryMethod::TauBBinaryContinuous;
    }
    switch (kind.type) {
    case PairType::ContinuousContinuous:
        return EntryMethod::ContinuousContinuous;
    case PairType::OrdinalContinuous:
        if (kind.levels_j == 2) return EntryMethod::BinaryContinuous;
        if (kind.levels_j == 3) return EntryMethod::TernaryContinuous;
        return EntryMethod::OrdinalContinuous;
    case PairType::OrdinalOrdinal:
        if (kind.levels_j == 2 && kind.levels_k == 2) return EntryMethod::BinaryBinary;
        if (kind.levels_j == 3 && kind.levels_k == 3) return EntryMethod::TernaryTernary;
        return EntryMethod::BinaryTernary;
    }
    return EntryMethod::Missing;
}

bool has_bridge(const BridgeKind& kind) {
    return kind.type != PairType::OrdinalOrdinal || (kind.levels_j <= 3 && kind.levels_k <= 3);
}

bool has_tau_b_bridge(const BridgeKind& kind) {
    if (kind.type == PairType::OrdinalContinuous) return kind.levels_j == 2;
    if (kind.type == PairType::OrdinalOrdinal) return kind.levels_j == 2 && kind.levels_k == 2;
    return false;
}

}  // namespace

std::string_view to_string(EntryMethod m) {
    switch (m) {
    case EntryMethod::Diagonal: return "diagonal";
    case EntryMethod::ContinuousContinuous: return "continuous-continuous";
    case EntryMethod::BinaryContinuous: return "binary-continuous";
    case EntryMethod::TernaryContinuous: return "ternary-continuous";
    case EntryMethod::OrdinalContinuous: return "ordinal-continuous";
    case EntryMethod::BinaryBinary: return "binary-binary";
    case EntryMethod::BinaryTernary: return "binary-ternary";
    case EntryMethod::TernaryTernary: return "ternary-ternary";
    case EntryMethod::TauBBinaryBinary: return "tau-b-binary-binary";
    case EntryMethod::TauBBinaryContinuous: return "tau-b-binary-continuous";
    case EntryMethod::SinFallback: return "sin-fallback";
    case EntryMethod::Missing: return "missing";
    }
    return "unknown";
}

bool LatentCorrelationMatrix::has_missing() const {
    return std::any_of(info.begin(), info.end(),
                       [](const EntryInfo& e) { return e.method == EntryMethod::Missing; });
}

int LatentCorrelationMatrix::clamped_count() const {
    int count = 0;
    for (Eigen::Index j = 0; j < dim(); ++j)
        for (Eigen::Index k = j + 1; k < dim(); ++k) count += entry(j, k).clamped ? 1 : 0;
    return count;
}

int recode_ordinal(std::vector<double>& column) {
    std::vector<double> distinct;
    for (double v : column)
        if (!std::isnan(v)) distinct.push_back(v);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (double& v : column) {
        if (std::isnan(v)) continue;
        v = static_cast<double>(std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin());
    }
    return static_cast<int>(distinct.size());
}

LatentCorrelationMatrix estimate_latent_correlation(const Eigen::MatrixXd& data,
                                                    const std::vector<ColumnSpec>& specs,
                                                    const EstimatorOptions& options) {
    const Eigen::Index n = data.rows();
    const Eigen::Index d = data.cols();
    if (static_cast<Eigen::Index>(specs.size()) != d) {
        throw DomainError("estimate_latent_correlation: " + std::to_string(specs.size()) +
                          " column specs for " + std::to_string(d) + " columns");
    }
    if (n < 2) throw DomainError("estimate_latent_correlation: need at least two rows");

    std::vector<PreparedColumn> cols;
    cols.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) cols.push_back(prepare_column(data, j, specs[static_cast<std::size_t>(j)]));

    LatentCorrelationMatrix out;
    out.values = Eigen::MatrixXd::Identity(d, d);
    out.info.assign(static_cast<std::size_t>(d * d), EntryInfo{});
    for (Eigen::Index j = 0; j < d; ++j) {
        out.info[static_cast<std::size_t>(j * d + j)] = {EntryMethod::Diagonal, false, 1.0};
    }

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = j + 1; k < d; ++k) pairs.emplace_back(j, k);

    parallel_for(pairs.size(), options.threads, [&](std::size_t p) {
        const auto [j, k] = pairs[p];
        // Put the ordinal variable first for ordinal-continuous pairs.
        Eigen::Index a = j;
        Eigen::Index b = k;
        if (!cols[static_cast<std::size_t>(a)].ordinal && cols[static_cast<std::size_t>(b)].ordinal) std::swap(a, b);
        const PreparedColumn& ca = cols[static_cast<std::size_t>(a)];
        const PreparedColumn& cb = cols[static_cast<std::size_t>(b)];
        const std::string where = " (columns '" + specs[static_cast<std::size_t>(j)].name + "', '" +
                                  specs[static_cast<std::size_t>(k)].name + "')";

        EntryInfo info;
        double value = kNaN;
        auto store = [&] {
            out.values(j, k) = value;
            out.values(k, j) = value;
            out.info[static_cast<std::size_t>(j * d + k)] = info;
            out.info[static_cast<std::size_t>(k * d + j)] = info;
        };

        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < ca.values.size(); ++i) {
            if (std::isnan(ca.values[i]) || std::isnan(cb.values[i])) continue;
            x.push_back(ca.values[i]);
            y.push_back(cb.values[i]);
        }
        if (x.size() < 2) {
            if (options.allow_partial) return store();
            throw UnsupportedPairError("fewer than two complete rows" + where, j, k);
        }
        const PairCounts counts = count_pairs(x, y);
        const double tau_a_hat = tau_a_from_counts(counts);

        BridgeKind kind;
        if (ca.ordinal && cb.ordinal) {
            kind = BridgeKind::ordinal_ordinal(ca.levels, cb.levels);
        } else if (ca.ordinal) {
            kind = BridgeKind::ordinal_continuous(ca.levels);
        }

        if (!has_bridge(kind)) {
            info.tau = tau_a_hat;
            if (options.allow_sin_fallback) {
                info.method = EntryMethod::SinFallback;
                const double r = std::sin(std::numbers::pi / 2.0 * tau_a_hat);
                value = std::clamp(r, -1.0 + kClampMargin, 1.0 - kClampMargin);
                info.clamped = value != r;
                return store();
            }
            if (options.allow_partial) return store();
            throw UnsupportedPairError("no bridge for a " + std::to_string(ca.levels) + "-level by " +
                                           std::to_string(cb.levels) + "-level ordinal pair" + where,
                                       j, k);
        }

        double tau_hat = tau_a_hat;
        if (options.variant == TauVariant::B && has_tau_b_bridge(kind)) {
            if (counts.ties_j == counts.n_pairs || counts.ties_k == counts.n_pairs) {
                throw DegenerateColumnError("tau-b undefined: constant column on complete rows" + where,
                                            counts.ties_j == counts.n_pairs ? a : b);
            }
            kind.variant = BridgeVariant::TauB1stOrder;
            tau_hat = tau_b_from_counts(counts);
        }

        const InversionResult inv = invert_bridge(tau_hat, kind, ca.cutoffs, cb.cutoffs);
        value = inv.value;
        info.method = method_for(kind);
        info.clamped = inv.clamped;
        info.tau = tau_hat;
        store();
    });
    return out;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& r, double eps) {
    if (r.rows() != r.cols()) throw DomainError("project_psd: matrix is not square");
    if (!r.allFinite()) throw DomainError("project_psd: matrix has non-finite entries");
    if (!(eps >= 0.0)) throw DomainError("project_psd: eps must be nonnegative");
    const Eigen::MatrixXd sym = 0.5 * (r + r.transpose());
    if (sym.rows() == 0) return sym;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) throw DomainError("project_psd: eigen-decomposition failed");
    Eigen::MatrixXd out;
    if (es.eigenvalues().minCoeff() >= 0.0) {
        out = sym;
    } else {
        const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(eps);
        out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
        const Eigen::VectorXd inv_sd = out.diagonal().cwiseSqrt().cwiseInverse();
        out = inv_sd.asDiagonal() * out * inv_sd.asDiagonal();
        out = 0.5 * (out + out.transpose()).eval();
    }
    out.diagonal().setOnes();
    return out;
}

std::vector<ColumnSpec> infer_column_specs(const Eigen::MatrixXd& data, const std::vector<std::string>& names,
                                           int max_levels) {
    if (static_cast<Eigen::Index>(names.size()) != data.cols()) {
        throw DomainError("infer_column_specs: name count does not match column count");
    }
    std::vector<ColumnSpec> specs;
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        std::set<double> distinct;
        bool integral = true;
        for (Eigen::Index i = 0; i < data.rows() && integral; ++i) {
            const double v = data(i, j);
            if (std::isnan(v)) continue;
            if (!std::isfinite(v) || v != std::floor(v)) integral = false;
            distinct.insert(v);
        }
        const int levels = static_cast<int>(distinct.size());
        const std::string& name = names[static_cast<std::size_t>(j)];
        if (integral && levels <= max_levels) {
            specs.push_back(ColumnSpec::ordinal(name, std::max(levels, 2)));
        } else {
            specs.push_back(ColumnSpec::continuous(name));
        }
    }
    return specs;
}

}  // namespace mixcop
