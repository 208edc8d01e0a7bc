#include "mixcop/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "mixcop/errors.hpp"
#include "mixcop/estimator.hpp"
#include "mixcop/kendall.hpp"
#include "mixcop/parallel.hpp"
#include "mixcop/rng.hpp"

namespace mixcop {

namespace {

struct LatentPair {
    std::vector<double> x;
    std::vector<double> y;
};

LatentPair draw_pair(double r, int n, std::uint64_t seed, std::uint64_t stream) {
    Philox4x32 gen(seed, stream);
    std::normal_distribution<double> normal;
    LatentPair out;
    out.x.resize(static_cast<std::size_t>(n));
    out.y.resize(static_cast<std::size_t>(n));
    const double c = std::sqrt(std::max(0.0, 1.0 - r * r));
    for (std::size_t i = 0; i < out.x.size(); ++i) {
        const double g1 = normal(gen);
        const double g2 = normal(gen);
        out.x[i] = g1;
        out.y[i] = r * g1 + c * g2;
    }
    return out;
}

// Bridge estimate of r from an ordinal column (arbitrary codes) and a
// continuous one. A column left with one level carries no information; the
// estimate is then 0.
double ordinal_continuous_estimate(std::vector<double> codes, const std::vector<double>& y) {
    const int levels = recode_ordinal(codes);
    if (levels < 2) return 0.0;
    std::vector<int> ints(codes.begin(), codes.end());
    const CutoffVector cutoffs = estimate_cutoffs(ints, levels);
    const double tau = tau_a(codes, y);
    return invert_bridge(tau, BridgeKind::ordinal_continuous(levels), cutoffs).value;
}

double sin_estimate(const std::vector<double>& x, const std::vector<double>& y) {
    return std::sin(std::numbers::pi / 2.0 * tau_a(x, y));
}

// `discretize(z, p)` maps a latent value to a level for target level count p.
template <class Discretize>
ScenarioResult run_scenario(const ScenarioConfig& cfg, Discretize discretize) {
    std::vector<int> ps = cfg.p_values;
    if (ps.empty())
        for (int p = 2; p <= 16; ++p) ps.push_back(p);
    for (int p : ps)
        if (p < 2) throw DomainError("scenario: level counts must be at least 2");
    if (cfg.grid_points < kBins || cfg.grid_points % kBins != 0) {
        throw DomainError("scenario: grid_points must be a positive multiple of " + std::to_string(kBins));
    }
    if (cfg.n < 2 || cfg.reps < 1) throw DomainError("scenario: need n >= 2 and reps >= 1");

    const std::size_t g = static_cast<std::size_t>(cfg.grid_points);
    // point_mse[c][i]: mean squared error at grid point i for curve c; the
    // last curve is the continuous baseline.
    std::vector<std::vector<double>> point_mse(ps.size() + 1, std::vector<double>(g, 0.0));

    parallel_for(g, cfg.threads, [&](std::size_t i) {
        const double r = static_cast<double>(i) / static_cast<double>(g);
        std::vector<double> sq(ps.size() + 1, 0.0);
        for (int rep = 0; rep < cfg.reps; ++rep) {
            const LatentPair pair = draw_pair(r, cfg.n, cfg.seed,
                                              stream_id(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(rep)));
            for (std::size_t c = 0; c < ps.size(); ++c) {
                std::vector<double> codes(pair.x.size());
                for (std::size_t t = 0; t < codes.size(); ++t) codes[t] = discretize(pair.x[t], ps[c]);
                const double e = ordinal_continuous_estimate(std::move(codes), pair.y) - r;
                sq[c] += e * e;
            }
            const double e = sin_estimate(pair.x, pair.y) - r;
            sq[ps.size()] += e * e;
        }
        for (std::size_t c = 0; c < sq.size(); ++c) point_mse[c][i] = sq[c] / cfg.reps;
    });

    auto to_curve = [&](std::size_t c, int p) {
        ErrorCurve curve;
        curve.p = p;
        curve.reps = cfg.reps;
        const std::size_t per_bin = g / kBins;
        for (int b = 0; b < kBins; ++b) {
            double sum = 0.0;
            for (std::size_t t = 0; t < per_bin; ++t) sum += point_mse[c][static_cast<std::size_t>(b) * per_bin + t];
            curve.bin_mse.push_back(sum / static_cast<double>(per_bin));
        }
        return curve;
    };

    ScenarioResult result;
    for (std::size_t c = 0; c < ps.size(); ++c) result.curves.push_back(to_curve(c, ps[c]));
    result.baseline = to_curve(ps.size(), 0);
    return result;
}

void validate_sigma(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw DomainError("copula: sigma must be square");
    if (!sigma.allFinite()) throw DomainError("copula: sigma has non-finite entries");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("copula: sigma is not symmetric");
    if ((sigma.diagonal().array() - 1.0).abs().maxCoeff() > 1e-12) {
        throw DomainError("copula: sigma must have unit diagonal");
    }
}

}  // namespace

double apply_transform(Transform t, double z) {
    switch (t) {
    case Transform::Identity: return z;
    case Transform::Exp: return std::exp(z);
    case Transform::Cube: return z * z * z;
    case Transform::Logistic: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

int discretize_value(double z, const CutoffVector& cutoffs) {
    const auto v = cutoffs.values();
    return static_cast<int>(std::lower_bound(v.begin(), v.end(), z) - v.begin());
}

Eigen::MatrixXd sample_copula(const CopulaSpec& spec, int n, std::uint64_t seed, std::uint64_t stream) {
    validate_sigma(spec.sigma);
    const Eigen::Index d = spec.sigma.rows();
    if (n < 1) throw DomainError("sample_copula: n must be positive");
    if (!spec.transforms.empty() && static_cast<Eigen::Index>(spec.transforms.size()) != d) {
        throw DomainError("sample_copula: transforms length does not match dimension");
    }
    if (!spec.discretize.empty() && static_cast<Eigen::Index>(spec.discretize.size()) != d) {
        throw DomainError("sample_copula: discretize length does not match dimension");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
    if (llt.info() != Eigen::Success) throw DomainError("sample_copula: sigma is not positive definite");
    const Eigen::MatrixXd l = llt.matrixL();

    Philox4x32 gen(seed, stream);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(gen);
    Eigen::MatrixXd z = g * l.transpose();

    for (Eigen::Index j = 0; j < d; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (!spec.discretize.empty() && spec.discretize[ju]) {
            for (Eigen::Index i = 0; i < n; ++i) z(i, j) = discretize_value(z(i, j), *spec.discretize[ju]);
        } else if (!spec.transforms.empty()) {
            for (Eigen::Index i = 0; i < n; ++i) z(i, j) = apply_transform(spec.transforms[ju], z(i, j));
        }
    }
    return z;
}

double ErrorCurve::mean_mse() const {
    if (bin_mse.empty()) return 0.0;
    double sum = 0.0;
    for (double v : bin_mse) sum += v;
    return sum / static_cast<double>(bin_mse.size());
}

ScenarioResult scenario1(const ScenarioConfig& cfg) {
    std::vector<CutoffVector> cuts(17);
    for (int p = 2; p <= 16; ++p) cuts[static_cast<std::size_t>(p)] = CutoffVector::equal_mass(p);
    return run_scenario(cfg, [&](double z, int p) {
        if (p <= 16) return static_cast<double>(discretize_value(z, cuts[static_cast<std::size_t>(p)]));
        return static_cast<double>(discretize_value(z, CutoffVector::equal_mass(p)));
    });
}

ScenarioResult scenario2(const ScenarioConfig& cfg) {
    for (int p : cfg.p_values)
        if (p > 16) throw DomainError("scenario2: level counts above 16 cannot be formed by merging");
    const CutoffVector c16 = CutoffVector::equal_mass(16);
    return run_scenario(cfg, [&](double z, int p) {
        return static_cast<double>(std::min(discretize_value(z, c16), p - 1));
    });
}

void write_curves_tsv(std::ostream& os, const std::vector<ErrorCurve>& curves) {
    os << "p\tbin_low\tbin_high\tmse\treps\n";
    char buf[128];
    for (const ErrorCurve& c : curves) {
        for (std::size_t b = 0; b < c.bin_mse.size(); ++b) {
            std::snprintf(buf, sizeof buf, "%d\t%.1f\t%.1f\t%.10e\t%d\n", c.p, b / 10.0, (b + 1) / 10.0,
                          c.bin_mse[b], c.reps);
            os << buf;
        }
    }
}

void write_baseline_tsv(std::ostream& os, const ErrorCurve& baseline) {
    os << "bin_low\tbin_high\tmse\treps\n";
    char buf[128];
    for (std::size_t b = 0; b < baseline.bin_mse.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%.1f\t%.1f\t%.10e\t%d\n", b / 10.0, (b + 1) / 10.0, baseline.bin_mse[b],
                      baseline.reps);
        os << buf;
    }
}

ConcentrationResult concentration_check(const ConcentrationConfig& cfg) {
    if (cfg.d < 2 || cfg.p < 2 || cfg.seeds < 1 || cfg.n_grid.empty()) {
        throw DomainError("concentration_check: need d >= 2, p >= 2, seeds >= 1 and a nonempty n grid");
    }
    if (!(std::abs(cfg.rho) < 1.0)) throw DomainError("concentration_check: |rho| must be below 1");

    CopulaSpec spec;
    spec.sigma.resize(cfg.d, cfg.d);
    for (int j = 0; j < cfg.d; ++j)
        for (int k = 0; k < cfg.d; ++k) spec.sigma(j, k) = std::pow(cfg.rho, std::abs(j - k));
    std::vector<ColumnSpec> specs;
    for (int j = 0; j < cfg.d; ++j) {
        const std::string name = "x" + std::to_string(j);
        if (j % 2 == 0) {
            spec.discretize.emplace_back(CutoffVector::equal_mass(cfg.p));
            specs.push_back(ColumnSpec::ordinal(name, cfg.p));
        } else {
            spec.discretize.emplace_back(std::nullopt);
            specs.push_back(ColumnSpec::continuous(name));
        }
    }

    const std::size_t n_count = cfg.n_grid.size();
    const std::size_t seeds = static_cast<std::size_t>(cfg.seeds);
    std::vector<double> sup_error(n_count * seeds, 0.0);
    parallel_for(n_count * seeds, cfg.threads, [&](std::size_t task) {
        const std::size_t ni = task / seeds;
        const std::size_t s = task % seeds;
        const Eigen::MatrixXd data = sample_copula(spec, cfg.n_grid[ni], cfg.seed,
                                                   stream_id(static_cast<std::uint32_t>(ni), static_cast<std::uint32_t>(s)));
        const LatentCorrelationMatrix est = estimate_latent_correlation(data, specs);
        double worst = 0.0;
        for (int j = 0; j < cfg.d; ++j)
            for (int k = j + 1; k < cfg.d; ++k) worst = std::max(worst, std::abs(est.values(j, k) - spec.sigma(j, k)));
        sup_error[task] = worst;
    });

    ConcentrationResult result;
    result.n_grid = cfg.n_grid;
    for (std::size_t ni = 0; ni < n_count; ++ni) {
        double sum = 0.0;
        for (std::size_t s = 0; s < seeds; ++s) sum += sup_error[ni * seeds + s];
        result.mean_sup_error.push_back(sum / static_cast<double>(seeds));
    }
    if (n_count >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n_count; ++i) {
            mx += std::log(static_cast<double>(result.n_grid[i]));
            my += std::log(result.mean_sup_error[i]);
        }
        mx /= static_cast<double>(n_count);
        my /= static_cast<double>(n_count);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < n_count; ++i) {
            const double dx = std::log(static_cast<double>(result.n_grid[i])) - mx;
            sxy += dx * (std::log(result.mean_sup_error[i]) - my);
            sxx += dx * dx;
        }
        result.slope = sxy / sxx;
    }
    return result;
}

void write_concentration_tsv(std::ostream& os, const ConcentrationResult& result) {
    os << "n\tmean_sup_error\n";
    char buf[128];
    for (std::size_t i = 0; i < result.n_grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d\t%.10e\n", result.n_grid[i], result.mean_sup_error[i]);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "# slope\t%.6f\n", result.slope);
    os << buf;
}

MonteCarloMean mc_population_tau_a(double r, const std::optional<CutoffVector>& cut_j,
                                   const std::optional<CutoffVector>& cut_k, long draws, std::uint64_t seed) {
    if (!(std::abs(r) < 1.0)) throw DomainError("mc_population_tau_a: |r| must be below 1");
    if (draws < 2) throw DomainError("mc_population_tau_a: need at least two draws");
    Philox4x32 gen(seed, 0);
    std::normal_distribution<double> normal;
    const double c = std::sqrt(1.0 - r * r);
    auto observe = [&](double& xj, double& xk) {
        const double z1 = normal(gen);
        const double z2 = r * z1 + c * normal(gen);
        xj = cut_j ? discretize_value(z1, *cut_j) : z1;
        xk = cut_k ? discretize_value(z2, *cut_k) : z2;
    };
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long i = 0; i < draws; ++i) {
        double aj, ak, bj, bk;
        observe(aj, ak);
        observe(bj, bk);
        const double prod = (aj - bj) * (ak - bk);
        const double s = prod > 0.0 ? 1.0 : (prod < 0.0 ? -1.0 : 0.0);
        sum += s;
        sum_sq += s * s;
    }
    const double m = sum / static_cast<double>(draws);
    const double var = (sum_sq / static_cast<double>(draws) - m * m) * draws / (draws - 1.0);
    return {m, std::sqrt(var / static_cast<double>(draws))};
}

MonteCarloMean mc_tau_b_mean(double r, double delta, int n, int reps, std::uint64_t seed, int threads) {
    if (reps < 2) throw DomainError("mc_tau_b_mean: need at least two replicates");
    std::vector<double> values(static_cast<std::size_t>(reps), std::nan(""));
    parallel_for(values.size(), threads, [&](std::size_t rep) {
        const LatentPair pair = draw_pair(r, n, seed, stream_id(0, static_cast<std::uint32_t>(rep)));
        std::vector<double> x(pair.x.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = pair.x[i] <= delta ? 0.0 : 1.0;
        const PairCounts counts = count_pairs(x, pair.y);
        if (counts.ties_j == counts.n_pairs) return;  // constant binary column: tau-b undefined
        values[rep] = tau_b_from_counts(counts);
    });
    double sum = 0.0;
    double sum_sq = 0.0;
    long used = 0;
    for (double v : values) {
        if (std::isnan(v)) continue;
        sum += v;
        sum_sq += v * v;
        ++used;
    }
    if (used < 2) throw DegenerateColumnError("mc_tau_b_mean: binary column constant in almost every replicate");
    const double m = sum / static_cast<double>(used);
    const double var = (sum_sq / static_cast<double>(used) - m * m) * used / (used - 1.0);
    return {m, std::sqrt(var / static_cast<double>(used))};
}

}  // namespace mixcop
