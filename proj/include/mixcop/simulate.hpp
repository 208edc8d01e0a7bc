#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mixcop/bridge.hpp"

namespace mixcop {

/// Monotone marginal transforms applied to continuous latent columns.
enum class Transform { Identity, Exp, Cube, Logistic };

double apply_transform(Transform t, double z);

/// Latent Gaussian copula: Z ~ N(0, sigma), continuous columns report
/// transform(Z_j), discretized columns report the level l with
/// Z_j in (cutoff[l-1], cutoff[l]].
struct CopulaSpec {
    Eigen::MatrixXd sigma;
    std::vector<Transform> transforms;                  ///< empty: all identity
    std::vector<std::optional<CutoffVector>> discretize;  ///< empty: all continuous

    static CopulaSpec gaussian(Eigen::MatrixXd sigma) { return {std::move(sigma), {}, {}}; }
};

/// Level of latent value z under the cutoffs (number of cutoffs below z).
int discretize_value(double z, const CutoffVector& cutoffs);

/// n x d sample, reproducible in (seed, stream). Throws DomainError if sigma
/// is not a positive definite correlation matrix or the per-column vectors
/// have the wrong length.
Eigen::MatrixXd sample_copula(const CopulaSpec& spec, int n, std::uint64_t seed, std::uint64_t stream = 0);

inline constexpr int kBins = 10;

/// Mean squared error of bridge-inverted estimates, averaged within r-bins
/// [0, 0.1), [0.1, 0.2), ..., [0.9, 1.0). p = 0 marks the continuous baseline.
struct ErrorCurve {
    int p = 0;
    std::vector<double> bin_mse;  ///< kBins entries
    int reps = 0;

    double mean_mse() const;
};

struct ScenarioConfig {
    std::vector<int> p_values;  ///< empty: 2..16
    int n = 100;
    int reps = 80;
    int grid_points = 100;  ///< r = 0, 0.01, ..., 0.99
    std::uint64_t seed = 20240101;
    int threads = 1;
};

struct ScenarioResult {
    std::vector<ErrorCurve> curves;  ///< one per p, in p_values order
    ErrorCurve baseline;             ///< sin(pi/2 tau-a) on the latent pair
};

/// Equal-mass discretization of one variable of a bivariate latent normal
/// pair at each p; the other variable stays continuous.
ScenarioResult scenario1(const ScenarioConfig& cfg);

/// Discretize at 16 equal-mass levels, then merge the top levels down to p
/// (x -> min(x, p - 1)). Uses the same latent draws as scenario1.
ScenarioResult scenario2(const ScenarioConfig& cfg);

/// Tab-separated p, bin_low, bin_high, mse, reps.
void write_curves_tsv(std::ostream& os, const std::vector<ErrorCurve>& curves);
/// Tab-separated bin_low, bin_high, mse, reps.
void write_baseline_tsv(std::ostream& os, const ErrorCurve& baseline);

struct ConcentrationConfig {
    int d = 10;
    int p = 3;
    std::vector<int> n_grid{250, 500, 1000, 2000, 4000};
    int seeds = 20;
    double rho = 0.5;  ///< sigma_jk = rho^|j-k|
    std::uint64_t seed = 7;
    int threads = 1;
};

struct ConcentrationResult {
    std::vector<int> n_grid;
    std::vector<double> mean_sup_error;  ///< over seeds, per n
    double slope = 0.0;                   ///< least-squares slope of log error on log n
};

/// Sup-norm error of the latent correlation estimate for alternating
/// p-level ordinal and continuous columns.
ConcentrationResult concentration_check(const ConcentrationConfig& cfg);

void write_concentration_tsv(std::ostream& os, const ConcentrationResult& result);

struct MonteCarloMean {
    double mean = 0.0;
    double se = 0.0;
};

/// Population tau-a of a latent pair with correlation r, estimated from
/// `draws` independent pairs of observations. A missing cutoff vector means
/// the variable is continuous.
MonteCarloMean mc_population_tau_a(double r, const std::optional<CutoffVector>& cut_j,
                                   const std::optional<CutoffVector>& cut_k, long draws, std::uint64_t seed);

/// Mean of the sample tau-b over `reps` samples of size n: variable j binary
/// with cutoff delta, variable k continuous.
MonteCarloMean mc_tau_b_mean(double r, double delta, int n, int reps, std::uint64_t seed, int threads = 1);

}  // namespace mixcop
