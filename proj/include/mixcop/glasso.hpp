#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace mixcop {

/// |Omega_jk| above this counts as an edge.
inline constexpr double kEdgeThreshold = 1e-8;

struct GlassoConfig {
    std::vector<double> lambda_path;  ///< empty: use default_lambda_path
    bool penalize_diagonal = false;
    double convergence_tol = 1e-6;
    int max_sweeps = 500;
    /// HBIC edge-penalty constant C_n; log(log(n)) when unset.
    std::optional<double> hbic_cn;
    int threads = 1;
};

struct GlassoFit {
    Eigen::MatrixXd omega;
    double objective = 0.0;
    int sweeps = 0;
    double kkt_residual = 0.0;
};

/// Minimizes tr(S Omega) - log det Omega + lambda * sum_{j != k} |Omega_jk|
/// (diagonal included when cfg.penalize_diagonal) by block coordinate
/// descent on the covariance, one lasso subproblem per column solved by
/// cyclic coordinate descent. The result is exactly symmetric.
/// Throws DomainError for invalid input and ConvergenceError when
/// cfg.max_sweeps is exhausted.
GlassoFit glasso_fit(const Eigen::MatrixXd& s, double lambda, const GlassoConfig& cfg = {});

/// The penalized objective above at a given Omega (+inf if not PD).
double glasso_objective(const Eigen::MatrixXd& s, const Eigen::MatrixXd& omega, double lambda,
                        bool penalize_diagonal = false);

/// Largest KKT violation of Omega for the problem above.
double glasso_kkt_residual(const Eigen::MatrixXd& s, const Eigen::MatrixXd& omega, double lambda,
                           bool penalize_diagonal = false);

/// Ten equally spaced values m/10, 2m/10, ..., m with m the largest absolute
/// off-diagonal entry; {1e-8} when m is zero (or d < 2).
std::vector<double> default_lambda_path(const Eigen::MatrixXd& r);

int count_edges(const Eigen::MatrixXd& omega);

struct HbicPoint {
    double lambda = 0.0;
    double hbic = 0.0;
    int edges = 0;
};

struct PrecisionEstimate {
    Eigen::MatrixXd omega;
    double chosen_lambda = 0.0;
    std::vector<HbicPoint> hbic_trace;
    std::vector<std::pair<int, int>> edges;  ///< j < k, row-major order
};

/// tr(R Omega) - log det Omega + |E| * C_n * log(d) / n.
double hbic_score(const Eigen::MatrixXd& r, const Eigen::MatrixXd& omega, int n, double cn);

/// Fits every lambda on the path and keeps the HBIC minimizer; ties go to
/// the smallest lambda.
PrecisionEstimate select_hbic(const Eigen::MatrixXd& r, int n, const GlassoConfig& cfg = {});

}  // namespace mixcop
