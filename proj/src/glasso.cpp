#include "mixcop/glasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "mixcop/errors.hpp"
#include "mixcop/parallel.hpp"

namespace mixcop {

namespace {

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

// Coordinate descent for min 0.5 b'Vb - u'b + lambda |b|_1, warm-started at b.
void lasso_cd(const Eigen::MatrixXd& v, const Eigen::VectorXd& u, double lambda, Eigen::VectorXd& b) {
    const Eigen::Index m = b.size();
    for (int it = 0; it < 10000; ++it) {
        double max_change = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double partial = u(i) - v.col(i).dot(b) + v(i, i) * b(i);
            const double next = soft_threshold(partial, lambda) / v(i, i);
            max_change = std::max(max_change, std::abs(next - b(i)));
            b(i) = next;
        }
        if (max_change < 1e-13) return;
    }
}

Eigen::MatrixXd drop_index(const Eigen::MatrixXd& w, Eigen::Index j) {
    const Eigen::Index d = w.rows();
    Eigen::MatrixXd out(d - 1, d - 1);
    for (Eigen::Index a = 0, ra = 0; a < d; ++a) {
        if (a == j) continue;
        for (Eigen::Index b = 0, rb = 0; b < d; ++b) {
            if (b == j) continue;
            out(ra, rb++) = w(a, b);
        }
        ++ra;
    }
    return out;
}

Eigen::VectorXd drop_entry(const Eigen::VectorXd& v, Eigen::Index j) {
    Eigen::VectorXd out(v.size() - 1);
    for (Eigen::Index a = 0, r = 0; a < v.size(); ++a)
        if (a != j) out(r++) = v(a);
    return out;
}

void validate(const Eigen::MatrixXd& s, double lambda) {
    if (s.rows() != s.cols() || s.rows() == 0) throw DomainError("glasso: matrix must be square and nonempty");
    if (!s.allFinite()) throw DomainError("glasso: matrix has non-finite entries");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("glasso: lambda must be positive");
    if (!(s.diagonal().minCoeff() > 0.0)) throw DomainError("glasso: diagonal must be positive");
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("glasso: matrix is not symmetric");
}

}  // namespace

double glasso_objective(const Eigen::MatrixXd& s, const Eigen::MatrixXd& omega, double lambda,
                        bool penalize_diagonal) {
    Eigen::LLT<Eigen::MatrixXd> llt(omega);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double penalty = omega.cwiseAbs().sum();
    if (!penalize_diagonal) penalty -= omega.diagonal().cwiseAbs().sum();
    return (s * omega).trace() - log_det + lambda * penalty;
}

double glasso_kkt_residual(const Eigen::MatrixXd& s, const Eigen::MatrixXd& omega, double lambda,
                           bool penalize_diagonal) {
    const Eigen::MatrixXd w = omega.inverse();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < s.rows(); ++j) {
        for (Eigen::Index k = 0; k < s.cols(); ++k) {
            const double g = w(j, k) - s(j, k);
            double violation = 0.0;
            if (j == k && !penalize_diagonal) {
                violation = std::abs(g);
            } else if (std::abs(omega(j, k)) > 0.0) {
                violation = std::abs(g + lambda * (omega(j, k) > 0.0 ? -1.0 : 1.0));
            } else {
                violation = std::max(0.0, std::abs(g) - lambda);
            }
            worst = std::max(worst, violation);
        }
    }
    return worst;
}

GlassoFit glasso_fit(const Eigen::MatrixXd& s, double lambda, const GlassoConfig& cfg) {
    validate(s, lambda);
    const Eigen::Index d = s.rows();
    const double diag_shift = cfg.penalize_diagonal ? lambda : 0.0;

    Eigen::MatrixXd w = s;
    w.diagonal().array() += diag_shift;
    std::vector<Eigen::VectorXd> beta(static_cast<std::size_t>(d), Eigen::VectorXd::Zero(std::max<Eigen::Index>(d - 1, 0)));

    auto build_omega = [&] {
        Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const Eigen::VectorXd& b = beta[static_cast<std::size_t>(j)];
            const Eigen::VectorXd w12 = drop_entry(w.col(j), j);
            const double omega_jj = 1.0 / (w(j, j) - w12.dot(b));
            omega(j, j) = omega_jj;
            for (Eigen::Index a = 0, r = 0; a < d; ++a) {
                if (a == j) continue;
                omega(a, j) = -b(r++) * omega_jj;
            }
        }
        return Eigen::MatrixXd(0.5 * (omega + omega.transpose()));
    };

    GlassoFit fit;
    const double n_off = static_cast<double>(std::max<Eigen::Index>(d * (d - 1), 1));
    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double change = 0.0;
        for (Eigen::Index j = 0; j < d && d > 1; ++j) {
            const Eigen::MatrixXd w11 = drop_index(w, j);
            const Eigen::VectorXd s12 = drop_entry(s.col(j), j);
            Eigen::VectorXd& b = beta[static_cast<std::size_t>(j)];
            lasso_cd(w11, s12, lambda, b);
            const Eigen::VectorXd w12 = w11 * b;
            for (Eigen::Index a = 0, r = 0; a < d; ++a) {
                if (a == j) continue;
                change += 2.0 * std::abs(w12(r) - w(a, j));
                w(a, j) = w12(r);
                w(j, a) = w12(r);
                ++r;
            }
        }
        fit.sweeps = sweep;
        if (change / n_off > cfg.convergence_tol) continue;

        fit.omega = build_omega();
        fit.kkt_residual = glasso_kkt_residual(s, fit.omega, lambda, cfg.penalize_diagonal);
        if (fit.kkt_residual <= cfg.convergence_tol) {
            fit.objective = glasso_objective(s, fit.omega, lambda, cfg.penalize_diagonal);
            if (!std::isfinite(fit.objective)) {
                throw ConvergenceError("glasso: estimate is not positive definite");
            }
            return fit;
        }
    }
    throw ConvergenceError("glasso: no convergence within " + std::to_string(cfg.max_sweeps) +
                           " sweeps at lambda=" + std::to_string(lambda));
}

std::vector<double> default_lambda_path(const Eigen::MatrixXd& r) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < r.rows(); ++j)
        for (Eigen::Index k = 0; k < r.cols(); ++k)
            if (j != k) m = std::max(m, std::abs(r(j, k)));
    if (!(m > 0.0)) return {1e-8};
    std::vector<double> path;
    for (int i = 1; i <= 10; ++i) path.push_back(m * i / 10.0);
    return path;
}

int count_edges(const Eigen::MatrixXd& omega) {
    int edges = 0;
    for (Eigen::Index j = 0; j < omega.rows(); ++j)
        for (Eigen::Index k = j + 1; k < omega.cols(); ++k)
            if (std::abs(omega(j, k)) > kEdgeThreshold) ++edges;
    return edges;
}

double hbic_score(const Eigen::MatrixXd& r, const Eigen::MatrixXd& omega, int n, double cn) {
    Eigen::LLT<Eigen::MatrixXd> llt(omega);
    if (llt.info() != Eigen::Success) throw DomainError("hbic_score: omega is not positive definite");
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double d = static_cast<double>(r.rows());
    return (r * omega).trace() - log_det + count_edges(omega) * cn * std::log(d) / n;
}

PrecisionEstimate select_hbic(const Eigen::MatrixXd& r, int n, const GlassoConfig& cfg) {
    if (n < 3 && !cfg.hbic_cn) throw DomainError("select_hbic: log(log(n)) needs n >= 3");
    const std::vector<double> path = cfg.lambda_path.empty() ? default_lambda_path(r) : cfg.lambda_path;
    for (double l : path) {
        if (!(l > 0.0)) throw DomainError("select_hbic: lambda path must be strictly positive");
    }
    const double cn = cfg.hbic_cn ? *cfg.hbic_cn : std::log(std::log(static_cast<double>(n)));

    std::vector<Eigen::MatrixXd> omegas(path.size());
    PrecisionEstimate out;
    out.hbic_trace.resize(path.size());
    parallel_for(path.size(), cfg.threads, [&](std::size_t i) {
        omegas[i] = glasso_fit(r, path[i], cfg).omega;
        out.hbic_trace[i] = {path[i], hbic_score(r, omegas[i], n, cn), count_edges(omegas[i])};
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto& cand = out.hbic_trace[i];
        const auto& cur = out.hbic_trace[best];
        if (cand.hbic < cur.hbic || (cand.hbic == cur.hbic && cand.lambda < cur.lambda)) best = i;
    }
    out.omega = omegas[best];
    out.chosen_lambda = path[best];
    for (Eigen::Index j = 0; j < out.omega.rows(); ++j)
        for (Eigen::Index k = j + 1; k < out.omega.cols(); ++k)
            if (std::abs(out.omega(j, k)) > kEdgeThreshold) out.edges.emplace_back(static_cast<int>(j), static_cast<int>(k));
    return out;
}

}  // namespace mixcop
