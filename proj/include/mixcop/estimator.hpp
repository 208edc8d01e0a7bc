#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mixcop/bridge.hpp"
#include "mixcop/kendall.hpp"

namespace mixcop {

enum class ColumnKind { Continuous, Ordinal };

/// Declared type of one data column. `levels` is the declared level count for
/// ordinal columns (observed distinct values must not exceed it) and is
/// ignored for continuous ones.
struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    int levels = 0;

    static ColumnSpec continuous(std::string name) { return {std::move(name), ColumnKind::Continuous, 0}; }
    static ColumnSpec ordinal(std::string name, int levels) {
        return {std::move(name), ColumnKind::Ordinal, levels};
    }
};

/// Which estimator produced an entry of the latent correlation matrix.
enum class EntryMethod {
    Diagonal,
    ContinuousContinuous,
    BinaryContinuous,
    TernaryContinuous,
    OrdinalContinuous,  ///< general p-level form, p >= 4
    BinaryBinary,
    BinaryTernary,
    TernaryTernary,
    TauBBinaryBinary,
    TauBBinaryContinuous,
    SinFallback,  ///< sin(pi/2 tau-a) on a pair without a bridge
    Missing,      ///< left undetermined under allow_partial
};

std::string_view to_string(EntryMethod m);

struct EntryInfo {
    EntryMethod method = EntryMethod::Missing;
    bool clamped = false;
    double tau = 0.0;  ///< the sample statistic that was inverted
};

/// Bridge-inverted latent correlations. `values` is symmetric with unit
/// diagonal; entries marked Missing hold NaN.
struct LatentCorrelationMatrix {
    Eigen::MatrixXd values;
    std::vector<EntryInfo> info;  ///< row-major d x d

    Eigen::Index dim() const { return values.rows(); }
    const EntryInfo& entry(Eigen::Index j, Eigen::Index k) const {
        return info[static_cast<std::size_t>(j * values.rows() + k)];
    }
    bool has_missing() const;
    int clamped_count() const;  ///< over pairs j < k
};

struct EstimatorOptions {
    TauVariant variant = TauVariant::A;
    /// Use sin(pi/2 tau-a) for ordinal pairs beyond the 3 x 3 bridges instead
    /// of raising UnsupportedPairError.
    bool allow_sin_fallback = false;
    /// Mark pairs that cannot be estimated as Missing (NaN) instead of raising.
    bool allow_partial = false;
    int threads = 1;
};

/// Estimates the latent correlation matrix of `data` (n x d, NaN = missing).
/// Ordinal columns are rank-recoded to 0..p'-1 where p' is the number of
/// observed levels, so empty declared levels are collapsed. Cutoffs use each
/// column's observed values; Kendall statistics use the rows complete for
/// both columns of a pair.
///
/// Throws DomainError when specs do not match the data,
/// DegenerateColumnError for a column with a single observed value, and
/// UnsupportedPairError (with the column indices) for pairs without a bridge
/// unless one of the options says otherwise.
LatentCorrelationMatrix estimate_latent_correlation(const Eigen::MatrixXd& data,
                                                    const std::vector<ColumnSpec>& specs,
                                                    const EstimatorOptions& options = {});

/// Rank-recodes the non-missing values of an ordinal column to 0..p'-1 and
/// returns p'. NaN entries stay NaN.
int recode_ordinal(std::vector<double>& column);

/// Nearest-PSD surrogate: eigenvalues below `eps` are raised to `eps`, the
/// matrix is rebuilt and rescaled to unit diagonal. An input that is already
/// PSD is returned with its diagonal set to 1 and otherwise unchanged.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& r, double eps = 1e-8);

/// Default column types when no manifest is given: a column is ordinal if all
/// its observed values are integers and it has at most `max_levels` distinct
/// values.
std::vector<ColumnSpec> infer_column_specs(const Eigen::MatrixXd& data,
                                           const std::vector<std::string>& names,
                                           int max_levels = 10);

}  // namespace mixcop
