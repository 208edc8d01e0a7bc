#include <cmath>
#include <string>

#include "mixcop/bridge.hpp"
#include "mixcop/errors.hpp"
#include "mixcop/normal_dist.hpp"

namespace mixcop {

CutoffVector::CutoffVector(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {
    for (std::size_t i = 0; i < thresholds_.size(); ++i) {
        if (std::isnan(thresholds_[i])) throw DomainError("cutoff is NaN");
        if (i > 0 && thresholds_[i] < thresholds_[i - 1]) {
            throw DomainError("cutoffs must be nondecreasing");
        }
    }
}

CutoffVector CutoffVector::equal_mass(int levels) {
    if (levels < 1) throw DomainError("equal_mass: levels must be positive");
    std::vector<double> t;
    for (int l = 1; l < levels; ++l) {
        t.push_back(std_quantile(static_cast<double>(l) / levels));
    }
    return CutoffVector(std::move(t));
}

bool CutoffVector::strictly_increasing() const noexcept {
    for (std::size_t i = 1; i < thresholds_.size(); ++i) {
        if (!(thresholds_[i] > thresholds_[i - 1])) return false;
    }
    return true;
}

bool CutoffVector::all_finite() const noexcept {
    for (double t : thresholds_)
        if (!std::isfinite(t)) return false;
    return true;
}

CutoffVector estimate_cutoffs(std::span<const int> codes, int levels) {
    if (levels < 1) throw DomainError("estimate_cutoffs: levels must be positive");
    if (codes.empty()) throw DomainError("estimate_cutoffs: empty column");
    std::vector<long> counts(static_cast<std::size_t>(levels), 0);
    for (int c : codes) {
        if (c < 0 || c >= levels) {
            throw DomainError("estimate_cutoffs: code " + std::to_string(c) +
                              " outside {0.." + std::to_string(levels - 1) + "}");
        }
        ++counts[static_cast<std::size_t>(c)];
    }
    const double n = static_cast<double>(codes.size());
    std::vector<double> t;
    long below = 0;
    for (int l = 1; l < levels; ++l) {
        below += counts[static_cast<std::size_t>(l - 1)];
        t.push_back(std_quantile(static_cast<double>(below) / n));
    }
    return CutoffVector(std::move(t));
}

}  // namespace mixcop
