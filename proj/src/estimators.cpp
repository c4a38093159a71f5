#include "lbtail/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lbtail/errors.hpp"

namespace lbtail {

std::string_view estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::LyndenBellHill:
            return "lynden_bell_hill";
        case EstimatorKind::GardesStupfler:
            return "gardes_stupfler";
        case EstimatorKind::Hill:
            return "hill";
    }
    return "unknown";
}

namespace {

// Index of the first x order statistic strictly above x, i.e. the number
// of data points at or below x.
std::size_t first_above(const ObservedSample& sample, double x) {
    const auto xs = sample.x_sorted();
    return static_cast<std::size_t>(
        std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
}

double product_limit_cdf(const ObservedSample& sample, std::size_t idx) {
    // cdf value on [x_(idx), x_(idx+1)); everything below the minimum has
    // value zero because the minimum always has covering count one.
    if (idx == 0) return 0.0;
    return sample.product_limit_at(idx - 1);
}

double degenerate_value(const ObservedSample& sample) {
    const auto idx = sample.degenerate_index();
    if (!idx) return std::numeric_limits<double>::quiet_NaN();
    return sample.x_sorted()[*idx];
}

}  // namespace

double c_n(const ObservedSample& sample, double x) {
    return static_cast<double>(sample.covering_count(x)) /
           static_cast<double>(sample.size());
}

double lynden_bell_cdf(const ObservedSample& sample, double x) {
    return product_limit_cdf(sample, first_above(sample, x));
}

std::vector<double> lynden_bell_curve(const ObservedSample& sample) {
    std::vector<double> values(sample.size());
    for (std::size_t j = 0; j < sample.size(); ++j) {
        values[j] = sample.product_limit_at(j);
    }
    return values;
}

double hazard_sum(const ObservedSample& sample, double t) {
    return sample.hazard_suffix(first_above(sample, t));
}

double hazard_log(const ObservedSample& sample, double t) {
    const double cdf = product_limit_cdf(sample, first_above(sample, t));
    if (cdf <= 0.0) {
        throw DegenerateMassError(
            "degenerate-mass",
            "product-limit cdf vanishes at t=" + std::to_string(t) +
                "; log-hazard undefined (degenerate mass point T=" +
                std::to_string(degenerate_value(sample)) + ")",
            degenerate_value(sample));
    }
    return -std::log(cdf);
}

std::optional<double> degenerate_point(const ObservedSample& sample) {
    const auto idx = sample.degenerate_index();
    if (!idx) return std::nullopt;
    return sample.x_sorted()[*idx];
}

namespace {

EviEstimate lynden_bell_core(const ObservedSample& sample, std::size_t j_t,
                             double t) {
    const std::size_t n = sample.size();
    const auto xs = sample.x_sorted();
    const std::size_t exceedances = n - j_t;

    if (exceedances == 0) {
        throw DegenerateMassError(
            "degenerate-threshold",
            "no observations above threshold t=" + std::to_string(t),
            degenerate_value(sample));
    }
    // The theory conditions on T <= t: a point above the threshold with
    // covering count one collapses the product-limit mass below it.
    const auto deg = sample.degenerate_index();
    if (deg && *deg >= j_t && xs[*deg] > t) {
        throw DegenerateMassError(
            "degenerate-threshold",
            "product-limit mass degenerate above threshold t=" +
                std::to_string(t) + " (degenerate mass point T=" +
                std::to_string(xs[*deg]) + ")",
            xs[*deg]);
    }

    const double fbar_t = 1.0 - product_limit_cdf(sample, j_t);
    if (!(fbar_t > 0.0)) {
        throw DegenerateMassError(
            "degenerate-threshold",
            "product-limit mass above threshold t=" + std::to_string(t) +
                " is zero",
            degenerate_value(sample));
    }

    const double log_t = std::log(t);
    double weighted = 0.0;
    for (std::size_t j = j_t; j < n; ++j) {
        const double weight =
            sample.product_limit_at(j) /
            static_cast<double>(sample.covering_count_at(j));
        weighted += (std::log(xs[j]) - log_t) * weight;
    }

    EviEstimate estimate;
    estimate.value = weighted / fbar_t;
    estimate.k = exceedances;
    estimate.threshold = t;
    estimate.exceedances = exceedances;
    estimate.kind = EstimatorKind::LyndenBellHill;
    return estimate;
}

void check_k_range(std::size_t k, std::size_t n) {
    if (k < 1 || k >= n) {
        throw Error("k-range", "k must satisfy 1 <= k < n, got k=" +
                                   std::to_string(k) + " with n=" +
                                   std::to_string(n));
    }
}

}  // namespace

EviEstimate evi_lynden_bell(const ObservedSample& sample, std::size_t k) {
    const std::size_t n = sample.size();
    check_k_range(k, n);
    const std::size_t j_t = n - k;  // first exceedance index
    return lynden_bell_core(sample, j_t, sample.x_sorted()[j_t - 1]);
}

EviEstimate evi_lynden_bell_at(const ObservedSample& sample, double t) {
    return lynden_bell_core(sample, first_above(sample, t), t);
}

double hill(std::span<const double> values, std::size_t k) {
    const std::size_t n = values.size();
    check_k_range(k, n);
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > 0.0)) {
        throw Error("positive-values",
                    "hill estimator requires strictly positive values");
    }
    const double t = sorted[n - 1 - k];
    double sum = 0.0;
    for (std::size_t j = n - k; j < n; ++j) {
        sum += std::log(sorted[j] / t);
    }
    return sum / static_cast<double>(k);
}

namespace {

// Hill on an already-sorted span, shared by the ratio estimator.
double hill_sorted(std::span<const double> sorted, std::size_t k) {
    const std::size_t n = sorted.size();
    if (!(sorted.front() > 0.0)) {
        throw Error("positive-values",
                    "hill estimator requires strictly positive values");
    }
    const double t = sorted[n - 1 - k];
    double sum = 0.0;
    for (std::size_t j = n - k; j < n; ++j) {
        sum += std::log(sorted[j] / t);
    }
    return sum / static_cast<double>(k);
}

}  // namespace

double gs_combine(double gamma1_star, double gamma2) {
    const double denom = gamma2 - gamma1_star;
    if (denom == 0.0) {
        throw DegenerateCombinationError(gamma1_star, gamma2);
    }
    return gamma1_star * gamma2 / denom;
}

EviEstimate evi_gardes_stupfler(const ObservedSample& sample, std::size_t k1,
                                std::size_t k2) {
    const std::size_t n = sample.size();
    check_k_range(k1, n);
    check_k_range(k2, n);
    const double g1_star = hill_sorted(sample.x_sorted(), k1);
    const double g2 = hill_sorted(sample.y_sorted(), k2);

    EviEstimate estimate;
    estimate.value = gs_combine(g1_star, g2);
    estimate.k = k1;
    estimate.threshold = sample.x_sorted()[n - 1 - k1];
    estimate.exceedances = k1;
    estimate.kind = EstimatorKind::GardesStupfler;
    return estimate;
}

double weissman_extrapolate(double t, double fbar_t, double p_n,
                            double gamma) {
    if (!(p_n > 0.0) || p_n >= fbar_t) {
        throw ExtrapolationError(p_n, fbar_t);
    }
    return t * std::pow(fbar_t / p_n, gamma);
}

namespace {

double weissman_from_estimate(const ObservedSample& sample,
                              const EviEstimate& estimate, double p_n) {
    const std::size_t n = sample.size();
    const double fbar_t =
        1.0 - product_limit_cdf(sample, n - estimate.exceedances);
    return weissman_extrapolate(estimate.threshold, fbar_t, p_n,
                                estimate.value);
}

}  // namespace

double quantile_weissman(const ObservedSample& sample, std::size_t k,
                         double p_n) {
    return weissman_from_estimate(sample, evi_lynden_bell(sample, k), p_n);
}

double quantile_weissman_at(const ObservedSample& sample, double t,
                            double p_n) {
    return weissman_from_estimate(sample, evi_lynden_bell_at(sample, t), p_n);
}

}  // namespace lbtail
