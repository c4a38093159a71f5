#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lbtail/sample.hpp"

namespace lbtail {

enum class EstimatorKind { LyndenBellHill, GardesStupfler, Hill };

std::string_view estimator_name(EstimatorKind kind);

// A tail-index estimate with its threshold bookkeeping.
struct EviEstimate {
    double value = 0.0;
    std::size_t k = 0;           // exceedance count used
    double threshold = 0.0;      // t; the (n-k)-th x order statistic in
                                 // random-threshold mode
    std::size_t exceedances = 0;
    EstimatorKind kind = EstimatorKind::LyndenBellHill;
    // The degenerate mass point T when it exceeds the threshold. Estimates
    // returned on the success path never carry it; error payloads do.
    std::optional<double> degenerate_mass_at;
};

// Empirical covering fraction C_n(x) = #{i : x_i <= x <= y_i} / n.
// The value is the exact rational j/n (integer j via covering_count).
double c_n(const ObservedSample& sample, double x);

// Product-limit estimator of the cdf under right truncation: the product
// of 1 - 1/(n C_n(x_i)) over data points strictly above x (empty product
// is 1). Nondecreasing right-continuous step function.
double lynden_bell_cdf(const ObservedSample& sample, double x);

// Right-continuous cdf values at each x order statistic, ascending.
std::vector<double> lynden_bell_curve(const ObservedSample& sample);

// Cumulative-hazard estimators: the sum of 1/(n C_n) over points above t,
// and -log of the product-limit cdf. hazard_log throws DegenerateMassError
// (carrying T) when the cdf vanishes at t.
double hazard_sum(const ObservedSample& sample, double t);
double hazard_log(const ObservedSample& sample, double t);

// T = max{x_i : n C_n(x_i) = 1}, the point below which the product-limit
// cdf is identically zero. Empty only if no covering count equals one.
std::optional<double> degenerate_point(const ObservedSample& sample);

// Hill-type tail-index estimator built as a product-limit integral: the
// log-excesses over the threshold are weighted by F_n/C_n and normalised
// by the product-limit mass above the threshold. With k the estimator
// uses the random threshold t = x_{(n-k)}; the _at variant takes a
// deterministic threshold. Throws DegenerateMassError when T > t.
EviEstimate evi_lynden_bell(const ObservedSample& sample, std::size_t k);
EviEstimate evi_lynden_bell_at(const ObservedSample& sample, double t);

// Classical Hill estimator: mean log-excess ratio over the top k order
// statistics. Values need not be sorted; all must be positive.
double hill(std::span<const double> values, std::size_t k);

// gamma1* gamma2 / (gamma2 - gamma1*); throws DegenerateCombinationError
// on a zero denominator.
double gs_combine(double gamma1_star, double gamma2);

// Ratio estimator combining Hill on the x sample (k1) with Hill on the
// y sample (k2).
EviEstimate evi_gardes_stupfler(const ObservedSample& sample, std::size_t k1,
                                std::size_t k2);

// Tail extrapolation t * (fbar_t / p_n)^gamma.
double weissman_extrapolate(double t, double fbar_t, double p_n, double gamma);

// Extreme quantile of order 1 - p_n, extrapolated from the random
// threshold at level k with the product-limit tail mass. Requires
// p_n below the tail mass at the threshold.
double quantile_weissman(const ObservedSample& sample, std::size_t k,
                         double p_n);
double quantile_weissman_at(const ObservedSample& sample, double t,
                            double p_n);

}  // namespace lbtail
