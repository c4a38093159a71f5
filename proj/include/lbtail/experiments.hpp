#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lbtail/estimators.hpp"
#include "lbtail/models.hpp"
#include "lbtail/random.hpp"
#include "lbtail/sample.hpp"

namespace lbtail {

// A Monte Carlo experiment description. Replicate r always consumes the
// stream derived from (seed, r), so results do not depend on the
// execution schedule.
struct ExperimentSpec {
    HeavyTailModel model_x;
    HeavyTailModel model_y;
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::vector<std::size_t> k_grid;  // strictly increasing, within [1, n-1]
    std::optional<double> p_n;        // for quantile experiments
    std::uint64_t seed = 0;
};

// Per-(k, estimator) aggregate of a Monte Carlo run. Failed replicates
// (degenerate estimates) are excluded from the moments and counted;
// all-failed cells keep NaN moments rather than fabricated numbers.
struct CurveRow {
    std::size_t k = 0;
    std::string estimator;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    double mean = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    double rmse = 0.0;
};

struct CurveResult {
    std::vector<CurveRow> rows;  // k ascending, estimator name ascending
};

// Raw per-replicate statistics: values[r][ki][si] with NaN marking a
// failed cell. Aggregation is always by replicate index, which is what
// makes parallel execution bit-reproducible.
class ReplicateTable {
public:
    ReplicateTable(std::size_t replicates, std::size_t k_count,
                   std::size_t stat_count);

    double& at(std::size_t r, std::size_t ki, std::size_t si);
    double at(std::size_t r, std::size_t ki, std::size_t si) const;

    std::size_t replicates() const noexcept { return replicates_; }
    std::size_t k_count() const noexcept { return k_count_; }
    std::size_t stat_count() const noexcept { return stat_count_; }

private:
    std::size_t replicates_, k_count_, stat_count_;
    std::vector<double> values_;
};

struct GenerationResult {
    ObservedSample sample;
    std::uint64_t attempts;
};

// Rejection sampling: draw (x, y) pairs independently, keep x <= y, stop
// at n kept pairs. Throws GenerationStallError when acceptance looks
// numerically zero within the draw budget.
GenerationResult generate_truncated(const HeavyTailModel& model_x,
                                    const HeavyTailModel& model_y,
                                    std::size_t n, UniformStream& stream);

// threads: 1 runs the serial reference loop, 0 uses all hardware threads,
// anything else the requested count. Every choice yields identical output.
ReplicateTable simulate_evi_estimates(const ExperimentSpec& spec,
                                      int threads = 0);
ReplicateTable simulate_quantile_ratios(const ExperimentSpec& spec,
                                        int threads = 0);

// Aggregates a replicate table against a true value; label order must
// match the table's statistic order.
CurveResult aggregate_curve(const ReplicateTable& table,
                            const std::vector<std::size_t>& k_grid,
                            const std::vector<std::string>& labels,
                            double true_value);

// Bias/RMSE curves of the product-limit estimator and the ratio estimator
// (k1 = k2) over the k grid.
CurveResult run_bias_rmse(const ExperimentSpec& spec, int threads = 0);

// Same harness for the extreme-quantile estimator; the per-replicate
// statistic is x_hat / x_true - 1, so the true value is zero.
CurveResult run_quantile_curve(const ExperimentSpec& spec, int threads = 0);

// Normality check of the standardised estimator sqrt((p/alpha) k)
// (gamma_hat - gamma1) against the theoretical variance.
struct CltReport {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    double gamma1 = 0.0;
    double rate_factor = 0.0;     // (p/alpha) * k
    double mean = 0.0;            // of the standardised statistic
    double variance = 0.0;
    bool variance_defined = false;
    double s2 = 0.0;              // theoretical variance
    double variance_ratio = 0.0;  // empirical / theoretical
    double ks_statistic = 0.0;    // against the moment-matched normal
};

CltReport run_clt_check(const HeavyTailModel& model_x,
                        const HeavyTailModel& model_y, std::size_t n,
                        std::size_t k, std::size_t replicates,
                        std::uint64_t seed, int threads = 0);

// Kolmogorov-Smirnov distance between the values and the normal with the
// given moments.
double ks_distance_normal(std::vector<double> values, double mean,
                          double variance);

// Default k grid {10, 15, ..., 150} clipped to [1, n-1].
std::vector<std::size_t> default_k_grid(std::size_t n);

}  // namespace lbtail
