#include "lbtail/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <unordered_set>

#include "lbtail/errors.hpp"
#include "lbtail/theory.hpp"

namespace lbtail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_spec(const ExperimentSpec& spec) {
    if (spec.n < 2) {
        throw Error("experiment", "sample size n must be at least 2");
    }
    if (spec.replicates < 1) {
        throw Error("experiment", "replicates must be at least 1");
    }
    if (spec.k_grid.empty()) {
        throw Error("experiment", "k grid must not be empty");
    }
    for (std::size_t i = 0; i < spec.k_grid.size(); ++i) {
        const std::size_t k = spec.k_grid[i];
        if (k < 1 || k >= spec.n) {
            throw Error("experiment",
                        "k grid entry " + std::to_string(k) +
                            " outside [1, n-1]");
        }
        if (i > 0 && spec.k_grid[i] <= spec.k_grid[i - 1]) {
            throw Error("experiment", "k grid must be strictly increasing");
        }
    }
}

// Runs body(r) for r in [0, replicates). threads == 1 is the plain serial
// reference loop kept distinct from the OpenMP path on purpose: the two
// must agree bit-for-bit and the tests compare them. Exceptions from the
// parallel path are captured and rethrown after the region ends.
template <typename Body>
void for_each_replicate(std::size_t replicates, int threads,
                        const Body& body) {
    if (threads == 1) {
        for (std::size_t r = 0; r < replicates; ++r) body(r);
        return;
    }
    const int requested = threads <= 0 ? omp_get_max_threads() : threads;
    const auto count = static_cast<std::int64_t>(replicates);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(requested)
    for (std::int64_t r = 0; r < count; ++r) {
        try {
            body(static_cast<std::size_t>(r));
        } catch (...) {
#pragma omp critical(lbtail_replicate_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

ReplicateTable::ReplicateTable(std::size_t replicates, std::size_t k_count,
                               std::size_t stat_count)
    : replicates_(replicates),
      k_count_(k_count),
      stat_count_(stat_count),
      values_(replicates * k_count * stat_count, kNaN) {}

double& ReplicateTable::at(std::size_t r, std::size_t ki, std::size_t si) {
    return values_[(r * k_count_ + ki) * stat_count_ + si];
}

double ReplicateTable::at(std::size_t r, std::size_t ki,
                          std::size_t si) const {
    return values_[(r * k_count_ + ki) * stat_count_ + si];
}

GenerationResult generate_truncated(const HeavyTailModel& model_x,
                                    const HeavyTailModel& model_y,
                                    std::size_t n, UniformStream& stream) {
    if (n < 1) {
        throw Error("experiment", "sample size must be at least 1");
    }
    std::vector<ObservedPair> pairs;
    pairs.reserve(n);
    std::unordered_set<double> seen_x;
    seen_x.reserve(2 * n);

    std::uint64_t attempts = 0;
    std::uint64_t budget = 0;  // fixed at the first checkpoint
    constexpr std::uint64_t kCheckpoint = 1'000'000;

    while (pairs.size() < n) {
        if (attempts == kCheckpoint) {
            if (pairs.empty()) {
                throw GenerationStallError(attempts, pairs.size());
            }
            // 1000x the projected draws needed, using the acceptance rate
            // observed so far.
            const double rate = static_cast<double>(pairs.size()) /
                                static_cast<double>(attempts);
            budget = std::max<std::uint64_t>(
                kCheckpoint,
                static_cast<std::uint64_t>(1000.0 *
                                           static_cast<double>(n) / rate));
        }
        if (budget != 0 && attempts > budget) {
            throw GenerationStallError(attempts, pairs.size());
        }
        ++attempts;
        const double x = model_x.quantile(stream.next());
        const double y = model_y.quantile(stream.next());
        if (x > y) continue;
        // continuous laws collide only through double rounding; drop the
        // duplicate draw so the sample's distinct-x invariant holds
        if (!seen_x.insert(x).second) continue;
        pairs.push_back(ObservedPair{x, y});
    }
    return GenerationResult{ObservedSample(std::move(pairs)), attempts};
}

namespace {

constexpr std::size_t kStatGardesStupfler = 0;
constexpr std::size_t kStatLyndenBell = 1;

}  // namespace

ReplicateTable simulate_evi_estimates(const ExperimentSpec& spec,
                                      int threads) {
    validate_spec(spec);
    ReplicateTable table(spec.replicates, spec.k_grid.size(), 2);

    for_each_replicate(spec.replicates, threads, [&](std::size_t r) {
        Mt19937Stream stream = replicate_stream(spec.seed, r);
        const GenerationResult generated =
            generate_truncated(spec.model_x, spec.model_y, spec.n, stream);
        const ObservedSample& sample = generated.sample;
        for (std::size_t ki = 0; ki < spec.k_grid.size(); ++ki) {
            const std::size_t k = spec.k_grid[ki];
            try {
                table.at(r, ki, kStatLyndenBell) =
                    evi_lynden_bell(sample, k).value;
            } catch (const DegenerateMassError&) {
            }
            try {
                table.at(r, ki, kStatGardesStupfler) =
                    evi_gardes_stupfler(sample, k, k).value;
            } catch (const DegenerateCombinationError&) {
            }
        }
    });
    return table;
}

ReplicateTable simulate_quantile_ratios(const ExperimentSpec& spec,
                                        int threads) {
    validate_spec(spec);
    if (!spec.p_n) {
        throw Error("experiment", "quantile experiment requires p_n");
    }
    const double p_n = *spec.p_n;
    const double x_true = spec.model_x.quantile(1.0 - p_n);
    ReplicateTable table(spec.replicates, spec.k_grid.size(), 1);

    for_each_replicate(spec.replicates, threads, [&](std::size_t r) {
        Mt19937Stream stream = replicate_stream(spec.seed, r);
        const GenerationResult generated =
            generate_truncated(spec.model_x, spec.model_y, spec.n, stream);
        const ObservedSample& sample = generated.sample;
        for (std::size_t ki = 0; ki < spec.k_grid.size(); ++ki) {
            try {
                const double x_hat =
                    quantile_weissman(sample, spec.k_grid[ki], p_n);
                table.at(r, ki, 0) = x_hat / x_true - 1.0;
            } catch (const DegenerateMassError&) {
            } catch (const ExtrapolationError&) {
            }
        }
    });
    return table;
}

CurveResult aggregate_curve(const ReplicateTable& table,
                            const std::vector<std::size_t>& k_grid,
                            const std::vector<std::string>& labels,
                            double true_value) {
    CurveResult result;
    for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
        for (std::size_t si = 0; si < labels.size(); ++si) {
            CurveRow row;
            row.k = k_grid[ki];
            row.estimator = labels[si];
            row.replicates = table.replicates();

            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < table.replicates(); ++r) {
                const double v = table.at(r, ki, si);
                if (std::isnan(v)) continue;
                sum += v;
                ++count;
            }
            row.failures = table.replicates() - count;
            if (count == 0) {
                row.mean = row.bias = row.variance = row.rmse = kNaN;
            } else {
                row.mean = sum / static_cast<double>(count);
                row.bias = row.mean - true_value;
                double ss_mean = 0.0;
                double ss_true = 0.0;
                for (std::size_t r = 0; r < table.replicates(); ++r) {
                    const double v = table.at(r, ki, si);
                    if (std::isnan(v)) continue;
                    ss_mean += (v - row.mean) * (v - row.mean);
                    ss_true += (v - true_value) * (v - true_value);
                }
                row.variance = ss_mean / static_cast<double>(count);
                row.rmse = std::sqrt(ss_true / static_cast<double>(count));
            }
            result.rows.push_back(std::move(row));
        }
    }
    // deterministic order: k ascending, estimator name ascending
    std::sort(result.rows.begin(), result.rows.end(),
              [](const CurveRow& a, const CurveRow& b) {
                  if (a.k != b.k) return a.k < b.k;
                  return a.estimator < b.estimator;
              });
    return result;
}

CurveResult run_bias_rmse(const ExperimentSpec& spec, int threads) {
    const ReplicateTable table = simulate_evi_estimates(spec, threads);
    return aggregate_curve(
        table, spec.k_grid,
        {std::string(estimator_name(EstimatorKind::GardesStupfler)),
         std::string(estimator_name(EstimatorKind::LyndenBellHill))},
        spec.model_x.evi());
}

CurveResult run_quantile_curve(const ExperimentSpec& spec, int threads) {
    const ReplicateTable table = simulate_quantile_ratios(spec, threads);
    return aggregate_curve(table, spec.k_grid, {"weissman"}, 0.0);
}

double ks_distance_normal(std::vector<double> values, double mean,
                          double variance) {
    if (values.empty() || !(variance > 0.0)) return kNaN;
    std::sort(values.begin(), values.end());
    const double sd = std::sqrt(variance);
    const auto count = static_cast<double>(values.size());
    double distance = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double z = (values[i] - mean) / sd;
        const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
        const double above = (static_cast<double>(i) + 1.0) / count - cdf;
        const double below = cdf - static_cast<double>(i) / count;
        distance = std::max({distance, above, below});
    }
    return distance;
}

CltReport run_clt_check(const HeavyTailModel& model_x,
                        const HeavyTailModel& model_y, std::size_t n,
                        std::size_t k, std::size_t replicates,
                        std::uint64_t seed, int threads) {
    if (replicates < 1) {
        throw Error("experiment", "replicates must be at least 1");
    }
    const double gamma1 = model_x.evi();
    const double gamma2 = model_y.evi();
    const double rate = clt_rate(model_x, model_y, k);
    const double scale = std::sqrt(rate);
    const double p = rate / static_cast<double>(k) * alpha(gamma1, gamma2);

    std::vector<double> z(replicates, kNaN);
    for_each_replicate(replicates, threads, [&](std::size_t r) {
        Mt19937Stream stream = replicate_stream(seed, r);
        const GenerationResult generated =
            generate_truncated(model_x, model_y, n, stream);
        try {
            const double gamma_hat =
                evi_lynden_bell(generated.sample, k).value;
            z[r] = scale * (gamma_hat - gamma1);
        } catch (const DegenerateMassError&) {
        }
    });

    CltReport report;
    report.n = n;
    report.k = k;
    report.replicates = replicates;
    report.gamma1 = gamma1;
    report.rate_factor = rate;
    report.s2 = variance(p, gamma1, gamma2);

    std::vector<double> kept;
    kept.reserve(replicates);
    for (const double v : z) {
        if (!std::isnan(v)) kept.push_back(v);
    }
    report.failures = replicates - kept.size();
    if (kept.empty()) {
        report.mean = report.variance = report.variance_ratio =
            report.ks_statistic = kNaN;
        return report;
    }
    double sum = 0.0;
    for (const double v : kept) sum += v;
    report.mean = sum / static_cast<double>(kept.size());
    if (kept.size() < 2) {
        report.variance = kNaN;
        report.variance_defined = false;
        report.variance_ratio = kNaN;
        report.ks_statistic = kNaN;
        return report;
    }
    double ss = 0.0;
    for (const double v : kept) ss += (v - report.mean) * (v - report.mean);
    report.variance = ss / static_cast<double>(kept.size());
    report.variance_defined = true;
    report.variance_ratio = report.variance / report.s2;
    report.ks_statistic =
        ks_distance_normal(kept, report.mean, report.variance);
    return report;
}

std::vector<std::size_t> default_k_grid(std::size_t n) {
    std::vector<std::size_t> grid;
    for (std::size_t k = 10; k <= 150 && k + 1 <= n; k += 5) {
        grid.push_back(k);
    }
    if (grid.empty() && n >= 2) grid.push_back(n / 2 == 0 ? 1 : n / 2);
    return grid;
}

}  // namespace lbtail
