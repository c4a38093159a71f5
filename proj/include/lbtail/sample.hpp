#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lbtail {

// One observed pair: x was retained because it did not exceed its
// truncation bound y.
struct ObservedPair {
    double x;
    double y;
};

// The observed dataset {(x_i, y_i)}. Construction validates positivity,
// x <= y per pair, and distinct x values (ties throw TieError), then
// precomputes the sorted views, covering counts and product-limit values
// every estimator consumes. Immutable afterwards; one O(n log n) pass.
class ObservedSample {
public:
    explicit ObservedSample(std::vector<ObservedPair> pairs);

    std::size_t size() const noexcept { return pairs_.size(); }
    const std::vector<ObservedPair>& pairs() const noexcept { return pairs_; }
    std::span<const double> x_sorted() const noexcept { return x_sorted_; }
    std::span<const double> y_sorted() const noexcept { return y_sorted_; }

    // #{i : x_i <= x <= y_i}, exact integer count.
    std::size_t covering_count(double x) const;
    // n C_n at the j-th x order statistic (0-based); integer in [1, n].
    std::size_t covering_count_at(std::size_t j) const {
        return covering_[j];
    }
    // Product-limit cdf value at the j-th x order statistic
    // (right-continuous: the product runs over points strictly above it).
    double product_limit_at(std::size_t j) const { return lb_cdf_[j]; }
    // Sum of 1/(n C_n) over order statistics at index >= j.
    double hazard_suffix(std::size_t j) const { return hazard_suffix_[j]; }
    // Index of the largest x order statistic with covering count 1, if any.
    std::optional<std::size_t> degenerate_index() const {
        return degenerate_index_;
    }

private:
    std::vector<ObservedPair> pairs_;      // input order, as given
    std::vector<double> x_sorted_;
    std::vector<double> y_sorted_;
    std::vector<double> y_by_x_;           // y reordered to match x_sorted_
    std::vector<std::uint32_t> covering_;  // n C_n at each x order statistic
    std::vector<double> lb_cdf_;           // product-limit values, size n
    std::vector<double> hazard_suffix_;    // size n + 1, last entry 0
    std::optional<std::size_t> degenerate_index_;
};

// Reads an observed sample from CSV with header "x,y", one pair per row.
// Rows violating 0 < x <= y are rejected with their line number.
ObservedSample read_sample_csv(std::istream& in);
ObservedSample read_sample_csv_file(const std::string& path);

}  // namespace lbtail
