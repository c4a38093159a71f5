#include "lbtail/sample.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "lbtail/errors.hpp"

namespace lbtail {

namespace {

// Running product of factors (c-1)/c, kept as an exact reduced fraction
// for as long as it fits 64 bits and degraded to plain double arithmetic
// afterwards. The exact path is what makes the product-limit cdf collapse
// to the empirical cdf bit-for-bit when the data are untruncated (the
// consecutive-integer factors telescope and stay small).
class FactorProduct {
public:
    void multiply(std::uint64_t c) {
        if (c <= 1) {
            zero_ = true;
            return;
        }
        if (zero_) return;
        std::uint64_t top = c - 1;
        std::uint64_t bottom = c;
        if (exact_) {
            const std::uint64_t g1 = std::gcd(top, den_);
            top /= g1;
            std::uint64_t den_reduced = den_ / g1;
            const std::uint64_t g2 = std::gcd(num_, bottom);
            bottom /= g2;
            std::uint64_t num_reduced = num_ / g2;
            if (num_reduced <= kLimit / top && den_reduced <= kLimit / bottom) {
                num_ = num_reduced * top;
                den_ = den_reduced * bottom;
                return;
            }
            approx_ = static_cast<double>(num_) / static_cast<double>(den_);
            exact_ = false;
        }
        approx_ *= static_cast<double>(c - 1) / static_cast<double>(c);
    }

    double value() const {
        if (zero_) return 0.0;
        if (exact_) {
            return static_cast<double>(num_) / static_cast<double>(den_);
        }
        return approx_;
    }

private:
    static constexpr std::uint64_t kLimit = 1ULL << 62;
    bool zero_ = false;
    bool exact_ = true;
    std::uint64_t num_ = 1;
    std::uint64_t den_ = 1;
    double approx_ = 1.0;
};

}  // namespace

ObservedSample::ObservedSample(std::vector<ObservedPair> pairs)
    : pairs_(std::move(pairs)) {
    const std::size_t n = pairs_.size();
    if (n == 0) {
        throw Error("sample", "observed sample must contain at least one pair");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [x, y] = pairs_[i];
        if (!std::isfinite(x) || !std::isfinite(y) || x <= 0.0 || y <= 0.0) {
            throw Error("pair", "pair " + std::to_string(i) +
                                    ": values must be finite and positive");
        }
        if (x > y) {
            throw Error("pair", "pair " + std::to_string(i) +
                                    ": x exceeds its truncation bound y");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        return pairs_[a].x < pairs_[b].x;
    });

    x_sorted_.resize(n);
    y_by_x_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        x_sorted_[j] = pairs_[order[j]].x;
        y_by_x_[j] = pairs_[order[j]].y;
    }
    for (std::size_t j = 1; j < n; ++j) {
        if (x_sorted_[j] == x_sorted_[j - 1]) throw TieError(x_sorted_[j]);
    }
    y_sorted_ = y_by_x_;
    std::sort(y_sorted_.begin(), y_sorted_.end());

    // n C_n at the j-th order statistic: (j+1) minus the number of y
    // strictly below it; one merge sweep over the two sorted arrays.
    covering_.resize(n);
    std::size_t y_below = 0;
    for (std::size_t j = 0; j < n; ++j) {
        while (y_below < n && y_sorted_[y_below] < x_sorted_[j]) ++y_below;
        covering_[j] = static_cast<std::uint32_t>(j + 1 - y_below);
    }

    lb_cdf_.resize(n);
    FactorProduct product;
    lb_cdf_[n - 1] = 1.0;  // empty product above the maximum
    for (std::size_t j = n - 1; j > 0; --j) {
        product.multiply(covering_[j]);
        lb_cdf_[j - 1] = product.value();
    }

    hazard_suffix_.assign(n + 1, 0.0);
    for (std::size_t j = n; j > 0; --j) {
        hazard_suffix_[j - 1] =
            hazard_suffix_[j] + 1.0 / static_cast<double>(covering_[j - 1]);
    }

    for (std::size_t j = n; j > 0; --j) {
        if (covering_[j - 1] == 1) {
            degenerate_index_ = j - 1;
            break;
        }
    }
}

std::size_t ObservedSample::covering_count(double x) const {
    const auto x_le =
        std::upper_bound(x_sorted_.begin(), x_sorted_.end(), x) -
        x_sorted_.begin();
    const auto y_lt =
        std::lower_bound(y_sorted_.begin(), y_sorted_.end(), x) -
        y_sorted_.begin();
    return static_cast<std::size_t>(x_le - y_lt);
}

namespace {

double parse_field(const std::string& token, std::size_t line,
                   const char* name) {
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw CsvError(line, std::string("bad ") + name + " value '" + token +
                                 "'");
    }
    return value;
}

}  // namespace

ObservedSample read_sample_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw CsvError(1, "empty input, expected header 'x,y'");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y") {
        throw CsvError(line_no, "expected header 'x,y', got '" + line + "'");
    }

    std::vector<ObservedPair> pairs;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw CsvError(line_no, "expected two comma-separated fields");
        }
        const double x = parse_field(line.substr(0, comma), line_no, "x");
        const double y = parse_field(line.substr(comma + 1), line_no, "y");
        if (!std::isfinite(x) || !std::isfinite(y) || x <= 0.0 || y <= 0.0) {
            throw CsvError(line_no, "values must be finite and positive");
        }
        if (x > y) {
            throw CsvError(line_no, "x exceeds its truncation bound y");
        }
        pairs.push_back(ObservedPair{x, y});
    }
    return ObservedSample(std::move(pairs));
}

ObservedSample read_sample_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("io", "cannot open input file '" + path + "'");
    }
    return read_sample_csv(in);
}

}  // namespace lbtail
