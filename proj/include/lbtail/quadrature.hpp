#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "lbtail/errors.hpp"

namespace lbtail {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t intervals = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1,1].
inline constexpr double kKronrodNodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813};
inline constexpr double kKronrodWeights[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785,
    0.169004726639267, 0.140653259715525, 0.104790010322250,
    0.063092092629979, 0.022935322010529};
// Gauss weights sit on the even Kronrod nodes (0, 2, 4, 6).
inline constexpr double kGaussWeights[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

template <typename F>
void gauss_kronrod(const F& f, double a, double b, double& value,
                   double& error) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double samples[15];
    const double f_mid = f(mid);
    samples[0] = f_mid;
    double k15 = kKronrodWeights[0] * f_mid;
    double g7 = kGaussWeights[0] * f_mid;
    double resabs = kKronrodWeights[0] * std::fabs(f_mid);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double f_lo = f(mid - dx);
        const double f_hi = f(mid + dx);
        samples[2 * i - 1] = f_lo;
        samples[2 * i] = f_hi;
        k15 += kKronrodWeights[i] * (f_lo + f_hi);
        resabs += kKronrodWeights[i] * (std::fabs(f_lo) + std::fabs(f_hi));
        if (i % 2 == 0) g7 += kGaussWeights[i / 2] * (f_lo + f_hi);
    }
    value = k15 * half;
    if (!std::isfinite(value)) {
        throw Error("quadrature", "integrand produced a non-finite value");
    }

    // quadpack-style estimate: the raw Gauss/Kronrod gap is damped by the
    // variation of the integrand so the estimate scales with the value
    const double mean = 0.5 * k15;
    double resasc = kKronrodWeights[0] * std::fabs(f_mid - mean);
    for (int i = 1; i < 8; ++i) {
        resasc += kKronrodWeights[i] * (std::fabs(samples[2 * i - 1] - mean) +
                                        std::fabs(samples[2 * i] - mean));
    }
    resasc *= std::fabs(half);
    const double raw = std::fabs((k15 - g7) * half);
    error = resasc;
    if (resasc != 0.0 && raw != 0.0) {
        error = resasc *
                std::min(1.0, std::pow(200.0 * raw / resasc, 1.5));
    }
    const double floor =
        50.0 * std::numeric_limits<double>::epsilon() * resabs *
        std::fabs(half);
    error = std::max(error, floor);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b]. Splits the
// interval with the worst error estimate first until the estimated error
// drops below max(abs_tol, rel_tol * |value|).
template <typename F>
QuadratureResult integrate(const F& f, double a, double b, double abs_tol,
                           double rel_tol = 1e-10,
                           std::size_t max_intervals = 4000) {
    struct Segment {
        double a, b, value, error;
        bool operator<(const Segment& other) const {
            return error < other.error;
        }
    };

    Segment whole{a, b, 0.0, 0.0};
    detail::gauss_kronrod(f, a, b, whole.value, whole.error);

    std::priority_queue<Segment> queue;
    queue.push(whole);
    double total = whole.value;
    double total_error = whole.error;
    std::size_t intervals = 1;

    const auto tolerance = [&] {
        return std::max(abs_tol, rel_tol * std::fabs(total));
    };

    while (total_error > tolerance() && intervals < max_intervals) {
        const Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval no longer splittable at double precision
            queue.push(worst);
            break;
        }
        Segment left{worst.a, mid, 0.0, 0.0};
        Segment right{mid, worst.b, 0.0, 0.0};
        detail::gauss_kronrod(f, left.a, left.b, left.value, left.error);
        detail::gauss_kronrod(f, right.a, right.b, right.value, right.error);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++intervals;
    }

    if (total_error > tolerance()) {
        throw Error("quadrature",
                    "adaptive quadrature did not converge to tolerance " +
                        std::to_string(tolerance()) + " (error estimate " +
                        std::to_string(total_error) + ")");
    }
    return QuadratureResult{total, total_error, intervals};
}

}  // namespace lbtail
