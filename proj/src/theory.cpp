#include "lbtail/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lbtail/errors.hpp"
#include "lbtail/quadrature.hpp"

namespace lbtail {

namespace {

void require_ordered(double gamma1, double gamma2) {
    if (!(gamma1 > 0.0) || !(gamma2 > gamma1)) {
        throw Error("tail-ordering",
                    "requires 0 < gamma1 < gamma2, got gamma1=" +
                        std::to_string(gamma1) + " gamma2=" +
                        std::to_string(gamma2));
    }
}

}  // namespace

double alpha(double gamma1, double gamma2) {
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) {
        throw Error("tail-ordering", "alpha requires positive indices");
    }
    return gamma2 / (gamma1 + gamma2);
}

double mean_shift(double gamma1, double rho1) {
    if (rho1 > 0.0) {
        throw Error("second-order",
                    "rho1 must be nonpositive, got " + std::to_string(rho1));
    }
    return gamma1 * gamma1 / (1.0 - gamma1 * rho1);
}

double variance(double p, double gamma1, double gamma2) {
    require_ordered(gamma1, gamma2);
    if (!(p > 0.0) || p > 1.0) {
        throw Error("probability",
                    "p must lie in (0,1], got " + std::to_string(p));
    }
    const double ratio = gamma1 / gamma2;
    const double q = 1.0 - ratio;
    return p * gamma1 * gamma1 * (1.0 + ratio * ratio) / (q * q * q);
}

double c_k(double gamma1, double gamma2, std::size_t k) {
    require_ordered(gamma1, gamma2);
    const double q = 1.0 - gamma1 / gamma2;
    double value = 1.0 / q;
    for (std::size_t i = 1; i <= k; ++i) {
        value *= gamma1 * static_cast<double>(i) / q;
    }
    return value;
}

double nontruncation_prob(const HeavyTailModel& model_x,
                          const HeavyTailModel& model_y) {
    // On the probability scale u = F_x(x) the integrand has a compact
    // domain and is bounded by one.
    const auto integrand = [&](double u) {
        return model_y.survival(model_x.quantile(u));
    };
    const double p = integrate(integrand, 0.0, 1.0, 1e-9, 1e-12).value;
    return std::clamp(p, 0.0, 1.0);
}

double tail_nontruncation_mass(const HeavyTailModel& model_x,
                               const HeavyTailModel& model_y, double t) {
    // Parametrised by the x survival level so the deep tail keeps full
    // relative precision.
    const double sbar = model_x.survival(t);
    if (sbar == 0.0) return 0.0;
    const auto integrand = [&](double s) {
        return model_y.survival(model_x.upper_quantile(s));
    };
    const double tol = std::max(1e-14 * sbar, 1e-300);
    return integrate(integrand, 0.0, sbar, tol, 1e-10).value;
}

double lemma8_ratio(const HeavyTailModel& model_x,
                    const HeavyTailModel& model_y, std::size_t k, double t) {
    // Substituting y = log(x/t) turns the improper integral into one with
    // exponential decay of rate 1/gamma1 - 1/gamma2; the integrand is
    // assembled in log space so nothing overflows on the way.
    const double log_t = std::log(t);
    const auto integrand = [&](double y) {
        const double x = std::exp(log_t + y);
        const double log_jacobian = log_t + y;  // dx = x dy
        const double log_value = model_x.log_pdf(x) + log_jacobian -
                                 model_y.log_survival(x);
        const double base = std::exp(log_value);
        if (k == 0) return base;
        return std::pow(y, static_cast<double>(k)) * base;
    };

    const double denominator =
        std::exp(model_x.log_survival(t) - model_y.log_survival(t));
    const double tol = std::max(1e-9 * denominator, 1e-300);

    // Doubling segments until the remainder is negligible; x stays finite
    // because y is capped well below the overflow point of exp.
    const double y_cap = 700.0 - log_t;
    double total = 0.0;
    double lo = 0.0;
    double width = 1.0;
    int negligible = 0;
    while (lo < y_cap && negligible < 2) {
        const double hi = std::min(lo + width, y_cap);
        const double piece =
            integrate(integrand, lo, hi, tol / 4.0, 1e-10).value;
        total += piece;
        negligible = std::fabs(piece) < tol / 10.0 ? negligible + 1 : 0;
        lo = hi;
        width *= 2.0;
    }
    return total / denominator;
}

double fstar_tail_quantile(const HeavyTailModel& model_x,
                           const HeavyTailModel& model_y, double q) {
    if (!(q > 0.0) || q >= 1.0) {
        throw Error("quantile-order",
                    "tail quantile order must lie in (0,1), got " +
                        std::to_string(q));
    }
    const double p = nontruncation_prob(model_x, model_y);
    const double target = q * p;

    // Bracket: the tail mass is p at the lower endpoint and is bounded by
    // the x survival, so x's upper quantile at level q*p bounds t above.
    double lo = model_x.lower_endpoint();
    double hi = model_x.upper_quantile(target);
    if (!(hi > lo)) hi = lo + 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double mass = tail_nontruncation_mass(model_x, model_y, mid);
        if (mass > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

double rate_bridge_observed(const HeavyTailModel& model_x,
                            const HeavyTailModel& model_y, std::size_t n,
                            std::size_t k) {
    const double t = fstar_tail_quantile(
        model_x, model_y, static_cast<double>(k) / static_cast<double>(n));
    return static_cast<double>(n) * model_x.survival(t) * model_y.survival(t);
}

double clt_rate(const HeavyTailModel& model_x, const HeavyTailModel& model_y,
                std::size_t k) {
    const double gamma1 = model_x.evi();
    const double gamma2 = model_y.evi();
    const double p = nontruncation_prob(model_x, model_y);
    return p / alpha(gamma1, gamma2) * static_cast<double>(k);
}

TheoryConstants make_theory_constants(const HeavyTailModel& model_x,
                                      const HeavyTailModel& model_y,
                                      double rho1) {
    const double gamma1 = model_x.evi();
    const double gamma2 = model_y.evi();
    require_ordered(gamma1, gamma2);
    TheoryConstants constants{};
    constants.gamma1 = gamma1;
    constants.gamma2 = gamma2;
    constants.rho1 = rho1;
    constants.p = nontruncation_prob(model_x, model_y);
    constants.alpha = alpha(gamma1, gamma2);
    constants.m = mean_shift(gamma1, rho1);
    constants.s2 = variance(constants.p, gamma1, gamma2);
    return constants;
}

}  // namespace lbtail
