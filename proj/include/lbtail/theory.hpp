#pragma once

#include <cstddef>

#include "lbtail/models.hpp"

namespace lbtail {

// Asymptotic constants of the tail-index CLT for a truncated/truncating
// model pair. rho1 is the second-order index of the x model; it is always
// user-supplied, never inferred.
struct TheoryConstants {
    double gamma1;
    double gamma2;
    double rho1;
    double p;      // non-truncation probability P(X <= Y)
    double alpha;  // tail non-truncation probability gamma2/(gamma1+gamma2)
    double m;      // asymptotic mean-shift constant
    double s2;     // asymptotic variance
};

// gamma2 / (gamma1 + gamma2); in (1/2, 1) when gamma1 < gamma2.
double alpha(double gamma1, double gamma2);

// m = gamma1^2 / (1 - gamma1 rho1) for rho1 < 0, gamma1^2 at rho1 = 0.
double mean_shift(double gamma1, double rho1);

// s^2 = p gamma1^2 (1 + (gamma1/gamma2)^2) (1 - gamma1/gamma2)^(-3);
// requires gamma1 < gamma2.
double variance(double p, double gamma1, double gamma2);

// c_k = gamma1^k k! / (1 - gamma1/gamma2)^(k+1); requires gamma1 < gamma2.
double c_k(double gamma1, double gamma2, std::size_t k);

// P(X <= Y) = integral of the y survival against dF_x, computed by
// adaptive quadrature on the probability scale to 1e-8 absolute.
double nontruncation_prob(const HeavyTailModel& model_x,
                          const HeavyTailModel& model_y);

// Tail mass of the non-truncation event: integral over (t, inf) of the
// y survival against dF_x.
double tail_nontruncation_mass(const HeavyTailModel& model_x,
                               const HeavyTailModel& model_y, double t);

// integral over (t, inf) of log^k(x/t) dF_x(x) / survival_y(x), divided
// by survival_x(t)/survival_y(t). Converges to c_k as t grows; exact for
// pure power tails.
double lemma8_ratio(const HeavyTailModel& model_x,
                    const HeavyTailModel& model_y, std::size_t k, double t);

// t with P(X > t | X <= Y) = q, solved against the quadrature tail mass.
double fstar_tail_quantile(const HeavyTailModel& model_x,
                           const HeavyTailModel& model_y, double q);

// n * survival_x(t) * survival_y(t) at t = the (1 - k/n) quantile of the
// observed-x distribution. Approximately (p/alpha) * k; the closed-form
// side of that bridge is clt_rate below.
double rate_bridge_observed(const HeavyTailModel& model_x,
                            const HeavyTailModel& model_y, std::size_t n,
                            std::size_t k);

// (p/alpha) * k, the CLT standardisation rate for the random threshold
// with k exceedances.
double clt_rate(const HeavyTailModel& model_x, const HeavyTailModel& model_y,
                std::size_t k);

// Bundles the constants for a model pair; validates gamma1 < gamma2.
TheoryConstants make_theory_constants(const HeavyTailModel& model_x,
                                      const HeavyTailModel& model_y,
                                      double rho1);

}  // namespace lbtail
