#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "lbtail/random.hpp"

namespace lbtail {

// Burr distribution: survival (beta / (beta + x^tau))^lambda on x >= 0.
// Extreme value index 1 / (lambda * tau).
struct Burr {
    double beta;
    double tau;
    double lambda;
};

// Frechet distribution: cdf exp(-x^(-1/gamma)) on x >= 0.
// Extreme value index gamma.
struct Frechet {
    double gamma;
};

// Pareto distribution: survival (x / scale)^(-1/gamma) on x >= scale.
// Its tail is exactly a power law, which makes it the reference model for
// closed-form oracles. Extreme value index gamma.
struct Pareto {
    double gamma;
    double scale;
};

// A parametric heavy-tailed law with exact cdf/quantile/sampling and a
// known extreme value index. Immutable value type, safe to share.
class HeavyTailModel {
public:
    using Variant = std::variant<Burr, Frechet, Pareto>;

    explicit HeavyTailModel(Burr b);
    explicit HeavyTailModel(Frechet f);
    explicit HeavyTailModel(Pareto p);

    double cdf(double x) const;
    // 1 - cdf(x), evaluated directly so the deep tail never cancels.
    double survival(double x) const;
    double log_survival(double x) const;
    double pdf(double x) const;
    double log_pdf(double x) const;
    // Inverse cdf; u in [0,1). Throws Error("quantile-order") otherwise.
    double quantile(double u) const;
    // x with survival(x) = s, s in (0,1]. Stable deep-tail inverse.
    double upper_quantile(double s) const;
    // The true extreme value index, always > 0.
    double evi() const;
    double lower_endpoint() const;

    const Variant& variant() const noexcept { return v_; }
    // Literal form, e.g. "burr(10,4,1)"; parseable by parse_model.
    std::string str() const;

private:
    Variant v_;
};

// Parses model literals: lowercase name, comma-separated positional
// parameters, e.g. "burr(10,4,1)", "frechet(0.25)", "pareto(0.5,1)".
HeavyTailModel parse_model(const std::string& text);

// i.i.d. draws by inverse transform; deterministic given the stream state.
std::vector<double> sample(const HeavyTailModel& model, UniformStream& stream,
                           std::size_t count);

}  // namespace lbtail
