#include "lbtail/models.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "lbtail/errors.hpp"

namespace lbtail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error("model", std::string(name) + " must be strictly positive");
    }
}

// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

std::string format_param(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

HeavyTailModel::HeavyTailModel(Burr b) : v_(b) {
    require_positive(b.beta, "burr beta");
    require_positive(b.tau, "burr tau");
    require_positive(b.lambda, "burr lambda");
}

HeavyTailModel::HeavyTailModel(Frechet f) : v_(f) {
    require_positive(f.gamma, "frechet gamma");
}

HeavyTailModel::HeavyTailModel(Pareto p) : v_(p) {
    require_positive(p.gamma, "pareto gamma");
    require_positive(p.scale, "pareto scale");
}

double HeavyTailModel::cdf(double x) const {
    return std::visit(
        [x](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                if (x <= 0.0) return 0.0;
                // 1 - (1 + x^tau/beta)^(-lambda), kept stable for small x.
                return -std::expm1(-m.lambda *
                                   std::log1p(std::pow(x, m.tau) / m.beta));
            } else if constexpr (std::is_same_v<M, Frechet>) {
                if (x <= 0.0) return 0.0;
                return std::exp(-std::pow(x, -1.0 / m.gamma));
            } else {
                if (x <= m.scale) return 0.0;
                return -std::expm1(-std::log(x / m.scale) / m.gamma);
            }
        },
        v_);
}

double HeavyTailModel::survival(double x) const {
    return std::visit(
        [x](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                if (x <= 0.0) return 1.0;
                const double xt = std::pow(x, m.tau);
                if (std::isinf(xt)) {
                    // x^tau overflows before the survival underflows
                    const double log_beta = std::log(m.beta);
                    return std::exp(m.lambda *
                                    (log_beta -
                                     log_add_exp(log_beta,
                                                 m.tau * std::log(x))));
                }
                return std::pow(m.beta / (m.beta + xt), m.lambda);
            } else if constexpr (std::is_same_v<M, Frechet>) {
                if (x <= 0.0) return 1.0;
                return -std::expm1(-std::pow(x, -1.0 / m.gamma));
            } else {
                if (x <= m.scale) return 1.0;
                return std::pow(x / m.scale, -1.0 / m.gamma);
            }
        },
        v_);
}

double HeavyTailModel::log_survival(double x) const {
    return std::visit(
        [x](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                if (x <= 0.0) return 0.0;
                const double log_beta = std::log(m.beta);
                const double log_xt = m.tau * std::log(x);
                return m.lambda * (log_beta - log_add_exp(log_beta, log_xt));
            } else if constexpr (std::is_same_v<M, Frechet>) {
                if (x <= 0.0) return 0.0;
                return std::log(-std::expm1(-std::pow(x, -1.0 / m.gamma)));
            } else {
                if (x <= m.scale) return 0.0;
                return -std::log(x / m.scale) / m.gamma;
            }
        },
        v_);
}

double HeavyTailModel::pdf(double x) const {
    return std::visit(
        [x, this](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                if (x <= 0.0) return 0.0;
                return std::exp(log_pdf(x));
            } else if constexpr (std::is_same_v<M, Frechet>) {
                if (x <= 0.0) return 0.0;
                const double w = std::pow(x, -1.0 / m.gamma);
                return std::exp(-w) * w / (m.gamma * x);
            } else {
                if (x < m.scale) return 0.0;
                return std::pow(x / m.scale, -1.0 / m.gamma - 1.0) /
                       (m.gamma * m.scale);
            }
        },
        v_);
}

double HeavyTailModel::log_pdf(double x) const {
    return std::visit(
        [x](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                if (x <= 0.0) return -kInf;
                const double log_beta = std::log(m.beta);
                const double log_x = std::log(x);
                return std::log(m.lambda * m.tau) + (m.tau - 1.0) * log_x +
                       m.lambda * log_beta -
                       (m.lambda + 1.0) * log_add_exp(log_beta, m.tau * log_x);
            } else if constexpr (std::is_same_v<M, Frechet>) {
                if (x <= 0.0) return -kInf;
                const double inv_g = 1.0 / m.gamma;
                const double log_x = std::log(x);
                return -std::exp(-inv_g * log_x) - std::log(m.gamma) -
                       (inv_g + 1.0) * log_x;
            } else {
                if (x < m.scale) return -kInf;
                const double inv_g = 1.0 / m.gamma;
                return -std::log(m.gamma * m.scale) -
                       (inv_g + 1.0) * std::log(x / m.scale);
            }
        },
        v_);
}

double HeavyTailModel::quantile(double u) const {
    if (!(u >= 0.0) || u >= 1.0) {
        throw Error("quantile-order",
                    "quantile order must lie in [0,1), got " + format_param(u));
    }
    return std::visit(
        [u](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                // Inverse of 1 - (1 + x^tau/beta)^(-lambda).
                const double xt =
                    m.beta * std::expm1(-std::log1p(-u) / m.lambda);
                return std::pow(xt, 1.0 / m.tau);
            } else if constexpr (std::is_same_v<M, Frechet>) {
                if (u == 0.0) return 0.0;
                return std::pow(-std::log(u), -m.gamma);
            } else {
                return m.scale * std::exp(-m.gamma * std::log1p(-u));
            }
        },
        v_);
}

double HeavyTailModel::upper_quantile(double s) const {
    if (!(s > 0.0) || s > 1.0) {
        throw Error("quantile-order",
                    "survival level must lie in (0,1], got " + format_param(s));
    }
    return std::visit(
        [s](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                const double xt = m.beta * std::expm1(-std::log(s) / m.lambda);
                return std::pow(xt, 1.0 / m.tau);
            } else if constexpr (std::is_same_v<M, Frechet>) {
                if (s == 1.0) return 0.0;
                return std::pow(-std::log1p(-s), -m.gamma);
            } else {
                return m.scale * std::pow(s, -m.gamma);
            }
        },
        v_);
}

double HeavyTailModel::evi() const {
    return std::visit(
        [](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                return 1.0 / (m.lambda * m.tau);
            } else if constexpr (std::is_same_v<M, Frechet>) {
                return m.gamma;
            } else {
                return m.gamma;
            }
        },
        v_);
}

double HeavyTailModel::lower_endpoint() const {
    if (const auto* p = std::get_if<Pareto>(&v_)) return p->scale;
    return 0.0;
}

std::string HeavyTailModel::str() const {
    return std::visit(
        [](const auto& m) -> std::string {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Burr>) {
                return "burr(" + format_param(m.beta) + "," +
                       format_param(m.tau) + "," + format_param(m.lambda) +
                       ")";
            } else if constexpr (std::is_same_v<M, Frechet>) {
                return "frechet(" + format_param(m.gamma) + ")";
            } else {
                return "pareto(" + format_param(m.gamma) + "," +
                       format_param(m.scale) + ")";
            }
        },
        v_);
}

namespace {

std::vector<double> parse_params(const std::string& text, std::size_t open,
                                 const std::string& literal) {
    if (text.back() != ')') {
        throw Error("model-literal", "expected ')' at end of '" + literal + "'");
    }
    std::vector<double> params;
    std::string body = text.substr(open + 1, text.size() - open - 2);
    std::stringstream ss(body);
    std::string token;
    while (std::getline(ss, token, ',')) {
        // tolerate surrounding whitespace inside the parentheses
        const auto b = token.find_first_not_of(" \t");
        const auto e = token.find_last_not_of(" \t");
        if (b == std::string::npos) {
            throw Error("model-literal", "empty parameter in '" + literal + "'");
        }
        token = token.substr(b, e - b + 1);
        double value = 0.0;
        auto [ptr, ec] =
            std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            throw Error("model-literal",
                        "bad numeric parameter '" + token + "' in '" + literal +
                            "'");
        }
        params.push_back(value);
    }
    return params;
}

}  // namespace

HeavyTailModel parse_model(const std::string& text) {
    std::string t = text;
    const auto b = t.find_first_not_of(" \t");
    const auto e = t.find_last_not_of(" \t");
    if (b == std::string::npos) {
        throw Error("model-literal", "empty model literal");
    }
    t = t.substr(b, e - b + 1);
    const auto open = t.find('(');
    if (open == std::string::npos) {
        throw Error("model-literal", "expected '(' in '" + text + "'");
    }
    const std::string name = t.substr(0, open);
    const std::vector<double> params = parse_params(t, open, text);
    if (name == "burr") {
        if (params.size() != 3) {
            throw Error("model-literal", "burr expects 3 parameters");
        }
        return HeavyTailModel(Burr{params[0], params[1], params[2]});
    }
    if (name == "frechet") {
        if (params.size() != 1) {
            throw Error("model-literal", "frechet expects 1 parameter");
        }
        return HeavyTailModel(Frechet{params[0]});
    }
    if (name == "pareto") {
        if (params.size() != 2) {
            throw Error("model-literal", "pareto expects 2 parameters");
        }
        return HeavyTailModel(Pareto{params[0], params[1]});
    }
    throw Error("model-literal", "unknown model '" + name + "'");
}

std::vector<double> sample(const HeavyTailModel& model, UniformStream& stream,
                           std::size_t count) {
    std::vector<double> draws;
    draws.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        draws.push_back(model.quantile(stream.next()));
    }
    return draws;
}

}  // namespace lbtail
