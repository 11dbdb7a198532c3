#include "wqed/summation.hpp"

#include <cmath>
#include <stdexcept>

namespace wqed {

GeometricSum geometric_closed_sum(complexd r) {
    if (std::abs(r - complexd{1.0, 0.0}) < 1e-300)
        throw std::domain_error("geometric_closed_sum: pole at r = 1");
    return {(complexd{1.0, 0.0} + r) / (complexd{1.0, 0.0} - r), std::abs(r) < 1.0};
}

namespace {

// Laguerre L_n(x) and L_{n-1}(x) by the three-term recurrence with dynamic
// rescaling: values grow past double range for n, x in the hundreds, so a
// base-e exponent is carried separately (log_scale).
struct LaguerrePair {
    double ln = 0.0;
    double lnm1 = 0.0;
    double log_scale = 0.0;  // true value = ln * exp(log_scale)
};

LaguerrePair laguerre_scaled(int n, double x) {
    double l0 = 1.0;
    double l1 = 1.0 - x;
    double log_scale = 0.0;
    for (int k = 1; k < n; ++k) {
        const double l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
        l0 = l1;
        l1 = l2;
        const double m = std::max(std::abs(l0), std::abs(l1));
        if (m > 1e250) {
            l0 *= 1e-250;
            l1 *= 1e-250;
            log_scale += 250.0 * std::numbers::ln10;
        }
    }
    return {l1, l0, log_scale};
}

}  // namespace

Quadrature gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: need n >= 1");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    double x = 0.0;
    for (int i = 0; i < n; ++i) {
        // initial guesses per Stroud & Secrest
        if (i == 0) {
            x = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            x += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = i - 1;
            x += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (x - q.nodes[i - 2]);
        }
        int settled = 0;
        for (int it = 0; it < 200 && settled < 3; ++it) {
            const LaguerrePair l = laguerre_scaled(n, x);
            // L'_n = n (L_n - L_{n-1}) / x; the common scale cancels in dx
            const double deriv = n * (l.ln - l.lnm1) / x;
            const double dx = l.ln / deriv;
            x -= dx;
            if (std::abs(dx) <= 4e-16 * (1.0 + x)) ++settled;
        }
        q.nodes[i] = x;
        // w_i = x_i / ((n+1)^2 L_{n+1}(x_i)^2); direct while the values fit,
        // assembled in logs once rescaling kicked in (those weights are at
        // the underflow floor anyway)
        const LaguerrePair lp = laguerre_scaled(n + 1, x);
        if (lp.log_scale == 0.0) {
            q.weights[i] = x / ((n + 1.0) * (n + 1.0) * lp.ln * lp.ln);
        } else {
            const double log_w = std::log(x) - 2.0 * std::log(n + 1.0) -
                                 2.0 * (std::log(std::abs(lp.ln)) + lp.log_scale);
            q.weights[i] = std::exp(log_w);
        }
    }
    return q;
}

BorelResult borel_sum_geometric(double x, const BorelConfig& cfg) {
    if (cfg.nodes < 4) throw std::invalid_argument("borel_sum_geometric: need >= 4 nodes");
    BorelResult res;
    complexd prev{0.0, 0.0};
    bool have_prev = false;
    for (int n = cfg.nodes; n <= cfg.max_nodes; n *= 2) {
        const Quadrature q = gauss_laguerre(n);
        complexd sum{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            if (q.weights[k] == 0.0) continue;
            // phi(x t / pi) = exp(-i x t)
            sum += q.weights[k] * std::exp(complexd{0.0, -x * q.nodes[k]});
        }
        res.value = sum;
        res.nodes_used = n;
        if (have_prev) {
            res.error_estimate = std::abs(sum - prev);
            if (res.error_estimate <= cfg.tol * std::max(1.0, std::abs(sum))) {
                res.converged = true;
                return res;
            }
        }
        prev = sum;
        have_prev = true;
    }
    return res;
}

complexd g_regularized(double Delta, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("g_regularized: alpha must be positive");
    const double denom = alpha * alpha + Delta * Delta;
    return {alpha / denom, Delta / denom};
}

}  // namespace wqed
