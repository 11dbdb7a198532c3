#ifndef WQED_SUMMATION_HPP
#define WQED_SUMMATION_HPP

#include <complex>
#include <vector>

#include "wqed/linear_form.hpp"

namespace wqed {

struct GeometricSum {
    complexd value{0.0, 0.0};
    bool inside_radius = true;  // |r| < 1; outside, the value is the analytic continuation
};

/// Closed form of 1 + 2 sum_{n>=1} r^n = (1+r)/(1-r), the resummed
/// single-photon series with ratio r = -pi gamma^2 g. Throws on r == 1.
GeometricSum geometric_closed_sum(complexd r);

struct BorelConfig {
    int nodes = 64;      // starting Gauss-Laguerre node count, >= 4
    int max_nodes = 512; // adaptive doubling limit
    double tol = 1e-10;
};

struct BorelResult {
    complexd value{0.0, 0.0};
    double error_estimate = 0.0;
    int nodes_used = 0;
    bool converged = false;
};

/// Numeric Borel sum of sum_n (-i x)^n via its transform phi(z) = e^{-i pi z}:
/// integral_0^inf e^{-t} phi(x t / pi) dt = 1/(1 + i x), evaluated by
/// Gauss-Laguerre quadrature with adaptive node doubling.
BorelResult borel_sum_geometric(double x, const BorelConfig& cfg = {});

/// Lorentzian-regularized kernel: alpha/(alpha^2+D^2) + i D/(alpha^2+D^2).
/// Tends to pi*delta(D) + i/D as alpha -> 0.
complexd g_regularized(double Delta, double alpha);

/// Gauss-Laguerre nodes/weights for weight e^{-t} on [0, inf). Stable up to
/// a few thousand nodes (exponentially scaled recurrence; weights below the
/// double underflow threshold are returned as zero).
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_laguerre(int n);

}  // namespace wqed

#endif
