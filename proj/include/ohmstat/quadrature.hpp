#pragma once

#include <functional>
#include <vector>

namespace ohmstat {

// Gauss-Legendre nodes and weights on [-1,1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n);

    // Integrate f over [a,b] with this rule.
    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

// Adaptive Gauss-Legendre: recursive bisection until the two-panel result
// agrees with the one-panel result to rel_tol (with a small absolute floor).
// Orientation-aware: a > b integrates with the opposite sign.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, int base_nodes = 16);

} // namespace ohmstat
