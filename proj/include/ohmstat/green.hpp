#pragma once

#include <array>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ohmstat/solver.hpp"

namespace ohmstat {

// Column G(., y) of the Green function of -L_omega on the box, zero on
// the boundary.
struct GreenColumn {
    Point source;
    LatticeField values;
    SolveReport report;
};

GreenColumn green_column(const Environment& env, const Point& y, double tol);
GreenColumn green_column(const InteriorSystem& system, const Point& y, double tol);

// Double gradient of the Green function across edge e = <x, x+e_i>:
// g = G(x+e_i,x+e_i) - 2 G(x,x+e_i) + G(x,x). Requires both endpoints
// inside the box.
struct GreenEdgeCoefficient {
    EdgeKey e;
    double g = 0.0;
};

GreenEdgeCoefficient g_edge(const Environment& env, const EdgeKey& e, double tol);

// Same stencil with G extended by zero at boundary vertices, valid for
// every edge of B(box); needed by the martingale layer for edges that
// touch the boundary.
GreenEdgeCoefficient g_edge_extended(const Environment& env, const EdgeKey& e, double tol);
GreenEdgeCoefficient g_edge_extended(const InteriorSystem& system, const Environment& env,
                                     const EdgeKey& e, double tol);

// Constrained dual of 1/g: inf { Q(f) : f(x+e_i)-f(x)=1, f=0 on the
// boundary }, evaluated through the Lagrange system -L f = delta_y -
// delta_x and the energy functional. Independent route for testing the
// stencil.
double g_dual_inf_energy(const Environment& env, const EdgeKey& e, double tol);

// g across centered sub-boxes of increasing side, sharing one sampled
// environment. Values are non-decreasing in the side.
struct GLimitResult {
    std::vector<int> sides;
    std::vector<double> values;
    double estimate = 0.0;  // last value
    double last_gap = 0.0;
};

GLimitResult g_limit_estimate(const Environment& big_env, int direction,
                              const std::vector<int>& sides, double tol);

// Full-lattice Green function of (eps - Delta) at lattice point x,
// computed by tensorized Gauss-Legendre quadrature of the Fourier
// representation. eps > 0.
double srw_green(double eps, const Point& x, int d);

// Memoizing evaluator for many points at fixed (eps, d).
class SrwGreenTable {
  public:
    SrwGreenTable(double eps, int d);
    double value(const Point& x);

  private:
    double eps_;
    int d_;
    std::unordered_map<std::uint64_t, double> memo_;
};

// Box Green function of (eps - Delta) via the reflection principle:
// alternating sum of full-lattice values over composite reflections of y,
// truncated at |z|_inf <= R.
double reflected_green(double eps, const BoxDomain& box, const Point& x, const Point& y, int R);
double reflected_green(double eps, const BoxDomain& box, const Point& x, const Point& y, int R,
                       SrwGreenTable& table);

// R doubled until the partial sums settle below 1e-10.
double reflected_green_adaptive(double eps, const BoxDomain& box, const Point& x, const Point& y);

// Triple gradient of the unit-conductance box Green function along lattice
// rays from the center; log-log fit of magnitude against distance.
struct TripleGradientReport {
    std::vector<std::pair<double, double>> samples;  // (|x-y|, value)
    double exponent = 0.0;
    double prefactor = 0.0;
    long n_fit = 0;
};

TripleGradientReport triple_gradient_decay(const BoxDomain& box, double eps,
                                           const std::array<int, 3>& directions, double tol);

// Boundary-kernel identity: Q(h) of an L_omega-harmonic field equals the
// quadratic form of the discrete Poisson kernel on the boundary.
struct PoissonKernelReport {
    double energy_direct = 0.0;
    double energy_kernel = 0.0;
    double identity_residual = 0.0;  // relative
    double max_row_sum_residual = 0.0;
    double max_asymmetry = 0.0;
};

PoissonKernelReport poisson_kernel_energy_check(const Environment& env, const LatticeField& h,
                                                double tol);

} // namespace ohmstat
