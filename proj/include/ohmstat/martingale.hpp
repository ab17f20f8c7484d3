#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ohmstat/green.hpp"
#include "ohmstat/solver.hpp"

namespace ohmstat {

// Residuals of the single-edge perturbation identities: the full-field
// Green-function form, the multiplicative gradient form, and the
// equivalence of the three prefactor expressions.
struct RankOneReport {
    double field_residual = 0.0;     // Psi(omega') - Psi(omega) identity, max over vertices
    double gradient_residual = 0.0;  // multiplicative form across the edge
    double prefactor_residual = 0.0; // alternative prefactor expressions
    double factor = 1.0;             // 1 - (w'-w) g(omega')
};

RankOneReport rank_one_check(const Environment& env, const EdgeKey& e, double new_value,
                             double tol);

// h at one edge, by the closed form (single average over the resampled
// edge value) and by the double quadrature with g updated rationally
// along the inner integral. The two routes must agree.
struct HValue {
    EdgeKey e;
    double h = 0.0;             // closed form
    double h_quadrature = 0.0;  // double-quadrature route
    double disagreement = 0.0;  // relative gap between routes
};

HValue h_edge(const Environment& env, const EdgeKey& e, const ConductanceLaw& law, double tol);

// Closed-form-only evaluation reusing a prebuilt interior system.
double h_closed(const InteriorSystem& system, const Environment& env, const EdgeKey& e,
                const ConductanceLaw& law, double tol);

// Martingale increments of the effective conductance under the stationary
// edge order, exact by exhaustive enumeration of a two-point law.
struct IncrementTable {
    std::vector<EdgeKey> edges;
    std::vector<double> increments;
    double ceff = 0.0;
    double mean_ceff = 0.0;
    double telescoping_residual = 0.0;
};

class ExhaustiveMartingale {
  public:
    // Enumerates all 2^N configurations (N = |B(box)| <= 14 required) and
    // every conditional expectation E(C_eff | first k edges).
    ExhaustiveMartingale(std::shared_ptr<const BoxDomain> box, const ConductanceLaw& law,
                         const std::vector<double>& t, double tol);

    const BoxDomain& box() const { return *box_; }
    int n_edges() const { return n_; }
    double mean_ceff() const { return cond_[0][0]; }
    double ceff(std::uint32_t config) const { return cond_[n_][config]; }
    double edge_value(bool hi) const;

    // E(C | first k edges = low k bits of config).
    double conditional(int k, std::uint32_t config) const;

    IncrementTable table_for(std::uint32_t config) const;

    // max over k and all prefixes of |E(Z_k | F_{k-1})|.
    double max_martingale_residual() const;

    // Z_k recomputed through the resampled-tail integral of the squared
    // edge gradient (independent route; k is 1-based).
    double increment_via_integral(std::uint32_t config, int k, double tol) const;

    // Z_k recomputed as E( h * |grad_e (t.Psi)|^2 | F_k ) by exhaustive
    // enumeration of the tail (k is 1-based).
    double increment_via_h(std::uint32_t config, int k, double tol) const;

  private:
    double ceff_of_bits(std::uint32_t config) const;

    std::shared_ptr<const BoxDomain> box_;
    ConductanceLaw law_;
    std::vector<double> t_;
    double tol_;
    int n_ = 0;
    std::vector<std::vector<double>> cond_;  // cond_[k][prefix bits]
};

// Monte Carlo estimate of the limiting variance through the conditional
// variance formula, on a centered proxy box.
struct SigmaEstimate {
    std::vector<double> t;
    std::vector<double> per_direction;
    std::vector<double> per_direction_se;
    double sigma_sq = 0.0;
    double standard_error = 0.0;
    int proxy_side = 0;
    long m_outer = 0;
    long m_inner = 0;
};

SigmaEstimate estimate_sigma_sq(const ConductanceLaw& law, int d, const std::vector<double>& t,
                                int proxy_side, long m_outer, long m_inner, std::uint64_t seed,
                                double tol, int threads = 1);

} // namespace ohmstat
