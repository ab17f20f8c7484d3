#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "ohmstat/environment.hpp"
#include "ohmstat/field.hpp"

namespace ohmstat {

struct SolveReport {
    long iterations = 0;
    double relative_residual = 0.0;
    double tolerance = 0.0;
    bool converged = true;
};

class SolveFailure : public std::runtime_error {
  public:
    SolveFailure(const std::string& what, SolveReport report)
        : std::runtime_error(what), report(report) {}
    SolveReport report;
};

// The interior part of (mass - L_omega) assembled once per environment:
// diag(x) = mass + sum of incident conductances, off-diagonal -a_xy for
// interior neighbors, boundary couplings folded into the right-hand side
// at solve time. Reusable across many solves (Green columns, resampling).
class InteriorSystem {
  public:
    InteriorSystem(const Environment& env, double mass = 0.0);

    const BoxDomain& box() const { return *box_; }
    std::shared_ptr<const BoxDomain> box_ptr() const { return box_; }
    double mass() const { return mass_; }

    // y = A x on interior vectors.
    void apply(const std::vector<double>& x, std::vector<double>& y) const;

    // Preconditioned CG for A u = b; u may carry a warm start. Relative
    // residual against ||b||; returns the report, throws SolveFailure on
    // stagnation past the iteration cap.
    SolveReport solve(const std::vector<double>& b, std::vector<double>& u, double tol) const;

    // Right-hand side of the Dirichlet problem: rhs on the interior plus
    // the boundary couplings a_xy * bc(y).
    std::vector<double> dirichlet_rhs(const LatticeField& boundary, int comp,
                                      const LatticeField* rhs = nullptr) const;

  private:
    std::shared_ptr<const BoxDomain> box_;
    double mass_;
    long n_;
    int d_;
    std::vector<double> diag_;
    std::vector<double> coeff_;      // per (vertex, slot): conductance
    std::vector<long> neighbor_;     // interior neighbor id or -1
    std::vector<long> bedge_;        // edge id when neighbor is boundary, else -1
    std::vector<double> inv_diag_;
};

// (L_omega f)(x) = sum_{y ~ x} a_xy [f(y) - f(x)], one value per component.
std::vector<double> apply_operator(const Environment& env, const LatticeField& f, const Point& x);

// Solve -L_omega f = rhs in the box interior with f = boundary on the
// outside layer. Arity follows the boundary field.
std::pair<LatticeField, SolveReport> solve_dirichlet(const Environment& env,
                                                     const LatticeField& boundary,
                                                     const LatticeField& rhs, double tol);

struct HarmonicCoordinate {
    LatticeField psi;        // arity d, Psi = x on the boundary
    LatticeField corrector;  // chi = Psi - x
    SolveReport report;      // worst of the d component solves
};

HarmonicCoordinate harmonic_coordinate(const Environment& env, double tol);

// Q(f) = sum over B(box) of a_e |f(head) - f(base)|^2, fixed edge order.
double dirichlet_energy(const Environment& env, const LatticeField& f);

// Q(t . Psi): minimum Dirichlet energy over fields with boundary t . x.
double effective_conductance(const Environment& env, const std::vector<double>& t, double tol);

// d C_eff / d a_e = [t.Psi(head) - t.Psi(base)]^2.
double energy_derivative(const Environment& env, const std::vector<double>& t, const EdgeKey& e,
                         double tol);

// ( |box|^-1 sum over B(box) |f(head)-f(base)|^p )^(1/p).
double gradient_norm(const LatticeField& f, double p);

} // namespace ohmstat
