#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ohmstat/solver.hpp"

namespace ohmstat {

// d-vector field in edge coordinates: component i at base x is the value
// on the edge <x, x+e_i>, one entry per edge of B(box). Everything
// outside B(box) is zero.
class EdgeField {
  public:
    explicit EdgeField(std::shared_ptr<const BoxDomain> box)
        : box_(std::move(box)), values_(box_->n_edges(), 0.0) {}

    const BoxDomain& box() const { return *box_; }
    std::shared_ptr<const BoxDomain> box_ptr() const { return box_; }

    double& at(long edge_id) { return values_[edge_id]; }
    double at(long edge_id) const { return values_[edge_id]; }
    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

    static EdgeField random(std::shared_ptr<const BoxDomain> box, std::uint64_t seed);

    // Edge gradient of a zero-boundary scalar on the interior.
    static EdgeField gradient(std::shared_ptr<const BoxDomain> box,
                              const std::vector<double>& interior);

  private:
    std::shared_ptr<const BoxDomain> box_;
    std::vector<double> values_;
};

// (div w)(x) = sum_i [w(x,i) - w(x-e_i,i)] on interior vertices.
std::vector<double> edge_divergence(const EdgeField& w);

double lp_norm(const EdgeField& f, double p);

// K = grad (-Delta)^{-1} div on edge fields, with the zero-boundary
// inverse of the unit-conductance Laplacian. Satisfies K(grad h) = -grad h
// and K w = 0 for divergence-free w.
class KOperator {
  public:
    explicit KOperator(std::shared_ptr<const BoxDomain> box);

    EdgeField apply(const EdgeField& g, double tol) const;

  private:
    std::shared_ptr<const BoxDomain> box_;
    InteriorSystem unit_system_;
};

EdgeField apply_K(std::shared_ptr<const BoxDomain> box, const EdgeField& g, double tol);

// Lower-bound estimate of the lp -> lp operator norm of K by the
// dual-exponent sign-power iteration from random starts (plain power
// method at p = 2).
double estimate_norm(std::shared_ptr<const BoxDomain> box, double p, int trials,
                     std::uint64_t seed, double solve_tol = 1e-10);

class ContractionViolation : public std::runtime_error {
  public:
    ContractionViolation(const std::string& what, double product)
        : std::runtime_error(what), product(product) {}
    double product;
};

struct FixedPointReport {
    EdgeField grad_f;
    long sweeps = 0;
    double contraction_product = 0.0;  // ||K||_p bound/estimate * ||A-id||_inf
    double final_change = 0.0;
    std::vector<double> change_log;
};

// Solve grad f = K [ g + (A - id) grad f ] by fixed-point iteration;
// refuses upfront when the measured contraction product reaches 1.
FixedPointReport meyers_fixed_point(const Environment& env, const EdgeField& g, double p,
                                    double tol);

// Corrector gradients via the fixed point: component m uses the input
// field carrying the direction-m conductances on direction-m edges.
std::vector<FixedPointReport> meyers_corrector_gradient(const Environment& env, double p,
                                                        double tol);

// Direct-solve corrector gradient in edge coordinates, for comparison.
EdgeField corrector_gradient_direct(const Environment& env, int component, double tol);

// Weak-(1,1) diagnostic: for a unit delta edge field, the best constant
// alpha * |{ x : |Kf(x)| > alpha }| over a log-spaced alpha grid.
double weak11_constant(std::shared_ptr<const BoxDomain> box, double tol, int alpha_decades = 3);

} // namespace ohmstat
