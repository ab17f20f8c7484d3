#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ohmstat/lattice.hpp"

namespace ohmstat {

enum class LawKind { Constant, Uniform, TwoPoint };

// Single-edge conductance distribution, supported in [lambda, 1/lambda].
//   constant(a)        : point mass at a
//   uniform(lambda)    : uniform on [lambda, 1/lambda]
//   two_point(lambda,p): value 1/lambda with probability p, else lambda
struct ConductanceLaw {
    LawKind kind = LawKind::Constant;
    double lambda = 1.0;
    double a = 1.0;       // constant law only
    double p = 0.5;       // two-point law only
    int quad_nodes = 16;  // node count for continuous-law averages

    static ConductanceLaw constant(double a, double lambda = 1.0);
    static ConductanceLaw uniform(double lambda, int quad_nodes = 16);
    static ConductanceLaw two_point(double lambda, double p);

    double support_lo() const { return lambda; }
    double support_hi() const { return 1.0 / lambda; }
    bool degenerate() const;          // a.s. constant
    double mean() const;

    // Map a uniform [0,1) variate to a draw from the law.
    double sample_value(double u) const;

    // Nodes/weights for averaging a function of one edge value over the
    // law: sum_k w_k f(x_k). Exact for the atomic laws, Gauss-Legendre of
    // quad_nodes points for the uniform law.
    struct QuadNode {
        double x;
        double w;
    };
    std::vector<QuadNode> quadrature() const;

    std::string kind_name() const;
    static LawKind kind_from_name(const std::string& name);
};

// One conductance configuration on B(box), indexed by edge id.
class Environment {
  public:
    Environment(std::shared_ptr<const BoxDomain> box, std::vector<double> conductances,
                double lambda);

    const BoxDomain& box() const { return *box_; }
    std::shared_ptr<const BoxDomain> box_ptr() const { return box_; }
    double lambda() const { return lambda_; }

    double conductance(long edge_id) const { return a_[edge_id]; }
    double conductance(const EdgeKey& e) const;
    const std::vector<double>& values() const { return a_; }

    // Copy with a single edge replaced; value must stay in the support.
    Environment perturb(const EdgeKey& e, double value) const;
    Environment perturb(long edge_id, double value) const;

    // Environment of the shifted configuration tau_z restricted to
    // sub_box: conductance of (x,i) in the result equals the conductance
    // of (x+z,i) here. Every required source edge must exist.
    Environment shift(const Point& z, std::shared_ptr<const BoxDomain> sub_box) const;

    std::string to_json(const ConductanceLaw& law, std::uint64_t seed) const;
    static Environment from_json(const std::string& text);

  private:
    std::shared_ptr<const BoxDomain> box_;
    std::vector<double> a_;
    double lambda_;
};

// I.i.d. draw per edge. The per-edge variate is mix(seed, edge_id), so the
// result is bit-identical regardless of traversal or thread scheduling.
Environment sample(const ConductanceLaw& law, std::shared_ptr<const BoxDomain> box,
                   std::uint64_t seed);

} // namespace ohmstat
