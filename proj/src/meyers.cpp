#include "ohmstat/meyers.hpp"

#include <cmath>

#include "ohmstat/rng.hpp"

namespace ohmstat {

EdgeField EdgeField::random(std::shared_ptr<const BoxDomain> box, std::uint64_t seed) {
    EdgeField f(std::move(box));
    for (long e = 0; e < f.box().n_edges(); ++e)
        f.at(e) = 2.0 * u01(mix(seed, static_cast<std::uint64_t>(e))) - 1.0;
    return f;
}

EdgeField EdgeField::gradient(std::shared_ptr<const BoxDomain> box,
                              const std::vector<double>& interior) {
    EdgeField f(box);
    const long ni = box->n_interior();
    for (long e = 0; e < box->n_edges(); ++e) {
        const auto [base, head] = box->edge_endpoints(e);
        const double ub = base < ni ? interior[base] : 0.0;
        const double uh = head < ni ? interior[head] : 0.0;
        f.at(e) = uh - ub;
    }
    return f;
}

std::vector<double> edge_divergence(const EdgeField& w) {
    const BoxDomain& box = w.box();
    const int d = box.dimension();
    std::vector<double> div(box.n_interior(), 0.0);
    for (long v = 0; v < box.n_interior(); ++v) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            s += w.at(box.adjacent(v, i).edge);       // upper edge (x,i)
            s -= w.at(box.adjacent(v, d + i).edge);   // lower edge (x-e_i,i)
        }
        div[v] = s;
    }
    return div;
}

double lp_norm(const EdgeField& f, double p) {
    double s = 0.0;
    for (double v : f.raw()) s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

KOperator::KOperator(std::shared_ptr<const BoxDomain> box)
    : box_(box), unit_system_(sample(ConductanceLaw::constant(1.0), box, 0)) {}

EdgeField KOperator::apply(const EdgeField& g, double tol) const {
    const std::vector<double> s = edge_divergence(g);
    std::vector<double> u;
    unit_system_.solve(s, u, tol);
    return EdgeField::gradient(box_, u);
}

EdgeField apply_K(std::shared_ptr<const BoxDomain> box, const EdgeField& g, double tol) {
    return KOperator(std::move(box)).apply(g, tol);
}

double estimate_norm(std::shared_ptr<const BoxDomain> box, double p, int trials,
                     std::uint64_t seed, double solve_tol) {
    if (p <= 1.0) throw std::invalid_argument("estimate_norm: p must be > 1");
    const KOperator K(box);
    const double q = p / (p - 1.0);
    const long n = box->n_edges();

    auto power_map = [](const EdgeField& in, double expo, EdgeField& out) {
        for (long e = 0; e < static_cast<long>(in.raw().size()); ++e) {
            const double v = in.at(e);
            out.at(e) = v == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v), expo), v);
        }
    };

    double best = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        EdgeField x = EdgeField::random(box, mix(seed, trial));
        double nx = lp_norm(x, p);
        for (long e = 0; e < n; ++e) x.at(e) /= nx;
        EdgeField y(box), phi(box), z(box);
        for (int it = 0; it < 60; ++it) {
            y = K.apply(x, solve_tol);
            const double est = lp_norm(y, p);
            best = std::max(best, est);
            power_map(y, p - 1.0, phi);
            z = K.apply(phi, solve_tol);
            double zq = lp_norm(z, q), zx = 0.0;
            for (long e = 0; e < n; ++e) zx += z.at(e) * x.at(e);
            if (zq <= zx * (1.0 + 1e-10) + 1e-14) break;
            power_map(z, q - 1.0, x);
            nx = lp_norm(x, p);
            for (long e = 0; e < n; ++e) x.at(e) /= nx;
        }
    }
    return best;
}

FixedPointReport meyers_fixed_point(const Environment& env, const EdgeField& g, double p,
                                    double tol) {
    auto box = env.box_ptr();
    const long n = box->n_edges();

    double a_dev = 0.0;
    for (long e = 0; e < n; ++e) a_dev = std::max(a_dev, std::abs(env.conductance(e) - 1.0));
    // ||K||_2 <= 1 is proven; other p use the lower-bound estimate.
    const double knorm = p == 2.0 ? 1.0 : estimate_norm(box, p, 2, 12345, tol);
    const double product = knorm * a_dev;

    FixedPointReport report{EdgeField(box)};
    report.contraction_product = product;
    if (product >= 1.0)
        throw ContractionViolation("meyers_fixed_point: contraction product >= 1", product);

    const KOperator K(box);
    EdgeField w(box), input(box);
    long grows = 0;
    double prev_change = -1.0;
    for (long sweep = 1; sweep <= 500; ++sweep) {
        for (long e = 0; e < n; ++e)
            input.at(e) = g.at(e) + (env.conductance(e) - 1.0) * w.at(e);
        EdgeField next = K.apply(input, tol);
        double change2 = 0.0, norm2 = 0.0;
        for (long e = 0; e < n; ++e) {
            const double dv = next.at(e) - w.at(e);
            change2 += dv * dv;
            norm2 += next.at(e) * next.at(e);
        }
        w = next;
        const double change = std::sqrt(change2);
        report.change_log.push_back(change);
        report.sweeps = sweep;
        report.final_change = change;
        if (change <= tol * std::max(1.0, std::sqrt(norm2))) break;
        if (prev_change >= 0.0 && change > prev_change) {
            if (++grows >= 3)
                throw ContractionViolation("meyers_fixed_point: iteration diverges", product);
        } else {
            grows = 0;
        }
        prev_change = change;
    }
    report.grad_f = std::move(w);
    return report;
}

std::vector<FixedPointReport> meyers_corrector_gradient(const Environment& env, double p,
                                                        double tol) {
    auto box = env.box_ptr();
    std::vector<FixedPointReport> out;
    for (int m = 0; m < box->dimension(); ++m) {
        EdgeField g(box);
        for (long e = 0; e < box->n_edges(); ++e)
            if (box->edge(e).dir == m) g.at(e) = env.conductance(e);
        out.push_back(meyers_fixed_point(env, g, p, tol));
    }
    return out;
}

EdgeField corrector_gradient_direct(const Environment& env, int component, double tol) {
    const HarmonicCoordinate hc = harmonic_coordinate(env, tol);
    auto box = env.box_ptr();
    EdgeField grad(box);
    for (long e = 0; e < box->n_edges(); ++e) {
        const auto [base, head] = box->edge_endpoints(e);
        grad.at(e) = hc.corrector.at(head, component) - hc.corrector.at(base, component);
    }
    return grad;
}

double weak11_constant(std::shared_ptr<const BoxDomain> box, double tol, int alpha_decades) {
    const int d = box->dimension();
    EdgeField f(box);
    Point center(static_cast<std::size_t>(d), box->side() / 2);
    f.at(box->edge_id(EdgeKey{center, 0})) = 1.0;  // ||f||_1 = 1
    const EdgeField Kf = apply_K(box, f, tol);

    // Vertex magnitude from the d upper-edge components.
    std::vector<double> mag(box->n_interior(), 0.0);
    double vmax = 0.0;
    for (long v = 0; v < box->n_interior(); ++v) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double c = Kf.at(box->adjacent(v, i).edge);
            s += c * c;
        }
        mag[v] = std::sqrt(s);
        vmax = std::max(vmax, mag[v]);
    }

    double best = 0.0;
    const int per_decade = 8;
    for (int k = 0; k <= alpha_decades * per_decade; ++k) {
        const double alpha = vmax * std::pow(10.0, -static_cast<double>(k) / per_decade);
        long count = 0;
        for (long v = 0; v < box->n_interior(); ++v)
            if (mag[v] > alpha) ++count;
        best = std::max(best, alpha * static_cast<double>(count));
    }
    return best;
}

} // namespace ohmstat
