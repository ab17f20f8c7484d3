#include "ohmstat/solver.hpp"

#include <cmath>

namespace ohmstat {

InteriorSystem::InteriorSystem(const Environment& env, double mass)
    : box_(env.box_ptr()), mass_(mass), n_(box_->n_interior()), d_(box_->dimension()) {
    const int slots = 2 * d_;
    diag_.assign(n_, mass_);
    coeff_.assign(static_cast<std::size_t>(n_) * slots, 0.0);
    neighbor_.assign(static_cast<std::size_t>(n_) * slots, -1);
    bedge_.assign(static_cast<std::size_t>(n_) * slots, -1);
    for (long v = 0; v < n_; ++v) {
        for (int s = 0; s < slots; ++s) {
            const auto& adj = box_->adjacent(v, s);
            const double a = env.conductance(adj.edge);
            const std::size_t k = static_cast<std::size_t>(v) * slots + s;
            diag_[v] += a;
            coeff_[k] = a;
            if (adj.neighbor < n_) {
                neighbor_[k] = adj.neighbor;
            } else {
                bedge_[k] = adj.edge;
            }
        }
    }
    inv_diag_.resize(n_);
    for (long v = 0; v < n_; ++v) inv_diag_[v] = 1.0 / diag_[v];
}

void InteriorSystem::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const int slots = 2 * d_;
    for (long v = 0; v < n_; ++v) {
        double s = diag_[v] * x[v];
        const std::size_t base = static_cast<std::size_t>(v) * slots;
        for (int k = 0; k < slots; ++k) {
            const long nb = neighbor_[base + k];
            if (nb >= 0) s -= coeff_[base + k] * x[nb];
        }
        y[v] = s;
    }
}

SolveReport InteriorSystem::solve(const std::vector<double>& b, std::vector<double>& u,
                                  double tol) const {
    SolveReport report;
    report.tolerance = tol;
    if (static_cast<long>(u.size()) != n_) u.assign(n_, 0.0);

    double bnorm2 = 0.0;
    for (long v = 0; v < n_; ++v) bnorm2 += b[v] * b[v];
    if (bnorm2 == 0.0) {
        u.assign(n_, 0.0);
        return report;
    }

    const long cap = static_cast<long>(50.0 * std::sqrt(static_cast<double>(n_)) * d_) + 10;
    // Inner sweeps track the cheap recursive residual; convergence is
    // always re-checked against the true residual, restarting if the
    // recursion drifted.
    const double target2 = 0.25 * tol * tol * bnorm2;
    std::vector<double> r(n_), z(n_), p(n_), Ap(n_);
    long it = 0;
    for (;;) {
        apply(u, Ap);
        double true2 = 0.0;
        for (long v = 0; v < n_; ++v) {
            r[v] = b[v] - Ap[v];
            true2 += r[v] * r[v];
        }
        report.iterations = it;
        report.relative_residual = std::sqrt(true2 / bnorm2);
        if (report.relative_residual <= tol) {
            report.converged = true;
            return report;
        }
        if (it >= cap) {
            report.converged = false;
            throw SolveFailure("conjugate gradient did not reach tolerance within the iteration cap",
                               report);
        }
        for (long v = 0; v < n_; ++v) z[v] = inv_diag_[v] * r[v];
        p = z;
        double rz = 0.0, r2 = true2;
        for (long v = 0; v < n_; ++v) rz += r[v] * z[v];
        while (r2 > target2 && it < cap) {
            apply(p, Ap);
            double pAp = 0.0;
            for (long v = 0; v < n_; ++v) pAp += p[v] * Ap[v];
            if (pAp <= 0.0) break;
            const double alpha = rz / pAp;
            for (long v = 0; v < n_; ++v) u[v] += alpha * p[v];
            for (long v = 0; v < n_; ++v) r[v] -= alpha * Ap[v];
            double rz_new = 0.0;
            r2 = 0.0;
            for (long v = 0; v < n_; ++v) {
                z[v] = inv_diag_[v] * r[v];
                rz_new += r[v] * z[v];
                r2 += r[v] * r[v];
            }
            const double beta = rz_new / rz;
            rz = rz_new;
            for (long v = 0; v < n_; ++v) p[v] = z[v] + beta * p[v];
            ++it;
        }
    }
}

std::vector<double> InteriorSystem::dirichlet_rhs(const LatticeField& boundary, int comp,
                                                  const LatticeField* rhs) const {
    const int slots = 2 * d_;
    std::vector<double> b(n_, 0.0);
    for (long v = 0; v < n_; ++v) {
        double s = rhs ? rhs->at(v, comp) : 0.0;
        const std::size_t base = static_cast<std::size_t>(v) * slots;
        for (int k = 0; k < slots; ++k) {
            const long be = bedge_[base + k];
            if (be >= 0) {
                const auto& adj = box_->adjacent(v, k);
                s += coeff_[base + k] * boundary.at(adj.neighbor, comp);
            }
        }
        b[v] = s;
    }
    return b;
}

std::vector<double> apply_operator(const Environment& env, const LatticeField& f, const Point& x) {
    const BoxDomain& box = env.box();
    const long v = box.vertex_id(x);
    if (v >= box.n_interior()) throw std::domain_error("apply_operator: vertex not in the box");
    std::vector<double> out(f.arity(), 0.0);
    for (int s = 0; s < 2 * box.dimension(); ++s) {
        const auto& adj = box.adjacent(v, s);
        const double a = env.conductance(adj.edge);
        for (int c = 0; c < f.arity(); ++c) out[c] += a * (f.at(adj.neighbor, c) - f.at(v, c));
    }
    return out;
}

std::pair<LatticeField, SolveReport> solve_dirichlet(const Environment& env,
                                                     const LatticeField& boundary,
                                                     const LatticeField& rhs, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("solve_dirichlet: tol must be positive");
    const InteriorSystem system(env);
    const BoxDomain& box = env.box();
    LatticeField f(env.box_ptr(), boundary.arity());
    SolveReport worst;
    worst.tolerance = tol;
    for (int c = 0; c < boundary.arity(); ++c) {
        const std::vector<double> b = system.dirichlet_rhs(boundary, c, &rhs);
        std::vector<double> u;
        const SolveReport rep = system.solve(b, u, tol);
        worst.iterations = std::max(worst.iterations, rep.iterations);
        worst.relative_residual = std::max(worst.relative_residual, rep.relative_residual);
        for (long v = 0; v < box.n_interior(); ++v) f.at(v, c) = u[v];
        for (long v = box.n_interior(); v < box.n_vertices(); ++v) f.at(v, c) = boundary.at(v, c);
    }
    return {std::move(f), worst};
}

HarmonicCoordinate harmonic_coordinate(const Environment& env, double tol) {
    const LatticeField id = LatticeField::identity(env.box_ptr());
    const LatticeField zero(env.box_ptr(), env.box().dimension());
    auto [psi, report] = solve_dirichlet(env, id, zero, tol);
    LatticeField chi = psi;
    for (long v = 0; v < env.box().n_vertices(); ++v)
        for (int c = 0; c < env.box().dimension(); ++c) chi.at(v, c) -= id.at(v, c);
    return HarmonicCoordinate{std::move(psi), std::move(chi), report};
}

double dirichlet_energy(const Environment& env, const LatticeField& f) {
    const BoxDomain& box = env.box();
    double q = 0.0;
    for (long e = 0; e < box.n_edges(); ++e) {
        const auto [base, head] = box.edge_endpoints(e);
        double d2 = 0.0;
        for (int c = 0; c < f.arity(); ++c) {
            const double diff = f.at(head, c) - f.at(base, c);
            d2 += diff * diff;
        }
        q += env.conductance(e) * d2;
    }
    return q;
}

double effective_conductance(const Environment& env, const std::vector<double>& t, double tol) {
    const LatticeField boundary = LatticeField::linear(env.box_ptr(), t);
    const LatticeField zero(env.box_ptr(), 1);
    auto [f, report] = solve_dirichlet(env, boundary, zero, tol);
    (void)report;
    return dirichlet_energy(env, f);
}

double energy_derivative(const Environment& env, const std::vector<double>& t, const EdgeKey& e,
                         double tol) {
    const long id = env.box().edge_id(e);
    if (id < 0) throw std::domain_error("energy_derivative: edge not in B(box)");
    const LatticeField boundary = LatticeField::linear(env.box_ptr(), t);
    const LatticeField zero(env.box_ptr(), 1);
    auto [f, report] = solve_dirichlet(env, boundary, zero, tol);
    (void)report;
    const auto [base, head] = env.box().edge_endpoints(id);
    const double diff = f.at(head) - f.at(base);
    return diff * diff;
}

double gradient_norm(const LatticeField& f, double p) {
    if (p < 1.0) throw std::invalid_argument("gradient_norm: p must be >= 1");
    const BoxDomain& box = f.box();
    double sum = 0.0;
    for (long e = 0; e < box.n_edges(); ++e) {
        const auto [base, head] = box.edge_endpoints(e);
        double d2 = 0.0;
        for (int c = 0; c < f.arity(); ++c) {
            const double diff = f.at(head, c) - f.at(base, c);
            d2 += diff * diff;
        }
        sum += std::pow(std::sqrt(d2), p);
    }
    return std::pow(sum / static_cast<double>(box.n_interior()), 1.0 / p);
}

} // namespace ohmstat
