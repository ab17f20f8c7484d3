#include "ohmstat/checks.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ohmstat/green.hpp"
#include "ohmstat/martingale.hpp"
#include "ohmstat/meyers.hpp"
#include "ohmstat/rng.hpp"
#include "ohmstat/solver.hpp"

namespace ohmstat {

namespace {

void add(std::vector<CheckResult>& out, const std::string& name, bool pass, double measured) {
    std::ostringstream os;
    os.precision(6);
    os << "measured " << measured;
    out.push_back({name, pass, os.str()});
}

double series_ceff(const Environment& env, double t) {
    double inv = 0.0;
    for (long e = 0; e < env.box().n_edges(); ++e) inv += 1.0 / env.conductance(e);
    const double span = env.box().side() + 1;
    return t * t * span * span / inv;
}

} // namespace

std::vector<CheckResult> selftest_checks() {
    std::vector<CheckResult> out;
    const double tol = 1e-10;

    // Edge-count formula and stationary order.
    {
        bool counts_ok = true;
        for (int d = 1; d <= 3; ++d) {
            for (int L : {2, 3, 5}) {
                const BoxDomain box(d, L);
                long expect = d * (L + 1);
                for (int i = 0; i < d - 1; ++i) expect *= L;
                if (box.n_edges() != expect) counts_ok = false;
            }
        }
        add(out, "edge count d(L+1)L^(d-1)", counts_ok, 0.0);

        const BoxDomain fig(2, 7);
        const EdgeKey probe{{3, 3}, 1};
        long rank = 0;
        for (const EdgeKey& e : fig.edges())
            if (edge_leq(e, probe)) ++rank;
        add(out, "edge rank of ((3,3),2) in the 7-box", rank == 61, static_cast<double>(rank));
    }

    // Homogeneous exactness and the d=1 series formula.
    {
        auto box = std::make_shared<BoxDomain>(2, 4);
        const Environment env = sample(ConductanceLaw::constant(1.0), box, 0);
        const double ceff = effective_conductance(env, {1.0, 0.0}, tol);
        const double expect = 5.0 * 4.0;
        add(out, "homogeneous C_eff = a(L+1)L^(d-1)|t|^2",
            std::abs(ceff - expect) < 1e-9 * expect, ceff);

        auto path = std::make_shared<BoxDomain>(1, 8);
        const Environment renv = sample(ConductanceLaw::uniform(0.2), path, 7);
        const double c1 = effective_conductance(renv, {1.0}, tol);
        const double c2 = series_ceff(renv, 1.0);
        add(out, "d=1 series-resistor oracle", std::abs(c1 - c2) < 1e-9 * c2, c1 - c2);
    }

    // Derivative identity against a central finite difference.
    {
        auto box = std::make_shared<BoxDomain>(2, 4);
        const Environment env = sample(ConductanceLaw::uniform(0.5), box, 3);
        const EdgeKey e{{1, 2}, 0};
        const double analytic = energy_derivative(env, {1.0, 0.5}, e, tol);
        const double a0 = env.conductance(env.box().edge_id(e));
        const double delta = 1e-4 * a0;
        const double up = effective_conductance(env.perturb(e, a0 + delta), {1.0, 0.5}, tol);
        const double dn = effective_conductance(env.perturb(e, a0 - delta), {1.0, 0.5}, tol);
        const double fd = (up - dn) / (2.0 * delta);
        add(out, "energy derivative vs finite difference",
            std::abs(analytic - fd) <= 1e-6 * std::max(1.0, std::abs(fd)), analytic - fd);
    }

    // K operator sign conventions.
    {
        auto box = std::make_shared<BoxDomain>(2, 6);
        std::vector<double> h(box->n_interior());
        for (long v = 0; v < box->n_interior(); ++v) h[v] = u01(mix(11, v)) - 0.5;
        const EdgeField gh = EdgeField::gradient(box, h);
        const EdgeField Kgh = apply_K(box, gh, 1e-11);
        double gap = 0.0;
        for (long e = 0; e < box->n_edges(); ++e)
            gap = std::max(gap, std::abs(Kgh.at(e) + gh.at(e)));
        add(out, "K(grad h) = -grad h", gap < 1e-8, gap);
    }

    // Rank-one exact d=1 case.
    {
        auto box = std::make_shared<BoxDomain>(1, 2);
        const Environment env = sample(ConductanceLaw::constant(1.0, 0.5), box, 0);
        const double g = g_edge(env, EdgeKey{{0}, 0}, tol).g;
        const RankOneReport rep = rank_one_check(env, EdgeKey{{0}, 0}, 2.0, tol);
        add(out, "d=1 g = 2/3", std::abs(g - 2.0 / 3.0) < 1e-10, g);
        add(out, "d=1 rank-one factor = 3/5", std::abs(rep.factor - 0.6) < 1e-10, rep.factor);
    }

    // h route equivalence on a two-point law.
    {
        auto box = std::make_shared<BoxDomain>(1, 2);
        const ConductanceLaw law = ConductanceLaw::two_point(0.5, 0.5);
        const Environment env = sample(law, box, 5);
        const HValue h = h_edge(env, EdgeKey{{0}, 0}, law, 1e-8);
        add(out, "h closed form vs quadrature", h.disagreement < 1e-10, h.disagreement);
    }

    // Reflection principle against a direct solve, d=1.
    {
        auto box = std::make_shared<BoxDomain>(1, 2);
        const Environment env = sample(ConductanceLaw::constant(1.0), box, 0);
        const InteriorSystem sys(env, 0.5);
        std::vector<double> b(box->n_interior(), 0.0), u;
        b[box->vertex_id({0})] = 1.0;
        sys.solve(b, u, 1e-12);
        const double direct = u[box->vertex_id({1})];
        const double refl = reflected_green(0.5, *box, {1}, {0}, 10);
        add(out, "reflected Green vs direct solve (d=1)", std::abs(direct - refl) < 1e-8,
            direct - refl);
    }

    // Poisson kernel identity, d=1 closed form.
    {
        auto box = std::make_shared<BoxDomain>(1, 2);
        const Environment env = sample(ConductanceLaw::constant(1.0), box, 0);
        LatticeField bc(box, 1);
        bc.at(box->vertex_id({-1})) = 0.0;
        bc.at(box->vertex_id({2})) = 3.0;
        auto [h, rep] = solve_dirichlet(env, bc, LatticeField(box, 1), tol);
        const PoissonKernelReport pk = poisson_kernel_energy_check(env, h, tol);
        add(out, "Poisson kernel energy identity (d=1)",
            pk.identity_residual < 1e-9 && std::abs(pk.energy_direct - 3.0) < 1e-9,
            pk.identity_residual);
    }

    return out;
}

std::vector<CheckResult> green_checks() {
    std::vector<CheckResult> out;
    const double tol = 1e-11;

    // d=1 closed form of the full-lattice Green function.
    {
        const double eps = 0.5;
        const double root = std::sqrt(eps * eps + 4.0 * eps);
        const double rho = (2.0 + eps - root) / 2.0;
        double gap = 0.0;
        for (int x = 0; x <= 5; ++x)
            gap = std::max(gap,
                           std::abs(srw_green(eps, {x}, 1) - std::pow(rho, x) / root));
        add(out, "srw_green d=1 closed form", gap < 1e-10, gap);
    }

    // Symmetry and positivity of box Green columns on a random environment.
    {
        auto box = std::make_shared<BoxDomain>(2, 8);
        const Environment env = sample(ConductanceLaw::uniform(0.5), box, 21);
        const GreenColumn ga = green_column(env, {2, 3}, tol);
        const GreenColumn gb = green_column(env, {5, 4}, tol);
        const double sym = std::abs(ga.values.at(Point{5, 4}) - gb.values.at(Point{2, 3}));
        double min_val = 1e300;
        for (long v = 0; v < box->n_interior(); ++v) min_val = std::min(min_val, ga.values.at(v));
        add(out, "Green symmetry", sym < 10.0 * 1e-8, sym);
        add(out, "Green positivity", min_val > 0.0, min_val);
    }

    // Variational duality of the double gradient.
    {
        auto box = std::make_shared<BoxDomain>(2, 6);
        const Environment env = sample(ConductanceLaw::uniform(0.4), box, 2);
        const EdgeKey e{{2, 3}, 1};
        const double g = g_edge(env, e, tol).g;
        const double q = g_dual_inf_energy(env, e, tol);
        add(out, "g * inf Q = 1", std::abs(g * q - 1.0) < 1e-8, g * q - 1.0);
    }

    // Reflection representation against the direct box solve, d=2.
    {
        auto box = std::make_shared<BoxDomain>(2, 6);
        const Environment env = sample(ConductanceLaw::constant(1.0), box, 0);
        const InteriorSystem sys(env, 0.1);
        std::vector<double> b(box->n_interior(), 0.0), u;
        b[box->vertex_id({3, 3})] = 1.0;
        sys.solve(b, u, 1e-12);
        const double direct = u[box->vertex_id({2, 3})];
        const double refl = reflected_green(0.1, *box, {2, 3}, {3, 3}, 8);
        add(out, "reflected Green vs direct solve (d=2)", std::abs(direct - refl) < 1e-8,
            direct - refl);
    }

    // Triple-gradient decay exponent on a moderate box.
    {
        const BoxDomain box(2, 48);
        const TripleGradientReport rep = triple_gradient_decay(box, 0.0, {0, 0, 0}, 1e-11);
        add(out, "triple-gradient exponent near -3", std::abs(rep.exponent + 3.0) < 0.5,
            rep.exponent);
    }

    // Poisson kernel identity on a random environment.
    {
        auto box = std::make_shared<BoxDomain>(2, 4);
        const Environment env = sample(ConductanceLaw::uniform(0.5), box, 9);
        LatticeField bc(box, 1);
        for (long v = box->n_interior(); v < box->n_vertices(); ++v)
            bc.at(v) = u01(mix(33, v));
        auto [h, rep] = solve_dirichlet(env, bc, LatticeField(box, 1), 1e-11);
        const PoissonKernelReport pk = poisson_kernel_energy_check(env, h, 1e-11);
        add(out, "Poisson kernel energy identity (d=2)", pk.identity_residual < 1e-8,
            pk.identity_residual);
    }

    return out;
}

std::vector<CheckResult> martingale_checks() {
    std::vector<CheckResult> out;
    const double tol = 1e-11;
    const ConductanceLaw law = ConductanceLaw::two_point(0.5, 0.4);

    // Exhaustive d=1 box.
    {
        auto box = std::make_shared<BoxDomain>(1, 2);
        const ExhaustiveMartingale mart(box, law, {1.0}, tol);
        double worst_tel = 0.0;
        for (std::uint32_t cfg = 0; cfg < 8; ++cfg)
            worst_tel = std::max(worst_tel, mart.table_for(cfg).telescoping_residual);
        add(out, "telescoping (d=1 exhaustive)", worst_tel < 1e-10, worst_tel);
        add(out, "martingale property (d=1 exhaustive)", mart.max_martingale_residual() < 1e-10,
            mart.max_martingale_residual());

        const double z2 = mart.table_for(5).increments[1];
        const double z2i = mart.increment_via_integral(5, 2, 1e-10);
        add(out, "resampled-tail integral route", std::abs(z2 - z2i) < 1e-9, z2 - z2i);
        const double z2h = mart.increment_via_h(5, 2, 1e-9);
        add(out, "h-representation route", std::abs(z2 - z2h) < 1e-9, z2 - z2h);
    }

    // Rank-one identities on a random 2d environment.
    {
        auto box = std::make_shared<BoxDomain>(2, 6);
        const Environment env = sample(ConductanceLaw::uniform(0.4), box, 17);
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const EdgeKey e{{1 + k % 4, 2 + k % 3}, k % 2};
            const double value = 0.4 + 2.1 * u01(mix(99, k));
            const RankOneReport rep = rank_one_check(env, e, value, 1e-11);
            worst = std::max({worst, rep.field_residual, rep.gradient_residual,
                              rep.prefactor_residual});
        }
        add(out, "rank-one residuals (d=2)", worst < 1e-8, worst);
    }

    return out;
}

std::vector<CheckResult> meyers_checks(std::string* csv_out) {
    std::vector<CheckResult> out;
    const double tol = 1e-11;

    std::ostringstream csv;
    csv << "L,p,estimate,trials\n";

    // l2 contraction and the norm sweep.
    {
        double worst = 0.0;
        for (int L : {4, 8, 16}) {
            auto box = std::make_shared<BoxDomain>(2, L);
            const double est2 = estimate_norm(box, 2.0, 4, 7, tol);
            const double est4 = estimate_norm(box, 4.0, 4, 7, tol);
            csv << L << ",2," << est2 << ",4\n" << L << ",4," << est4 << ",4\n";
            worst = std::max(worst, est2);
        }
        add(out, "||K||_2 estimate <= 1", worst <= 1.0 + 1e-8, worst);
    }

    // Fixed point against the direct corrector gradient.
    {
        auto box = std::make_shared<BoxDomain>(2, 8);
        const Environment env = sample(ConductanceLaw::uniform(0.9), box, 4);
        const auto reports = meyers_corrector_gradient(env, 2.0, 1e-11);
        double gap2 = 0.0;
        for (int m = 0; m < 2; ++m) {
            const EdgeField direct = corrector_gradient_direct(env, m, 1e-12);
            double s = 0.0;
            for (long e = 0; e < box->n_edges(); ++e) {
                const double d = reports[m].grad_f.at(e) - direct.at(e);
                s += d * d;
            }
            gap2 = std::max(gap2, std::sqrt(s));
        }
        add(out, "fixed point matches direct corrector gradient", gap2 < 1e-8, gap2);
    }

    if (csv_out) *csv_out = csv.str();
    return out;
}

int print_and_count_failures(const std::vector<CheckResult>& results) {
    int failures = 0;
    for (const CheckResult& r : results) {
        std::printf("%s %s (%s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures;
}

} // namespace ohmstat
