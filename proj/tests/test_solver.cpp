#include <doctest.h>

#include <cmath>

#include "ohmstat/rng.hpp"
#include "ohmstat/solver.hpp"

using namespace ohmstat;

namespace {

// Series-resistor closed form for the d=1 box: t^2 (L+1)^2 / sum(1/a_e).
double series_ceff(const Environment& env, double t) {
    double inv = 0.0;
    for (long e = 0; e < env.box().n_edges(); ++e) inv += 1.0 / env.conductance(e);
    const double span = env.box().side() + 1;
    return t * t * span * span / inv;
}

LatticeField random_boundary_match(const LatticeField& base, std::uint64_t seed) {
    // Same boundary values, random interior.
    LatticeField f = base;
    SeedStream rng(seed);
    for (long v = 0; v < f.box().n_interior(); ++v)
        for (int c = 0; c < f.arity(); ++c) f.at(v, c) = 4.0 * rng.next_u01() - 2.0;
    return f;
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("apply_operator basics") {
    auto box = std::make_shared<BoxDomain>(2, 4);
    const Environment env = sample(ConductanceLaw::uniform(0.5), box, 1);

    LatticeField constant(box, 1);
    for (long v = 0; v < box->n_vertices(); ++v) constant.at(v) = 3.25;
    for (long v = 0; v < box->n_interior(); ++v)
        CHECK(apply_operator(env, constant, box->vertex(v))[0] == doctest::Approx(0.0));

    // Linear functions are harmonic for homogeneous conductances.
    const Environment homog = sample(ConductanceLaw::constant(0.7, 0.5), box, 0);
    const LatticeField lin = LatticeField::linear(box, {1.0, -2.0});
    for (long v = 0; v < box->n_interior(); ++v)
        CHECK(apply_operator(homog, lin, box->vertex(v))[0] ==
              doctest::Approx(0.0).epsilon(1e-14));

    CHECK_THROWS_AS(apply_operator(env, lin, Point{-1, 0}), std::domain_error);
}

TEST_CASE("apply_operator d=1 hand expansion") {
    auto box = std::make_shared<BoxDomain>(1, 2);
    // Edges <-1,0>, <0,1>, <1,2> with conductances a0, a1, a2.
    const std::vector<double> a{0.6, 1.7, 0.9};
    const Environment env(box, a, 0.5);
    LatticeField f(box, 1);
    f.at(Point{-1}) = 0.3;
    f.at(Point{0}) = -1.1;
    f.at(Point{1}) = 2.0;
    f.at(Point{2}) = 0.7;
    const double expect = a[0] * (0.3 - (-1.1)) + a[1] * (2.0 - (-1.1));
    CHECK(apply_operator(env, f, Point{0})[0] == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("dirichlet solve reproduces linear data on homogeneous media") {
    auto box = std::make_shared<BoxDomain>(2, 5);
    const Environment env = sample(ConductanceLaw::constant(1.0), box, 0);
    const LatticeField bc = LatticeField::linear(box, {0.8, -0.3});
    auto [f, report] = solve_dirichlet(env, bc, LatticeField(box, 1), 1e-12);
    CHECK(report.converged);
    for (long v = 0; v < box->n_vertices(); ++v)
        CHECK(f.at(v) == doctest::Approx(bc.at(v)).epsilon(1e-10));
}

TEST_CASE("dirichlet solve: Green column closed form on the d=1 path") {
    auto box = std::make_shared<BoxDomain>(1, 2);
    const Environment env = sample(ConductanceLaw::constant(1.0), box, 0);
    LatticeField rhs(box, 1);
    rhs.at(Point{0}) = 1.0;  // delta at y = 0
    auto [f, report] = solve_dirichlet(env, LatticeField(box, 1), rhs, 1e-12);
    CHECK(f.at(Point{0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
    CHECK(f.at(Point{1}) == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
}

TEST_CASE("residual oracle on a random system") {
    auto box = std::make_shared<BoxDomain>(2, 6);
    const Environment env = sample(ConductanceLaw::uniform(0.3), box, 5);
    SeedStream rng(77);
    LatticeField rhs(box, 1), bc(box, 1);
    for (long v = 0; v < box->n_interior(); ++v) rhs.at(v) = rng.next_u01() - 0.5;
    for (long v = box->n_interior(); v < box->n_vertices(); ++v) bc.at(v) = rng.next_u01();
    auto [f, report] = solve_dirichlet(env, bc, rhs, 1e-11);
    // -L f = rhs at every interior vertex.
    double scale = 0.0, worst = 0.0;
    for (long v = 0; v < box->n_interior(); ++v) {
        const double lf = apply_operator(env, f, box->vertex(v))[0];
        worst = std::max(worst, std::abs(-lf - rhs.at(v)));
        scale = std::max(scale, std::abs(rhs.at(v)));
    }
    CHECK(worst <= 1e-9 * std::max(1.0, scale));
}

TEST_CASE("harmonic coordinate: homogeneous identity and d=1 series circuit") {
    auto box2 = std::make_shared<BoxDomain>(2, 4);
    const Environment homog = sample(ConductanceLaw::constant(1.0), box2, 0);
    const HarmonicCoordinate hc = harmonic_coordinate(homog, 1e-12);
    for (long v = 0; v < box2->n_vertices(); ++v)
        for (int c = 0; c < 2; ++c)
            CHECK(hc.corrector.at(v, c) == doctest::Approx(0.0).epsilon(1e-10));

    auto box1 = std::make_shared<BoxDomain>(1, 2);
    const Environment series(box1, {1.0, 2.0, 1.0}, 0.5);
    const HarmonicCoordinate hc1 = harmonic_coordinate(series, 1e-12);
    const double expected_drop[3] = {1.2, 0.6, 1.2};
    for (long e = 0; e < 3; ++e) {
        const auto [base, head] = box1->edge_endpoints(e);
        CHECK(hc1.psi.at(head, 0) - hc1.psi.at(base, 0) ==
              doctest::Approx(expected_drop[e]).epsilon(1e-10));
    }
}

TEST_CASE("interior residual of the harmonic coordinate") {
    auto box = std::make_shared<BoxDomain>(2, 8);
    const Environment env = sample(ConductanceLaw::uniform(0.4), box, 9);
    const HarmonicCoordinate hc = harmonic_coordinate(env, 1e-11);
    double worst = 0.0;
    for (long v = 0; v < box->n_interior(); ++v) {
        const auto lv = apply_operator(env, hc.psi, box->vertex(v));
        for (double c : lv) worst = std::max(worst, std::abs(c));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("variational minimality of the harmonic coordinate") {
    auto box = std::make_shared<BoxDomain>(2, 4);
    const Environment env = sample(ConductanceLaw::uniform(0.3), box, 13);
    const std::vector<double> t{1.0, 0.4};
    const LatticeField bc = LatticeField::linear(box, t);
    auto [minimizer, report] = solve_dirichlet(env, bc, LatticeField(box, 1), 1e-12);
    const double q_min = dirichlet_energy(env, minimizer);
    for (int trial = 0; trial < 100; ++trial) {
        const LatticeField f = random_boundary_match(bc, 900 + trial);
        CHECK(dirichlet_energy(env, f) >= q_min - 1e-10);
    }
}

TEST_CASE("dirichlet energy: closed forms and monotonicity") {
    auto box = std::make_shared<BoxDomain>(2, 3);
    const double a = 0.8;
    const Environment env = sample(ConductanceLaw::constant(a, 0.5), box, 0);

    LatticeField constant(box, 1);
    for (long v = 0; v < box->n_vertices(); ++v) constant.at(v) = 2.0;
    CHECK(dirichlet_energy(env, constant) == 0.0);

    const std::vector<double> t{1.5, -0.5};
    const LatticeField lin = LatticeField::linear(box, t);
    const double expect = a * 4.0 * 3.0 * (t[0] * t[0] + t[1] * t[1]);
    CHECK(dirichlet_energy(env, lin) == doctest::Approx(expect).epsilon(1e-13));

    // Monotone non-decreasing in each conductance for fixed f.
    SeedStream rng(4);
    LatticeField f(box, 1);
    for (long v = 0; v < box->n_vertices(); ++v) f.at(v) = rng.next_u01();
    const double q0 = dirichlet_energy(env, f);
    for (long e = 0; e < box->n_edges(); e += 3)
        CHECK(dirichlet_energy(env.perturb(e, a * 1.5), f) >= q0);
}

TEST_CASE("effective conductance: exactness, oracle, and concavity direction") {
    // Homogeneous exactness.
    auto box1 = std::make_shared<BoxDomain>(1, 2);
    const Environment homog = sample(ConductanceLaw::constant(1.0), box1, 0);
    CHECK(effective_conductance(homog, {1.0}, 1e-12) == doctest::Approx(3.0).epsilon(1e-12));

    // t = 0.
    CHECK(effective_conductance(homog, {0.0}, 1e-12) == 0.0);

    // Series-resistor oracle over random environments.
    auto box = std::make_shared<BoxDomain>(1, 9);
    for (int rep = 0; rep < 25; ++rep) {
        const Environment env = sample(ConductanceLaw::uniform(0.25), box, 100 + rep);
        const double c = effective_conductance(env, {0.7}, 1e-12);
        CHECK(c == doctest::Approx(series_ceff(env, 0.7)).epsilon(1e-10));
    }

    // Raising one conductance never lowers C_eff.
    auto box2 = std::make_shared<BoxDomain>(2, 4);
    const Environment env = sample(ConductanceLaw::uniform(0.5), box2, 3);
    const double base = effective_conductance(env, {1.0, 0.0}, 1e-11);
    for (long e = 0; e < box2->n_edges(); e += 7) {
        const double hi = std::min(env.conductance(e) * 1.3, 2.0);
        CHECK(effective_conductance(env.perturb(e, hi), {1.0, 0.0}, 1e-11) >= base - 1e-9);
    }
}

TEST_CASE("ellipticity sandwich") {
    auto box = std::make_shared<BoxDomain>(2, 5);
    const double lambda = 0.4;
    const Environment unit = sample(ConductanceLaw::constant(1.0), box, 0);
    const double c_unit = effective_conductance(unit, {1.0, 0.5}, 1e-11);
    for (int rep = 0; rep < 5; ++rep) {
        const Environment env = sample(ConductanceLaw::uniform(lambda), box, rep);
        const double c = effective_conductance(env, {1.0, 0.5}, 1e-11);
        CHECK(c >= lambda * c_unit - 1e-9);
        CHECK(c <= c_unit / lambda + 1e-9);
    }
}

TEST_CASE("energy derivative identity") {
    auto box = std::make_shared<BoxDomain>(2, 8);
    const Environment env = sample(ConductanceLaw::uniform(0.5), box, 21);
    const std::vector<double> t{1.0, -0.6};

    // Homogeneous: gradient of t.x across a direction-i edge is t_i.
    const Environment homog = sample(ConductanceLaw::constant(1.0), box, 0);
    CHECK(energy_derivative(homog, t, EdgeKey{{3, 4}, 0}, 1e-12) ==
          doctest::Approx(t[0] * t[0]).epsilon(1e-10));
    CHECK(energy_derivative(homog, t, EdgeKey{{3, 4}, 1}, 1e-12) ==
          doctest::Approx(t[1] * t[1]).epsilon(1e-10));

    // Central finite differences.
    SeedStream rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const long eid = static_cast<long>(rng.next_u64() % box->n_edges());
        const EdgeKey e = box->edge(eid);
        const double a0 = env.conductance(eid);
        const double analytic = energy_derivative(env, t, e, 1e-12);
        const double delta = 1e-4 * a0;
        const double up = effective_conductance(env.perturb(eid, a0 + delta), t, 1e-12);
        const double dn = effective_conductance(env.perturb(eid, a0 - delta), t, 1e-12);
        const double fd = (up - dn) / (2.0 * delta);
        CHECK(std::abs(analytic - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }

    // d=1 closed form: dC/da_k = t^2 (L+1)^2 a_k^{-2} / (sum 1/a)^2.
    auto path = std::make_shared<BoxDomain>(1, 5);
    const Environment p_env = sample(ConductanceLaw::uniform(0.3), path, 2);
    double inv = 0.0;
    for (long e = 0; e < path->n_edges(); ++e) inv += 1.0 / p_env.conductance(e);
    for (long e = 0; e < path->n_edges(); ++e) {
        const double a = p_env.conductance(e);
        const double expect = 36.0 / (a * a * inv * inv);
        CHECK(energy_derivative(p_env, {1.0}, path->edge(e), 1e-12) ==
              doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("gradient norm: counts and interpolation inequality") {
    auto box = std::make_shared<BoxDomain>(2, 4);
    LatticeField constant(box, 1);
    for (long v = 0; v < box->n_vertices(); ++v) constant.at(v) = 1.0;
    CHECK(gradient_norm(constant, 2.0) == 0.0);

    const std::vector<double> t{1.0, -2.0};
    const LatticeField lin = LatticeField::linear(box, t);
    for (double p : {1.0, 2.0, 3.5}) {
        const double expect =
            std::pow(5.0 * 4.0 * (std::pow(std::abs(t[0]), p) + std::pow(std::abs(t[1]), p)) /
                         16.0,
                     1.0 / p);
        CHECK(gradient_norm(lin, p) == doctest::Approx(expect).epsilon(1e-12));
    }

    // || grad f ||_p <= ||_2^alpha ||_p'^beta for p' > p > 2.
    SeedStream rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        LatticeField f(box, 1);
        for (long v = 0; v < box->n_vertices(); ++v) f.at(v) = 2.0 * rng.next_u01() - 1.0;
        const double p = 2.0 + 4.0 * rng.next_u01();
        const double pp = p + 0.5 + 4.0 * rng.next_u01();
        const double alpha = (2.0 / p) * (pp - p) / (pp - 2.0);
        const double beta = (pp / p) * (p - 2.0) / (pp - 2.0);
        const double lhs = gradient_norm(f, p);
        const double rhs =
            std::pow(gradient_norm(f, 2.0), alpha) * std::pow(gradient_norm(f, pp), beta);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("corrector sublinearity trend" * doctest::timeout(300)) {
    // Replica-averaged |chi(x)|^2 / |x|^2 at distance L/2 from the center
    // of the 2L-box, non-increasing over L = 8, 16, 32 within MC error.
    const ConductanceLaw law = ConductanceLaw::uniform(0.75);
    std::vector<double> means, ses;
    for (int L : {8, 16, 32}) {
        auto box = std::make_shared<BoxDomain>(2, 2 * L);
        const Point eval{L + L / 2, L};
        std::vector<double> vals;
        const int reps = 12;
        for (int rep = 0; rep < reps; ++rep) {
            const Environment env = sample(law, box, 7000 + rep);
            const HarmonicCoordinate hc = harmonic_coordinate(env, 1e-9);
            double chi2 = 0.0;
            for (int c = 0; c < 2; ++c) chi2 += hc.corrector.at(eval, c) * hc.corrector.at(eval, c);
            vals.push_back(chi2 / (0.25 * L * L));
        }
        double m = 0.0;
        for (double v : vals) m += v;
        m /= reps;
        double s2 = 0.0;
        for (double v : vals) s2 += (v - m) * (v - m);
        means.push_back(m);
        ses.push_back(std::sqrt(s2 / (reps - 1.0) / reps));
    }
    CHECK(means[1] <= means[0] + 3.0 * std::sqrt(ses[0] * ses[0] + ses[1] * ses[1]));
    CHECK(means[2] <= means[1] + 3.0 * std::sqrt(ses[1] * ses[1] + ses[2] * ses[2]));
}

TEST_CASE("gradient stabilization across growing boxes" * doctest::timeout(300)) {
    // |Lambda_L|^{-1} sum over B(Lambda_L) of |grad Psi_{2L} - grad Psi_{4L}|^2
    // on the common centered sub-box decreases with L.
    const ConductanceLaw law = ConductanceLaw::uniform(0.75);
    const int reps = 4;
    std::vector<double> means;
    for (int L : {8, 16}) {
        auto big = std::make_shared<BoxDomain>(2, 4 * L);
        auto mid = std::make_shared<BoxDomain>(2, 2 * L);
        auto common = std::make_shared<BoxDomain>(2, L);
        double mean = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            const Environment env4 = sample(law, big, 8800 + rep);
            const Environment env2 = env4.shift(Point{L, L}, mid);
            const HarmonicCoordinate psi4 = harmonic_coordinate(env4, 1e-9);
            const HarmonicCoordinate psi2 = harmonic_coordinate(env2, 1e-9);
            double sum = 0.0;
            for (long e = 0; e < common->n_edges(); ++e) {
                const EdgeKey key = common->edge(e);
                const EdgeKey in2 = shift_edge(key, Point{L / 2, L / 2});
                const EdgeKey in4 = shift_edge(key, Point{3 * L / 2, 3 * L / 2});
                Point h2 = in2.x, h4 = in4.x;
                ++h2[key.dir];
                ++h4[key.dir];
                for (int c = 0; c < 2; ++c) {
                    const double g2 = psi2.psi.at(h2, c) - psi2.psi.at(in2.x, c);
                    const double g4 = psi4.psi.at(h4, c) - psi4.psi.at(in4.x, c);
                    sum += (g2 - g4) * (g2 - g4);
                }
            }
            mean += sum / static_cast<double>(common->n_interior());
        }
        means.push_back(mean / reps);
    }
    CHECK(means[1] < means[0]);
}

} // TEST_SUITE
