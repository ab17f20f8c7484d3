#include <doctest.h>

#include <cmath>

#include "ohmstat/meyers.hpp"
#include "ohmstat/rng.hpp"

using namespace ohmstat;

namespace {

double l2_gap(const EdgeField& a, const EdgeField& b) {
    double s = 0.0;
    for (long e = 0; e < a.box().n_edges(); ++e) {
        const double d = a.at(e) - b.at(e);
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

TEST_SUITE("meyers") {

TEST_CASE("K is minus the identity on gradient fields") {
    auto box = std::make_shared<BoxDomain>(2, 8);
    SeedStream rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> h(box->n_interior());
        for (double& v : h) v = 2.0 * rng.next_u01() - 1.0;
        const EdgeField gh = EdgeField::gradient(box, h);
        const EdgeField Kgh = apply_K(box, gh, 1e-12);
        double worst = 0.0;
        for (long e = 0; e < box->n_edges(); ++e)
            worst = std::max(worst, std::abs(Kgh.at(e) + gh.at(e)));
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("K annihilates divergence-free fields and K^2 = -K") {
    auto box = std::make_shared<BoxDomain>(2, 6);
    for (int trial = 0; trial < 5; ++trial) {
        const EdgeField g = EdgeField::random(box, 100 + trial);
        const EdgeField Kg = apply_K(box, g, 1e-12);

        // w = g + Kg is divergence-free by construction.
        EdgeField w(box);
        for (long e = 0; e < box->n_edges(); ++e) w.at(e) = g.at(e) + Kg.at(e);
        const std::vector<double> div = edge_divergence(w);
        double dmax = 0.0;
        for (double v : div) dmax = std::max(dmax, std::abs(v));
        CHECK(dmax <= 1e-8);

        const EdgeField Kw = apply_K(box, w, 1e-12);
        CHECK(lp_norm(Kw, 2.0) <= 1e-8);

        // K^2 = -K on anything.
        const EdgeField KKg = apply_K(box, Kg, 1e-12);
        double worst = 0.0;
        for (long e = 0; e < box->n_edges(); ++e)
            worst = std::max(worst, std::abs(KKg.at(e) + Kg.at(e)));
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("l2 contraction over random fields" * doctest::timeout(300)) {
    for (int L : {4, 8, 16}) {
        auto box = std::make_shared<BoxDomain>(2, L);
        const KOperator K(box);
        for (int trial = 0; trial < 1000 / (L / 4); ++trial) {
            const EdgeField g = EdgeField::random(box, mix(L, trial));
            const EdgeField Kg = K.apply(g, 1e-11);
            CHECK(lp_norm(Kg, 2.0) <= lp_norm(g, 2.0) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("norm estimates: p=2 saturates at one, p=4 stable in L") {
    double prev4 = -1.0;
    for (int L : {4, 8, 16}) {
        auto box = std::make_shared<BoxDomain>(2, L);
        const double est2 = estimate_norm(box, 2.0, 4, 7, 1e-11);
        CHECK(est2 <= 1.0 + 1e-8);
        CHECK(est2 >= 1.0 - 1e-6);  // -1 is an exact eigenvalue on gradients
        (void)prev4;
    }
    std::vector<double> est4;
    for (int L : {8, 16, 32}) {
        auto box = std::make_shared<BoxDomain>(2, L);
        est4.push_back(estimate_norm(box, 4.0, 3, 11, 1e-10));
    }
    for (double v : est4) {
        CHECK(v / est4[0] < 1.2);
        CHECK(est4[0] / v < 1.2);
    }
}

TEST_CASE("gradient start yields the exact p=2 eigenvalue") {
    auto box = std::make_shared<BoxDomain>(2, 6);
    std::vector<double> h(box->n_interior());
    SeedStream rng(9);
    for (double& v : h) v = rng.next_u01();
    const EdgeField gh = EdgeField::gradient(box, h);
    const EdgeField Kgh = apply_K(box, gh, 1e-12);
    CHECK(lp_norm(Kgh, 2.0) / lp_norm(gh, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fixed point: homogeneous medium converges immediately to zero corrector") {
    auto box = std::make_shared<BoxDomain>(2, 6);
    const Environment env = sample(ConductanceLaw::constant(1.0), box, 0);
    const auto reports = meyers_corrector_gradient(env, 2.0, 1e-12);
    for (int m = 0; m < 2; ++m) {
        CHECK(reports[m].sweeps <= 3);
        const EdgeField direct = corrector_gradient_direct(env, m, 1e-12);
        CHECK(lp_norm(direct, 2.0) <= 1e-9);
        CHECK(l2_gap(reports[m].grad_f, direct) <= 1e-8);
    }
}

TEST_CASE("fixed point matches the direct corrector gradient") {
    auto box = std::make_shared<BoxDomain>(2, 8);
    const Environment env = sample(ConductanceLaw::uniform(0.9), box, 21);
    const auto reports = meyers_corrector_gradient(env, 2.0, 1e-11);
    for (int m = 0; m < 2; ++m) {
        const EdgeField direct = corrector_gradient_direct(env, m, 1e-12);
        CHECK(l2_gap(reports[m].grad_f, direct) <= 1e-8);
        CHECK(reports[m].contraction_product < 1.0);

        // Geometric convergence at rate <= product (+ slack).
        const auto& log = reports[m].change_log;
        for (std::size_t s = 1; s + 1 < log.size(); ++s)
            CHECK(log[s + 1] <= (reports[m].contraction_product + 0.05) * log[s] + 1e-13);
    }
}

TEST_CASE("contraction refusal at strong contrast") {
    auto box = std::make_shared<BoxDomain>(2, 4);
    const Environment env = sample(ConductanceLaw::uniform(0.4), box, 1);
    EdgeField g(box);
    for (long e = 0; e < box->n_edges(); ++e)
        if (box->edge(e).dir == 0) g.at(e) = env.conductance(e);
    CHECK_THROWS_AS(meyers_fixed_point(env, g, 2.0, 1e-10), ContractionViolation);
}

TEST_CASE("weak-(1,1) constant stays bounded in L") {
    std::vector<double> c;
    for (int L : {8, 16, 32})
        c.push_back(weak11_constant(std::make_shared<BoxDomain>(2, L), 1e-11));
    double lo = c[0], hi = c[0];
    for (double v : c) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo <= 2.0);
}

} // TEST_SUITE
