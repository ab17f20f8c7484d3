#include "ohmstat/martingale.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ohmstat/quadrature.hpp"
#include "ohmstat/rng.hpp"

namespace ohmstat {

RankOneReport rank_one_check(const Environment& env, const EdgeKey& e, double new_value,
                             double tol) {
    const BoxDomain& box = env.box();
    const long eid = box.edge_id(e);
    if (eid < 0) throw std::domain_error("rank_one_check: edge not in B(box)");
    Point head = e.x;
    ++head[e.dir];
    if (!box.contains(e.x) || !box.contains(head))
        throw std::domain_error("rank_one_check: edge endpoints must be interior");

    const double old_value = env.conductance(eid);
    const double delta = new_value - old_value;
    const Environment env2 = env.perturb(eid, new_value);

    const HarmonicCoordinate psi = harmonic_coordinate(env, tol);
    const HarmonicCoordinate psi2 = harmonic_coordinate(env2, tol);

    const InteriorSystem system2(env2);
    const GreenColumn col_base = green_column(system2, e.x, tol);
    const GreenColumn col_head = green_column(system2, head, tol);

    const int d = box.dimension();
    const long vb = box.vertex_id(e.x), vh = box.vertex_id(head);

    RankOneReport report;

    // Full-field identity at every vertex and component.
    double max_lhs = 0.0, max_gap = 0.0;
    for (long v = 0; v < box.n_vertices(); ++v) {
        const double gdiff = col_head.values.at(v) - col_base.values.at(v);
        for (int c = 0; c < d; ++c) {
            const double lhs = psi2.psi.at(v, c) - psi.psi.at(v, c);
            const double rhs = -delta * gdiff * (psi.psi.at(vh, c) - psi.psi.at(vb, c));
            max_lhs = std::max(max_lhs, std::abs(lhs));
            max_gap = std::max(max_gap, std::abs(lhs - rhs));
        }
    }
    report.field_residual = max_gap / std::max(max_lhs, 1e-12);
    if (max_lhs == 0.0 && max_gap == 0.0) report.field_residual = 0.0;

    // Multiplicative gradient form with g of the perturbed environment.
    const double g2 = g_edge(env2, e, tol).g;
    report.factor = 1.0 - delta * g2;
    double grad_res = 0.0;
    for (int c = 0; c < d; ++c) {
        const double grad = psi.psi.at(vh, c) - psi.psi.at(vb, c);
        const double grad2 = psi2.psi.at(vh, c) - psi2.psi.at(vb, c);
        grad_res = std::max(grad_res,
                            std::abs(grad2 - report.factor * grad) / std::max(std::abs(grad), 1e-12));
    }
    report.gradient_residual = grad_res;

    // Equivalent prefactor expressions.
    const double g1 = g_edge(env, e, tol).g;
    const double a = report.factor;
    const double b = 1.0 / (1.0 + delta * g1);
    const double c = g2 / g1;
    report.prefactor_residual = std::max(std::abs(a - b), std::abs(a - c)) / std::abs(a);
    return report;
}

namespace {

// One-edge perturbation of g without re-solving: g(s) = g / (1 + (s-w0) g).
inline double g_rational(double g0, double w0, double s) { return g0 / (1.0 + (s - w0) * g0); }

} // namespace

double h_closed(const InteriorSystem& system, const Environment& env, const EdgeKey& e,
                const ConductanceLaw& law, double tol) {
    const double w0 = env.conductance(env.box().edge_id(e));
    const double g0 = g_edge_extended(system, env, e, tol).g;
    double h = 0.0;
    for (const auto& node : law.quadrature())
        h += node.w * (w0 - node.x) * (g_rational(g0, w0, node.x) / g0);
    return h;
}

HValue h_edge(const Environment& env, const EdgeKey& e, const ConductanceLaw& law, double tol) {
    const long eid = env.box().edge_id(e);
    if (eid < 0) throw std::domain_error("h_edge: edge not in B(box)");
    const InteriorSystem system(env);
    const double w0 = env.conductance(eid);
    const double g0 = g_edge_extended(system, env, e, tol).g;

    HValue out;
    out.e = e;
    for (const auto& node : law.quadrature())
        out.h += node.w * (w0 - node.x) * (g_rational(g0, w0, node.x) / g0);

    auto quad_route = [&](double rel) {
        double total = 0.0;
        for (const auto& node : law.quadrature()) {
            const double inner = integrate_adaptive(
                [&](double s) {
                    const double factor = 1.0 - (s - w0) * g_rational(g0, w0, s);
                    return factor * factor;
                },
                node.x, w0, rel);
            total += node.w * inner;
        }
        return total;
    };
    out.h_quadrature = quad_route(1e-10);
    out.disagreement = std::abs(out.h - out.h_quadrature) / std::max(1.0, std::abs(out.h));
    if (out.disagreement > tol) {
        out.h_quadrature = quad_route(1e-12);
        out.disagreement = std::abs(out.h - out.h_quadrature) / std::max(1.0, std::abs(out.h));
        if (out.disagreement > tol)
            throw std::runtime_error("h_edge: quadrature and closed form disagree");
    }
    return out;
}

ExhaustiveMartingale::ExhaustiveMartingale(std::shared_ptr<const BoxDomain> box,
                                           const ConductanceLaw& law,
                                           const std::vector<double>& t, double tol)
    : box_(std::move(box)), law_(law), t_(t), tol_(tol) {
    if (law.kind != LawKind::TwoPoint)
        throw std::invalid_argument("ExhaustiveMartingale: needs a two-point law");
    n_ = static_cast<int>(box_->n_edges());
    if (n_ > 14)
        throw std::invalid_argument("ExhaustiveMartingale: more than 14 edges, enumeration refused");

    const std::uint32_t n_configs = 1u << n_;
    cond_.resize(n_ + 1);
    cond_[n_].resize(n_configs);
    for (std::uint32_t cfg = 0; cfg < n_configs; ++cfg) cond_[n_][cfg] = ceff_of_bits(cfg);

    const double p_hi = law_.p;
    for (int k = n_ - 1; k >= 0; --k) {
        cond_[k].resize(1u << k);
        for (std::uint32_t pre = 0; pre < (1u << k); ++pre)
            cond_[k][pre] = (1.0 - p_hi) * cond_[k + 1][pre] +
                            p_hi * cond_[k + 1][pre | (1u << k)];
    }
}

double ExhaustiveMartingale::edge_value(bool hi) const {
    return hi ? law_.support_hi() : law_.support_lo();
}

double ExhaustiveMartingale::ceff_of_bits(std::uint32_t config) const {
    std::vector<double> values(n_);
    for (int e = 0; e < n_; ++e) values[e] = edge_value(config & (1u << e));
    const Environment env(box_, std::move(values), law_.lambda);
    return effective_conductance(env, t_, tol_);
}

double ExhaustiveMartingale::conditional(int k, std::uint32_t config) const {
    return cond_[k][config & ((1u << k) - 1u)];
}

IncrementTable ExhaustiveMartingale::table_for(std::uint32_t config) const {
    IncrementTable table;
    config &= (1u << n_) - 1u;
    table.edges = box_->edges();
    table.mean_ceff = mean_ceff();
    table.ceff = cond_[n_][config];
    double sum = 0.0;
    for (int k = 1; k <= n_; ++k) {
        const double zk = conditional(k, config) - conditional(k - 1, config);
        table.increments.push_back(zk);
        sum += zk;
    }
    table.telescoping_residual = std::abs(sum - (table.ceff - table.mean_ceff));
    return table;
}

double ExhaustiveMartingale::max_martingale_residual() const {
    const double p_hi = law_.p;
    double worst = 0.0;
    for (int k = 1; k <= n_; ++k) {
        for (std::uint32_t pre = 0; pre < (1u << (k - 1)); ++pre) {
            const double base = cond_[k - 1][pre];
            const double z_lo = cond_[k][pre] - base;
            const double z_hi = cond_[k][pre | (1u << (k - 1))] - base;
            worst = std::max(worst, std::abs((1.0 - p_hi) * z_lo + p_hi * z_hi));
        }
    }
    return worst;
}

double ExhaustiveMartingale::increment_via_integral(std::uint32_t config, int k,
                                                    double tol) const {
    const int kk = k - 1;  // edge index of the k-th revealed edge
    const double w_k = edge_value(config & (1u << kk));
    const double p_hi = law_.p;
    const std::uint32_t prefix = config & ((1u << kk) - 1u);
    const int n_tail = n_ - k;

    double total = 0.0;
    for (std::uint32_t tail = 0; tail < (1u << n_tail); ++tail) {
        const std::uint32_t future = prefix | (tail << k);
        double p_future = 1.0;
        for (int j = 0; j < n_tail; ++j)
            p_future *= (tail & (1u << j)) ? p_hi : (1.0 - p_hi);
        for (const bool hi : {false, true}) {
            const double w_start = edge_value(hi);
            const double p_start = hi ? p_hi : 1.0 - p_hi;
            if (w_start == w_k) continue;
            const double inner = integrate_adaptive(
                [&](double s) {
                    // d/ds of the minimal energy = squared gradient of
                    // t.Psi across the k-th edge, at edge value s.
                    std::vector<double> values(n_);
                    for (int e = 0; e < n_; ++e) values[e] = edge_value(future & (1u << e));
                    values[kk] = s;
                    const Environment env(box_, std::move(values), law_.lambda);
                    return energy_derivative(env, t_, box_->edge(kk), tol_);
                },
                w_start, w_k, tol);
            total += p_future * p_start * inner;
        }
    }
    return total;
}

double ExhaustiveMartingale::increment_via_h(std::uint32_t config, int k, double tol) const {
    const int kk = k - 1;
    const std::uint32_t known = config & ((1u << k) - 1u);
    const int n_tail = n_ - k;
    const double p_hi = law_.p;
    const EdgeKey& e = box_->edge(kk);

    double total = 0.0;
    for (std::uint32_t tail = 0; tail < (1u << n_tail); ++tail) {
        const std::uint32_t cfg = known | (tail << k);
        double p_future = 1.0;
        for (int j = 0; j < n_tail; ++j)
            p_future *= (tail & (1u << j)) ? p_hi : (1.0 - p_hi);

        std::vector<double> values(n_);
        for (int eidx = 0; eidx < n_; ++eidx) values[eidx] = edge_value(cfg & (1u << eidx));
        const Environment env(box_, std::move(values), law_.lambda);
        const InteriorSystem system(env);
        const double h = h_closed(system, env, e, law_, tol);
        const double grad_sq = energy_derivative(env, t_, e, tol_);
        total += p_future * h * grad_sq;
    }
    return total;
}

SigmaEstimate estimate_sigma_sq(const ConductanceLaw& law, int d, const std::vector<double>& t,
                                int proxy_side, long m_outer, long m_inner, std::uint64_t seed,
                                double tol, int threads) {
    if (proxy_side < 4 || proxy_side % 2 != 0)
        throw std::invalid_argument("estimate_sigma_sq: proxy side must be even and >= 4");
    if (m_outer < 100 || m_inner < 100)
        throw std::invalid_argument("estimate_sigma_sq: replica counts must be >= 100");

    auto box = std::make_shared<BoxDomain>(d, proxy_side);
    const Point center(static_cast<std::size_t>(d), proxy_side / 2);
    const LatticeField linear_bc = LatticeField::linear(box, t);
    const auto quad = law.quadrature();

    SigmaEstimate est;
    est.t = t;
    est.proxy_side = proxy_side;
    est.m_outer = m_outer;
    est.m_inner = m_inner;
    est.per_direction.resize(d);
    est.per_direction_se.resize(d);

    const long n_edges = box->n_edges();
    const long ni = box->n_interior();

    for (int i = 0; i < d; ++i) {
        const EdgeKey ei{center, i};
        const long ei_id = box->edge_id(ei);
        Point head = center;
        ++head[i];
        const long vb = box->vertex_id(center), vh = box->vertex_id(head);

        std::vector<double> products(m_outer, 0.0);
        std::atomic<long> next{0};

        auto worker = [&]() {
            // Per-thread scratch, reused across replicas.
            std::vector<double> values(n_edges);
            std::vector<double> u, col_b, col_h;
            std::vector<double> rhs_b(ni, 0.0), rhs_h(ni, 0.0);
            rhs_b[vb] = 1.0;
            rhs_h[vh] = 1.0;
            for (;;) {
                const long m = next.fetch_add(1);
                if (m >= m_outer) break;
                const std::uint64_t outer_seed = mix(seed, 0xA110C8ull + i, m);
                // Past edges (id <= ei_id) fixed by the outer draw; the
                // tail is resampled with seeds shared across replicas.
                for (long e = 0; e <= ei_id; ++e)
                    values[e] = law.sample_value(u01(mix(outer_seed, e)));

                double half1 = 0.0, half2 = 0.0;
                u.assign(ni, 0.0);
                col_b.assign(ni, 0.0);
                col_h.assign(ni, 0.0);
                for (long j = 0; j < m_inner; ++j) {
                    const std::uint64_t inner_seed = mix(seed, 0xF07B1Eull + i, j);
                    for (long e = ei_id + 1; e < n_edges; ++e)
                        values[e] = law.sample_value(u01(mix(inner_seed, e)));
                    const Environment env(box, values, law.lambda);
                    const InteriorSystem system(env);

                    const std::vector<double> b = system.dirichlet_rhs(linear_bc, 0);
                    system.solve(b, u, tol);
                    const double grad = u[vh] - u[vb];

                    system.solve(rhs_b, col_b, tol);
                    system.solve(rhs_h, col_h, tol);
                    const double g0 = col_h[vh] - 2.0 * col_b[vh] + col_b[vb];
                    const double w0 = values[ei_id];
                    double h = 0.0;
                    for (const auto& node : quad)
                        h += node.w * (w0 - node.x) * (g_rational(g0, w0, node.x) / g0);

                    const double y = h * grad * grad;
                    if (j < m_inner / 2)
                        half1 += y;
                    else
                        half2 += y;
                }
                half1 /= static_cast<double>(m_inner / 2);
                half2 /= static_cast<double>(m_inner - m_inner / 2);
                // Product of independent half-means: unbiased for the
                // squared conditional expectation.
                products[m] = half1 * half2;
            }
        };

        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }

        double mean = 0.0;
        for (double v : products) mean += v;
        mean /= static_cast<double>(m_outer);
        double var = 0.0;
        for (double v : products) var += (v - mean) * (v - mean);
        var /= static_cast<double>(m_outer - 1);
        est.per_direction[i] = mean;
        est.per_direction_se[i] = std::sqrt(var / static_cast<double>(m_outer));
    }

    for (int i = 0; i < d; ++i) {
        est.sigma_sq += est.per_direction[i];
        est.standard_error += est.per_direction_se[i] * est.per_direction_se[i];
    }
    est.standard_error = std::sqrt(est.standard_error);
    return est;
}

} // namespace ohmstat
