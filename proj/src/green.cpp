#include "ohmstat/green.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ohmstat/quadrature.hpp"

namespace ohmstat {

GreenColumn green_column(const InteriorSystem& system, const Point& y, double tol) {
    const BoxDomain& box = system.box();
    const long yid = box.vertex_id(y);
    if (yid >= box.n_interior()) throw std::domain_error("green_column: source not in the box");
    std::vector<double> b(box.n_interior(), 0.0);
    b[yid] = 1.0;
    std::vector<double> u;
    const SolveReport rep = system.solve(b, u, tol);
    LatticeField g(system.box_ptr(), 1);
    for (long v = 0; v < box.n_interior(); ++v) g.at(v) = u[v];
    return GreenColumn{y, std::move(g), rep};
}

GreenColumn green_column(const Environment& env, const Point& y, double tol) {
    return green_column(InteriorSystem(env), y, tol);
}

namespace {

// G(x1,x2) entries needed by the stencil, from a prebuilt system; boundary
// vertices contribute zero.
double column_value(const InteriorSystem& system, const std::vector<double>& col, long vid) {
    return vid < system.box().n_interior() ? col[vid] : 0.0;
}

double stencil_g(const InteriorSystem& system, const EdgeKey& e, double tol) {
    const BoxDomain& box = system.box();
    Point head = e.x;
    ++head[e.dir];
    const bool base_in = box.contains(e.x);
    const bool head_in = box.contains(head);
    if (!base_in && !head_in) throw std::domain_error("g stencil: edge has no interior endpoint");

    std::vector<double> b(box.n_interior(), 0.0), col_base, col_head;
    double G_bb = 0.0, G_bh = 0.0, G_hh = 0.0;
    if (base_in) {
        const long vb = box.vertex_id(e.x);
        b[vb] = 1.0;
        system.solve(b, col_base, tol);
        b[vb] = 0.0;
        G_bb = col_base[vb];
    }
    if (head_in) {
        const long vh = box.vertex_id(head);
        b[vh] = 1.0;
        system.solve(b, col_head, tol);
        G_hh = col_head[vh];
        if (base_in) G_bh = column_value(system, col_head, box.vertex_id(e.x));
    }
    return G_hh - 2.0 * G_bh + G_bb;
}

} // namespace

GreenEdgeCoefficient g_edge(const Environment& env, const EdgeKey& e, double tol) {
    const BoxDomain& box = env.box();
    Point head = e.x;
    ++head[e.dir];
    if (!box.contains(e.x) || !box.contains(head))
        throw std::domain_error("g_edge: both endpoints must be inside the box");
    const InteriorSystem system(env);
    return GreenEdgeCoefficient{e, stencil_g(system, e, tol)};
}

GreenEdgeCoefficient g_edge_extended(const InteriorSystem& system, const Environment& env,
                                     const EdgeKey& e, double tol) {
    if (env.box().edge_id(e) < 0) throw std::domain_error("g_edge_extended: edge not in B(box)");
    return GreenEdgeCoefficient{e, stencil_g(system, e, tol)};
}

GreenEdgeCoefficient g_edge_extended(const Environment& env, const EdgeKey& e, double tol) {
    const InteriorSystem system(env);
    return g_edge_extended(system, env, e, tol);
}

double g_dual_inf_energy(const Environment& env, const EdgeKey& e, double tol) {
    const BoxDomain& box = env.box();
    Point head = e.x;
    ++head[e.dir];
    if (!box.contains(e.x) || !box.contains(head))
        throw std::domain_error("g_dual_inf_energy: both endpoints must be inside the box");
    // Lagrange stationarity: -L f = delta_head - delta_base, then rescale
    // to unit drop across the edge and evaluate the energy directly.
    const InteriorSystem system(env);
    std::vector<double> b(box.n_interior(), 0.0);
    b[box.vertex_id(head)] = 1.0;
    b[box.vertex_id(e.x)] = -1.0;
    std::vector<double> u;
    system.solve(b, u, tol);
    const double drop = u[box.vertex_id(head)] - u[box.vertex_id(e.x)];
    LatticeField f(env.box_ptr(), 1);
    for (long v = 0; v < box.n_interior(); ++v) f.at(v) = u[v] / drop;
    return dirichlet_energy(env, f);
}

GLimitResult g_limit_estimate(const Environment& big_env, int direction,
                              const std::vector<int>& sides, double tol) {
    const BoxDomain& big = big_env.box();
    const int d = big.dimension();
    GLimitResult result;
    result.sides = sides;
    const int Lbig = big.side();
    for (const int l : sides) {
        if (l > Lbig || l < 4 || (Lbig - l) % 2 != 0)
            throw std::invalid_argument(
                "g_limit_estimate: sides must be <= the sampled box, >= 4, same parity");
        auto sub = std::make_shared<BoxDomain>(d, l);
        Point offset(d, (Lbig - l) / 2);
        const Environment env_l = big_env.shift(offset, sub);
        Point x_local(d, l / 2);
        result.values.push_back(g_edge(env_l, EdgeKey{x_local, direction}, tol).g);
    }
    result.estimate = result.values.back();
    if (result.values.size() >= 2)
        result.last_gap = result.values.back() - result.values[result.values.size() - 2];
    return result;
}

namespace {

const GaussLegendre& panel_rule(int n) {
    static std::map<int, GaussLegendre> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
}

// Tensor quadrature of the Fourier integral over [0,pi]^d with n nodes
// per dimension.
double srw_green_tensor(double eps, const Point& x, int d, int n) {
    const GaussLegendre& rule = panel_rule(n);
    std::vector<double> k(n), w(n), denom1(n);
    for (int i = 0; i < n; ++i) {
        k[i] = 0.5 * M_PI * (rule.nodes[i] + 1.0);
        w[i] = 0.5 * M_PI * rule.weights[i];
        denom1[i] = 2.0 * (1.0 - std::cos(k[i]));
    }
    // cos(k * x_j) per dimension.
    std::vector<std::vector<double>> cosx(d, std::vector<double>(n));
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < n; ++i) cosx[j][i] = std::cos(k[i] * x[j]);

    double total = 0.0;
    std::vector<int> idx(d, 0);
    for (;;) {
        double num = 1.0, den = eps;
        for (int j = 0; j < d; ++j) {
            num *= w[idx[j]] * cosx[j][idx[j]];
            den += denom1[idx[j]];
        }
        total += num / den;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
        if (j < 0) break;
    }
    return total / std::pow(M_PI, d);
}

int srw_node_cap(int d) {
    if (d == 1) return 2048;
    if (d == 2) return 1024;
    return 256;
}

std::uint64_t canonical_key(const Point& x) {
    std::array<std::uint64_t, 8> mag{};
    for (std::size_t i = 0; i < x.size(); ++i) mag[i] = static_cast<std::uint64_t>(std::abs(x[i]));
    std::sort(mag.begin(), mag.begin() + x.size(), std::greater<>());
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < x.size(); ++i) key = (key << 16) | mag[i];
    return key;
}

} // namespace

double srw_green(double eps, const Point& x, int d) {
    if (eps <= 0.0) throw std::domain_error("srw_green: eps must be positive");
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("srw_green: bad point size");
    const int cap = srw_node_cap(d);
    double prev = srw_green_tensor(eps, x, d, 64);
    for (int n = 128; n <= cap; n *= 2) {
        const double cur = srw_green_tensor(eps, x, d, n);
        if (std::abs(cur - prev) < 1e-10 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

SrwGreenTable::SrwGreenTable(double eps, int d) : eps_(eps), d_(d) {
    if (eps <= 0.0) throw std::domain_error("SrwGreenTable: eps must be positive");
}

double SrwGreenTable::value(const Point& x) {
    const std::uint64_t key = canonical_key(x);
    const auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const double v = srw_green(eps_, x, d_);
    memo_.emplace(key, v);
    return v;
}

double reflected_green(double eps, const BoxDomain& box, const Point& x, const Point& y, int R,
                       SrwGreenTable& table) {
    if (eps <= 0.0) throw std::domain_error("reflected_green: eps must be positive");
    if (!box.contains(x) || !box.contains(y))
        throw std::domain_error("reflected_green: points must lie inside the box");
    if (R < 1) throw std::invalid_argument("reflected_green: R must be >= 1");
    const int d = box.dimension();
    const int period = box.side() + 1;  // killing planes at -1 and side

    double sum = 0.0;
    std::vector<int> z(d, -R);
    Point arg(d), ry(d);
    for (;;) {
        int parity = 0;
        for (int j = 0; j < d; ++j) {
            const int zj = z[j];
            parity += zj;
            if ((zj % 2) == 0) {
                ry[j] = y[j] + zj * period;
            } else {
                // odd index 2n+1 reflects about the upper killing plane of
                // the n-th period: y -> (z+1) P - y - 2
                ry[j] = (zj + 1) * period - y[j] - 2;
            }
            arg[j] = x[j] - ry[j];
        }
        const double g = table.value(arg);
        sum += (parity % 2 == 0) ? g : -g;

        int j = d - 1;
        while (j >= 0 && ++z[j] > R) z[j--] = -R;
        if (j < 0) break;
    }
    return sum;
}

double reflected_green(double eps, const BoxDomain& box, const Point& x, const Point& y, int R) {
    SrwGreenTable table(eps, box.dimension());
    return reflected_green(eps, box, x, y, R, table);
}

double reflected_green_adaptive(double eps, const BoxDomain& box, const Point& x, const Point& y) {
    SrwGreenTable table(eps, box.dimension());
    double prev = reflected_green(eps, box, x, y, 1, table);
    for (int R = 2; R <= 64; R *= 2) {
        const double cur = reflected_green(eps, box, x, y, R, table);
        if (std::abs(cur - prev) < 1e-10 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

TripleGradientReport triple_gradient_decay(const BoxDomain& box, double eps,
                                           const std::array<int, 3>& directions, double tol) {
    if (eps < 0.0) throw std::domain_error("triple_gradient_decay: eps must be >= 0");
    const int d = box.dimension();
    const int L = box.side();
    const int i = directions[0], j = directions[1], k = directions[2];
    if (i < 0 || i >= d || j < 0 || j >= d || k < 0 || k >= d)
        throw std::invalid_argument("triple_gradient_decay: direction out of range");

    auto box_ptr = std::make_shared<BoxDomain>(d, L);
    const Environment unit = sample(ConductanceLaw::constant(1.0), box_ptr, 0);
    const InteriorSystem system(unit, eps);

    const Point center(static_cast<std::size_t>(d), L / 2);
    auto source = [&](int di, int dk) {
        Point y = center;
        if (di) ++y[i];
        if (dk) ++y[k];
        return y;
    };
    // nabla_i^(2) nabla_k^(2) G(., center) from four columns.
    std::vector<std::vector<double>> cols(4);
    {
        std::vector<double> b(box_ptr->n_interior(), 0.0);
        const Point sources[4] = {source(0, 0), source(1, 0), source(0, 1), source(1, 1)};
        for (int c = 0; c < 4; ++c) {
            const long vid = box_ptr->vertex_id(sources[c]);
            b[vid] = 1.0;
            system.solve(b, cols[c], tol);
            b[vid] = 0.0;
        }
    }
    auto D = [&](const Point& x) {
        const long vid = box_ptr->contains(x) ? box_ptr->vertex_id(x) : -1;
        if (vid < 0 || vid >= box_ptr->n_interior()) return 0.0;
        return (cols[3][vid] - cols[2][vid]) - (cols[1][vid] - cols[0][vid]);
    };
    auto T = [&](const Point& x) {
        Point xj = x;
        ++xj[j];
        return D(xj) - D(x);
    };

    // Ray along the direction of odd multiplicity in (i,j,k); diagonal
    // over all odd directions when there is more than one. The ray base
    // absorbs the source-stencil offset so the displacement from the
    // effective stencil center stays on-axis (a transverse offset puts a
    // near-field zero crossing into the fit window).
    std::vector<int> count(d, 0);
    ++count[i];
    ++count[j];
    ++count[k];
    Point ray(static_cast<std::size_t>(d), 0);
    int n_odd = 0;
    for (int m = 0; m < d; ++m) {
        if (count[m] % 2 == 1) {
            ray[m] = 1;
            ++n_odd;
        }
    }
    if (n_odd == 0) ray[j] = 1;
    Point base = center;
    if (i == k) ++base[i];

    TripleGradientReport report;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int sign : {+1, -1}) {
        for (int step = 1; step <= L / 2 - 2; ++step) {
            Point x = base;
            for (int m = 0; m < d; ++m) x[m] += sign * step * ray[m];
            if (!box_ptr->contains(x)) break;
            // Displacement of the evaluation stencil x + e_j/2 from the
            // source stencil center y + (e_i + e_k)/2.
            double r2 = 0.0;
            for (int m = 0; m < d; ++m) {
                double dx = static_cast<double>(x[m] - center[m]);
                if (m == j) dx += 0.5;
                if (m == i) dx -= 0.5;
                if (m == k) dx -= 0.5;
                r2 += dx * dx;
            }
            const double r = std::sqrt(r2);
            const double value = T(x);
            report.samples.emplace_back(r, value);
            if (r < 2.0 || r > L / 4.0 || std::abs(value) < 1e-14) continue;
            const double lx = std::log(r), ly = std::log(std::abs(value));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++report.n_fit;
        }
    }
    if (report.n_fit >= 2) {
        const double n = static_cast<double>(report.n_fit);
        report.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        report.prefactor = std::exp((sy - report.exponent * sx) / n);
    }
    return report;
}

PoissonKernelReport poisson_kernel_energy_check(const Environment& env, const LatticeField& h,
                                                double tol) {
    const BoxDomain& box = env.box();
    const int d = box.dimension();
    const long nb = box.n_boundary();
    const long ni = box.n_interior();

    // Precondition: h is L_omega-harmonic in the box.
    double hmax = 0.0;
    for (double v : h.raw()) hmax = std::max(hmax, std::abs(v));
    for (long v = 0; v < ni; ++v) {
        const std::vector<double> lv = apply_operator(env, h, box.vertex(v));
        for (double c : lv) {
            if (std::abs(c) > 100.0 * tol * std::max(1.0, hmax))
                throw std::invalid_argument("poisson_kernel_energy_check: field is not harmonic");
        }
    }

    // Harmonic-measure columns: one Dirichlet solve per boundary vertex.
    const InteriorSystem system(env);
    std::vector<std::vector<double>> pcol(nb);
    {
        LatticeField indicator(env.box_ptr(), 1);
        for (long zb = 0; zb < nb; ++zb) {
            indicator.at(ni + zb) = 1.0;
            const std::vector<double> b = system.dirichlet_rhs(indicator, 0);
            system.solve(b, pcol[zb], tol);
            indicator.at(ni + zb) = 0.0;
        }
    }

    // Interior neighbors of each boundary vertex with the edge conductance.
    std::vector<std::vector<std::pair<long, double>>> bnbrs(nb);
    for (long zb = 0; zb < nb; ++zb) {
        const Point y = box.vertex(ni + zb);
        for (int dir = 0; dir < d; ++dir) {
            for (int sgn : {+1, -1}) {
                Point q = y;
                q[dir] += sgn;
                if (!box.contains(q)) continue;
                const EdgeKey e = sgn > 0 ? EdgeKey{y, dir} : EdgeKey{q, dir};
                bnbrs[zb].emplace_back(box.vertex_id(q), env.conductance(e));
            }
        }
    }

    // K(y,z) = sum over interior neighbors x of y of a_xy p(x,z).
    std::vector<double> K(static_cast<std::size_t>(nb) * nb, 0.0);
    for (long yb = 0; yb < nb; ++yb) {
        for (long zb = 0; zb < nb; ++zb) {
            double s = 0.0;
            for (const auto& [x, a] : bnbrs[yb]) s += a * pcol[zb][x];
            K[static_cast<std::size_t>(yb) * nb + zb] = s;
        }
    }

    PoissonKernelReport report;
    for (long yb = 0; yb < nb; ++yb) {
        double row = 0.0;
        for (long zb = 0; zb < nb; ++zb) {
            row += K[static_cast<std::size_t>(yb) * nb + zb];
            report.max_asymmetry =
                std::max(report.max_asymmetry,
                         std::abs(K[static_cast<std::size_t>(yb) * nb + zb] -
                                  K[static_cast<std::size_t>(zb) * nb + yb]));
        }
        double expected = 0.0;
        for (const auto& [x, a] : bnbrs[yb]) {
            (void)x;
            expected += a;
        }
        report.max_row_sum_residual =
            std::max(report.max_row_sum_residual, std::abs(row - expected));
    }

    report.energy_direct = dirichlet_energy(env, h);
    double qk = 0.0;
    for (long yb = 0; yb < nb; ++yb) {
        for (long zb = 0; zb < nb; ++zb) {
            double d2 = 0.0;
            for (int c = 0; c < h.arity(); ++c) {
                const double diff = h.at(ni + zb, c) - h.at(ni + yb, c);
                d2 += diff * diff;
            }
            qk += K[static_cast<std::size_t>(yb) * nb + zb] * d2;
        }
    }
    report.energy_kernel = 0.5 * qk;
    report.identity_residual = std::abs(report.energy_kernel - report.energy_direct) /
                               std::max(1.0, std::abs(report.energy_direct));
    return report;
}

} // namespace ohmstat
