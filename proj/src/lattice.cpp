#include "ohmstat/lattice.hpp"

#include <stdexcept>
#include <string>

namespace ohmstat {

bool lex_less(const Point& a, const Point& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

bool edge_less(const EdgeKey& a, const EdgeKey& b) {
    if (a.x != b.x) return lex_less(a.x, b.x);
    return a.dir < b.dir;
}

bool edge_leq(const EdgeKey& a, const EdgeKey& b) { return !edge_less(b, a); }

namespace {

// Advance p through the box [lo,hi]^d in lex order; false when exhausted.
bool advance(Point& p, int lo, int hi) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) {
        if (p[i] < hi) {
            ++p[i];
            for (std::size_t j = i + 1; j < p.size(); ++j) p[j] = lo;
            return true;
        }
    }
    return false;
}

} // namespace

BoxDomain::BoxDomain(int dimension, int side) : d_(dimension), L_(side) {
    if (d_ < 1 || d_ > 8) throw std::invalid_argument("BoxDomain: dimension must be in [1,8]");
    if (L_ < 1) throw std::invalid_argument("BoxDomain: side must be >= 1");

    n_interior_ = 1;
    for (int i = 0; i < d_; ++i) n_interior_ *= L_;

    // Interior vertices in lex order == rank order of the flat index.
    vertices_.reserve(n_interior_);
    {
        Point p(d_, 0);
        do {
            vertices_.push_back(p);
        } while (advance(p, 0, L_ - 1));
    }

    // Boundary: exactly one coordinate at -1 or L, the rest inside.
    {
        Point p(d_, -1);
        do {
            int out = 0;
            for (int i = 0; i < d_; ++i)
                if (p[i] < 0 || p[i] >= L_) ++out;
            if (out == 1) boundary_.push_back(p);
        } while (advance(p, -1, L_));
    }
    for (const Point& p : boundary_) vertices_.push_back(p);

    vertex_ids_.reserve(vertices_.size() * 2);
    for (long id = 0; id < static_cast<long>(vertices_.size()); ++id)
        vertex_ids_.emplace(pack(vertices_[id], 0), id);

    // Edge (x,i) belongs to B(box) iff x_i in [-1,L-1] and x_j in [0,L-1]
    // for j != i; lex sweep over the bounding box emits the sorted order.
    {
        Point p(d_, -1);
        do {
            int out_idx = -1;
            int out = 0;
            for (int i = 0; i < d_; ++i) {
                if (p[i] < 0 || p[i] >= L_) {
                    out_idx = i;
                    ++out;
                }
            }
            if (out > 1) continue;
            for (int i = 0; i < d_; ++i) {
                if (out == 1 && (out_idx != i || p[i] != -1)) continue;
                edges_.push_back(EdgeKey{p, i});
            }
        } while (advance(p, -1, L_ - 1));
    }

    edge_ids_.reserve(edges_.size() * 2);
    endpoints_.reserve(edges_.size());
    for (long id = 0; id < static_cast<long>(edges_.size()); ++id) {
        const EdgeKey& e = edges_[id];
        edge_ids_.emplace(pack(e.x, e.dir + 1), id);
        Point head = e.x;
        ++head[e.dir];
        endpoints_.emplace_back(vertex_id(e.x), vertex_id(head));
    }

    // Interior adjacency table.
    adj_.resize(static_cast<std::size_t>(n_interior_) * 2 * d_);
    for (long v = 0; v < n_interior_; ++v) {
        const Point& p = vertices_[v];
        for (int i = 0; i < d_; ++i) {
            Point q = p;
            ++q[i];
            adj_[static_cast<std::size_t>(v) * 2 * d_ + i] =
                Adjacency{vertex_id(q), edge_id(EdgeKey{p, i})};
            q[i] -= 2;
            adj_[static_cast<std::size_t>(v) * 2 * d_ + d_ + i] =
                Adjacency{vertex_id(q), edge_id(EdgeKey{q, i})};
        }
    }
}

std::uint64_t BoxDomain::pack(const Point& p, int dir) const {
    // Coordinates live in [-1, L]; offset to non-negative and pack in
    // 14-bit lanes, direction tag in the low bits.
    std::uint64_t key = static_cast<std::uint64_t>(dir);
    for (int i = 0; i < d_; ++i)
        key = (key << 14) | static_cast<std::uint64_t>(p[i] + 1);
    return key;
}

bool BoxDomain::contains(const Point& p) const {
    for (int i = 0; i < d_; ++i)
        if (p[i] < 0 || p[i] >= L_) return false;
    return true;
}

bool BoxDomain::is_boundary(const Point& p) const {
    int out = 0;
    for (int i = 0; i < d_; ++i) {
        if (p[i] < -1 || p[i] > L_) return false;
        if (p[i] == -1 || p[i] == L_) ++out;
    }
    return out == 1;
}

long BoxDomain::vertex_id(const Point& p) const {
    const auto it = vertex_ids_.find(pack(p, 0));
    if (it == vertex_ids_.end())
        throw std::domain_error("BoxDomain::vertex_id: point outside the box and its boundary");
    return it->second;
}

long BoxDomain::edge_id(const EdgeKey& e) const {
    for (int i = 0; i < d_; ++i)
        if (e.x[i] < -1 || e.x[i] > L_) return -1;
    const auto it = edge_ids_.find(pack(e.x, e.dir + 1));
    return it == edge_ids_.end() ? -1 : it->second;
}

} // namespace ohmstat
