#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace ohmstat {

// Lattice point in Z^d. Dimension is runtime; geometry setup only, hot
// loops work with flat indices.
using Point = std::vector<int>;

// Strict lexicographic order on points (first coordinate most significant).
bool lex_less(const Point& a, const Point& b);

// Canonical key of the unordered nearest-neighbor edge <x, x+e_dir>.
// dir is the 0-based coordinate direction.
struct EdgeKey {
    Point x;
    int dir = 0;

    bool operator==(const EdgeKey& o) const { return dir == o.dir && x == o.x; }
};

// Total order on edges: (x,i) before (y,j) iff x lex-before y, or x == y
// and i < j. Shift-stationary: comparing (x+z,i) with (y+z,j) gives the
// same result for every z.
bool edge_less(const EdgeKey& a, const EdgeKey& b);
bool edge_leq(const EdgeKey& a, const EdgeKey& b);

inline EdgeKey shift_edge(const EdgeKey& e, const Point& z) {
    EdgeKey out = e;
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += z[i];
    return out;
}

// The box [0,L)^d with its outer vertex boundary and the edge set B(box):
// all edges with at least one endpoint inside. Vertex ids put the L^d
// interior vertices first (lexicographic rank) so interior linear systems
// address a contiguous prefix; boundary vertices follow in lex order.
// Edge ids enumerate B(box) in the stationary lexicographic edge order.
class BoxDomain {
  public:
    BoxDomain(int dimension, int side);

    int dimension() const { return d_; }
    int side() const { return L_; }

    long n_interior() const { return n_interior_; }
    long n_boundary() const { return static_cast<long>(boundary_.size()); }
    long n_vertices() const { return n_interior_ + n_boundary(); }
    long n_edges() const { return static_cast<long>(edges_.size()); }

    bool contains(const Point& p) const;                // p in [0,L)^d
    bool is_boundary(const Point& p) const;             // p in the outer boundary

    // Flat id of an interior or boundary vertex; throws for anything else.
    long vertex_id(const Point& p) const;
    const Point& vertex(long id) const { return vertices_[id]; }

    // Edges sorted strictly increasing in the stationary order.
    const std::vector<EdgeKey>& edges() const { return edges_; }
    long edge_id(const EdgeKey& e) const;                // -1 if not in B(box)
    const EdgeKey& edge(long id) const { return edges_[id]; }

    // Endpoint vertex ids of an edge: (base x, head x+e_dir).
    std::pair<long, long> edge_endpoints(long edge_id) const { return endpoints_[edge_id]; }

    // Boundary vertices in lex order.
    std::vector<Point> boundary_vertices() const { return boundary_; }

    // Adjacency of an interior vertex: neighbor vertex id and edge id in
    // direction +e_i (slot i) and -e_i (slot d+i).
    struct Adjacency {
        long neighbor;
        long edge;
    };
    const Adjacency& adjacent(long interior_id, int slot) const {
        return adj_[static_cast<std::size_t>(interior_id) * 2 * d_ + slot];
    }

  private:
    std::uint64_t pack(const Point& p, int dir) const;

    int d_;
    int L_;
    long n_interior_;
    std::vector<Point> vertices_;    // interior first, then boundary
    std::vector<Point> boundary_;
    std::vector<EdgeKey> edges_;
    std::vector<std::pair<long, long>> endpoints_;
    std::unordered_map<std::uint64_t, long> vertex_ids_;
    std::unordered_map<std::uint64_t, long> edge_ids_;
    std::vector<Adjacency> adj_;
};

} // namespace ohmstat
