#pragma once

#include <memory>
#include <vector>

#include "ohmstat/lattice.hpp"

namespace ohmstat {

// Scalar or arity-component function on box vertices (interior + boundary).
// Boundary values are stored explicitly.
class LatticeField {
  public:
    LatticeField(std::shared_ptr<const BoxDomain> box, int arity = 1)
        : box_(std::move(box)), arity_(arity),
          values_(static_cast<std::size_t>(box_->n_vertices()) * arity, 0.0) {}

    const BoxDomain& box() const { return *box_; }
    std::shared_ptr<const BoxDomain> box_ptr() const { return box_; }
    int arity() const { return arity_; }

    double& at(long vertex_id, int comp = 0) {
        return values_[static_cast<std::size_t>(vertex_id) * arity_ + comp];
    }
    double at(long vertex_id, int comp = 0) const {
        return values_[static_cast<std::size_t>(vertex_id) * arity_ + comp];
    }
    double& at(const Point& p, int comp = 0) { return at(box_->vertex_id(p), comp); }
    double at(const Point& p, int comp = 0) const { return at(box_->vertex_id(p), comp); }

    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

    // f(x) = t . x on every vertex (including the boundary).
    static LatticeField linear(std::shared_ptr<const BoxDomain> box,
                               const std::vector<double>& t);

    // Component i equals coordinate x_i everywhere; arity d.
    static LatticeField identity(std::shared_ptr<const BoxDomain> box);

  private:
    std::shared_ptr<const BoxDomain> box_;
    int arity_;
    std::vector<double> values_;
};

} // namespace ohmstat
