#include "ohmstat/field.hpp"

#include <stdexcept>

namespace ohmstat {

LatticeField LatticeField::linear(std::shared_ptr<const BoxDomain> box,
                                  const std::vector<double>& t) {
    if (static_cast<int>(t.size()) != box->dimension())
        throw std::invalid_argument("LatticeField::linear: t has wrong dimension");
    LatticeField f(box, 1);
    for (long v = 0; v < box->n_vertices(); ++v) {
        const Point& p = box->vertex(v);
        double s = 0.0;
        for (int i = 0; i < box->dimension(); ++i) s += t[i] * p[i];
        f.at(v) = s;
    }
    return f;
}

LatticeField LatticeField::identity(std::shared_ptr<const BoxDomain> box) {
    const int d = box->dimension();
    LatticeField f(box, d);
    for (long v = 0; v < box->n_vertices(); ++v) {
        const Point& p = box->vertex(v);
        for (int i = 0; i < d; ++i) f.at(v, i) = p[i];
    }
    return f;
}

} // namespace ohmstat
