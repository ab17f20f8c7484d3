#include "ohmstat/environment.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

#include "ohmstat/quadrature.hpp"
#include "ohmstat/rng.hpp"

namespace ohmstat {

ConductanceLaw ConductanceLaw::constant(double a, double lambda) {
    if (lambda <= 0.0 || lambda > 1.0)
        throw std::invalid_argument("ConductanceLaw: lambda must be in (0,1]");
    if (a < lambda || a > 1.0 / lambda)
        throw std::invalid_argument("ConductanceLaw: constant value outside [lambda, 1/lambda]");
    ConductanceLaw law;
    law.kind = LawKind::Constant;
    law.lambda = lambda;
    law.a = a;
    return law;
}

ConductanceLaw ConductanceLaw::uniform(double lambda, int quad_nodes) {
    if (lambda <= 0.0 || lambda >= 1.0)
        throw std::invalid_argument("ConductanceLaw: uniform law needs lambda in (0,1)");
    ConductanceLaw law;
    law.kind = LawKind::Uniform;
    law.lambda = lambda;
    law.quad_nodes = quad_nodes;
    return law;
}

ConductanceLaw ConductanceLaw::two_point(double lambda, double p) {
    if (lambda <= 0.0 || lambda >= 1.0)
        throw std::invalid_argument("ConductanceLaw: two-point law needs lambda in (0,1)");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("ConductanceLaw: p must be in [0,1]");
    ConductanceLaw law;
    law.kind = LawKind::TwoPoint;
    law.lambda = lambda;
    law.p = p;
    return law;
}

bool ConductanceLaw::degenerate() const {
    switch (kind) {
        case LawKind::Constant: return true;
        case LawKind::Uniform: return false;
        case LawKind::TwoPoint: return p == 0.0 || p == 1.0;
    }
    return true;
}

double ConductanceLaw::mean() const {
    switch (kind) {
        case LawKind::Constant: return a;
        case LawKind::Uniform: return 0.5 * (lambda + 1.0 / lambda);
        case LawKind::TwoPoint: return p / lambda + (1.0 - p) * lambda;
    }
    return 0.0;
}

double ConductanceLaw::sample_value(double u) const {
    switch (kind) {
        case LawKind::Constant: return a;
        case LawKind::Uniform: return lambda + u * (1.0 / lambda - lambda);
        case LawKind::TwoPoint: return u < p ? 1.0 / lambda : lambda;
    }
    return a;
}

std::vector<ConductanceLaw::QuadNode> ConductanceLaw::quadrature() const {
    std::vector<QuadNode> nodes;
    switch (kind) {
        case LawKind::Constant:
            nodes.push_back({a, 1.0});
            break;
        case LawKind::TwoPoint:
            if (p < 1.0) nodes.push_back({lambda, 1.0 - p});
            if (p > 0.0) nodes.push_back({1.0 / lambda, p});
            break;
        case LawKind::Uniform: {
            const GaussLegendre rule(quad_nodes);
            const double lo = support_lo(), hi = support_hi();
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                nodes.push_back({mid + half * rule.nodes[i], 0.5 * rule.weights[i]});
            break;
        }
    }
    return nodes;
}

std::string ConductanceLaw::kind_name() const {
    switch (kind) {
        case LawKind::Constant: return "constant";
        case LawKind::Uniform: return "uniform";
        case LawKind::TwoPoint: return "two_point";
    }
    return "constant";
}

LawKind ConductanceLaw::kind_from_name(const std::string& name) {
    if (name == "constant") return LawKind::Constant;
    if (name == "uniform") return LawKind::Uniform;
    if (name == "two_point" || name == "two-point") return LawKind::TwoPoint;
    throw std::invalid_argument("unknown law kind: " + name);
}

Environment::Environment(std::shared_ptr<const BoxDomain> box, std::vector<double> conductances,
                         double lambda)
    : box_(std::move(box)), a_(std::move(conductances)), lambda_(lambda) {
    if (static_cast<long>(a_.size()) != box_->n_edges())
        throw std::invalid_argument("Environment: conductance array does not match edge set");
    for (double v : a_) {
        if (!(v >= lambda_ && v <= 1.0 / lambda_))
            throw std::invalid_argument("Environment: conductance outside [lambda, 1/lambda]");
    }
}

double Environment::conductance(const EdgeKey& e) const {
    const long id = box_->edge_id(e);
    if (id < 0) throw std::domain_error("Environment::conductance: edge not in B(box)");
    return a_[id];
}

Environment Environment::perturb(const EdgeKey& e, double value) const {
    const long id = box_->edge_id(e);
    if (id < 0) throw std::domain_error("Environment::perturb: edge not in B(box)");
    return perturb(id, value);
}

Environment Environment::perturb(long edge_id, double value) const {
    if (!(value >= lambda_ && value <= 1.0 / lambda_))
        throw std::range_error("Environment::perturb: value outside [lambda, 1/lambda]");
    std::vector<double> values = a_;
    values[edge_id] = value;
    return Environment(box_, std::move(values), lambda_);
}

Environment Environment::shift(const Point& z, std::shared_ptr<const BoxDomain> sub_box) const {
    if (static_cast<int>(z.size()) != box_->dimension() ||
        sub_box->dimension() != box_->dimension())
        throw std::domain_error("Environment::shift: dimension mismatch");
    std::vector<double> values(sub_box->n_edges());
    for (long id = 0; id < sub_box->n_edges(); ++id) {
        const long src = box_->edge_id(shift_edge(sub_box->edge(id), z));
        if (src < 0)
            throw std::domain_error("Environment::shift: shifted sub-box not covered by source");
        values[id] = a_[src];
    }
    return Environment(std::move(sub_box), std::move(values), lambda_);
}

std::string Environment::to_json(const ConductanceLaw& law, std::uint64_t seed) const {
    nlohmann::json j;
    j["d"] = box_->dimension();
    j["L"] = box_->side();
    j["lambda"] = lambda_;
    j["law"] = {{"kind", law.kind_name()}, {"a", law.a}, {"p", law.p}};
    j["seed"] = seed;
    j["conductances"] = a_;
    return j.dump();
}

Environment Environment::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    auto box = std::make_shared<BoxDomain>(j.at("d").get<int>(), j.at("L").get<int>());
    return Environment(std::move(box), j.at("conductances").get<std::vector<double>>(),
                       j.at("lambda").get<double>());
}

Environment sample(const ConductanceLaw& law, std::shared_ptr<const BoxDomain> box,
                   std::uint64_t seed) {
    std::vector<double> values(box->n_edges());
    for (long id = 0; id < box->n_edges(); ++id)
        values[id] = law.sample_value(u01(mix(seed, static_cast<std::uint64_t>(id))));
    return Environment(std::move(box), std::move(values), law.lambda);
}

} // namespace ohmstat
