#include "ohmstat/harness.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "ohmstat/rng.hpp"
#include "ohmstat/solver.hpp"

namespace ohmstat {

ConductanceLaw ExperimentConfig::law() const {
    const LawKind kind = ConductanceLaw::kind_from_name(law_kind);
    switch (kind) {
        case LawKind::Constant: return ConductanceLaw::constant(constant_a, lambda);
        case LawKind::Uniform: return ConductanceLaw::uniform(lambda);
        case LawKind::TwoPoint: return ConductanceLaw::two_point(lambda, p);
    }
    return ConductanceLaw::constant(constant_a, lambda);
}

void ExperimentConfig::validate() const {
    if (dim < 1 || dim > 8) throw std::invalid_argument("config: dim must be in [1,8]");
    if (sides.empty()) throw std::invalid_argument("config: at least one side required");
    for (int L : sides)
        if (L < 2) throw std::invalid_argument("config: sides must be >= 2");
    if (replicas < 2) throw std::invalid_argument("config: replicas must be >= 2");
    if (static_cast<int>(t.size()) != dim)
        throw std::invalid_argument("config: t must have dim components");
    for (double v : t)
        if (!std::isfinite(v)) throw std::invalid_argument("config: t must be finite");
    if (tol <= 0.0) throw std::invalid_argument("config: tol must be positive");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (format != "csv" && format != "json")
        throw std::invalid_argument("config: format must be csv or json");
    law();  // law parameter validation
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    ExperimentConfig c;
    if (j.contains("dim")) c.dim = j["dim"].get<int>();
    if (j.contains("sides")) c.sides = j["sides"].get<std::vector<int>>();
    if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
    if (j.contains("law")) c.law_kind = j["law"].get<std::string>();
    if (j.contains("a")) c.constant_a = j["a"].get<double>();
    if (j.contains("p")) c.p = j["p"].get<double>();
    if (j.contains("t")) c.t = j["t"].get<std::vector<double>>();
    if (j.contains("replicas")) c.replicas = j["replicas"].get<long>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    return c;
}

CeffRun run_ceff(const ExperimentConfig& config) {
    config.validate();
    const ConductanceLaw law = config.law();

    CeffRun run;
    run.records.resize(static_cast<std::size_t>(config.replicas) * config.sides.size());

    for (std::size_t si = 0; si < config.sides.size(); ++si) {
        const int side = config.sides[si];
        auto box = std::make_shared<BoxDomain>(config.dim, side);
        std::atomic<long> next{0};
        auto worker = [&]() {
            for (;;) {
                const long r = next.fetch_add(1);
                if (r >= config.replicas) break;
                ReplicaRecord rec;
                rec.replica = r;
                rec.side = side;
                rec.seed = mix(config.seed, static_cast<std::uint64_t>(r));
                try {
                    const Environment env = sample(law, box, rec.seed);
                    rec.ceff = effective_conductance(env, config.t, config.tol);
                } catch (const SolveFailure&) {
                    rec.failed = true;
                }
                run.records[static_cast<std::size_t>(r) * config.sides.size() + si] = rec;
            }
        };
        if (config.threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < config.threads; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
    }

    for (const ReplicaRecord& rec : run.records) {
        if (rec.failed) {
            ++run.failures;
        } else {
            run.by_side[rec.side].push_back(rec.ceff);
        }
    }
    if (run.failures * 100 > static_cast<long>(run.records.size()))
        throw NumericalFailure("run_ceff: more than 1% of replicas failed to solve");
    return run;
}

std::string records_csv(const std::vector<ReplicaRecord>& records) {
    std::ostringstream os;
    os << "replica,L,seed,ceff\n";
    os.precision(17);
    for (const ReplicaRecord& r : records) {
        if (r.failed) continue;
        os << r.replica << ',' << r.side << ',' << r.seed << ',' << r.ceff << '\n';
    }
    return os.str();
}

CltReport clt_test(const std::vector<double>& values, int dim, int side, int bootstrap,
                   std::uint64_t seed) {
    if (values.size() < 500) throw std::invalid_argument("clt_test: need at least 500 replicas");
    CltReport report;
    report.stats = summarize_full(values, std::pow(side, dim), bootstrap, seed);

    const double sd = std::sqrt(report.stats.variance);
    const double scale = std::pow(static_cast<double>(side), dim / 2.0) * sd;
    long c1 = 0, c2 = 0, c4 = 0;
    for (double v : values) {
        const double dev = std::abs(v - report.stats.mean);
        if (dev > 1.0 * scale) ++c1;
        if (dev > 2.0 * scale) ++c2;
        if (dev > 4.0 * scale) ++c4;
    }
    const double n = static_cast<double>(values.size());
    report.lindeberg_eps_1 = c1 / n;
    report.lindeberg_eps_2 = c2 / n;
    report.lindeberg_eps_4 = c4 / n;

    report.non_rejected = report.stats.bootstrap_p_value > 0.01 &&
                          std::abs(report.stats.skewness) <
                              0.2 + 3.0 * report.stats.skewness_se &&
                          std::abs(report.stats.excess_kurtosis) <
                              0.5 + 3.0 * report.stats.kurtosis_se;
    return report;
}

namespace {

nlohmann::json summary_to_json(const SummaryStats& s) {
    return nlohmann::json{{"n", s.n},
                          {"mean", s.mean},
                          {"variance", s.variance},
                          {"skewness", s.skewness},
                          {"excess_kurtosis", s.excess_kurtosis},
                          {"skewness_se", s.skewness_se},
                          {"kurtosis_se", s.kurtosis_se},
                          {"ks_statistic", s.ks_statistic},
                          {"bootstrap_p_value", s.bootstrap_p_value},
                          {"variance_per_volume", s.variance_per_volume}};
}

} // namespace

std::string summary_json(const SummaryStats& s) { return summary_to_json(s).dump(); }

std::string clt_json(const CltReport& r) {
    nlohmann::json j = summary_to_json(r.stats);
    j["lindeberg_eps_1"] = r.lindeberg_eps_1;
    j["lindeberg_eps_2"] = r.lindeberg_eps_2;
    j["lindeberg_eps_4"] = r.lindeberg_eps_4;
    j["non_rejected"] = r.non_rejected;
    return j.dump();
}

std::string variance_scaling_json(const VarianceScalingFit& fit) {
    nlohmann::json j;
    j["ok"] = fit.ok;
    j["note"] = fit.note;
    j["sides"] = fit.sides;
    j["variances"] = fit.variances;
    j["variance_per_volume"] = fit.variance_per_volume;
    j["slope"] = fit.slope;
    j["slope_ci_lo"] = fit.slope_ci_lo;
    j["slope_ci_hi"] = fit.slope_ci_hi;
    j["last_ratio_change"] = fit.last_ratio_change;
    return j.dump();
}

int default_threads() {
    if (const char* env = std::getenv("OHMSTAT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

} // namespace ohmstat
