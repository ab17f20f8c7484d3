#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ohmstat/environment.hpp"
#include "ohmstat/stats.hpp"

namespace ohmstat {

class NumericalFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int dim = 2;
    std::vector<int> sides;
    double lambda = 0.9;
    std::string law_kind = "uniform";
    double constant_a = 1.0;
    double p = 0.5;
    std::vector<double> t;
    long replicas = 100;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    int threads = 1;
    std::string out;
    std::string format = "csv";

    ConductanceLaw law() const;
    void validate() const;

    static ExperimentConfig from_json_file(const std::string& path);
};

struct ReplicaRecord {
    long replica = 0;
    int side = 0;
    std::uint64_t seed = 0;
    double ceff = 0.0;
    bool failed = false;
};

struct CeffRun {
    std::vector<ReplicaRecord> records;           // replica-major, side-minor order
    std::map<int, std::vector<double>> by_side;   // successful values per side
    long failures = 0;
};

// M replicas of C_eff per side. Replica seeds are mix(master, replica),
// identical across sides; records are deterministic for any thread count.
CeffRun run_ceff(const ExperimentConfig& config);

std::string records_csv(const std::vector<ReplicaRecord>& records);

struct CltReport {
    SummaryStats stats;
    double lindeberg_eps_1 = 0.0;  // fraction beyond 1 * L^{d/2} * sd
    double lindeberg_eps_2 = 0.0;
    double lindeberg_eps_4 = 0.0;
    bool non_rejected = false;     // p > 0.01 and moments consistent with normal
};

// Normality diagnostics for n >= 500 effective-conductance replicas.
CltReport clt_test(const std::vector<double>& values, int dim, int side, int bootstrap,
                   std::uint64_t seed);

std::string summary_json(const SummaryStats& s);
std::string clt_json(const CltReport& r);
std::string variance_scaling_json(const VarianceScalingFit& fit);

int default_threads();  // OHMSTAT_THREADS or 1

} // namespace ohmstat
