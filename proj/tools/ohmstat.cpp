#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ohmstat/checks.hpp"
#include "ohmstat/harness.hpp"
#include "ohmstat/martingale.hpp"
#include "ohmstat/rng.hpp"
#include "ohmstat/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CliOptions {
    ohmstat::ExperimentConfig config;
    std::string config_file;
    std::string t_spec = "1";
    int proxy_side = 32;
    long m_outer = 500;
    long m_inner = 200;
};

std::vector<double> parse_t(const std::string& spec, int dim) {
    std::vector<double> t;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) t.push_back(std::stod(item));
    while (static_cast<int>(t.size()) < dim) t.push_back(0.0);
    t.resize(dim);
    return t;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file " + path);
    out << text;
}

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--dim", opt.config.dim, "lattice dimension");
    cmd->add_option("--side", opt.config.sides, "box side (repeatable)");
    cmd->add_option("--lambda", opt.config.lambda, "ellipticity parameter");
    cmd->add_option("--law", opt.config.law_kind, "conductance law: constant|uniform|two_point");
    cmd->add_option("--a", opt.config.constant_a, "value of the constant law");
    cmd->add_option("--p", opt.config.p, "probability of 1/lambda for the two-point law");
    cmd->add_option("--t", opt.t_spec, "boundary slope, comma separated");
    cmd->add_option("--replicas", opt.config.replicas, "Monte Carlo replicas");
    cmd->add_option("--seed", opt.config.seed, "master seed");
    cmd->add_option("--tol", opt.config.tol, "solver tolerance");
    cmd->add_option("--threads", opt.config.threads, "worker threads");
    cmd->add_option("--out", opt.config.out, "output path (default stdout)");
    cmd->add_option("--format", opt.config.format, "csv|json");
    cmd->add_option("--config", opt.config_file, "JSON config file (flags override)");
}

void finalize_config(CliOptions& opt, CLI::App* cmd) {
    if (!opt.config_file.empty()) {
        ohmstat::ExperimentConfig base =
            ohmstat::ExperimentConfig::from_json_file(opt.config_file);
        // Flags that were actually given override the file.
        auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
        if (!given("--dim")) opt.config.dim = base.dim;
        if (!given("--side")) opt.config.sides = base.sides;
        if (!given("--lambda")) opt.config.lambda = base.lambda;
        if (!given("--law")) opt.config.law_kind = base.law_kind;
        if (!given("--a")) opt.config.constant_a = base.constant_a;
        if (!given("--p")) opt.config.p = base.p;
        if (!given("--t") && !base.t.empty()) {
            std::ostringstream os;
            for (std::size_t i = 0; i < base.t.size(); ++i) os << (i ? "," : "") << base.t[i];
            opt.t_spec = os.str();
        }
        if (!given("--replicas")) opt.config.replicas = base.replicas;
        if (!given("--seed")) opt.config.seed = base.seed;
        if (!given("--tol")) opt.config.tol = base.tol;
        if (!given("--threads")) opt.config.threads = base.threads;
        if (!given("--out")) opt.config.out = base.out;
        if (!given("--format")) opt.config.format = base.format;
    }
    if (opt.config.sides.empty()) opt.config.sides = {8};
    if (cmd->count("--threads") == 0 && opt.config_file.empty())
        opt.config.threads = ohmstat::default_threads();
    opt.config.t = parse_t(opt.t_spec, opt.config.dim);
}

int run_ceff_cmd(CliOptions& opt) {
    const ohmstat::CeffRun run = ohmstat::run_ceff(opt.config);
    if (opt.config.format == "csv") {
        write_output(opt.config.out, ohmstat::records_csv(run.records));
    } else {
        nlohmann::json j;
        for (const auto& r : run.records) {
            if (r.failed) continue;
            j["records"].push_back(
                {{"replica", r.replica}, {"L", r.side}, {"seed", r.seed}, {"ceff", r.ceff}});
        }
        write_output(opt.config.out, j.dump());
    }
    for (const auto& [side, values] : run.by_side) {
        const ohmstat::SummaryStats s = ohmstat::summarize_full(
            values, std::pow(side, opt.config.dim), 1000, ohmstat::mix(opt.config.seed, 0xB007));
        std::cout << "{\"L\":" << side << ",\"summary\":" << ohmstat::summary_json(s) << "}\n";
    }
    return kExitOk;
}

int run_clt_cmd(CliOptions& opt) {
    opt.config.sides.resize(1);
    const ohmstat::CeffRun run = ohmstat::run_ceff(opt.config);
    const auto& values = run.by_side.at(opt.config.sides[0]);
    const ohmstat::CltReport report = ohmstat::clt_test(
        values, opt.config.dim, opt.config.sides[0], 1000, ohmstat::mix(opt.config.seed, 0xC17));
    write_output(opt.config.out, ohmstat::clt_json(report));
    return kExitOk;
}

int run_var_scaling_cmd(CliOptions& opt) {
    const ohmstat::CeffRun run = ohmstat::run_ceff(opt.config);
    std::vector<std::vector<double>> per_side;
    for (int side : opt.config.sides) per_side.push_back(run.by_side.at(side));
    const ohmstat::VarianceScalingFit fit =
        ohmstat::variance_scaling(opt.config.sides, per_side, opt.config.dim, 1000,
                                  ohmstat::mix(opt.config.seed, 0x5CA1E));
    write_output(opt.config.out, ohmstat::variance_scaling_json(fit));
    return kExitOk;
}

int run_sigma_cmd(CliOptions& opt) {
    const ohmstat::SigmaEstimate est = ohmstat::estimate_sigma_sq(
        opt.config.law(), opt.config.dim, opt.config.t, opt.proxy_side, opt.m_outer, opt.m_inner,
        opt.config.seed, opt.config.tol, opt.config.threads);
    nlohmann::json j;
    j["t"] = est.t;
    j["per_direction"] = est.per_direction;
    j["per_direction_se"] = est.per_direction_se;
    j["sigma_sq"] = est.sigma_sq;
    j["standard_error"] = est.standard_error;
    j["proxy_side"] = est.proxy_side;
    j["m_outer"] = est.m_outer;
    j["m_inner"] = est.m_inner;
    write_output(opt.config.out, j.dump());
    return kExitOk;
}

int run_checks_cmd(const std::vector<ohmstat::CheckResult>& results) {
    return ohmstat::print_and_count_failures(results) == 0 ? kExitOk : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ohmstat: effective conductance of random resistor networks"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App* ceff = app.add_subcommand("ceff", "Monte Carlo effective conductance");
    CLI::App* clt = app.add_subcommand("clt", "CLT diagnostics of C_eff replicas");
    CLI::App* var = app.add_subcommand("var-scaling", "variance against box side");
    CLI::App* sigma = app.add_subcommand("sigma", "limiting-variance estimator");
    CLI::App* meyers = app.add_subcommand("meyers", "singular-operator diagnostics");
    CLI::App* green = app.add_subcommand("green-checks", "Green-function identity suite");
    CLI::App* mart = app.add_subcommand("martingale-checks", "martingale identity suite");
    CLI::App* self = app.add_subcommand("selftest", "run the fast identity suite");
    for (CLI::App* cmd : {ceff, clt, var, sigma, meyers, green, mart, self})
        add_common_flags(cmd, opt);
    sigma->add_option("--proxy-side", opt.proxy_side, "side of the conditioning proxy box");
    sigma->add_option("--m-outer", opt.m_outer, "outer replicas");
    sigma->add_option("--m-inner", opt.m_inner, "inner resamples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        finalize_config(opt, cmd);
        if (cmd == ceff) return run_ceff_cmd(opt);
        if (cmd == clt) return run_clt_cmd(opt);
        if (cmd == var) return run_var_scaling_cmd(opt);
        if (cmd == sigma) return run_sigma_cmd(opt);
        if (cmd == meyers) {
            std::string csv;
            const auto results = ohmstat::meyers_checks(&csv);
            if (!opt.config.out.empty()) write_output(opt.config.out, csv);
            return run_checks_cmd(results);
        }
        if (cmd == green) return run_checks_cmd(ohmstat::green_checks());
        if (cmd == mart) return run_checks_cmd(ohmstat::martingale_checks());
        if (cmd == self) return run_checks_cmd(ohmstat::selftest_checks());
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
