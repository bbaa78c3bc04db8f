// Command-line driver: analytic tables, tableau Monte Carlo samplers, replica
// network runs, and commutant cache dumps. Exit codes: 0 success, 2 validation
// error, 3 check-tolerance violation under --check.

#include <chrono>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "cliffstat/experiments.hpp"
#include "cliffstat/io.hpp"

using namespace cliffstat;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void add_common_flags(CLI::App* cmd, ExperimentConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file; explicit flags override it");
    cmd->add_option("--n", cfg.n, "number of qudits");
    cmd->add_option("--d", cfg.d, "prime local dimension");
    cmd->add_option("--k", cfg.k, "moment order / replica count");
    cmd->add_option("--r", cfg.r, "staircase window parameter (bond = d^r)");
    cmd->add_option("--depth", cfg.depth, "circuit depth in layers (0 = default)");
    cmd->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option("--nt", cfg.n_t, "number of doped sites");
    cmd->add_option("--tstate", cfg.tstate, "magic state: qutrit-t or amplitude file");
    cmd->add_option("--out", cfg.out, "output path for the data table");
    cmd->add_option("--format", cfg.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--workers", cfg.workers, "worker threads (0 = hardware)");
    cmd->add_option("--cutoff", cfg.cutoff, "replica singular-value cutoff");
    cmd->add_option("--cache", cfg.cache, "commutant JSON cache path");
    cmd->add_flag("--check", cfg.check, "exit 3 when the run misses its tolerance");
}

ExperimentConfig finalize_config(CLI::App* cmd, ExperimentConfig flags,
                                 const std::string& config_path) {
    if (config_path.empty()) return flags;
    ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
    // explicit flags win over file values
    auto seen = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (seen("--n")) cfg.n = flags.n;
    if (seen("--d")) cfg.d = flags.d;
    if (seen("--k")) cfg.k = flags.k;
    if (seen("--r")) cfg.r = flags.r;
    if (seen("--depth")) cfg.depth = flags.depth;
    if (seen("--samples")) cfg.samples = flags.samples;
    if (seen("--seed")) cfg.seed = flags.seed;
    if (seen("--nt")) cfg.n_t = flags.n_t;
    if (seen("--tstate")) cfg.tstate = flags.tstate;
    if (seen("--out")) cfg.out = flags.out;
    if (seen("--format")) cfg.format = flags.format;
    if (seen("--workers")) cfg.workers = flags.workers;
    if (seen("--cutoff")) cfg.cutoff = flags.cutoff;
    if (seen("--cache")) cfg.cache = flags.cache;
    if (flags.check) cfg.check = true;
    return cfg;
}

int check_exit(bool ok, bool check_requested) { return ok || !check_requested ? 0 : 3; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anticoncentration statistics for random stabilizer circuits"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_path;

    CLI::App* analytic = app.add_subcommand("analytic", "dump closed-form tables over a grid");
    CLI::App* stab = app.add_subcommand("sample-stab", "sample global random stabilizer states");
    CLI::App* crmps = app.add_subcommand("sample-crmps", "sample staircase circuits");
    CLI::App* shallow = app.add_subcommand("sample-shallow", "sample fixed-depth brickwork");
    CLI::App* replica = app.add_subcommand("replica", "replica network depth series");
    CLI::App* doped = app.add_subcommand("replica-doped", "doped replica network series");
    CLI::App* cdump = app.add_subcommand("commutant-dump", "enumerate and write a commutant cache");
    for (CLI::App* cmd : {analytic, stab, crmps, shallow, replica, doped, cdump})
        add_common_flags(cmd, cfg, config_path);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* cmd = app.get_subcommands().front();
        ExperimentConfig run_cfg = finalize_config(cmd, cfg, config_path);
        Timer timer;

        if (cmd == analytic) {
            run_cfg.experiment = "analytic";
            const Table t = analytic_tables(run_cfg);
            if (run_cfg.out.empty()) {
                std::fprintf(stderr, "analytic: --out is required\n");
                return 2;
            }
            write_table(t, run_cfg.out, run_cfg.format);
            write_sidecar(run_cfg.out, run_cfg.experiment, run_cfg.to_json(), timer.seconds());
            return 0;
        }
        if (cmd == stab) {
            run_cfg.experiment = "sample-stab";
            const StabSampleResult res = run_stab_sample(run_cfg);
            write_histogram_result(
                res.hist_n, pt_infinity_pmf(PrimeModulus(run_cfg.d), std::min(run_cfg.n, 64), 1e-9),
                run_cfg, run_cfg.experiment, timer.seconds());
            std::printf("samples=%llu tv_exact=%.6g tv_infinity=%.6g chi2_p=%.4g\n",
                        (unsigned long long)run_cfg.samples, res.tv_exact, res.tv_infinity,
                        res.chi2.p_value);
            return check_exit(res.tv_exact < 0.005, run_cfg.check);
        }
        if (cmd == crmps) {
            run_cfg.experiment = "sample-crmps";
            const CrmpsSampleResult res = run_crmps_sample(run_cfg);
            write_histogram_result(res.hist_n,
                                   crmps_pmf(res.x, PrimeModulus(run_cfg.d), 96, 1e-9), run_cfg,
                                   run_cfg.experiment, timer.seconds());
            std::printf("x0=%.6g x=%.6g moment_mc=%.8g moment_exact=%.8g sigma=%.3g tv=%.6g\n",
                        res.x0, res.x, res.moment_mc, res.moment_exact, res.sigma_distance,
                        res.tv_scaling);
            return check_exit(res.sigma_distance < 3.0 && res.tv_scaling < 0.01, run_cfg.check);
        }
        if (cmd == shallow) {
            run_cfg.experiment = "sample-shallow";
            const ShallowResult res = run_shallow_overlap(run_cfg);
            write_histogram_result(res.hist_n,
                                   crmps_pmf(res.fitted_x, PrimeModulus(run_cfg.d), 96, 1e-9),
                                   run_cfg, run_cfg.experiment, timer.seconds());
            std::printf("fitted_x=%.6g tv_at_fit=%.6g\n", res.fitted_x, res.tv_at_fit);
            return check_exit(res.tv_at_fit < 0.02, run_cfg.check);
        }
        if (cmd == replica) {
            run_cfg.experiment = "replica";
            const ReplicaRunResult res = run_replica(run_cfg);
            write_replica_result(res, run_cfg, run_cfg.experiment, timer.seconds());
            const double final_delta = res.delta_clean.back();
            std::printf("depth=%d final_delta_s3=%.3e saturation_t=%d\n",
                        res.series.back().t, final_delta, res.saturation_depth);
            return check_exit(std::abs(final_delta) < 1e-8, run_cfg.check);
        }
        if (cmd == doped) {
            run_cfg.experiment = "replica-doped";
            const ReplicaRunResult res = run_replica_doped(run_cfg);
            write_replica_result(res, run_cfg, run_cfg.experiment, timer.seconds());
            const double final_delta = res.delta_doped.back();
            std::printf("depth=%d final_delta_s3_doped=%.3e saturation_t=%d\n",
                        res.series.back().t, final_delta, res.saturation_depth);
            return check_exit(std::abs(final_delta) < 1e-4, run_cfg.check);
        }
        if (cmd == cdump) {
            run_cfg.experiment = "commutant-dump";
            if (run_cfg.out.empty()) {
                std::fprintf(stderr, "commutant-dump: --out is required\n");
                return 2;
            }
            const CommutantBasis basis = enumerate_sigma(run_cfg.k, PrimeModulus(run_cfg.d));
            save_commutant(basis, run_cfg.out);
            std::printf("wrote %d commutant elements (k=%d, d=%d) to %s\n", basis.size(),
                        run_cfg.k, run_cfg.d, run_cfg.out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
