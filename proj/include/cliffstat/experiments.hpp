#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "cliffstat/io.hpp"
#include "cliffstat/replica.hpp"
#include "cliffstat/stats.hpp"
#include "cliffstat/tableau.hpp"

namespace cliffstat {

constexpr uint64_t kChunkSamples = 4096;

struct ExperimentConfig {
    std::string experiment;
    int n = 16;
    int d = 2;
    int k = 3;
    int r = 4;
    int depth = 0;  // 0 picks the architecture default
    uint64_t samples = 1000000;
    uint64_t seed = 1;
    long long n_t = 0;
    std::string tstate = "qutrit-t";  // builtin name or amplitude file
    std::string out;
    std::string format = "csv";
    int workers = 0;  // 0 = hardware concurrency
    double cutoff = 1e-12;
    std::string cache;  // commutant cache path
    bool check = false;

    std::string to_json() const;
    static ExperimentConfig from_json_file(const std::string& path);
};

int resolve_workers(int requested);

/// Dynamic chunk scheduling with per-chunk derived streams; results come back
/// indexed by chunk so any merge is order-deterministic regardless of the
/// worker count.
template <typename Result, typename Fn>
std::vector<Result> run_chunks(uint64_t total_samples, uint64_t seed, int workers, Fn fn) {
    const uint64_t n_chunks = (total_samples + kChunkSamples - 1) / kChunkSamples;
    std::vector<Result> results(n_chunks);
    std::atomic<uint64_t> next{0};
    auto work = [&]() {
        for (;;) {
            const uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            const uint64_t count =
                std::min(kChunkSamples, total_samples - c * kChunkSamples);
            RngStream rng = RngStream::for_chunk(seed, c);
            results[c] = fn(c, count, rng);
        }
    };
    const int w = resolve_workers(workers);
    if (w <= 1 || n_chunks <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < w; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return results;
}

struct StabSampleResult {
    EmpiricalDistribution hist_n;  // n = N - g
    double tv_exact = 0.0;         // vs the finite-N pmf
    double tv_infinity = 0.0;      // vs the scaling-limit pmf
    ChiSquareResult chi2;
};

/// Global random Cliffords on |0...0>, histogram of n = N - g.
StabSampleResult run_stab_sample(const ExperimentConfig& cfg);

struct CrmpsSampleResult {
    EmpiricalDistribution hist_n;
    // moments are carried at the scale M_k = E[d^{(k-1)n}] = d^{(k-1)N} E[I_k]
    double moment_mc = 0.0;
    double moment_stderr = 0.0;
    double moment_exact = 0.0;
    double sigma_distance = 0.0;
    double x0 = 0.0, x = 0.0;
    double tv_scaling = 0.0;  // vs crmps_pmf(x)
};

/// Staircase circuits on |0...0>: histogram plus the Monte Carlo I_k estimate
/// against the closed form.
CrmpsSampleResult run_crmps_sample(const ExperimentConfig& cfg);

/// Same for the glued (two-block staircase) geometry; comparison target is
/// ipr_csc.
CrmpsSampleResult run_glued_sample(const ExperimentConfig& cfg);

struct ShallowResult {
    EmpiricalDistribution hist_n;
    double fitted_x = 0.0;
    double tv_at_fit = 0.0;
};

/// Fixed-depth brickwork circuits, mode-matching fit of the scaling variable.
ShallowResult run_shallow_overlap(const ExperimentConfig& cfg);

struct ReplicaRunResult {
    std::vector<DepthRecord> series;
    std::vector<double> delta_clean;  // vs the exact stabilizer-ensemble value
    std::vector<double> delta_doped;  // doped runs only
    double reference_clean_logd = 0.0;
    double reference_doped_logd = 0.0;
    int saturation_depth = -1;  // first t with the relevant delta below target
    std::vector<double> zetas;  // doped runs: purity vector actually used
};

ReplicaRunResult run_replica(const ExperimentConfig& cfg);
ReplicaRunResult run_replica_doped(const ExperimentConfig& cfg);

/// Deterministic formula tables over a (d, N) grid, in log domain.
Table analytic_tables(const ExperimentConfig& cfg);

/// Single-qudit amplitudes for the named magic state or an amplitude file.
std::vector<std::complex<double>> resolve_tstate(const std::string& spec, int d);

// Result writers (CSV/JSON plus sidecar). Used by the CLI.
void write_histogram_result(const EmpiricalDistribution& hist, const PmfOverSupport& ref,
                            const ExperimentConfig& cfg, const std::string& experiment,
                            double wall_seconds);
void write_replica_result(const ReplicaRunResult& res, const ExperimentConfig& cfg,
                          const std::string& experiment, double wall_seconds);

}  // namespace cliffstat
