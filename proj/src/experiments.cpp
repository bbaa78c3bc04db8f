#include "cliffstat/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "cliffstat/io.hpp"

namespace cliffstat {

namespace {

using json = nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

PmfOverSupport pmf_g_to_n(const PmfOverSupport& pg, int N) {
    PmfOverSupport pn;
    pn.label = 'n';
    for (int n = 0; n <= N; ++n) {
        pn.support.push_back(n);
        pn.probs.push_back(pg.probs[N - n]);
        if (pg.has_exact()) pn.probs_exact.push_back(pg.probs_exact[N - n]);
    }
    return pn;
}

struct SampleChunk {
    EmpiricalDistribution hist;
    double sum = 0.0;
    double sumsq = 0.0;
};

struct MergedSample {
    EmpiricalDistribution hist;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

MergedSample merge_chunks(const std::vector<SampleChunk>& chunks) {
    MergedSample out;
    double s = 0.0, ss = 0.0;
    for (const auto& c : chunks) {
        out.hist.merge(c.hist);
        s += c.sum;
        ss += c.sumsq;
    }
    const double m = double(out.hist.total);
    if (m > 1.5) {
        out.mean = s / m;
        const double var = std::max(0.0, (ss - m * out.mean * out.mean) / (m - 1.0));
        out.stderr_mean = std::sqrt(var / m);
    } else if (m > 0.5) {
        out.mean = s;
    }
    return out;
}

MergedSample sample_architecture(const ExperimentConfig& cfg, const CircuitArchitecture& arch,
                                 int depth) {
    const int N = cfg.n;
    const int k = cfg.k;
    const double dd = cfg.d;
    auto chunk_fn = [&](uint64_t, uint64_t count, RngStream& rng) {
        SampleChunk out;
        Gf2Evolver evolver(cfg.d == 2 ? N : 1);
        for (uint64_t i = 0; i < count; ++i) {
            const int g = cfg.d == 2 ? sample_g_packed(arch, rng, depth, evolver)
                                     : sample_g_generic(arch, rng, depth);
            const int n = N - g;
            out.hist.add(n);
            const double v = std::pow(dd, double(k - 1) * n);
            out.sum += v;
            out.sumsq += v * v;
        }
        return out;
    };
    return merge_chunks(run_chunks<SampleChunk>(cfg.samples, cfg.seed, cfg.workers, chunk_fn));
}

}  // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["n"] = n;
    j["d"] = d;
    j["k"] = k;
    j["r"] = r;
    j["depth"] = depth;
    j["samples"] = samples;
    j["seed"] = seed;
    j["nt"] = n_t;
    j["tstate"] = tstate;
    j["out"] = out;
    j["format"] = format;
    j["workers"] = workers;
    j["cutoff"] = cutoff;
    j["cache"] = cache;
    j["check"] = check;
    return j.dump();
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config file not found: " + path);
    json j;
    f >> j;
    ExperimentConfig cfg;
    if (j.contains("experiment")) cfg.experiment = j["experiment"].get<std::string>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("d")) cfg.d = j["d"].get<int>();
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("r")) cfg.r = j["r"].get<int>();
    if (j.contains("depth")) cfg.depth = j["depth"].get<int>();
    if (j.contains("samples")) cfg.samples = j["samples"].get<uint64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("nt")) cfg.n_t = j["nt"].get<long long>();
    if (j.contains("tstate")) cfg.tstate = j["tstate"].get<std::string>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (j.contains("cutoff")) cfg.cutoff = j["cutoff"].get<double>();
    if (j.contains("cache")) cfg.cache = j["cache"].get<std::string>();
    if (j.contains("check")) cfg.check = j["check"].get<bool>();
    return cfg;
}

StabSampleResult run_stab_sample(const ExperimentConfig& cfg) {
    const PrimeModulus d(cfg.d);
    const int N = cfg.n;
    auto chunk_fn = [&](uint64_t, uint64_t count, RngStream& rng) {
        SampleChunk out;
        for (uint64_t i = 0; i < count; ++i) out.hist.add(N - sample_g_global(N, d, rng));
        return out;
    };
    MergedSample merged =
        merge_chunks(run_chunks<SampleChunk>(cfg.samples, cfg.seed, cfg.workers, chunk_fn));

    StabSampleResult res;
    res.hist_n = std::move(merged.hist);
    const PmfOverSupport exact_n = pmf_g_to_n(clifford_pt_pmf(N, d), N);
    const PmfOverSupport inf_n = pt_infinity_pmf(d, std::min(N, 64), 1e-9);
    res.tv_exact = tv_distance(res.hist_n, exact_n);
    res.tv_infinity = tv_distance(res.hist_n, inf_n);
    res.chi2 = chi_square(res.hist_n, exact_n);
    return res;
}

CrmpsSampleResult run_crmps_sample(const ExperimentConfig& cfg) {
    const PrimeModulus d(cfg.d);
    const int N = cfg.n, r = cfg.r, k = cfg.k;
    const CircuitArchitecture arch = staircase_architecture(N, r, d);
    const int depth = int(arch.layers.size());
    MergedSample merged = sample_architecture(cfg, arch, depth);

    CrmpsSampleResult res;
    res.hist_n = std::move(merged.hist);
    res.moment_mc = merged.mean;
    res.moment_stderr = merged.stderr_mean;
    // exact moment at the same scale: E[d^{(k-1)n}] = d^{(k-1)N} I_k
    Rational scaled = ipr_crmps(k, N, r, d);
    for (long long i = 0; i < (long long)(k - 1) * N; ++i) scaled *= cfg.d;
    res.moment_exact = to_double(scaled);
    res.sigma_distance = res.moment_stderr > 0.0
                             ? std::abs(res.moment_mc - res.moment_exact) / res.moment_stderr
                             : 0.0;
    const ScalingX sx = crmps_scaling_x(double(N), r, d, ScalingGeometry::mps);
    res.x0 = sx.x0;
    res.x = sx.x;
    res.tv_scaling = tv_distance(res.hist_n, crmps_pmf(sx.x, d, 96, 1e-9));
    return res;
}

CrmpsSampleResult run_glued_sample(const ExperimentConfig& cfg) {
    const PrimeModulus d(cfg.d);
    const int N = cfg.n, r = cfg.r, k = cfg.k;
    const CircuitArchitecture arch = glued_architecture(N, r, d);
    const int depth = int(arch.layers.size());
    MergedSample merged = sample_architecture(cfg, arch, depth);

    CrmpsSampleResult res;
    res.hist_n = std::move(merged.hist);
    res.moment_mc = merged.mean;
    res.moment_stderr = merged.stderr_mean;
    Rational scaled = ipr_csc(k, N, r, d);
    for (long long i = 0; i < (long long)(k - 1) * N; ++i) scaled *= cfg.d;
    res.moment_exact = to_double(scaled);
    res.sigma_distance = res.moment_stderr > 0.0
                             ? std::abs(res.moment_mc - res.moment_exact) / res.moment_stderr
                             : 0.0;
    const ScalingX sx = crmps_scaling_x(double(N), r, d, ScalingGeometry::glued);
    res.x0 = sx.x0;
    res.x = sx.x;
    res.tv_scaling = tv_distance(res.hist_n, crmps_pmf(sx.x, d, 96, 1e-9));
    return res;
}

ShallowResult run_shallow_overlap(const ExperimentConfig& cfg) {
    const PrimeModulus d(cfg.d);
    const int N = cfg.n;
    if (cfg.depth < 1) throw std::invalid_argument("run_shallow_overlap: depth must be >= 1");
    const CircuitArchitecture arch = brickwork_architecture(N, d);
    MergedSample merged = sample_architecture(cfg, arch, cfg.depth);

    ShallowResult res;
    res.hist_n = std::move(merged.hist);
    res.fitted_x = fit_crmps_x(res.hist_n, d);
    res.tv_at_fit = tv_distance(res.hist_n, crmps_pmf(res.fitted_x, d, 96, 1e-9));
    return res;
}

std::vector<std::complex<double>> resolve_tstate(const std::string& spec, int d) {
    if (spec == "qutrit-t") {
        if (d != 3) throw std::invalid_argument("qutrit-t needs d = 3");
        const double s = 1.0 / std::sqrt(3.0);
        return {std::complex<double>(s, 0.0), std::polar(s, 2.0 * kPi / 9.0),
                std::polar(s, -2.0 * kPi / 9.0)};
    }
    std::ifstream f(spec);
    if (!f) throw std::runtime_error("tstate file not found: " + spec);
    json j;
    f >> j;
    if (int(j.size()) != d) throw std::runtime_error("tstate file: expected " + std::to_string(d) + " amplitudes");
    std::vector<std::complex<double>> psi;
    double norm = 0.0;
    for (const auto& e : j) {
        psi.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
        norm += std::norm(psi.back());
    }
    if (std::abs(norm - 1.0) > 1e-9) throw std::runtime_error("tstate file: state not normalized");
    return psi;
}

namespace {

ReplicaRunResult replica_common(const ExperimentConfig& cfg, bool doped) {
    const PrimeModulus d(cfg.d);
    const int N = cfg.n, k = cfg.k;
    CommutantBasis basis = load_or_enumerate(k, d, cfg.cache);
    const BulkGate gate = build_bulk_gate(basis, d);

    std::map<int, std::vector<double>> doped_sites;
    ReplicaRunResult res;
    if (doped) {
        const auto psi = resolve_tstate(cfg.tstate, cfg.d);
        const PurityTable pt = purities(psi, basis);
        res.zetas = pt.zetas;
        for (long long s = 0; s < cfg.n_t; ++s) doped_sites[int(s)] = pt.zetas;
    }

    ReplicaMps mps = initial_state(N, basis, d, doped_sites);
    int depth = cfg.depth;
    if (depth <= 0) depth = int(4.0 * std::ceil(std::log2(double(N)))) + 16;
    EvolveOptions opts;
    opts.truncation_cutoff = cfg.cutoff;
    res.series = evolve(mps, gate, d, depth, opts);

    res.reference_clean_logd = ipr_haar_clifford_log(k, N, d).log_d;
    res.delta_clean = delta_s3(res.series, LogValue{res.reference_clean_logd});
    double target = 1e-8;
    const std::vector<double>* track = &res.delta_clean;
    if (doped) {
        res.reference_doped_logd = ipr_doped_global(k, N, d, res.zetas, cfg.n_t).log_d;
        res.delta_doped = delta_s3(res.series, LogValue{res.reference_doped_logd});
        target = 1e-4;
        track = &res.delta_doped;
    }
    for (size_t i = 0; i < track->size(); ++i) {
        if (std::abs((*track)[i]) < target) {
            res.saturation_depth = res.series[i].t;
            break;
        }
    }
    return res;
}

}  // namespace

ReplicaRunResult run_replica(const ExperimentConfig& cfg) { return replica_common(cfg, false); }

ReplicaRunResult run_replica_doped(const ExperimentConfig& cfg) {
    if (cfg.n_t < 0) throw std::invalid_argument("run_replica_doped: nt must be >= 0");
    return replica_common(cfg, true);
}

Table analytic_tables(const ExperimentConfig& cfg) {
    Table t;
    t.header = {"d",
                "k",
                "N",
                "logd_ipr_clifford_2",
                "logd_ipr_unitary_2",
                "logd_ipr_clifford_k",
                "logd_ipr_unitary_k",
                "s_annealed_k",
                "c_k",
                "quenched_c",
                "logd_lognormal_factor_x1",
                "logd_poisson_factor_x1"};
    const int k = cfg.k;
    for (int dv : {2, 3, 5}) {
        const PrimeModulus d(dv);
        const double ln_d = std::log(double(dv));
        for (long long N = 1; N <= 512; N *= 2) {
            std::vector<std::string> row;
            row.push_back(std::to_string(dv));
            row.push_back(std::to_string(k));
            row.push_back(std::to_string(N));
            row.push_back(format_double(ipr_haar_clifford_log(2, N, d).log_d));
            row.push_back(format_double(ipr_haar_unitary_log(2, N, d).log_d));
            row.push_back(format_double(ipr_haar_clifford_log(k, N, d).log_d));
            row.push_back(format_double(ipr_haar_unitary_log(k, N, d).log_d));
            const AnnealedEntropy ae = participation_entropy_annealed(k, int(N), d);
            row.push_back(format_double(ae.s_annealed));
            row.push_back(format_double(ae.c_k));
            row.push_back(format_double(participation_entropy_quenched_constant(d, 1e-12)));
            row.push_back(format_double(0.5 * k * (k - 1) / ln_d));
            row.push_back(
                format_double((std::pow(double(dv), k) - dv) / double(dv * dv) / ln_d));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

void write_histogram_result(const EmpiricalDistribution& hist, const PmfOverSupport& ref,
                            const ExperimentConfig& cfg, const std::string& experiment,
                            double wall_seconds) {
    if (cfg.out.empty()) return;
    Table t;
    t.header = {"n", "count", "p_emp", "stderr", "p_ref"};
    std::map<int, double> refp;
    for (size_t i = 0; i < ref.support.size(); ++i) refp[ref.support[i]] = ref.probs[i];
    std::map<int, uint64_t> all = hist.counts;
    for (const auto& [v, p] : refp)
        if (!all.count(v)) all[v] = 0;
    for (const auto& [v, c] : all) {
        t.rows.push_back({std::to_string(v), std::to_string(c), format_double(hist.prob(v)),
                          format_double(hist.stderr_of(v)),
                          format_double(refp.count(v) ? refp[v] : 0.0)});
    }
    write_table(t, cfg.out, cfg.format);
    write_sidecar(cfg.out, experiment, cfg.to_json(), wall_seconds);
}

void write_replica_result(const ReplicaRunResult& res, const ExperimentConfig& cfg,
                          const std::string& experiment, double wall_seconds) {
    if (cfg.out.empty()) return;
    Table t;
    const bool doped = !res.delta_doped.empty();
    t.header = {"t", "logd_e_ik", "delta_s3", "max_bond"};
    if (doped) t.header.insert(t.header.begin() + 3, "delta_s3_doped");
    for (size_t i = 0; i < res.series.size(); ++i) {
        std::vector<std::string> row = {std::to_string(res.series[i].t),
                                        format_double(res.series[i].logd_e_ik),
                                        format_double(res.delta_clean[i])};
        if (doped) row.push_back(format_double(res.delta_doped[i]));
        row.push_back(std::to_string(res.series[i].max_bond));
        t.rows.push_back(std::move(row));
    }
    write_table(t, cfg.out, cfg.format);
    write_sidecar(cfg.out, experiment, cfg.to_json(), wall_seconds);
}

}  // namespace cliffstat
