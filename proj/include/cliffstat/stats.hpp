#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cliffstat/qanalog.hpp"

namespace cliffstat {

/// Integer-support histogram with exact counts.
struct EmpiricalDistribution {
    std::map<int, uint64_t> counts;
    uint64_t total = 0;

    void add(int value, uint64_t times = 1) {
        counts[value] += times;
        total += times;
    }

    void merge(const EmpiricalDistribution& other) {
        for (const auto& [v, c] : other.counts) counts[v] += c;
        total += other.total;
    }

    double prob(int value) const {
        auto it = counts.find(value);
        return it == counts.end() ? 0.0 : double(it->second) / double(total);
    }

    double stderr_of(int value) const;

    int mode() const;  // smallest value among ties
};

/// Total variation distance between an empirical distribution and a reference
/// pmf, over the union of supports.
double tv_distance(const EmpiricalDistribution& emp, const PmfOverSupport& ref);

double tv_distance(const PmfOverSupport& a, const PmfOverSupport& b);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-square against a reference pmf; bins with expected count below
/// 5 are pooled into a tail bin.
ChiSquareResult chi_square(const EmpiricalDistribution& emp, const PmfOverSupport& ref);

/// Chi-square against uniform expected counts (occupancy test).
ChiSquareResult chi_square_uniform(const std::vector<uint64_t>& counts);

struct MeanStderr {
    double mean = 0.0;
    double stderr_mean = 0.0;
};

MeanStderr stderr_mean(const std::vector<double>& samples);

/// Upper tail of the chi-square distribution (regularized incomplete gamma).
double chi_square_tail(double statistic, int dof);

/// Fit the scaling parameter x so that the reference pmf matches the empirical
/// histogram at its mode: coarse grid then golden-section refinement on the
/// squared height mismatch at the empirical mode. Ties in the empirical mode
/// resolve toward smaller n. Deterministic given the histogram.
double fit_crmps_x(const EmpiricalDistribution& emp, PrimeModulus d, int n_max = 96,
                   double x_hi = 64.0);

}  // namespace cliffstat
