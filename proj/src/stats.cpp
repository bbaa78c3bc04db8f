#include "cliffstat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cliffstat {

namespace {

// Regularized upper incomplete gamma Q(a, x), by series / continued fraction.
double upper_gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("upper_gamma_q: bad arguments");
    if (x == 0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // lower series
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - gln);
        return 1.0 - p;
    }
    // continued fraction for Q
    double b = x + 1.0 - a, c = 1e308, dd = 1.0 / b, h = dd;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < 1e-300) dd = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        dd = 1.0 / dd;
        const double del = dd * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace

double EmpiricalDistribution::stderr_of(int value) const {
    const double p = prob(value);
    return std::sqrt(p * (1.0 - p) / double(total));
}

int EmpiricalDistribution::mode() const {
    if (counts.empty()) throw std::runtime_error("mode of empty distribution");
    int best = counts.begin()->first;
    uint64_t best_c = counts.begin()->second;
    for (const auto& [v, c] : counts) {
        if (c > best_c) {
            best = v;
            best_c = c;
        }
    }
    return best;
}

double tv_distance(const EmpiricalDistribution& emp, const PmfOverSupport& ref) {
    double tv = 0.0;
    std::map<int, double> refp;
    for (size_t i = 0; i < ref.support.size(); ++i) refp[ref.support[i]] = ref.probs[i];
    for (const auto& [v, p] : refp) tv += std::abs(emp.prob(v) - p);
    for (const auto& [v, c] : emp.counts)
        if (!refp.count(v)) tv += double(c) / double(emp.total);
    return 0.5 * tv;
}

double tv_distance(const PmfOverSupport& a, const PmfOverSupport& b) {
    std::map<int, double> pa, pb;
    for (size_t i = 0; i < a.support.size(); ++i) pa[a.support[i]] = a.probs[i];
    for (size_t i = 0; i < b.support.size(); ++i) pb[b.support[i]] = b.probs[i];
    double tv = 0.0;
    for (const auto& [v, p] : pa) tv += std::abs(p - (pb.count(v) ? pb[v] : 0.0));
    for (const auto& [v, p] : pb)
        if (!pa.count(v)) tv += p;
    return 0.5 * tv;
}

ChiSquareResult chi_square(const EmpiricalDistribution& emp, const PmfOverSupport& ref) {
    if (emp.total == 0) throw std::invalid_argument("chi_square: empty sample");
    std::vector<double> expected;
    std::vector<double> observed;
    double tail_exp = 0.0, tail_obs = 0.0;
    for (size_t i = 0; i < ref.support.size(); ++i) {
        const double e = ref.probs[i] * double(emp.total);
        const double o = double(emp.prob(ref.support[i])) * double(emp.total);
        if (e < 5.0) {
            tail_exp += e;
            tail_obs += o;
        } else {
            expected.push_back(e);
            observed.push_back(o);
        }
    }
    // anything observed outside the reference support joins the tail bin
    for (const auto& [v, c] : emp.counts) {
        if (std::find(ref.support.begin(), ref.support.end(), v) == ref.support.end())
            tail_obs += double(c);
    }
    if (tail_exp > 0.0 || tail_obs > 0.0) {
        expected.push_back(std::max(tail_exp, 1e-12));
        observed.push_back(tail_obs);
    }
    ChiSquareResult out;
    out.dof = int(expected.size()) - 1;
    for (size_t i = 0; i < expected.size(); ++i) {
        const double diff = observed[i] - expected[i];
        out.statistic += diff * diff / expected[i];
    }
    out.p_value = out.dof > 0 ? chi_square_tail(out.statistic, out.dof) : 1.0;
    return out;
}

ChiSquareResult chi_square_uniform(const std::vector<uint64_t>& counts) {
    uint64_t total = 0;
    for (uint64_t c : counts) total += c;
    if (total == 0 || counts.empty()) throw std::invalid_argument("chi_square_uniform: empty");
    const double e = double(total) / double(counts.size());
    ChiSquareResult out;
    out.dof = int(counts.size()) - 1;
    for (uint64_t c : counts) {
        const double diff = double(c) - e;
        out.statistic += diff * diff / e;
    }
    out.p_value = chi_square_tail(out.statistic, out.dof);
    return out;
}

MeanStderr stderr_mean(const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("stderr_mean: need at least 2 samples");
    double m = 0.0;
    for (double s : samples) m += s;
    m /= double(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - m) * (s - m);
    var /= double(samples.size() - 1);
    return {m, std::sqrt(var / double(samples.size()))};
}

double chi_square_tail(double statistic, int dof) {
    return upper_gamma_q(0.5 * dof, 0.5 * statistic);
}

double fit_crmps_x(const EmpiricalDistribution& emp, PrimeModulus d, int n_max, double x_hi) {
    // smallest n among tied modes
    int mode = emp.mode();
    {
        const uint64_t mc = emp.counts.at(mode);
        for (const auto& [v, c] : emp.counts)
            if (c == mc && v < mode) mode = v;
    }
    const double target = emp.prob(mode);
    auto objective = [&](double x) {
        const PmfOverSupport pmf = crmps_pmf(x, d, n_max, 1e-6);
        const double p = mode <= n_max ? pmf.probs[mode] : 0.0;
        return (p - target) * (p - target);
    };
    // coarse grid
    double best_x = 0.0, best_f = objective(0.0);
    const int grid = 256;
    for (int i = 1; i <= grid; ++i) {
        const double x = x_hi * double(i) / grid;
        const double f = objective(x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
    }
    // golden-section refinement around the best grid point
    double lo = std::max(0.0, best_x - x_hi / grid);
    double hi = std::min(x_hi, best_x + x_hi / grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), dd2 = lo + gr * (hi - lo);
    double fc = objective(c), fd = objective(dd2);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            hi = dd2;
            dd2 = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = dd2;
            fc = fd;
            dd2 = lo + gr * (hi - lo);
            fd = objective(dd2);
        }
        if (hi - lo < 1e-10) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace cliffstat
