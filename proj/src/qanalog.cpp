#include "cliffstat/qanalog.hpp"

#include <cmath>
#include <stdexcept>

namespace cliffstat {

namespace {

Rational pow_rational(const Rational& base, long long e) {
    if (e < 0) throw std::invalid_argument("pow_rational: negative exponent");
    Rational out(1);
    Rational b = base;
    unsigned long long n = static_cast<unsigned long long>(e);
    while (n) {
        if (n & 1ULL) out *= b;
        b *= b;
        n >>= 1;
    }
    return out;
}

mpz_class pow_int(unsigned base, unsigned long long e) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), base, static_cast<unsigned long>(e));
    return out;
}

// d^e for integer e of either sign, as an exact rational.
Rational power_d(PrimeModulus d, long long e) {
    if (e >= 0) return Rational(pow_int(d.value(), static_cast<unsigned long long>(e)));
    return Rational(1) / Rational(pow_int(d.value(), static_cast<unsigned long long>(-e)));
}

// ln(1 + d^e) for integer e, stable for large |e|.
double ln_one_plus_pow(double ln_d, double e) {
    if (e > 0) return e * ln_d + std::log1p(std::exp(-e * ln_d));
    return std::log1p(std::exp(e * ln_d));
}

// ln of (-d^{e0}; d)_cnt = prod_{m=0}^{cnt-1} (1 + d^{e0+m}).
double ln_pochhammer_neg_pow(double ln_d, double e0, int cnt) {
    double s = 0.0;
    for (int m = 0; m < cnt; ++m) s += ln_one_plus_pow(ln_d, e0 + m);
    return s;
}

void check_zetas(int k, PrimeModulus d, const std::vector<double>& zetas) {
    Rational sz = sigma_size(k, d);
    if (sz.get_den() != 1 || sz.get_num().fits_slong_p() == 0)
        throw std::runtime_error("check_zetas: commutant size not integral");
    if (long(zetas.size()) != sz.get_num().get_si())
        throw std::invalid_argument("purity vector must cover the whole commutant");
    for (double z : zetas) {
        if (!(z > 0.0) || z > 1.0 + 1e-12)
            throw std::invalid_argument("purities must lie in (0, 1]");
    }
}

}  // namespace

Rational q_pochhammer(const Rational& a, const Rational& xi, int n) {
    if (n < 0) throw std::invalid_argument("q_pochhammer: n must be nonnegative");
    Rational out(1);
    Rational xm(1);
    for (int m = 0; m < n; ++m) {
        out *= Rational(1) - a * xm;
        xm *= xi;
    }
    return out;
}

Rational q_binomial(int N, int g, PrimeModulus d) {
    if (g < 0 || g > N) throw std::invalid_argument("q_binomial: need 0 <= g <= N");
    Rational out(1);
    const Rational q(int(d.value()));
    for (int i = 0; i < g; ++i) {
        out *= power_d(d, N - i) - 1;
        out /= power_d(d, i + 1) - 1;
    }
    out.canonicalize();
    return out;
}

Rational sigma_size(int k, PrimeModulus d) {
    if (k < 1) throw std::invalid_argument("sigma_size: k must be >= 1");
    return q_pochhammer(Rational(-1), Rational(int(d.value())), k - 1);
}

Rational gram_row_sum(int n, int k, PrimeModulus d) {
    if (n < 0 || k < 1) throw std::invalid_argument("gram_row_sum: bad arguments");
    return power_d(d, (long long)k * n) * q_pochhammer(-power_d(d, -n), Rational(int(d.value())), k - 1);
}

Rational wg_row_sum(int n, int k, PrimeModulus d) { return Rational(1) / gram_row_sum(n, k, d); }

Rational aleph(int g, int N, PrimeModulus d) {
    if (g < 0 || g > N) throw std::invalid_argument("aleph: g out of range");
    return power_d(d, N) * power_d(d, (long long)g * (g + 1) / 2) * q_binomial(N, g, d);
}

Rational stab_count(int N, PrimeModulus d) {
    return power_d(d, N) * q_pochhammer(Rational(-int(d.value())), Rational(int(d.value())), N);
}

PmfOverSupport clifford_pt_pmf(int N, PrimeModulus d) {
    if (N < 1) throw std::invalid_argument("clifford_pt_pmf: N must be >= 1");
    PmfOverSupport pmf;
    pmf.label = 'g';
    const Rational norm = q_pochhammer(Rational(-int(d.value())), Rational(int(d.value())), N);
    for (int g = 0; g <= N; ++g) {
        Rational p = q_binomial(N, g, d) * power_d(d, (long long)g * (g + 1) / 2) / norm;
        p.canonicalize();
        pmf.support.push_back(g);
        pmf.probs_exact.push_back(p);
        pmf.probs.push_back(to_double(p));
    }
    return pmf;
}

PmfOverSupport pt_infinity_pmf(PrimeModulus d, int n_max, double tail_tol) {
    if (n_max < 0 || tail_tol <= 0) throw std::invalid_argument("pt_infinity_pmf: bad arguments");
    const double dd = d.value();
    // (-1/d; 1/d)_infinity, truncated once the next factor is 1 to double precision.
    double c_inf = 1.0;
    for (int j = 1;; ++j) {
        const double t = std::pow(dd, -j);
        if (t < 1e-16) break;
        c_inf *= 1.0 + t;
    }
    PmfOverSupport pmf;
    pmf.label = 'n';
    double qfac = 1.0;  // (1/d; 1/d)_n
    double total = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) qfac *= 1.0 - std::pow(dd, -n);
        const double p = std::pow(dd, -0.5 * n * (n + 1.0)) / (c_inf * qfac);
        pmf.support.push_back(n);
        pmf.probs.push_back(p);
        total += p;
    }
    if (std::abs(1.0 - total) > tail_tol)
        throw std::runtime_error("pt_infinity_pmf: truncated tail mass exceeds tolerance");
    return pmf;
}

Rational ipr_haar_clifford(int k, int N, PrimeModulus d) {
    if (k < 1 || N < 1) throw std::invalid_argument("ipr_haar_clifford: bad arguments");
    const Rational q(int(d.value()));
    return power_d(d, (long long)(1 - k) * N) * q_pochhammer(Rational(-1), q, k - 1) /
           q_pochhammer(-power_d(d, -N), q, k - 1);
}

LogValue ipr_haar_clifford_log(int k, long long N, PrimeModulus d) {
    const double ln_d = std::log(double(d.value()));
    const double ln = (1.0 - k) * double(N) * ln_d + ln_pochhammer_neg_pow(ln_d, 0.0, k - 1) -
                      ln_pochhammer_neg_pow(ln_d, -double(N), k - 1);
    return LogValue{ln / ln_d};
}

AnnealedEntropy participation_entropy_annealed(int k, int N, PrimeModulus d) {
    if (k < 2) throw std::invalid_argument("participation_entropy_annealed: k must be >= 2");
    const double ln_d = std::log(double(d.value()));
    AnnealedEntropy out{};
    out.s_annealed = ipr_haar_clifford_log(k, N, d).log_d / (1.0 - k);
    out.c_k = ln_pochhammer_neg_pow(ln_d, 0.0, k - 1) / ln_d / (1.0 - k);
    return out;
}

double participation_entropy_quenched_constant(PrimeModulus d, double tol) {
    if (tol <= 0) throw std::invalid_argument("quenched constant: tol must be positive");
    const double dd = d.value();
    double c = 0.0;
    for (int g = 1;; ++g) {
        c -= 1.0 / (std::pow(dd, g) + 1.0);
        // remaining tail is below d^{-g} / (d - 1)
        if (std::pow(dd, -g) / (dd - 1.0) < tol) break;
        if (g > 4096) break;
    }
    return c;
}

double participation_entropy_mean(int N, PrimeModulus d) {
    const PmfOverSupport pmf = clifford_pt_pmf(N, d);
    Rational s(0);
    for (size_t i = 0; i < pmf.support.size(); ++i) s += Rational(pmf.support[i]) * pmf.probs_exact[i];
    return to_double(s);
}

Rational ipr_crmps(int k, int N, int r, PrimeModulus d) {
    if (r < 0 || r > N - 1) throw std::invalid_argument("ipr_crmps: need 0 <= r <= N-1");
    if (k < 1) throw std::invalid_argument("ipr_crmps: k must be >= 1");
    const Rational q(int(d.value()));
    const Rational a = q_pochhammer(-power_d(d, -r), q, k - 1);
    const Rational c = q_pochhammer(-power_d(d, -1 - r), q, k - 1);
    return power_d(d, (long long)(1 - k) * N) * sigma_size(k, d) * pow_rational(a, N - r - 1) /
           pow_rational(c, N - r);
}

LogValue ipr_crmps_log(int k, long long N, int r, PrimeModulus d) {
    if (r < 0 || r > N - 1) throw std::invalid_argument("ipr_crmps_log: need 0 <= r <= N-1");
    const double ln_d = std::log(double(d.value()));
    double ln = (1.0 - k) * double(N) * ln_d;
    ln += ln_pochhammer_neg_pow(ln_d, 0.0, k - 1);
    ln += double(N - r - 1) * ln_pochhammer_neg_pow(ln_d, -double(r), k - 1);
    ln -= double(N - r) * ln_pochhammer_neg_pow(ln_d, -double(r) - 1.0, k - 1);
    return LogValue{ln / ln_d};
}

ScalingX crmps_scaling_x(double N, int r, PrimeModulus d, ScalingGeometry geometry) {
    if (r < 0) throw std::invalid_argument("crmps_scaling_x: r must be >= 0");
    const double dd = d.value();
    const double chi = std::pow(dd, r);
    ScalingX out{};
    if (geometry == ScalingGeometry::mps) {
        out.x0 = N / chi;
        out.x = out.x0 * (1.0 - std::log(N / out.x0) / std::log(dd) / N - dd / ((dd - 1.0) * N));
    } else {
        if (r < 1) throw std::invalid_argument("crmps_scaling_x: glued geometry needs r >= 1");
        out.x0 = dd / (dd - 1.0) * N / (double(r) * chi);
        out.x = out.x0 * (1.0 - 2.0 * r / N);
    }
    return out;
}

PmfOverSupport crmps_pmf(double x, PrimeModulus d, int n_max, double tail_tol) {
    if (x < 0) throw std::invalid_argument("crmps_pmf: x must be >= 0");
    const PmfOverSupport base = pt_infinity_pmf(d, n_max, tail_tol);
    const double lambda = x / double(d.value());
    // Poisson weights up to n_max.
    std::vector<double> pois(n_max + 1, 0.0);
    pois[0] = std::exp(-lambda);
    for (int p = 1; p <= n_max; ++p) pois[p] = pois[p - 1] * lambda / p;

    PmfOverSupport pmf;
    pmf.label = 'n';
    double total = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        double v = 0.0;
        for (int p = 0; p <= n; ++p) v += base.probs[n - p] * pois[p];
        pmf.support.push_back(n);
        pmf.probs.push_back(v);
        total += v;
    }
    if (std::abs(1.0 - total) > tail_tol)
        throw std::runtime_error("crmps_pmf: truncated tail mass exceeds tolerance");
    return pmf;
}

Rational ipr_csc(int k, int N, int r, PrimeModulus d) {
    if (r < 1 || N % r != 0 || N < 2 * r)
        throw std::invalid_argument("ipr_csc: need r >= 1, r | N and N >= 2r");
    const Rational q(int(d.value()));
    const Rational a = q_pochhammer(-power_d(d, -r), q, k - 1);
    const Rational b = q_pochhammer(-power_d(d, -2 * r), q, k - 1);
    return power_d(d, (long long)(1 - k) * N) * sigma_size(k, d) *
           pow_rational(a, (N - 2 * r) / r) / pow_rational(b, (N - r) / r);
}

LogValue ipr_csc_log(int k, long long N, int r, PrimeModulus d) {
    if (r < 1 || N % r != 0 || N < 2 * r)
        throw std::invalid_argument("ipr_csc_log: need r >= 1, r | N and N >= 2r");
    const double ln_d = std::log(double(d.value()));
    double ln = (1.0 - k) * double(N) * ln_d;
    ln += ln_pochhammer_neg_pow(ln_d, 0.0, k - 1);
    ln += double((N - 2 * r) / r) * ln_pochhammer_neg_pow(ln_d, -double(r), k - 1);
    ln -= double((N - r) / r) * ln_pochhammer_neg_pow(ln_d, -2.0 * double(r), k - 1);
    return LogValue{ln / ln_d};
}

double ipr_doped_crmps(int k, int N, int r, PrimeModulus d, const std::vector<double>& zetas) {
    if (r < 0 || r > N - 1) throw std::invalid_argument("ipr_doped_crmps: need 0 <= r <= N-1");
    check_zetas(k, d, zetas);
    const double ln_d = std::log(double(d.value()));
    double s = 0.0;
    for (double z : zetas) s += std::pow(z, r);
    double ln = (1.0 - k) * double(N) * ln_d;
    ln += double(N - r - 1) * ln_pochhammer_neg_pow(ln_d, -double(r), k - 1);
    ln -= double(N - r) * ln_pochhammer_neg_pow(ln_d, -double(r) - 1.0, k - 1);
    return std::exp(ln) * s;
}

double ipr_doped_gc(int k, int N, int r, PrimeModulus d, const std::vector<double>& zetas) {
    if (r < 1 || N % r != 0 || N < 2 * r)
        throw std::invalid_argument("ipr_doped_gc: need r >= 1, r | N and N >= 2r");
    check_zetas(k, d, zetas);
    const double ln_d = std::log(double(d.value()));
    double s = 0.0;
    for (double z : zetas) s += std::pow(z, 2 * r);
    double ln = (1.0 - k) * double(N) * ln_d;
    ln += double((N - 2 * r) / r) * ln_pochhammer_neg_pow(ln_d, -double(r), k - 1);
    ln -= double((N - r) / r) * ln_pochhammer_neg_pow(ln_d, -2.0 * double(r), k - 1);
    return std::exp(ln) * s;
}

LogValue ipr_doped_global(int k, long long N, PrimeModulus d, const std::vector<double>& zetas,
                          long long n_t) {
    if (n_t < 0) throw std::invalid_argument("ipr_doped_global: n_t must be >= 0");
    check_zetas(k, d, zetas);
    double s = 0.0;
    for (double z : zetas) s += std::pow(z, double(n_t));
    const double ln_d = std::log(double(d.value()));
    return LogValue{(1.0 - k) * double(N) + std::log(s) / ln_d};
}

LogValue ipr_doped_global_qutrit_t(long long N, long long n_t) {
    const double bracket = 6.0 + 2.0 * std::pow(2.0 / 3.0, double(n_t));
    return LogValue{-2.0 * double(N) + std::log(bracket) / std::log(3.0)};
}

Rational ipr_haar_unitary(int k, int N, PrimeModulus d) {
    if (k < 1 || N < 1) throw std::invalid_argument("ipr_haar_unitary: bad arguments");
    Rational num(1);
    for (int m = 2; m <= k; ++m) num *= m;
    Rational den(1);
    const Rational dn = power_d(d, N);
    for (int m = 1; m <= k - 1; ++m) den *= dn + m;
    return num / den;
}

LogValue ipr_haar_unitary_log(int k, long long N, PrimeModulus d) {
    const double ln_d = std::log(double(d.value()));
    double ln = 0.0;
    for (int m = 2; m <= k; ++m) ln += std::log(double(m));
    // ln(d^N + m) = N ln d + log1p(m d^{-N})
    for (int m = 1; m <= k - 1; ++m)
        ln -= double(N) * ln_d + std::log1p(double(m) * std::exp(-double(N) * ln_d));
    return LogValue{ln / ln_d};
}

LogValue ipr_lognormal_unitary(int k, long long N, PrimeModulus d, double x) {
    if (x < 0) throw std::invalid_argument("ipr_lognormal_unitary: x must be >= 0");
    LogValue base = ipr_haar_unitary_log(k, N, d);
    base.log_d += 0.5 * double(k) * double(k - 1) * x / std::log(double(d.value()));
    return base;
}

double to_double(const Rational& r) { return r.get_d(); }

double log_d_of(const Rational& r, PrimeModulus d) {
    if (sgn(r) <= 0) throw std::invalid_argument("log_d_of: value must be positive");
    signed long int en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, r.get_num().get_mpz_t());
    const double md = mpz_get_d_2exp(&ed, r.get_den().get_mpz_t());
    const double ln = std::log(mn) - std::log(md) + (double(en) - double(ed)) * std::log(2.0);
    return ln / std::log(double(d.value()));
}

std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace cliffstat
