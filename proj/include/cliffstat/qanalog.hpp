#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "cliffstat/gf.hpp"

namespace cliffstat {

/// Exact arbitrary-precision rational. Values like d^{kN} overflow any fixed
/// width long before the system sizes of interest, so identities are checked
/// in exact arithmetic and only converted to floating point at the edges.
using Rational = mpq_class;

/// Strictly positive quantity stored as its base-d logarithm, for the regimes
/// (N up to 10^6) where even the exact rational is impractical to carry.
struct LogValue {
    double log_d = 0.0;
};

/// A probability mass function over a small integer support. Exact variants
/// keep the rationals alongside the doubles.
struct PmfOverSupport {
    std::vector<int> support;
    std::vector<double> probs;
    std::vector<Rational> probs_exact;  // empty for float-only pmfs
    char label = 'n';                   // 'g' or 'n'

    bool has_exact() const { return !probs_exact.empty(); }
};

/// (a; xi)_n = prod_{m=0}^{n-1} (1 - a xi^m); the empty product is 1.
Rational q_pochhammer(const Rational& a, const Rational& xi, int n);

/// Gaussian binomial; counts g-dimensional subspaces of Z_d^N.
Rational q_binomial(int N, int g, PrimeModulus d);

/// Commutant cardinality (-1; d)_{k-1}.
Rational sigma_size(int k, PrimeModulus d);

/// d^{kn} (-d^{-n}; d)_{k-1}: the common row sum of the n-qudit Gram matrix.
Rational gram_row_sum(int n, int k, PrimeModulus d);

/// Reciprocal of gram_row_sum: the common row sum of the Weingarten matrix.
Rational wg_row_sum(int n, int k, PrimeModulus d);

/// Number of stabilizer states on N qudits with participation entropy g.
Rational aleph(int g, int N, PrimeModulus d);

/// Total number of stabilizer states, d^N (-d; d)_N.
Rational stab_count(int N, PrimeModulus d);

/// Exact pmf of the participation entropy g over uniformly random stabilizer
/// states; sums to exactly 1.
PmfOverSupport clifford_pt_pmf(int N, PrimeModulus d);

/// Large-N limit pmf in the variable n = N - g, truncated at n_max. Throws if
/// the truncated tail mass exceeds tail_tol.
PmfOverSupport pt_infinity_pmf(PrimeModulus d, int n_max, double tail_tol);

/// Average inverse participation ratio of random stabilizer states.
Rational ipr_haar_clifford(int k, int N, PrimeModulus d);
LogValue ipr_haar_clifford_log(int k, long long N, PrimeModulus d);

struct AnnealedEntropy {
    double s_annealed;  // (1-k)^{-1} log_d E[I_k]
    double c_k;         // (1-k)^{-1} sum_{m<k-1} log_d(1 + d^m)
};
AnnealedEntropy participation_entropy_annealed(int k, int N, PrimeModulus d);

/// c = -sum_{g>=1} 1/(d^g + 1), truncated to absolute error below tol.
double participation_entropy_quenched_constant(PrimeModulus d, double tol);

/// Mean participation entropy sum_g g P(g) at finite N.
double participation_entropy_mean(int N, PrimeModulus d);

/// Average IPR of staircase-generated matrix product states at bond d^r.
Rational ipr_crmps(int k, int N, int r, PrimeModulus d);
LogValue ipr_crmps_log(int k, long long N, int r, PrimeModulus d);

enum class ScalingGeometry { mps, glued };

struct ScalingX {
    double x0;
    double x;
};

/// Scaling variable for the bond-dimension collapse; the `glued` geometry uses
/// x0 = d/(d-1) * N/(r d^r) and x = x0 (1 - 2r/N).
ScalingX crmps_scaling_x(double N, int r, PrimeModulus d, ScalingGeometry geometry);

/// Scaling-limit pmf of n: the large-N stabilizer pmf convolved with a Poisson
/// of mean x/d. Computed as an explicit convolution, which is regular at x = 0.
PmfOverSupport crmps_pmf(double x, PrimeModulus d, int n_max, double tail_tol);

/// Average IPR of the two-patch staircase (equivalently glued) circuit built
/// from blocks of r qudits; requires r | N and N >= 2r.
Rational ipr_csc(int k, int N, int r, PrimeModulus d);
LogValue ipr_csc_log(int k, long long N, int r, PrimeModulus d);

/// Purity-weighted variants for magic-state inputs. `zetas` holds one
/// generalized stabilizer purity per commutant element in canonical order;
/// permutation entries must be exactly 1 and every entry must lie in (0, 1].
double ipr_doped_crmps(int k, int N, int r, PrimeModulus d, const std::vector<double>& zetas);
double ipr_doped_gc(int k, int N, int r, PrimeModulus d, const std::vector<double>& zetas);

/// Late-time IPR of a fully scrambled doped state: d^{(1-k)N} [k! + sum over
/// non-permutation elements of zeta^{n_t}], dropping O(d^{-N}) corrections.
LogValue ipr_doped_global(int k, long long N, PrimeModulus d, const std::vector<double>& zetas,
                          long long n_t);

/// Specialisation of ipr_doped_global for the qutrit phase state with both
/// defect purities equal to 2/3 (k = 3, d = 3).
LogValue ipr_doped_global_qutrit_t(long long N, long long n_t);

/// Haar-unitary reference: k! / prod_{m=1}^{k-1} (d^N + m).
Rational ipr_haar_unitary(int k, int N, PrimeModulus d);
LogValue ipr_haar_unitary_log(int k, long long N, PrimeModulus d);

/// Haar-unitary IPR with the log-normal shallow-circuit correction factor
/// exp[k(k-1)x/2].
LogValue ipr_lognormal_unitary(int k, long long N, PrimeModulus d, double x);

double to_double(const Rational& r);
double log_d_of(const Rational& r, PrimeModulus d);
std::string to_string(const Rational& r);

}  // namespace cliffstat
