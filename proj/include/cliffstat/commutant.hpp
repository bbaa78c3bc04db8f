#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "cliffstat/gf.hpp"
#include "cliffstat/qanalog.hpp"

namespace cliffstat {

/// A stochastic Lagrangian subspace of Z_d^{2k}: dimension k, contains the
/// all-ones vector, and every element (x, y) satisfies
/// sum_i (x_i^2 - y_i^2) = 0 mod D on canonical integer lifts, with D = 4 for
/// d = 2 and D = d otherwise.
struct LagrangianSubspace {
    int k = 0;
    uint8_t d = 2;
    GfMatrix basis;  // k x 2k, reduced echelon form (canonical)
    std::vector<std::vector<uint8_t>> elements;  // all d^k member vectors
    bool is_permutation = false;
    std::vector<int> perm_word;  // set when is_permutation

    bool contains_all_ones() const;
    bool stochastic_condition_ok() const;
};

/// The full commutant index set Sigma_k(d) in canonical order: permutation
/// subspaces first (lexicographic by permutation word), then the defect
/// subspaces lexicographic by echelon basis.
struct CommutantBasis {
    int k = 0;
    uint8_t d = 2;
    std::vector<LagrangianSubspace> subspaces;
    std::vector<std::vector<int>> intersection_dims;  // dim(sigma ^ pi)
    int num_permutations = 0;

    int size() const { return int(subspaces.size()); }
};

/// Brute-force enumeration over k-dimensional subspaces through the all-ones
/// vector (k <= 4, d in {2, 3, 5}); throws if the count disagrees with the
/// closed-form cardinality.
CommutantBasis enumerate_sigma(int k, PrimeModulus d);

/// Subspace {(x, y) : y_{perm(m)} = x_m}.
LagrangianSubspace permutation_subspace(const std::vector<int>& perm, int k, PrimeModulus d);

/// Dense replica-space operator A_sigma = sum_{(x,y) in sigma} |x><y| on
/// (C^d)^{tensor k}.
Eigen::MatrixXcd subspace_operator(const LagrangianSubspace& s);

/// Q_d = (1/d) sum_P P tensor P tensor P^{d-2} over the d^2 single-qudit
/// Pauli strings (k = 3 only; d = 2 needs k = 4 to see anything beyond
/// permutations).
Eigen::MatrixXcd q_operator_matrix(PrimeModulus d, int k = 3);

/// Entries d^{n dim(sigma ^ pi)}, exact.
std::vector<std::vector<Rational>> gram_matrix(const CommutantBasis& basis, int n_sites);

/// Moore-Penrose pseudo-inverse of the Gram matrix via symmetric
/// eigendecomposition with relative cutoff 1e-12. For n >= k-1 the Gram is
/// invertible and this is its inverse.
Eigen::MatrixXd weingarten_matrix(const CommutantBasis& basis, int n_sites);

/// Exact rational inverse of the Gram matrix. Throws if singular (n < k-1).
std::vector<std::vector<Rational>> gram_inverse_exact(const CommutantBasis& basis, int n_sites);

/// Generalized stabilizer purities of a single-qudit state, one per commutant
/// element: zeta_sigma = sum_{(x,y) in sigma} prod_m psi_{x_m} conj(psi_{y_m}).
struct PurityTable {
    std::vector<std::complex<double>> state;
    std::vector<double> zetas;   // canonical commutant order
    std::vector<double> magics;  // -log zeta (natural log)
};

PurityTable purities(const std::vector<std::complex<double>>& state, const CommutantBasis& basis);

/// Same sum evaluated on an N-qudit state vector (site digits big-endian),
/// used as the independent multi-site cross-check.
double purity_dense(const Eigen::VectorXcd& state, int n_qudits, const LagrangianSubspace& s);

// JSON cache of a CommutantBasis; byte-stable given the canonical ordering.
std::string commutant_to_json(const CommutantBasis& basis);
CommutantBasis commutant_from_json(const std::string& text);
void save_commutant(const CommutantBasis& basis, const std::string& path);
CommutantBasis load_commutant(const std::string& path);

/// Load the cache if the file exists and matches (k, d); otherwise enumerate
/// (and write the cache when a path is given).
CommutantBasis load_or_enumerate(int k, PrimeModulus d, const std::string& cache_path);

}  // namespace cliffstat
