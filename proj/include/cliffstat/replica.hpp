#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "cliffstat/commutant.hpp"

namespace cliffstat {

/// Two-site transfer operator of the averaged brickwork circuit. In commutant
/// coordinates it reads W[(p,p'),(s,s')] = delta_{p,p'} sum_t Wg(d^2)_{p,t}
/// G(d)_{t,s} G(d)_{t,s'}: state coefficients multiply ket-side commutant
/// vectors and the single-site Gram contractions sit on the gate inputs (the
/// convention that makes the depth-one value reproduce the product of
/// independent two-qudit averages exactly). Because the single-site commutant
/// vectors are linearly dependent for k > 2, the stored operator acts on the
/// orthonormalized frame of their span (dimension site_dim = rank of the
/// single-site Gram): W' = P Wg(d^2) P^T with P the frame map applied to
/// diagonal pairs. The frame change is exact and keeps singular values equal
/// to physical Schmidt coefficients.
struct BulkGate {
    int deff = 0;      // |Sigma_k(d)|
    int site_dim = 0;  // rank of the single-site Gram
    Eigen::MatrixXd w;      // site_dim^2 x site_dim^2
    Eigen::MatrixXd frame;  // site_dim x deff, columns w_sigma with W^T W = G
    Eigen::VectorXd boundary_covector;  // per-site final contraction
};

BulkGate build_bulk_gate(const CommutantBasis& basis, PrimeModulus d);

/// Matrix product state over the per-site commutant frame with a scalar log
/// accumulator for the factored-out normalizations.
struct ReplicaMps {
    int n_sites = 0;
    int site_dim = 0;
    // a[site][phys] is a (chi_left x chi_right) block
    std::vector<std::vector<Eigen::MatrixXd>> a;
    double log_scale = 0.0;  // natural log
    Eigen::VectorXd boundary_covector;

    int max_bond() const;
};

/// Product of replica Bell pairs, the first even gate layer contracted with
/// the bottom boundary. A doped site contributes its purity covector instead
/// of all-ones; map key is the 0-based site index.
ReplicaMps initial_state(int N, const CommutantBasis& basis, PrimeModulus d,
                         const std::map<int, std::vector<double>>& doped_sites);

struct EvolveOptions {
    double truncation_cutoff = 1e-12;  // relative singular value cutoff
    int max_keep = 320;                // bond truncation rank; 0 = cutoff only
    int bond_cap = 4096;               // a kept rank above this is an error
};

struct DepthRecord {
    int t = 0;             // number of brickwork layers absorbed so far
    double logd_e_ik = 0;  // log_d E[I_k]
    int max_bond = 1;
};

/// Contract the current state against the all-ones final boundary.
double contract_log_d(const ReplicaMps& mps, PrimeModulus d);

/// Apply alternating odd/even bulk layers up to `depth` total layers (the
/// initial state already counts as layer 1), recording log_d E[I_k] after
/// each layer.
std::vector<DepthRecord> evolve(ReplicaMps& mps, const BulkGate& gate, PrimeModulus d, int depth,
                                const EvolveOptions& opts);

/// Pointwise log_d I_ref - log_d E[I_k].
std::vector<double> delta_s3(const std::vector<DepthRecord>& series, LogValue reference);

// ---------------------------------------------------------------------------
// Independent k = 2 reference: the commutant is {identity, swap}, so the bulk
// gate is hand-built from the closed-form 2x2 Gram and Weingarten matrices and
// the network is contracted exactly on the full 2^N-component state vector.
// ---------------------------------------------------------------------------
std::vector<double> k2_dense_reference(int N, PrimeModulus d, int depth);

}  // namespace cliffstat
