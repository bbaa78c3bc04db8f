#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cliffstat/tableau.hpp"

namespace cliffstat {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Dense single-qudit generalized Paulis in the conventions used throughout:
/// X |m> = |m-1 mod d>, Z |m> = omega^m |m> with omega = e^{-2 pi i / d}.
CMatrix dense_x(PrimeModulus d);
CMatrix dense_z(PrimeModulus d);

/// tau^phase * prod_s X_s^{a_s} Z_s^{b_s} on n qudits (tau = i for d = 2,
/// omega otherwise).
CMatrix dense_pauli(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b, int phase,
                    PrimeModulus d);

/// Dense matrices of the named generators, straight from their definitions.
CMatrix dense_named_gate(GateName name, PrimeModulus d);

/// Explicit unitary (up to global phase) realizing a tableau-form gate:
/// the unique U with U P_j U^dag = tau^{p_j} P(M e_j) for all 2n generators.
/// Capped at dimension d^n <= 4096.
CMatrix gate_to_unitary(const CliffordGate& gate);

/// Unitary of a gate sequence on n qudits; entries are (gate, first_site).
CMatrix circuit_to_unitary(const std::vector<std::pair<CliffordGate, int>>& gates, int n,
                           PrimeModulus d);

/// Dense state vector of a stabilizer tableau (small n), up to global phase.
CVector tableau_to_statevector(const StabilizerTableau& t);

}  // namespace cliffstat
