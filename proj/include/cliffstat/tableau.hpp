#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cliffstat/gf.hpp"
#include "cliffstat/rng.hpp"

namespace cliffstat {

// Pauli phase conventions. A Pauli string is written in the canonical site
// order prod_s X_s^{a_s} Z_s^{b_s}, with a global phase tau^phi where
// tau = i for d = 2 (phi in Z_4) and tau = omega = e^{-2 pi i / d} for odd
// prime d (phi in Z_d). Exponents a, b live in Z_d.
inline int phase_modulus(uint8_t d) { return d == 2 ? 4 : d; }

// Phase picked up when moving Z^{ub} past X^{wa} while multiplying two
// canonical strings, in units of tau.
inline int reorder_phase_unit(uint8_t d) { return d == 2 ? 2 : int(d) - 1; }

/// An n_sites-qudit Clifford in tableau-action form: the symplectic matrix
/// holds the exponent images of the 2n basis generators (X_1..X_n, Z_1..Z_n)
/// as columns, ordered (a-part | b-part); phase_vector holds each image's
/// phase in Z_D.
struct CliffordGate {
    int n_sites = 0;
    uint8_t d = 2;
    GfMatrix symplectic;                 // 2n x 2n over Z_d
    std::vector<uint8_t> phase_vector;   // length 2n over Z_D

    bool symplectic_ok() const;
};

enum class GateName { H, S, CADD };

CliffordGate named_gate(GateName name, PrimeModulus d);
CliffordGate identity_gate(int n_sites, PrimeModulus d);

/// Uniformly random element of Sp(2n, Z_d), built pair by pair with symplectic
/// transvections.
GfMatrix random_symplectic(int n, PrimeModulus d, RngStream& rng);

/// Valid uniform phase data for a given symplectic matrix. For d = 2 the image
/// of a Hermitian generator must stay Hermitian, which fixes the parity of
/// each phase entry.
std::vector<uint8_t> random_gate_phases(const GfMatrix& symplectic, RngStream& rng);

/// Uniformly random Clifford modulo global phase.
CliffordGate random_clifford(int n_sites, PrimeModulus d, RngStream& rng);

/// Stabilizer state on n qudits: one generator per row, phases plus X/Z
/// exponent blocks.
struct StabilizerTableau {
    int n = 0;
    uint8_t d = 2;
    std::vector<uint8_t> phases;  // Z_D per generator
    GfMatrix x_block;             // n x n exponents a
    GfMatrix z_block;             // n x n exponents b

    static StabilizerTableau zero_state(int n, PrimeModulus d);

    /// Generator independence and pairwise symplectic commutation.
    bool is_valid() const;

    /// Row-reduce the generators (as group elements, phases included) to the
    /// unique canonical form; equal states compare equal afterwards.
    void canonicalize();

    bool same_state(const StabilizerTableau& other) const;
};

/// Conjugate every generator by the gate acting on the contiguous site window
/// [first_site, first_site + gate.n_sites). Mutates in place.
void apply_gate(StabilizerTableau& t, const CliffordGate& gate, int first_site);

/// Galois-field rank of the X block.
int participation_entropy(const StabilizerTableau& t);

struct OverlapSample {
    int g = 0;
    bool in_support = false;
    int w_log_d = 0;  // w = d^{w_log_d} when in_support, else w = 0
};

/// Rescaled overlap w = d^N |<0|Psi>|^2 of the all-zeros string, decided by
/// the phase character of the Z-only stabilizer subgroup.
OverlapSample overlap_zero(const StabilizerTableau& t);

enum class ArchitectureKind { brickwork, staircase, glued, custom };

struct GateSupport {
    int first = 0;
    int n_sites = 0;
};

struct CircuitArchitecture {
    int n = 0;
    uint8_t d = 2;
    ArchitectureKind kind = ArchitectureKind::custom;
    std::vector<std::vector<GateSupport>> layers;  // disjoint supports per layer
};

/// Alternating even/odd nearest-neighbour pairings; N must be even.
CircuitArchitecture brickwork_architecture(int N, PrimeModulus d);

/// N - r sliding windows of r + 1 contiguous sites.
CircuitArchitecture staircase_architecture(int N, int r, PrimeModulus d);

/// Staircase over blocks of r sites: N/r - 1 windows of 2r sites stepping by r.
CircuitArchitecture glued_architecture(int N, int r, PrimeModulus d);

/// Apply `depth` layers of independently sampled uniform Cliffords; layer t
/// uses arch.layers[t % layers.size()].
void run_architecture(const CircuitArchitecture& arch, StabilizerTableau& t, RngStream& rng,
                      int depth);

// ---------------------------------------------------------------------------
// Word-packed qubit path. Tracks only the exponent blocks (column-major, one
// bit column per site) which is all the participation entropy needs. Consumes
// the random stream exactly like the generic path so the two can be compared
// sample for sample.
// ---------------------------------------------------------------------------

class Gf2Evolver {
  public:
    explicit Gf2Evolver(int n);

    void reset_zero_state();

    /// Gate given by its symplectic matrix over Z_2 on a contiguous window.
    void apply_symplectic(const GfMatrix& m, int first_site);

    /// Rank of the X block, by XOR elimination on the packed columns.
    int x_rank() const;

    int sites() const { return n_; }

  private:
    int n_;
    int words_;
    std::vector<uint64_t> a_cols_;  // per site, `words_` words over generators
    std::vector<uint64_t> b_cols_;
    mutable std::vector<uint64_t> scratch_;
};

/// One participation-entropy sample of `depth` layers of `arch` on |0...0>,
/// through the packed path (d = 2 only).
int sample_g_packed(const CircuitArchitecture& arch, RngStream& rng, int depth,
                    Gf2Evolver& scratch);

/// Same through the generic tableau (any d).
int sample_g_generic(const CircuitArchitecture& arch, RngStream& rng, int depth);

/// Participation entropy of one uniformly random stabilizer state on N qudits,
/// sampled as a global random Clifford acting on |0...0>.
int sample_g_global(int N, PrimeModulus d, RngStream& rng);

}  // namespace cliffstat
