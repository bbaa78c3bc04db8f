#include "doctest.h"

#include <cmath>
#include <map>
#include <string>

#include "cliffstat/dense_oracle.hpp"
#include "cliffstat/qanalog.hpp"
#include "cliffstat/stats.hpp"
#include "cliffstat/tableau.hpp"

using namespace cliffstat;

namespace {

const PrimeModulus d2(2), d3(3), d5(5);

std::string state_key(StabilizerTableau t) {
    t.canonicalize();
    std::string key;
    for (uint8_t p : t.phases) key += char('0' + p);
    key += '|';
    for (uint8_t e : t.x_block.entries()) key += char('0' + e);
    key += '|';
    for (uint8_t e : t.z_block.entries()) key += char('0' + e);
    return key;
}

bool equal_up_to_phase(const CMatrix& a, const CMatrix& b, double tol = 1e-9) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (std::abs(a(i, j)) > best) {
                best = std::abs(a(i, j));
                bi = i;
                bj = j;
            }
    if (best < tol) return b.cwiseAbs().maxCoeff() < tol;
    const std::complex<double> phase = b(bi, bj) / a(bi, bj);
    if (std::abs(std::abs(phase) - 1.0) > tol) return false;
    return (a * phase - b).cwiseAbs().maxCoeff() < tol;
}

StabilizerTableau ghz_state(int N) {
    StabilizerTableau t = StabilizerTableau::zero_state(N, d2);
    for (int j = 0; j < N; ++j) {
        t.x_block.at(0, j) = 1;
        t.z_block.at(0, j) = 0;
    }
    for (int i = 1; i < N; ++i) {
        for (int j = 0; j < N; ++j) t.z_block.at(i, j) = 0;
        t.z_block.at(i, i - 1) = 1;
        t.z_block.at(i, i) = 1;
    }
    return t;
}

}  // namespace

TEST_CASE("named gates are symplectic and match their dense definitions") {
    for (auto d : {d2, d3, d5}) {
        for (GateName name : {GateName::H, GateName::S, GateName::CADD}) {
            const CliffordGate g = named_gate(name, d);
            CHECK(g.symplectic_ok());
            CHECK(equal_up_to_phase(gate_to_unitary(g), dense_named_gate(name, d)));
        }
    }
}

TEST_CASE("gate action on basic states") {
    // H: |0> -> |+>, participation entropy 0 -> 1
    for (auto d : {d2, d3}) {
        StabilizerTableau t = StabilizerTableau::zero_state(1, d);
        CHECK(participation_entropy(t) == 0);
        apply_gate(t, named_gate(GateName::H, d), 0);
        CHECK(participation_entropy(t) == 1);
        CHECK(t.is_valid());
    }

    // qubits: H twice returns the same state
    {
        StabilizerTableau t = StabilizerTableau::zero_state(3, d2);
        apply_gate(t, named_gate(GateName::H, d2), 1);
        StabilizerTableau u = t;
        apply_gate(u, named_gate(GateName::H, d2), 1);
        apply_gate(u, named_gate(GateName::H, d2), 1);
        CHECK(u.same_state(t));
    }

    // S on |+>: the generator X becomes Y = tau X Z
    {
        StabilizerTableau t = StabilizerTableau::zero_state(1, d2);
        apply_gate(t, named_gate(GateName::H, d2), 0);
        apply_gate(t, named_gate(GateName::S, d2), 0);
        CHECK(t.x_block.at(0, 0) == 1);
        CHECK(t.z_block.at(0, 0) == 1);
        CHECK(t.phases[0] == 1);
    }

    // CADD maps X1 -> X1 X2 and Z2 -> Z1^{-1} Z2
    for (auto d : {d2, d3, d5}) {
        const CliffordGate c = named_gate(GateName::CADD, d);
        CHECK(c.symplectic.at(0, 0) == 1);
        CHECK(c.symplectic.at(1, 0) == 1);
        CHECK(c.symplectic.at(2, 0) == 0);
        CHECK(c.symplectic.at(3, 0) == 0);
        CHECK(c.symplectic.at(2, 3) == uint8_t(d.value() - 1));
        CHECK(c.symplectic.at(3, 3) == 1);
    }

    // identity gate leaves any state alone
    {
        RngStream rng(5);
        StabilizerTableau t = StabilizerTableau::zero_state(4, d3);
        run_architecture(staircase_architecture(4, 2, d3), t, rng, 2);
        StabilizerTableau u = t;
        apply_gate(u, identity_gate(2, d3), 1);
        CHECK(u.same_state(t));
    }
}

TEST_CASE("participation entropy examples") {
    CHECK(participation_entropy(StabilizerTableau::zero_state(6, d3)) == 0);

    StabilizerTableau plus = StabilizerTableau::zero_state(5, d2);
    for (int i = 0; i < 5; ++i) apply_gate(plus, named_gate(GateName::H, d2), i);
    CHECK(participation_entropy(plus) == 5);

    CHECK(ghz_state(6).is_valid());
    CHECK(participation_entropy(ghz_state(6)) == 1);
}

TEST_CASE("overlap_zero examples") {
    // |+>^N: w = 1
    StabilizerTableau plus = StabilizerTableau::zero_state(4, d2);
    for (int i = 0; i < 4; ++i) apply_gate(plus, named_gate(GateName::H, d2), i);
    const OverlapSample sp = overlap_zero(plus);
    CHECK(sp.in_support);
    CHECK(sp.g == 4);
    CHECK(sp.w_log_d == 0);

    // |1>: generator -Z, the zero string is off support
    StabilizerTableau one = StabilizerTableau::zero_state(1, d2);
    one.phases[0] = 2;
    CHECK_FALSE(overlap_zero(one).in_support);

    // GHZ: w = 2^{N-1}
    const OverlapSample sg = overlap_zero(ghz_state(5));
    CHECK(sg.in_support);
    CHECK(sg.g == 1);
    CHECK(sg.w_log_d == 4);
}

TEST_CASE("random gates are symplectic with valid phases") {
    RngStream rng(42);
    for (auto d : {d2, d3, d5}) {
        for (int n : {1, 2, 3}) {
            for (int trial = 0; trial < 20; ++trial) {
                const CliffordGate g = random_clifford(n, d, rng);
                CHECK(g.symplectic_ok());
                if (d.value() == 2) {
                    // Hermitian images: phase parity matches the Y-count
                    for (int j = 0; j < 2 * n; ++j) {
                        int y = 0;
                        for (int s = 0; s < n; ++s)
                            y += int(g.symplectic.at(s, j)) * g.symplectic.at(n + s, j);
                        CHECK(int(g.phase_vector[j]) % 2 == y % 2);
                    }
                }
            }
        }
    }
}

TEST_CASE("tableau invariants survive long random gate sequences") {
    RngStream rng(99);
    for (auto d : {d2, d3, d5}) {
        StabilizerTableau t = StabilizerTableau::zero_state(5, d);
        for (int step = 0; step < 150; ++step) {
            const int n = 1 + int(rng.bounded(3));
            const int first = int(rng.bounded(uint32_t(5 - n + 1)));
            apply_gate(t, random_clifford(n, d, rng), first);
        }
        CHECK(t.is_valid());
    }
}

TEST_CASE("single-qudit orbit of |0> is uniform") {
    // d = 2: six stabilizer states; d = 3: twelve
    for (auto [d, expect] : std::vector<std::pair<PrimeModulus, int>>{{d2, 6}, {d3, 12}}) {
        RngStream rng(1234 + d.value());
        std::map<std::string, uint64_t> counts;
        const int draws = 60000;
        for (int i = 0; i < draws; ++i) {
            StabilizerTableau t = StabilizerTableau::zero_state(1, d);
            apply_gate(t, random_clifford(1, d, rng), 0);
            counts[state_key(t)]++;
        }
        CHECK(int(counts.size()) == expect);
        std::vector<uint64_t> c;
        for (const auto& [k, v] : counts) c.push_back(v);
        CHECK(chi_square_uniform(c).p_value > 0.001);
    }
}

TEST_CASE("Sp(4, 2) sampling is uniform over the group") {
    RngStream rng(7);
    std::map<std::vector<uint8_t>, uint64_t> counts;
    const int draws = 72000;
    for (int i = 0; i < draws; ++i) counts[random_symplectic(2, d2, rng).entries()]++;
    CHECK(int(counts.size()) == 720);
    std::vector<uint64_t> c;
    for (const auto& [k, v] : counts) c.push_back(v);
    CHECK(chi_square_uniform(c).p_value > 0.001);
}

TEST_CASE("two-qubit scrambling reproduces the exact participation pmf") {
    RngStream rng(31337);
    EmpiricalDistribution hist;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) {
        StabilizerTableau t = StabilizerTableau::zero_state(2, d2);
        apply_gate(t, random_clifford(2, d2, rng), 0);
        hist.add(participation_entropy(t));
    }
    PmfOverSupport ref = clifford_pt_pmf(2, d2);
    CHECK(tv_distance(hist, ref) < 0.01);
}

TEST_CASE("architectures") {
    const auto st = staircase_architecture(4, 1, d2);
    REQUIRE(st.layers.size() == 3);
    CHECK(st.layers[0][0].first == 0);
    CHECK(st.layers[0][0].n_sites == 2);
    CHECK(st.layers[2][0].first == 2);

    const auto single = staircase_architecture(6, 5, d2);
    REQUIRE(single.layers.size() == 1);
    CHECK(single.layers[0][0].n_sites == 6);

    const auto bw = brickwork_architecture(6, d2);
    REQUIRE(bw.layers.size() == 2);
    CHECK(bw.layers[0].size() == 3);
    CHECK(bw.layers[1].size() == 2);
    CHECK(bw.layers[1][0].first == 1);

    const auto gl = glued_architecture(12, 3, d2);
    REQUIRE(gl.layers.size() == 3);
    CHECK(gl.layers[0][0].n_sites == 6);
    CHECK(gl.layers[1][0].first == 3);

    CHECK_THROWS(staircase_architecture(4, 4, d2));
    CHECK_THROWS(brickwork_architecture(5, d2));
    CHECK_THROWS(glued_architecture(10, 4, d2));

    // depth 0 leaves the state untouched
    RngStream rng(3);
    StabilizerTableau t = StabilizerTableau::zero_state(4, d2);
    StabilizerTableau u = t;
    run_architecture(st, u, rng, 0);
    CHECK(u.same_state(t));
}

TEST_CASE("full staircase equals one global Clifford in distribution") {
    RngStream rng(2024);
    const int N = 8;
    const auto arch = staircase_architecture(N, N - 1, d2);
    EmpiricalDistribution hist;
    const int draws = 200000;
    Gf2Evolver ev(N);
    for (int i = 0; i < draws; ++i) hist.add(N - sample_g_packed(arch, rng, 1, ev));
    PmfOverSupport ref;
    const auto pg = clifford_pt_pmf(N, d2);
    for (int n = 0; n <= N; ++n) {
        ref.support.push_back(n);
        ref.probs.push_back(pg.probs[N - n]);
    }
    CHECK(tv_distance(hist, ref) < 0.012);
}

TEST_CASE("packed and generic evolution agree sample by sample") {
    for (auto arch : {staircase_architecture(8, 2, d2), brickwork_architecture(8, d2),
                      glued_architecture(8, 2, d2)}) {
        const int depth = arch.kind == ArchitectureKind::brickwork ? 4 : int(arch.layers.size());
        Gf2Evolver ev(8);
        for (int trial = 0; trial < 120; ++trial) {
            RngStream a = RngStream::for_chunk(55, trial);
            RngStream b = RngStream::for_chunk(55, trial);
            CHECK(sample_g_packed(arch, a, depth, ev) == sample_g_generic(arch, b, depth));
        }
    }
}

TEST_CASE("global sampler matches the gate-application path") {
    for (auto d : {d2, d3}) {
        for (int trial = 0; trial < 40; ++trial) {
            RngStream a = RngStream::for_chunk(808, trial);
            RngStream b = RngStream::for_chunk(808, trial);
            const int N = 5;
            const int g1 = sample_g_global(N, d, a);
            StabilizerTableau t = StabilizerTableau::zero_state(N, d);
            apply_gate(t, random_clifford(N, d, b), 0);
            CHECK(g1 == participation_entropy(t));
        }
    }
}

TEST_CASE("overlap_zero agrees with the dense oracle on random circuits") {
    for (auto [d, N] : std::vector<std::pair<PrimeModulus, int>>{{d2, 3}, {d3, 2}}) {
        RngStream rng(606 + d.value());
        for (int trial = 0; trial < 60; ++trial) {
            std::vector<std::pair<CliffordGate, int>> gates;
            StabilizerTableau t = StabilizerTableau::zero_state(N, d);
            const int depth = 1 + int(rng.bounded(5));
            for (int step = 0; step < depth; ++step) {
                const int n = 1 + int(rng.bounded(uint32_t(N)));
                const int first = int(rng.bounded(uint32_t(N - n + 1)));
                CliffordGate g = random_clifford(n, d, rng);
                apply_gate(t, g, first);
                gates.push_back({std::move(g), first});
            }
            const CMatrix u = circuit_to_unitary(gates, N, d);
            const double dense_w = std::pow(double(d.value()), N) * std::norm(u(0, 0));
            const OverlapSample s = overlap_zero(t);
            const double tab_w = s.in_support ? std::pow(double(d.value()), s.w_log_d) : 0.0;
            CHECK(std::abs(dense_w - tab_w) < 1e-6);
        }
    }
}

TEST_CASE("gate_to_unitary is unitary and realizes the tableau action") {
    RngStream rng(4242);
    for (auto d : {d2, d3}) {
        for (int trial = 0; trial < 15; ++trial) {
            const int n = 1 + int(rng.bounded(2));
            const CliffordGate g = random_clifford(n, d, rng);
            const CMatrix u = gate_to_unitary(g);
            const long long dim = u.rows();
            CHECK((u.adjoint() * u - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-9);
            // conjugation property for every basis generator
            for (int j = 0; j < 2 * n; ++j) {
                std::vector<uint8_t> a(n, 0), b(n, 0);
                if (j < n)
                    a[j] = 1;
                else
                    b[j - n] = 1;
                const CMatrix p = dense_pauli(a, b, 0, d);
                std::vector<uint8_t> ia(n), ib(n);
                for (int s = 0; s < n; ++s) {
                    ia[s] = g.symplectic.at(s, j);
                    ib[s] = g.symplectic.at(n + s, j);
                }
                const CMatrix img = dense_pauli(ia, ib, g.phase_vector[j], d);
                CHECK((u * p * u.adjoint() - img).cwiseAbs().maxCoeff() < 1e-9);
            }
        }
    }
}

TEST_CASE("dense statevector matches the circuit unitary for scrambled states") {
    RngStream rng(11);
    for (auto d : {d2, d3}) {
        for (int trial = 0; trial < 20; ++trial) {
            StabilizerTableau t = StabilizerTableau::zero_state(3, d);
            std::vector<std::pair<CliffordGate, int>> gates;
            for (int step = 0; step < 4; ++step) {
                const int n = 1 + int(rng.bounded(2));
                const int first = int(rng.bounded(uint32_t(3 - n + 1)));
                CliffordGate g = random_clifford(n, d, rng);
                apply_gate(t, g, first);
                gates.push_back({std::move(g), first});
            }
            const CVector psi = tableau_to_statevector(t);
            const CMatrix u = circuit_to_unitary(gates, 3, d);
            const CVector ref = u.col(0);
            CHECK(equal_up_to_phase(psi, ref, 1e-8));
        }
    }
}
