#include "doctest.h"

#include <cmath>

#include "cliffstat/replica.hpp"

using namespace cliffstat;

namespace {

const PrimeModulus d2(2), d3(3), d5(5);

double logd_pair_value(int k, PrimeModulus d, int N) {
    // depth-one brickwork: N/2 independent two-qudit averages
    return double(N / 2) * log_d_of(ipr_haar_clifford(k, 2, d), d);
}

}  // namespace

TEST_CASE("probability is conserved at k = 1") {
    const CommutantBasis basis = enumerate_sigma(1, d3);
    REQUIRE(basis.size() == 1);
    const BulkGate gate = build_bulk_gate(basis, d3);
    ReplicaMps mps = initial_state(8, basis, d3, {});
    const auto series = evolve(mps, gate, d3, 10, {});
    for (const auto& rec : series) CHECK(std::abs(rec.logd_e_ik) < 1e-10);
}

TEST_CASE("bulk gate row sums and composition identity") {
    for (auto [k, d] : std::vector<std::pair<int, PrimeModulus>>{{2, d2}, {3, d3}, {3, d5}}) {
        const CommutantBasis basis = enumerate_sigma(k, d);
        const int m = basis.size();
        const BulkGate gate = build_bulk_gate(basis, d);
        const int rd = gate.site_dim;

        // frame reproduces the single-site Gram and its boundary covector
        // pairs to 1 with every commutant vector
        const auto ge = gram_matrix(basis, 1);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const double gij = gate.frame.col(i).dot(gate.frame.col(j));
                CHECK(std::abs(gij - to_double(ge[i][j])) < 1e-8 * to_double(ge[i][i]));
            }
            CHECK(std::abs(gate.boundary_covector.dot(gate.frame.col(i)) - 1.0) < 1e-9);
        }

        // boundary contraction of the gate against the per-site covectors and
        // the uniform-coefficient input: G2^{-1} |Sigma| G1^2
        Eigen::VectorXd f2(rd * rd), u2(rd * rd);
        const Eigen::VectorXd win = gate.frame * Eigen::VectorXd::Ones(m);
        for (int a2 = 0; a2 < rd; ++a2)
            for (int b2 = 0; b2 < rd; ++b2) {
                f2(a2 * rd + b2) = gate.boundary_covector(a2) * gate.boundary_covector(b2);
                u2(a2 * rd + b2) = win(a2) * win(b2);
            }
        const double got = f2.dot(gate.w * u2);
        const double expect =
            to_double(wg_row_sum(2, k, d) * sigma_size(k, d) * gram_row_sum(1, k, d) *
                      gram_row_sum(1, k, d));
        CHECK(std::abs(got / expect - 1.0) < 1e-10);
        // and with Bell-pair style all-ones on both sides: |Sigma| Wg-row-sum
        const double both = f2.dot(gate.w * f2);
        CHECK(std::abs(both / to_double(sigma_size(k, d) * wg_row_sum(2, k, d)) - 1.0) < 1e-10);

        // two layers equal one layer followed by Gram reweighting: with
        // P = [w_s kron w_s], W = P Wg2 P^T and P^T P = G elementwise squared,
        // so W^2 = P (Wg2 (G o G) Wg2) P^T.
        const auto wge = gram_inverse_exact(basis, 2);
        Eigen::MatrixXd p(rd * rd, m), wg2(m, m), gg(m, m);
        for (int s = 0; s < m; ++s)
            for (int a2 = 0; a2 < rd; ++a2)
                for (int b2 = 0; b2 < rd; ++b2)
                    p(a2 * rd + b2, s) = gate.frame(a2, s) * gate.frame(b2, s);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                wg2(i, j) = to_double(wge[i][j]);
                gg(i, j) = to_double(ge[i][j] * ge[i][j]);
            }
        const Eigen::MatrixXd lhs = gate.w * gate.w;
        const Eigen::MatrixXd rhs = p * (wg2 * gg * wg2) * p.transpose();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * lhs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("depth one reproduces independent two-qudit averages") {
    for (auto [k, d] : std::vector<std::pair<int, PrimeModulus>>{{2, d2}, {3, d3}, {3, d5}}) {
        const CommutantBasis basis = enumerate_sigma(k, d);
        ReplicaMps mps = initial_state(12, basis, d, {});
        const double got = contract_log_d(mps, d);
        CHECK(std::abs(got - logd_pair_value(k, d, 12)) < 1e-10);
    }
}

TEST_CASE("k = 2 series equals the dense closed-form reference") {
    for (auto d : {d2, d3}) {
        const CommutantBasis basis = enumerate_sigma(2, d);
        const BulkGate gate = build_bulk_gate(basis, d);
        EvolveOptions opts;
        opts.truncation_cutoff = 0.0;
        ReplicaMps mps = initial_state(12, basis, d, {});
        const auto series = evolve(mps, gate, d, 30, opts);
        const auto ref = k2_dense_reference(12, d, 30);
        REQUIRE(series.size() == ref.size());
        for (size_t i = 0; i < series.size(); ++i)
            CHECK(std::abs(series[i].logd_e_ik - ref[i]) < 1e-12);
    }
}

TEST_CASE("clean evolution saturates to the stabilizer-ensemble value") {
    const CommutantBasis basis = enumerate_sigma(3, d3);
    const BulkGate gate = build_bulk_gate(basis, d3);
    ReplicaMps mps = initial_state(16, basis, d3, {});
    const auto series = evolve(mps, gate, d3, 30, {});
    const LogValue ref = ipr_haar_clifford_log(3, 16, d3);
    const auto delta = delta_s3(series, ref);

    CHECK(std::abs(delta.back()) < 1e-8);
    // monotone approach from t >= 2
    for (size_t i = 2; i < delta.size(); ++i) CHECK(delta[i] <= delta[i - 1] + 1e-12);
    // delta against itself is zero
    const auto zero = delta_s3({series.back()}, LogValue{series.back().logd_e_ik});
    CHECK(zero[0] == 0.0);
}

TEST_CASE("truncation insensitivity and bond saturation") {
    const CommutantBasis basis = enumerate_sigma(3, d3);
    const BulkGate gate = build_bulk_gate(basis, d3);

    EvolveOptions strict, loose;
    strict.truncation_cutoff = 1e-12;
    loose.truncation_cutoff = 1e-10;
    ReplicaMps m1 = initial_state(32, basis, d3, {});
    ReplicaMps m2 = initial_state(32, basis, d3, {});
    const auto s1 = evolve(m1, gate, d3, 16, strict);
    const auto s2 = evolve(m2, gate, d3, 16, loose);
    for (size_t i = 0; i < s1.size(); ++i)
        CHECK(std::abs(s1[i].logd_e_ik - s2[i].logd_e_ik) < 1e-8);

    // bond dimension settles after a transient
    ReplicaMps m3 = initial_state(64, basis, d3, {});
    const auto s3 = evolve(m3, gate, d3, 30, {});
    int bond_mid = 0, bond_late = 0;
    for (const auto& rec : s3) {
        if (rec.t >= 12 && rec.t <= 20) bond_mid = std::max(bond_mid, rec.max_bond);
        if (rec.t > 20) bond_late = std::max(bond_late, rec.max_bond);
    }
    CHECK(bond_late <= bond_mid);

    // the bond cap is enforced
    EvolveOptions capped;
    capped.bond_cap = 2;
    ReplicaMps m4 = initial_state(16, basis, d3, {});
    CHECK_THROWS(evolve(m4, gate, d3, 8, capped));
}

TEST_CASE("doping with |0> purities is exactly the clean network") {
    const CommutantBasis basis = enumerate_sigma(3, d3);
    std::map<int, std::vector<double>> doped;
    doped[0] = std::vector<double>(8, 1.0);
    doped[3] = std::vector<double>(8, 1.0);
    const ReplicaMps clean = initial_state(8, basis, d3, {});
    const ReplicaMps same = initial_state(8, basis, d3, doped);
    for (int site = 0; site < 8; ++site)
        for (int p = 0; p < clean.site_dim; ++p)
            CHECK((clean.a[site][p] - same.a[site][p]).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS(initial_state(7, basis, d3, {}));
    std::map<int, std::vector<double>> bad;
    bad[0] = std::vector<double>(5, 1.0);
    CHECK_THROWS(initial_state(8, basis, d3, bad));
}

TEST_CASE("doped evolution saturates to the doped global value") {
    const CommutantBasis basis = enumerate_sigma(3, d3);
    const BulkGate gate = build_bulk_gate(basis, d3);
    // magic-state purity vector: permutations 1, defects 2/3
    std::vector<double> zetas(8, 1.0);
    for (int i = basis.num_permutations; i < 8; ++i) zetas[i] = 2.0 / 3.0;
    std::map<int, std::vector<double>> doped;
    doped[0] = zetas;
    doped[1] = zetas;

    ReplicaMps mps = initial_state(16, basis, d3, doped);
    const auto series = evolve(mps, gate, d3, 30, {});
    const LogValue ref = ipr_doped_global(3, 16, d3, zetas, 2);
    const auto delta = delta_s3(series, ref);
    CHECK(std::abs(delta.back()) < 1e-4);

    // late-time value also matches the named qutrit specialization
    CHECK(std::abs(ipr_doped_global_qutrit_t(16, 2).log_d - ref.log_d) < 1e-14);
}
