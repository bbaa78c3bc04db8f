#include "doctest.h"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <cstdio>

#include "cliffstat/commutant.hpp"
#include "cliffstat/dense_oracle.hpp"
#include "cliffstat/rng.hpp"

using namespace cliffstat;

namespace {

const PrimeModulus d2(2), d3(3), d5(5);

std::vector<std::complex<double>> qutrit_t_state() {
    const double s = 1.0 / std::sqrt(3.0);
    const double pi = 3.14159265358979323846;
    return {std::complex<double>(s, 0.0), std::polar(s, 2.0 * pi / 9.0),
            std::polar(s, -2.0 * pi / 9.0)};
}

int span_rank(const std::vector<Eigen::MatrixXcd>& ops) {
    const int n = int(ops.size());
    const int dim2 = int(ops[0].rows() * ops[0].cols());
    Eigen::MatrixXcd m(n, dim2);
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < ops[i].rows(); ++r)
            for (int c = 0; c < ops[i].cols(); ++c) m(i, r * ops[i].cols() + c) = ops[i](r, c);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > 1e-9 * s(0)) ++rank;
    return rank;
}

}  // namespace

TEST_CASE("enumeration cardinalities match the closed form") {
    CHECK(enumerate_sigma(2, d2).size() == 2);
    CHECK(enumerate_sigma(2, d3).size() == 2);
    CHECK(enumerate_sigma(2, d5).size() == 2);
    CHECK(enumerate_sigma(3, d3).size() == 8);
    CHECK(enumerate_sigma(3, d5).size() == 12);
    CHECK(enumerate_sigma(4, d2).size() == 30);

    // qubits at k = 3: the commutant is exactly the six permutations
    const CommutantBasis q3 = enumerate_sigma(3, d2);
    CHECK(q3.size() == 6);
    CHECK(q3.num_permutations == 6);
    for (const auto& s : q3.subspaces) CHECK(s.is_permutation);
}

TEST_CASE("subspace structural invariants") {
    for (auto [k, d] : std::vector<std::pair<int, PrimeModulus>>{{2, d3}, {3, d3}, {3, d5}, {4, d2}}) {
        const CommutantBasis basis = enumerate_sigma(k, d);
        CHECK(basis.num_permutations == (k == 2 ? 2 : k == 3 ? 6 : 24));
        long expect_elems = 1;
        for (int i = 0; i < k; ++i) expect_elems *= d.value();
        for (const auto& s : basis.subspaces) {
            CHECK(s.contains_all_ones());
            CHECK(s.stochastic_condition_ok());
            CHECK(long(s.elements.size()) == expect_elems);
            CHECK(rank_gf(s.basis) == k);
            // closure under addition
            const GfArith& ar = gf_arith(d.value());
            for (int trial = 0; trial < 10; ++trial) {
                const auto& u = s.elements[trial % s.elements.size()];
                const auto& v = s.elements[(3 * trial + 1) % s.elements.size()];
                std::vector<uint8_t> sum(u.size());
                for (size_t i = 0; i < u.size(); ++i)
                    sum[i] = ar.add[u[i] * d.value() + v[i]];
                CHECK(std::find(s.elements.begin(), s.elements.end(), sum) != s.elements.end());
            }
        }
    }
}

TEST_CASE("permutation subspaces") {
    const auto id2 = permutation_subspace({0, 1}, 2, d3);
    const auto sw2 = permutation_subspace({1, 0}, 2, d3);
    // identity: (x1, x2, x1, x2); swap: (x1, x2, x2, x1)
    for (const auto& v : id2.elements) {
        CHECK(v[0] == v[2]);
        CHECK(v[1] == v[3]);
    }
    for (const auto& v : sw2.elements) {
        CHECK(v[0] == v[3]);
        CHECK(v[1] == v[2]);
    }

    // every permutation subspace shows up in the enumeration, flagged
    for (auto [k, d] : std::vector<std::pair<int, PrimeModulus>>{{3, d3}, {3, d5}}) {
        const CommutantBasis basis = enumerate_sigma(k, d);
        std::vector<int> perm = {0, 1, 2};
        int found = 0;
        do {
            const auto ps = permutation_subspace(perm, k, d);
            for (const auto& s : basis.subspaces)
                if (s.basis == ps.basis) {
                    CHECK(s.is_permutation);
                    ++found;
                }
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(found == 6);
    }

    CHECK_THROWS(permutation_subspace({0, 0}, 2, d3));
}

TEST_CASE("gram matrix entries and row sums") {
    for (auto [k, d] : std::vector<std::pair<int, PrimeModulus>>{{2, d2}, {3, d3}, {3, d5}, {4, d2}}) {
        const CommutantBasis basis = enumerate_sigma(k, d);
        for (int n = 1; n <= 4; ++n) {
            const auto g = gram_matrix(basis, n);
            Rational diag(1);
            for (long long i = 0; i < (long long)n * k; ++i) diag *= d.value();
            for (int i = 0; i < basis.size(); ++i) {
                CHECK(g[i][i] == diag);
                Rational row(0);
                for (int j = 0; j < basis.size(); ++j) row += g[i][j];
                CHECK(row == gram_row_sum(n, k, d));
            }
        }
    }

    // k = 2: the two subspaces intersect on the diagonal line
    const CommutantBasis k2 = enumerate_sigma(2, d3);
    CHECK(k2.intersection_dims[0][1] == 1);
    CHECK(gram_matrix(k2, 1)[0][1] == Rational(3));
}

TEST_CASE("weingarten matrix") {
    for (auto [k, d] : std::vector<std::pair<int, PrimeModulus>>{{2, d3}, {3, d3}, {3, d5}, {4, d2}}) {
        const CommutantBasis basis = enumerate_sigma(k, d);
        const int m = basis.size();
        for (int n = 1; n <= 4; ++n) {
            const auto ge = gram_matrix(basis, n);
            Eigen::MatrixXd g(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) g(i, j) = to_double(ge[i][j]);
            const Eigen::MatrixXd wg = weingarten_matrix(basis, n);

            // pseudo-inverse property
            CHECK((g * wg * g - g).cwiseAbs().maxCoeff() < 1e-9 * g.cwiseAbs().maxCoeff());

            // row sums match the closed form at every n (the all-ones vector
            // lies in the range of the Gram matrix)
            const double expect = to_double(wg_row_sum(n, k, d));
            for (int i = 0; i < m; ++i) {
                double row = 0.0;
                for (int j = 0; j < m; ++j) row += wg(i, j);
                CHECK(std::abs(row - expect) < 1e-10);
            }

            if (n >= k - 1) {
                CHECK((g * wg - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-9);
                // exact inverse agrees with the numeric pseudo-inverse
                const auto exact = gram_inverse_exact(basis, n);
                double diff = 0.0;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        diff = std::max(diff, std::abs(to_double(exact[i][j]) - wg(i, j)));
                CHECK(diff < 1e-12);
            }

            // moment identity: sum_{sigma, pi} Wg = |Sigma| / gram_row_sum
            double total = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) total += wg(i, j);
            CHECK(std::abs(total - to_double(sigma_size(k, d) * wg_row_sum(n, k, d))) < 1e-9);
        }
    }
    CHECK_THROWS(gram_inverse_exact(enumerate_sigma(3, d3), 1));  // rank deficient at n < k-1
}

TEST_CASE("q operator") {
    for (auto d : {d3, d5}) {
        const Eigen::MatrixXcd q = q_operator_matrix(d, 3);
        // trace d^2: only the identity Pauli contributes d^3 / d
        CHECK(std::abs(q.trace() - std::complex<double>(d.value() * d.value(), 0)) < 1e-9);

        RngStream rng(17 + d.value());
        for (int trial = 0; trial < 25; ++trial) {
            const CMatrix c = gate_to_unitary(random_clifford(1, d, rng));
            CMatrix c3 = Eigen::kroneckerProduct(c, c).eval();
            c3 = Eigen::kroneckerProduct(c3, c).eval();
            CHECK((q * c3 - c3 * q).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    CHECK_THROWS(q_operator_matrix(d2, 3));
}

TEST_CASE("defect operators complete the commutant span") {
    for (auto [d, expect_rank] : std::vector<std::pair<PrimeModulus, int>>{{d3, 7}, {d5, 11}}) {
        const CommutantBasis basis = enumerate_sigma(3, d);
        std::vector<Eigen::MatrixXcd> enumerated;
        for (const auto& s : basis.subspaces) enumerated.push_back(subspace_operator(s));
        CHECK(span_rank(enumerated) == expect_rank);

        const Eigen::MatrixXcd q = q_operator_matrix(d, 3);
        std::vector<Eigen::MatrixXcd> products;
        for (int i = 0; i < basis.num_permutations; ++i) {
            products.push_back(enumerated[i]);
            products.push_back(enumerated[i] * q);
        }
        CHECK(span_rank(products) == expect_rank);

        std::vector<Eigen::MatrixXcd> joint = enumerated;
        joint.insert(joint.end(), products.begin(), products.end());
        CHECK(span_rank(joint) == expect_rank);
    }
}

TEST_CASE("purities") {
    const CommutantBasis basis = enumerate_sigma(3, d3);

    // |0>: every purity is 1
    const PurityTable p0 = purities({1.0, 0.0, 0.0}, basis);
    for (double z : p0.zetas) CHECK(z == doctest::Approx(1.0).epsilon(1e-12));
    for (double m : p0.magics) CHECK(std::abs(m) < 1e-12);

    // permutation purities are 1 for any state
    RngStream rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::complex<double>> psi(3);
        double norm = 0.0;
        for (auto& a : psi) {
            a = {rng.real01() - 0.5, rng.real01() - 0.5};
            norm += std::norm(a);
        }
        for (auto& a : psi) a /= std::sqrt(norm);
        const PurityTable pt = purities(psi, basis);
        for (int i = 0; i < basis.num_permutations; ++i)
            CHECK(pt.zetas[i] == doctest::Approx(1.0).epsilon(1e-10));
        for (int i = basis.num_permutations; i < basis.size(); ++i) {
            CHECK(pt.zetas[i] > 0.0);
            CHECK(pt.zetas[i] <= 1.0);
        }
    }

    // qutrit magic state: both defect purities equal 2/3, cross-checked
    // against the dense replica-operator expectation values
    const auto t = qutrit_t_state();
    const PurityTable pt = purities(t, basis);
    Eigen::VectorXcd tv(3);
    for (int i = 0; i < 3; ++i) tv(i) = t[i];
    for (int i = 0; i < basis.size(); ++i) {
        const double dense = purity_dense(tv, 1, basis.subspaces[i]);
        CHECK(std::abs(pt.zetas[i] - dense) < 1e-12);
        if (i >= basis.num_permutations) {
            CHECK(pt.zetas[i] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
            CHECK(pt.magics[i] == doctest::Approx(-std::log(2.0 / 3.0)).epsilon(1e-12));
        }
    }

    CHECK_THROWS(purities({1.0, 1.0, 0.0}, basis));  // not normalized
}

TEST_CASE("purity additivity on product states") {
    const CommutantBasis basis = enumerate_sigma(3, d3);
    const auto t = qutrit_t_state();
    // |T> tensor |0> tensor |T>
    Eigen::VectorXcd psi(27);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                psi(a * 9 + b * 3 + c) = t[a] * (b == 0 ? 1.0 : 0.0) * t[c];
    const PurityTable single = purities(t, basis);
    for (int i = 0; i < basis.size(); ++i) {
        const double dense = purity_dense(psi, 3, basis.subspaces[i]);
        CHECK(std::abs(dense - single.zetas[i] * single.zetas[i]) < 1e-10);
    }
}

TEST_CASE("purities are Clifford invariant") {
    const CommutantBasis basis = enumerate_sigma(3, d3);
    const auto t = qutrit_t_state();
    Eigen::VectorXcd in(9);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) in(a * 3 + b) = t[a] * (b == 0 ? 1.0 : 0.0);
    RngStream rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix u = gate_to_unitary(random_clifford(2, d3, rng));
        const Eigen::VectorXcd out = u * in;
        for (const auto& s : basis.subspaces) {
            CHECK(std::abs(purity_dense(out, 2, s) - purity_dense(in, 2, s)) < 1e-10);
        }
    }
}

TEST_CASE("serialization round trip is byte stable") {
    const CommutantBasis basis = enumerate_sigma(3, d3);
    const std::string s1 = commutant_to_json(basis);
    const CommutantBasis back = commutant_from_json(s1);
    CHECK(back.k == basis.k);
    CHECK(back.d == basis.d);
    CHECK(back.size() == basis.size());
    for (int i = 0; i < basis.size(); ++i) {
        CHECK(back.subspaces[i].basis == basis.subspaces[i].basis);
        CHECK(back.subspaces[i].is_permutation == basis.subspaces[i].is_permutation);
    }
    CHECK(back.intersection_dims == basis.intersection_dims);
    CHECK(commutant_to_json(back) == s1);

    const std::string path = "/tmp/cliffstat_test_commutant.json";
    save_commutant(basis, path);
    const CommutantBasis loaded = load_commutant(path);
    CHECK(commutant_to_json(loaded) == s1);
    const CommutantBasis cached = load_or_enumerate(3, d3, path);
    CHECK(commutant_to_json(cached) == s1);
    std::remove(path.c_str());
}
