#include "doctest.h"

#include "cliffstat/gf.hpp"
#include "cliffstat/qanalog.hpp"
#include "cliffstat/rng.hpp"

using namespace cliffstat;

namespace {

GfMatrix from_rows(const std::vector<std::vector<int>>& rows, int d) {
    GfMatrix m(int(rows.size()), rows.empty() ? 0 : int(rows[0].size()), PrimeModulus(d));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m.at(int(i), int(j)) = uint8_t(rows[i][j]);
    return m;
}

GfMatrix random_matrix(int rows, int cols, int d, RngStream& rng) {
    GfMatrix m(rows, cols, PrimeModulus(d));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.at(i, j) = rng.residue(uint8_t(d));
    return m;
}

}  // namespace

TEST_CASE("prime modulus validation") {
    CHECK_NOTHROW(PrimeModulus(2));
    CHECK_NOTHROW(PrimeModulus(3));
    CHECK_NOTHROW(PrimeModulus(5));
    CHECK_NOTHROW(PrimeModulus(101));
    CHECK_THROWS(PrimeModulus(1));
    CHECK_THROWS(PrimeModulus(4));
    CHECK_THROWS(PrimeModulus(9));
}

TEST_CASE("rank basics") {
    CHECK(rank_gf(GfMatrix::identity(3, PrimeModulus(2))) == 3);
    CHECK(rank_gf(GfMatrix(2, 2, PrimeModulus(3))) == 0);
    CHECK(rank_gf(from_rows({{1, 2}, {2, 4}}, 5)) == 1);
    CHECK(rank_gf(GfMatrix(0, 0, PrimeModulus(2))) == 0);
}

TEST_CASE("rref examples") {
    const auto r1 = rref_gf(from_rows({{2, 2}, {1, 1}}, 3));
    CHECK(r1.matrix == from_rows({{1, 1}, {0, 0}}, 3));
    CHECK(r1.pivots == std::vector<int>{0});

    const auto id = GfMatrix::identity(4, PrimeModulus(5));
    const auto r2 = rref_gf(id);
    CHECK(r2.matrix == id);
    CHECK(r2.pivots == std::vector<int>{0, 1, 2, 3});

    const auto z = GfMatrix(3, 3, PrimeModulus(2));
    const auto r3 = rref_gf(z);
    CHECK(r3.matrix == z);
    CHECK(r3.pivots.empty());
}

TEST_CASE("kernel basis examples") {
    const auto k1 = kernel_basis_gf(from_rows({{1, 1}}, 2));
    REQUIRE(k1.size() == 1);
    CHECK(k1[0] == std::vector<uint8_t>{1, 1});

    CHECK(kernel_basis_gf(GfMatrix::identity(4, PrimeModulus(3))).empty());

    // one row over Z_3^3: brute-force count of annihilated vectors is 9
    const auto m = from_rows({{1, 2, 0}}, 3);
    const auto kb = kernel_basis_gf(m);
    REQUIRE(kb.size() == 2);
    int annihilated = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                if ((a + 2 * b) % 3 == 0) ++annihilated;
    CHECK(annihilated == 9);
    for (const auto& v : kb) {
        const auto mv = matvec_gf(m, v);
        for (uint8_t e : mv) CHECK(e == 0);
    }
}

TEST_CASE("matmul examples") {
    const auto m = from_rows({{1, 2}, {0, 3}}, 5);
    CHECK(matmul_gf(GfMatrix::identity(2, PrimeModulus(5)), m) == m);

    const auto t = from_rows({{1, 1}, {0, 1}}, 2);
    CHECK(matmul_gf(t, t) == GfMatrix::identity(2, PrimeModulus(2)));

    const auto z = GfMatrix(2, 2, PrimeModulus(5));
    CHECK(matmul_gf(m, z) == z);

    CHECK_THROWS(matmul_gf(from_rows({{1}}, 2), from_rows({{1, 0}, {0, 1}}, 2)));
}

TEST_CASE("randomized rank properties") {
    RngStream rng(12345);
    for (int d : {2, 3, 5}) {
        for (int trial = 0; trial < 60; ++trial) {
            const int rows = 1 + int(rng.bounded(7));
            const int cols = 1 + int(rng.bounded(7));
            const GfMatrix m = random_matrix(rows, cols, d, rng);
            const int rk = rank_gf(m);
            CHECK(rk == rank_gf(transpose_gf(m)));
            CHECK(rk == rank_gf(rref_gf(m).matrix));
            for (const auto& v : kernel_basis_gf(m)) {
                for (uint8_t e : matvec_gf(m, v)) CHECK(e == 0);
            }
            CHECK(int(kernel_basis_gf(m).size()) == cols - rk);
        }
    }
}

TEST_CASE("packed GF(2) rank agrees with the generic path") {
    RngStream rng(777);
    for (int trial = 0; trial < 300; ++trial) {
        const int rows = 1 + int(rng.bounded(70));
        const int cols = 1 + int(rng.bounded(70));
        const GfMatrix m = random_matrix(rows, cols, 2, rng);
        CHECK(rank_gf2_packed(m) == rank_gf_generic(m));
    }
}

TEST_CASE("echelon form count matches the Gaussian binomial") {
    // Enumerate matrices in reduced echelon form with g nonzero rows over N
    // columns by pivot pattern, and compare with the subspace count.
    for (int d : {2, 3}) {
        for (int N = 1; N <= 5; ++N) {
            for (int g = 0; g <= N; ++g) {
                long long count = 0;
                std::vector<int> comb(g);
                for (int i = 0; i < g; ++i) comb[i] = i;
                if (g == 0) {
                    count = 1;
                } else {
                    for (;;) {
                        int free_cells = 0;
                        for (int row = 0; row < g; ++row)
                            for (int col = comb[row] + 1; col < N; ++col) {
                                bool piv = false;
                                for (int r2 = 0; r2 < g; ++r2) piv = piv || comb[r2] == col;
                                if (!piv) ++free_cells;
                            }
                        long long fills = 1;
                        for (int i = 0; i < free_cells; ++i) fills *= d;
                        count += fills;
                        int i = g - 1;
                        while (i >= 0 && comb[i] == N - g + i) --i;
                        if (i < 0) break;
                        ++comb[i];
                        for (int j = i + 1; j < g; ++j) comb[j] = comb[j - 1] + 1;
                    }
                }
                CHECK(Rational(long(count)) == q_binomial(N, g, PrimeModulus(d)));
            }
        }
    }
}
