#include "cliffstat/gf.hpp"

#include <array>
#include <mutex>

namespace cliffstat {

GfArith::GfArith(uint8_t dd) : d(dd) {
    if (d > 15) throw std::invalid_argument("GfArith: table path supports d <= 15");
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            add[a * d + b] = uint8_t((a + b) % d);
            sub[a * d + b] = uint8_t((a - b + d) % d);
            mul[a * d + b] = uint8_t((a * b) % d);
        }
        neg[a] = uint8_t((d - a) % d);
    }
    inv[0] = 0;
    for (int a = 1; a < d; ++a) {
        for (int b = 1; b < d; ++b) {
            if ((a * b) % d == 1) {
                inv[a] = uint8_t(b);
                break;
            }
        }
    }
}

const GfArith& gf_arith(uint8_t d) {
    static std::array<const GfArith*, 16> cache{};
    static std::mutex mu;
    if (d >= 16) throw std::invalid_argument("gf_arith: d out of range");
    const GfArith* p = cache[d];
    if (!p) {
        std::lock_guard<std::mutex> lock(mu);
        if (!cache[d]) cache[d] = new GfArith(d);
        p = cache[d];
    }
    return *p;
}

int rank_gf_generic(const GfMatrix& m) {
    GfMatrix a = m;
    const GfArith& ar = gf_arith(a.mod());
    const int rows = a.rows(), cols = a.cols();
    const uint8_t d = a.mod();
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i) {
            if (a.at(i, c) != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        if (piv != r) {
            for (int j = c; j < cols; ++j) std::swap(a.at(r, j), a.at(piv, j));
        }
        const uint8_t pinv = ar.inv[a.at(r, c)];
        for (int i = r + 1; i < rows; ++i) {
            const uint8_t v = a.at(i, c);
            if (v == 0) continue;
            const uint8_t f = ar.mul[v * d + pinv];
            uint8_t* ri = a.row(i);
            const uint8_t* rr = a.row(r);
            for (int j = c; j < cols; ++j) ri[j] = ar.sub[ri[j] * d + ar.mul[f * d + rr[j]]];
        }
        ++r;
    }
    return r;
}

int rank_gf2_packed(const GfMatrix& m) {
    if (m.mod() != 2) throw std::invalid_argument("rank_gf2_packed: modulus must be 2");
    const int rows = m.rows(), cols = m.cols();
    const int words = (cols + 63) / 64;
    std::vector<uint64_t> w(size_t(rows) * words, 0);
    for (int i = 0; i < rows; ++i) {
        const uint8_t* src = m.row(i);
        uint64_t* dst = w.data() + size_t(i) * words;
        for (int j = 0; j < cols; ++j)
            if (src[j]) dst[j >> 6] |= (1ULL << (j & 63));
    }
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        const int wi = c >> 6;
        const uint64_t bit = 1ULL << (c & 63);
        int piv = -1;
        for (int i = r; i < rows; ++i) {
            if (w[size_t(i) * words + wi] & bit) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        if (piv != r) {
            for (int k = 0; k < words; ++k)
                std::swap(w[size_t(r) * words + k], w[size_t(piv) * words + k]);
        }
        for (int i = r + 1; i < rows; ++i) {
            if (w[size_t(i) * words + wi] & bit) {
                uint64_t* ri = w.data() + size_t(i) * words;
                const uint64_t* rr = w.data() + size_t(r) * words;
                for (int k = wi; k < words; ++k) ri[k] ^= rr[k];
            }
        }
        ++r;
    }
    return r;
}

int rank_gf(const GfMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    if (m.mod() == 2) return rank_gf2_packed(m);
    return rank_gf_generic(m);
}

RrefResult rref_gf(const GfMatrix& m) {
    RrefResult out{m, {}};
    GfMatrix& a = out.matrix;
    const GfArith& ar = gf_arith(a.mod());
    const int rows = a.rows(), cols = a.cols();
    const uint8_t d = a.mod();
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i) {
            if (a.at(i, c) != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        if (piv != r) {
            for (int j = 0; j < cols; ++j) std::swap(a.at(r, j), a.at(piv, j));
        }
        const uint8_t pinv = ar.inv[a.at(r, c)];
        if (pinv != 1) {
            uint8_t* rr = a.row(r);
            for (int j = 0; j < cols; ++j) rr[j] = ar.mul[rr[j] * d + pinv];
        }
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            const uint8_t f = a.at(i, c);
            if (f == 0) continue;
            uint8_t* ri = a.row(i);
            const uint8_t* rr = a.row(r);
            for (int j = 0; j < cols; ++j) ri[j] = ar.sub[ri[j] * d + ar.mul[f * d + rr[j]]];
        }
        out.pivots.push_back(c);
        ++r;
    }
    return out;
}

std::vector<std::vector<uint8_t>> kernel_basis_gf(const GfMatrix& m) {
    const RrefResult rr = rref_gf(m);
    const GfArith& ar = gf_arith(m.mod());
    const int cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (int p : rr.pivots) is_pivot[p] = true;

    std::vector<std::vector<uint8_t>> basis;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<uint8_t> v(cols, 0);
        v[f] = 1;
        for (size_t i = 0; i < rr.pivots.size(); ++i) {
            v[rr.pivots[i]] = ar.neg[rr.matrix.at(int(i), f)];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

GfMatrix matmul_gf(const GfMatrix& a, const GfMatrix& b) {
    if (a.cols() != b.rows() || a.mod() != b.mod())
        throw std::invalid_argument("matmul_gf: shape or modulus mismatch");
    const GfArith& ar = gf_arith(a.mod());
    const uint8_t d = a.mod();
    GfMatrix c(a.rows(), b.cols(), a.modulus());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const uint8_t f = a.at(i, k);
            if (f == 0) continue;
            const uint8_t* bk = b.row(k);
            uint8_t* ci = c.row(i);
            for (int j = 0; j < b.cols(); ++j) ci[j] = ar.add[ci[j] * d + ar.mul[f * d + bk[j]]];
        }
    }
    return c;
}

GfMatrix transpose_gf(const GfMatrix& m) {
    GfMatrix t(m.cols(), m.rows(), m.modulus());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) t.at(j, i) = m.at(i, j);
    return t;
}

std::vector<uint8_t> matvec_gf(const GfMatrix& a, const std::vector<uint8_t>& v) {
    if (int(v.size()) != a.cols()) throw std::invalid_argument("matvec_gf: shape mismatch");
    const GfArith& ar = gf_arith(a.mod());
    const uint8_t d = a.mod();
    std::vector<uint8_t> out(a.rows(), 0);
    for (int i = 0; i < a.rows(); ++i) {
        uint8_t acc = 0;
        const uint8_t* ri = a.row(i);
        for (int j = 0; j < a.cols(); ++j) acc = ar.add[acc * d + ar.mul[ri[j] * d + v[j]]];
        out[i] = acc;
    }
    return out;
}

}  // namespace cliffstat
