#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cliffstat {

/// Prime local dimension. All finite-field arithmetic in the project is mod d.
class PrimeModulus {
  public:
    explicit PrimeModulus(int d) : d_(static_cast<uint8_t>(d)) {
        if (d < 2 || d > 251 || !is_prime(d)) {
            throw std::invalid_argument("PrimeModulus: d must be a small prime");
        }
    }

    uint8_t value() const { return d_; }

    bool operator==(const PrimeModulus& o) const { return d_ == o.d_; }
    bool operator!=(const PrimeModulus& o) const { return d_ != o.d_; }

  private:
    static bool is_prime(int n) {
        if (n < 2) return false;
        for (int p = 2; p * p <= n; ++p)
            if (n % p == 0) return false;
        return true;
    }

    uint8_t d_;
};

// Mod-d tables for the inner loops; d <= 5 is the supported hot range but the
// tables are built for any prime modulus on demand.
struct GfArith {
    uint8_t d;
    uint8_t add[256];  // flattened [a * d + b] for a,b < d
    uint8_t sub[256];
    uint8_t mul[256];
    uint8_t neg[16];
    uint8_t inv[16];  // inv[0] unused

    explicit GfArith(uint8_t dd);
};

const GfArith& gf_arith(uint8_t d);

/// Dense row-major matrix over Z_d. Entries are residues in [0, d).
class GfMatrix {
  public:
    GfMatrix() : rows_(0), cols_(0), d_(2) {}
    GfMatrix(int rows, int cols, PrimeModulus d)
        : rows_(rows), cols_(cols), d_(d.value()), e_(size_t(rows) * cols, 0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("GfMatrix: negative shape");
    }

    static GfMatrix identity(int n, PrimeModulus d) {
        GfMatrix m(n, n, d);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    uint8_t mod() const { return d_; }
    PrimeModulus modulus() const { return PrimeModulus(d_); }

    uint8_t& at(int i, int j) { return e_[size_t(i) * cols_ + j]; }
    uint8_t at(int i, int j) const { return e_[size_t(i) * cols_ + j]; }

    uint8_t* row(int i) { return e_.data() + size_t(i) * cols_; }
    const uint8_t* row(int i) const { return e_.data() + size_t(i) * cols_; }

    const std::vector<uint8_t>& entries() const { return e_; }
    std::vector<uint8_t>& entries() { return e_; }

    bool operator==(const GfMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && d_ == o.d_ && e_ == o.e_;
    }

    void validate() const {
        for (uint8_t v : e_)
            if (v >= d_) throw std::runtime_error("GfMatrix: entry out of range");
    }

  private:
    int rows_, cols_;
    uint8_t d_;
    std::vector<uint8_t> e_;
};

/// Rank over Z_d. Dispatches to the word-packed XOR path for d = 2.
int rank_gf(const GfMatrix& m);

/// Generic elimination rank, any prime d. Exposed so the packed d = 2 path can
/// be checked bit-for-bit against it.
int rank_gf_generic(const GfMatrix& m);

/// Packed GF(2) rank on 64-bit row words.
int rank_gf2_packed(const GfMatrix& m);

struct RrefResult {
    GfMatrix matrix;
    std::vector<int> pivots;
};

/// Unique reduced row echelon form; pivot search is first nonzero entry,
/// scanning columns left to right and rows top to bottom.
RrefResult rref_gf(const GfMatrix& m);

/// Basis of { v : m v = 0 }; size is cols - rank.
std::vector<std::vector<uint8_t>> kernel_basis_gf(const GfMatrix& m);

GfMatrix matmul_gf(const GfMatrix& a, const GfMatrix& b);

GfMatrix transpose_gf(const GfMatrix& m);

std::vector<uint8_t> matvec_gf(const GfMatrix& a, const std::vector<uint8_t>& v);

}  // namespace cliffstat
