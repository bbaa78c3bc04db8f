#include "cliffstat/commutant.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "cliffstat/dense_oracle.hpp"

namespace cliffstat {

namespace {

using json = nlohmann::json;

// All d^k linear combinations of the basis rows.
std::vector<std::vector<uint8_t>> materialize(const GfMatrix& basis) {
    const int k = basis.rows();
    const int w = basis.cols();
    const uint8_t d = basis.mod();
    const GfArith& ar = gf_arith(d);
    long long count = 1;
    for (int i = 0; i < k; ++i) count *= d;
    std::vector<std::vector<uint8_t>> out;
    out.reserve(count);
    std::vector<uint8_t> coeff(k, 0);
    std::vector<uint8_t> v(w, 0);
    for (long long idx = 0; idx < count; ++idx) {
        long long rem = idx;
        std::fill(v.begin(), v.end(), 0);
        for (int i = 0; i < k; ++i) {
            coeff[i] = uint8_t(rem % d);
            rem /= d;
            if (coeff[i]) {
                const uint8_t c = coeff[i];
                for (int j = 0; j < w; ++j)
                    v[j] = ar.add[v[j] * d + ar.mul[c * d + basis.at(i, j)]];
            }
        }
        out.push_back(v);
    }
    return out;
}

// sum_i (x_i^2 - y_i^2) mod D on the canonical lifts {0..d-1} c Z.
bool condition_one(const std::vector<uint8_t>& v, int k, uint8_t d) {
    const int D = d == 2 ? 4 : d;
    int s = 0;
    for (int i = 0; i < k; ++i) s += int(v[i]) * v[i] - int(v[k + i]) * v[k + i];
    return ((s % D) + D) % D == 0;
}

GfMatrix canonical_basis(const GfMatrix& rows) {
    RrefResult rr = rref_gf(rows);
    // strip any zero rows (there are none for independent input, but keep the
    // canonical shape robust)
    int nonzero = 0;
    for (int i = 0; i < rr.matrix.rows(); ++i) {
        bool nz = false;
        for (int j = 0; j < rr.matrix.cols(); ++j) nz = nz || rr.matrix.at(i, j);
        if (nz) ++nonzero;
    }
    GfMatrix out(nonzero, rr.matrix.cols(), rows.modulus());
    for (int i = 0; i < nonzero; ++i)
        for (int j = 0; j < rr.matrix.cols(); ++j) out.at(i, j) = rr.matrix.at(i, j);
    return out;
}

bool basis_less(const GfMatrix& a, const GfMatrix& b) {
    return a.entries() < b.entries();
}

void next_permutation_words(int k, std::vector<std::vector<int>>& out) {
    std::vector<int> p(k);
    for (int i = 0; i < k; ++i) p[i] = i;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace

bool LagrangianSubspace::contains_all_ones() const {
    std::vector<uint8_t> ones(2 * k, 1);
    return std::find(elements.begin(), elements.end(), ones) != elements.end();
}

bool LagrangianSubspace::stochastic_condition_ok() const {
    for (const auto& v : elements)
        if (!condition_one(v, k, d)) return false;
    return true;
}

LagrangianSubspace permutation_subspace(const std::vector<int>& perm, int k, PrimeModulus d) {
    if (int(perm.size()) != k) throw std::invalid_argument("permutation_subspace: bad word");
    std::vector<bool> seen(k, false);
    for (int v : perm) {
        if (v < 0 || v >= k || seen[v]) throw std::invalid_argument("permutation_subspace: not a permutation");
        seen[v] = true;
    }
    // Row m: x_m = 1 together with y_{perm(m)} = 1.
    GfMatrix rows(k, 2 * k, d);
    for (int m = 0; m < k; ++m) {
        rows.at(m, m) = 1;
        rows.at(m, k + perm[m]) = 1;
    }
    LagrangianSubspace s;
    s.k = k;
    s.d = d.value();
    s.basis = canonical_basis(rows);
    s.elements = materialize(s.basis);
    s.is_permutation = true;
    s.perm_word = perm;
    return s;
}

CommutantBasis enumerate_sigma(int k, PrimeModulus d) {
    if (k < 1 || k > 4) throw std::invalid_argument("enumerate_sigma: supported range is k <= 4");
    if (d.value() != 2 && d.value() != 3 && d.value() != 5)
        throw std::invalid_argument("enumerate_sigma: supported d in {2, 3, 5}");
    const uint8_t dd = d.value();
    const int w = 2 * k;       // ambient width
    const int qw = 2 * k - 1;  // quotient by the all-ones line
    const int qdim = k - 1;

    std::vector<LagrangianSubspace> found;

    if (k == 1) {
        GfMatrix rows(1, 2, d);
        rows.at(0, 0) = 1;
        rows.at(0, 1) = 1;
        LagrangianSubspace s;
        s.k = 1;
        s.d = dd;
        s.basis = canonical_basis(rows);
        s.elements = materialize(s.basis);
        if (s.stochastic_condition_ok()) found.push_back(std::move(s));
    } else {
        // Subspaces through the all-ones vector correspond to (k-1)-dim
        // subspaces of the quotient, realized on the slice {last coord = 0}.
        // Enumerate those by reduced-echelon pivot patterns.
        std::vector<int> pivots(qdim);
        std::vector<int> comb(qdim);
        for (int i = 0; i < qdim; ++i) comb[i] = i;
        for (;;) {
            // free coordinates of the echelon pattern
            std::vector<std::pair<int, int>> free_cells;
            for (int row = 0; row < qdim; ++row) {
                for (int col = comb[row] + 1; col < qw; ++col) {
                    bool is_piv = false;
                    for (int r2 = 0; r2 < qdim; ++r2) is_piv = is_piv || comb[r2] == col;
                    if (!is_piv) free_cells.push_back({row, col});
                }
            }
            long long fills = 1;
            for (size_t i = 0; i < free_cells.size(); ++i) fills *= dd;
            for (long long f = 0; f < fills; ++f) {
                GfMatrix rows(k, w, d);
                // all-ones first row
                for (int j = 0; j < w; ++j) rows.at(0, j) = 1;
                long long rem = f;
                // quotient rows lifted with last coordinate zero
                for (int row = 0; row < qdim; ++row) rows.at(1 + row, comb[row]) = 1;
                for (const auto& [row, col] : free_cells) {
                    rows.at(1 + row, col) = uint8_t(rem % dd);
                    rem /= dd;
                }
                LagrangianSubspace s;
                s.k = k;
                s.d = dd;
                s.basis = canonical_basis(rows);
                if (s.basis.rows() != k) continue;  // defensive; construction is full rank
                s.elements = materialize(s.basis);
                if (!s.stochastic_condition_ok()) continue;
                found.push_back(std::move(s));
            }
            // next pivot combination
            int i = qdim - 1;
            while (i >= 0 && comb[i] == qw - qdim + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < qdim; ++j) comb[j] = comb[j - 1] + 1;
        }
    }

    const Rational expect = sigma_size(k, d);
    if (Rational(int(found.size())) != expect)
        throw std::runtime_error("enumerate_sigma: cardinality mismatch against the closed form");

    // Canonical order: permutations first, then defects by basis.
    std::vector<std::vector<int>> words;
    next_permutation_words(k, words);
    std::sort(words.begin(), words.end());

    CommutantBasis basis;
    basis.k = k;
    basis.d = dd;
    std::vector<bool> used(found.size(), false);
    for (const auto& word : words) {
        LagrangianSubspace ps = permutation_subspace(word, k, d);
        bool matched = false;
        for (size_t i = 0; i < found.size(); ++i) {
            if (!used[i] && found[i].basis == ps.basis) {
                used[i] = true;
                matched = true;
                break;
            }
        }
        if (!matched)
            throw std::runtime_error("enumerate_sigma: permutation subspace missing from enumeration");
        basis.subspaces.push_back(std::move(ps));
    }
    basis.num_permutations = int(basis.subspaces.size());

    std::vector<const LagrangianSubspace*> defects;
    for (size_t i = 0; i < found.size(); ++i)
        if (!used[i]) defects.push_back(&found[i]);
    std::sort(defects.begin(), defects.end(),
              [](const LagrangianSubspace* a, const LagrangianSubspace* b) {
                  return basis_less(a->basis, b->basis);
              });
    for (const LagrangianSubspace* p : defects) basis.subspaces.push_back(*p);

    // Pairwise intersection dimensions: dim a + dim b - dim(a + b).
    const int m = basis.size();
    basis.intersection_dims.assign(m, std::vector<int>(m, 0));
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            GfMatrix stack(2 * k, w, d);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < w; ++c) {
                    stack.at(r, c) = basis.subspaces[i].basis.at(r, c);
                    stack.at(k + r, c) = basis.subspaces[j].basis.at(r, c);
                }
            const int dim_sum = rank_gf(stack);
            basis.intersection_dims[i][j] = basis.intersection_dims[j][i] = 2 * k - dim_sum;
        }
    }
    return basis;
}

Eigen::MatrixXcd subspace_operator(const LagrangianSubspace& s) {
    long long dim = 1;
    for (int i = 0; i < s.k; ++i) dim *= s.d;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& v : s.elements) {
        long long row = 0, col = 0;
        for (int m = 0; m < s.k; ++m) {
            row = row * s.d + v[m];
            col = col * s.d + v[s.k + m];
        }
        a(row, col) += 1.0;
    }
    return a;
}

Eigen::MatrixXcd q_operator_matrix(PrimeModulus d, int k) {
    if (k != 3) throw std::invalid_argument("q_operator_matrix: built for k = 3");
    if (d.value() != 3 && d.value() != 5)
        throw std::invalid_argument("q_operator_matrix: qutrit/qupent only; qubits need k = 4");
    const int dd = d.value();
    const Eigen::MatrixXcd x = dense_x(d);
    const Eigen::MatrixXcd z = dense_z(d);
    const long long dim = (long long)dd * dd * dd;
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a = 0; a < dd; ++a) {
        for (int b = 0; b < dd; ++b) {
            Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dd, dd);
            for (int i = 0; i < a; ++i) p = x * p;
            for (int i = 0; i < b; ++i) p = p * z;  // X^a Z^b
            Eigen::MatrixXcd plast = Eigen::MatrixXcd::Identity(dd, dd);
            for (int i = 0; i < dd - 2; ++i) plast = plast * p;
            Eigen::MatrixXcd pp = Eigen::kroneckerProduct(p, p).eval();
            q += Eigen::kroneckerProduct(pp, plast).eval();
        }
    }
    return q / double(dd);
}

std::vector<std::vector<Rational>> gram_matrix(const CommutantBasis& basis, int n_sites) {
    const int m = basis.size();
    std::vector<std::vector<Rational>> g(m, std::vector<Rational>(m));
    const Rational dr(int(basis.d));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            Rational v(1);
            const long long e = (long long)n_sites * basis.intersection_dims[i][j];
            for (long long t = 0; t < e; ++t) v *= dr;
            g[i][j] = v;
        }
    }
    return g;
}

Eigen::MatrixXd weingarten_matrix(const CommutantBasis& basis, int n_sites) {
    const int m = basis.size();
    Eigen::MatrixXd g(m, m);
    const auto ge = gram_matrix(basis, n_sites);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = to_double(ge[i][j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double cutoff = 1e-12 * ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i)
        if (std::abs(ev(i)) > cutoff) inv(i) = 1.0 / ev(i);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

std::vector<std::vector<Rational>> gram_inverse_exact(const CommutantBasis& basis, int n_sites) {
    const int m = basis.size();
    auto a = gram_matrix(basis, n_sites);
    std::vector<std::vector<Rational>> inv(m, std::vector<Rational>(m, Rational(0)));
    for (int i = 0; i < m; ++i) inv[i][i] = 1;
    for (int c = 0; c < m; ++c) {
        int piv = -1;
        for (int r = c; r < m; ++r) {
            if (a[r][c] != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) throw std::runtime_error("gram_inverse_exact: singular Gram matrix");
        std::swap(a[c], a[piv]);
        std::swap(inv[c], inv[piv]);
        const Rational scale = a[c][c];
        for (int j = 0; j < m; ++j) {
            a[c][j] /= scale;
            inv[c][j] /= scale;
        }
        for (int r = 0; r < m; ++r) {
            if (r == c || a[r][c] == 0) continue;
            const Rational f = a[r][c];
            for (int j = 0; j < m; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

PurityTable purities(const std::vector<std::complex<double>>& state, const CommutantBasis& basis) {
    const int dd = basis.d;
    if (int(state.size()) != dd) throw std::invalid_argument("purities: state dimension mismatch");
    double norm = 0.0;
    for (const auto& c : state) norm += std::norm(c);
    if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument("purities: state not normalized");

    PurityTable out;
    out.state = state;
    for (const auto& s : basis.subspaces) {
        std::complex<double> z = 0.0;
        for (const auto& v : s.elements) {
            std::complex<double> term = 1.0;
            for (int m = 0; m < s.k; ++m) term *= state[v[m]] * std::conj(state[v[s.k + m]]);
            z += term;
        }
        if (std::abs(z.imag()) > 1e-12)
            throw std::runtime_error("purities: non-real generalized purity");
        const double zr = z.real();
        if (!(zr > 0.0) || zr > 1.0 + 1e-12)
            throw std::runtime_error("purities: purity outside (0, 1]");
        out.zetas.push_back(std::min(zr, 1.0));
        out.magics.push_back(-std::log(std::min(zr, 1.0)));
    }
    return out;
}

double purity_dense(const Eigen::VectorXcd& state, int n_qudits, const LagrangianSubspace& s) {
    const int dd = s.d;
    const int k = s.k;
    long long dim = 1;
    for (int i = 0; i < n_qudits; ++i) dim *= dd;
    if (state.size() != dim) throw std::invalid_argument("purity_dense: dimension mismatch");
    const long long elems = (long long)s.elements.size();

    // One commutant element per site; accumulate the k replica amplitudes.
    std::vector<long long> pick(n_qudits, 0);
    std::complex<double> total = 0.0;
    for (;;) {
        std::complex<double> term = 1.0;
        for (int m = 0; m < k; ++m) {
            long long row = 0, col = 0;
            for (int site = 0; site < n_qudits; ++site) {
                const auto& v = s.elements[pick[site]];
                row = row * dd + v[m];
                col = col * dd + v[k + m];
            }
            term *= state(row) * std::conj(state(col));
        }
        total += term;
        int site = n_qudits - 1;
        while (site >= 0 && pick[site] == elems - 1) {
            pick[site] = 0;
            --site;
        }
        if (site < 0) break;
        ++pick[site];
    }
    if (std::abs(total.imag()) > 1e-10)
        throw std::runtime_error("purity_dense: non-real generalized purity");
    return total.real();
}

std::string commutant_to_json(const CommutantBasis& basis) {
    json j;
    j["k"] = basis.k;
    j["d"] = int(basis.d);
    j["num_permutations"] = basis.num_permutations;
    json subs = json::array();
    for (const auto& s : basis.subspaces) {
        json js;
        js["is_permutation"] = s.is_permutation;
        js["perm_word"] = s.perm_word;
        json rows = json::array();
        for (int r = 0; r < s.basis.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < s.basis.cols(); ++c) row.push_back(int(s.basis.at(r, c)));
            rows.push_back(row);
        }
        js["basis"] = rows;
        subs.push_back(js);
    }
    j["subspaces"] = subs;
    j["intersection_dims"] = basis.intersection_dims;
    return j.dump(2) + "\n";
}

CommutantBasis commutant_from_json(const std::string& text) {
    const json j = json::parse(text);
    CommutantBasis basis;
    basis.k = j.at("k").get<int>();
    basis.d = uint8_t(j.at("d").get<int>());
    basis.num_permutations = j.at("num_permutations").get<int>();
    const PrimeModulus d(basis.d);
    for (const auto& js : j.at("subspaces")) {
        LagrangianSubspace s;
        s.k = basis.k;
        s.d = basis.d;
        const auto& rows = js.at("basis");
        s.basis = GfMatrix(int(rows.size()), 2 * basis.k, d);
        for (size_t r = 0; r < rows.size(); ++r)
            for (int c = 0; c < 2 * basis.k; ++c) s.basis.at(int(r), c) = uint8_t(rows[r][c].get<int>());
        s.is_permutation = js.at("is_permutation").get<bool>();
        s.perm_word = js.at("perm_word").get<std::vector<int>>();
        s.elements = materialize(s.basis);
        if (!s.contains_all_ones() || !s.stochastic_condition_ok())
            throw std::runtime_error("commutant_from_json: invalid subspace in cache");
        basis.subspaces.push_back(std::move(s));
    }
    basis.intersection_dims = j.at("intersection_dims").get<std::vector<std::vector<int>>>();
    return basis;
}

void save_commutant(const CommutantBasis& basis, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_commutant: cannot open " + path);
    f << commutant_to_json(basis);
}

CommutantBasis load_commutant(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_commutant: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return commutant_from_json(text);
}

CommutantBasis load_or_enumerate(int k, PrimeModulus d, const std::string& cache_path) {
    if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
        CommutantBasis b = load_commutant(cache_path);
        if (b.k == k && b.d == d.value()) return b;
    }
    CommutantBasis b = enumerate_sigma(k, d);
    if (!cache_path.empty()) save_commutant(b, cache_path);
    return b;
}

}  // namespace cliffstat
