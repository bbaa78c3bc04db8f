#include "cliffstat/tableau.hpp"

#include <algorithm>
#include <stdexcept>

namespace cliffstat {

namespace {

// Symplectic form <u, v> = sum_i u_a[i] v_b[i] - u_b[i] v_a[i] over Z_d,
// on vectors laid out (a-part | b-part).
uint8_t symp_form(const std::vector<uint8_t>& u, const std::vector<uint8_t>& v, uint8_t d) {
    const int n = int(u.size()) / 2;
    int s = 0;
    for (int i = 0; i < n; ++i) s += int(u[i]) * v[n + i] - int(u[n + i]) * v[i];
    s %= d;
    if (s < 0) s += d;
    return uint8_t(s);
}

struct Transvection {
    std::vector<uint8_t> h;
    uint8_t c;
};

void apply_transvection(std::vector<uint8_t>& x, const Transvection& t, uint8_t d) {
    const uint8_t s = symp_form(x, t.h, d);
    if (s == 0) return;
    const GfArith& ar = gf_arith(d);
    const uint8_t f = ar.mul[t.c * d + s];
    if (f == 0) return;
    for (size_t i = 0; i < x.size(); ++i) x[i] = ar.add[x[i] * d + ar.mul[f * d + t.h[i]]];
}

std::vector<uint8_t> sub_vec(const std::vector<uint8_t>& u, const std::vector<uint8_t>& v,
                             uint8_t d) {
    const GfArith& ar = gf_arith(d);
    std::vector<uint8_t> out(u.size());
    for (size_t i = 0; i < u.size(); ++i) out[i] = ar.sub[u[i] * d + v[i]];
    return out;
}

// Chain of at most two transvections mapping u to v, both nonzero. Vectors
// supported on a coordinate set S stay supported on S.
void chain_to(std::vector<Transvection>& out, const std::vector<uint8_t>& u,
              const std::vector<uint8_t>& v, uint8_t d, const std::vector<int>& support,
              RngStream& rng) {
    if (u == v) return;
    const GfArith& ar = gf_arith(d);
    const uint8_t beta = symp_form(u, v, d);
    if (beta != 0) {
        out.push_back({sub_vec(v, u, d), ar.inv[beta]});
        return;
    }
    // <u, v> = 0: go through an intermediate w with <u,w> != 0 and <v,w> != 0.
    std::vector<uint8_t> w(u.size(), 0);
    for (;;) {
        for (int i : support) w[i] = rng.residue(d);
        if (symp_form(u, w, d) != 0 && symp_form(v, w, d) != 0) break;
    }
    out.push_back({sub_vec(w, u, d), ar.inv[symp_form(u, w, d)]});
    out.push_back({sub_vec(v, w, d), ar.inv[symp_form(w, v, d)]});
}

// Chain fixing e_j that maps e_{n+j} to w, where <e_j, w> = 1.
void chain_partner(std::vector<Transvection>& out, int j, int n, const std::vector<uint8_t>& w,
                   uint8_t d, const std::vector<int>& support, RngStream& rng) {
    const GfArith& ar = gf_arith(d);
    std::vector<uint8_t> enj(2 * n, 0);
    enj[n + j] = 1;
    if (w == enj) return;
    const uint8_t beta = symp_form(enj, w, d);
    if (beta != 0) {
        out.push_back({sub_vec(w, enj, d), ar.inv[beta]});
        return;
    }
    // Intermediate u' with <e_j,u'> = 1 (so both transvection directions keep
    // e_j fixed), <e_{n+j},u'> != 0 and <w,u'> != 0.
    std::vector<uint8_t> u(2 * n, 0);
    for (;;) {
        for (int i : support) u[i] = rng.residue(d);
        u[n + j] = 1;
        if (u[j] != 0 && symp_form(w, u, d) != 0) break;
    }
    out.push_back({sub_vec(u, enj, d), ar.inv[symp_form(enj, u, d)]});
    out.push_back({sub_vec(w, u, d), ar.inv[symp_form(u, w, d)]});
}

// Accumulator for a product of Pauli strings restricted to a gate window.
struct PauliWindow {
    int m;
    uint8_t d;
    int D;
    int ru;  // tau units picked up per (Z, X) swap
    std::vector<uint8_t> a, b;
    int phase;

    PauliWindow(int m_, uint8_t d_)
        : m(m_), d(d_), D(phase_modulus(d_)), ru(reorder_phase_unit(d_)), a(m_, 0), b(m_, 0),
          phase(0) {}

    // Right-multiply by tau^p X^{wa} Z^{wb}.
    void mul(const uint8_t* wa, const uint8_t* wb, int p) {
        int cross = 0;
        for (int t = 0; t < m; ++t) cross += int(b[t]) * wa[t];
        phase = (phase + p + ru * cross) % D;
        const GfArith& ar = gf_arith(d);
        for (int t = 0; t < m; ++t) {
            a[t] = ar.add[a[t] * d + wa[t]];
            b[t] = ar.add[b[t] * d + wb[t]];
        }
    }
};

// Image of the window Pauli (a_in | b_in) under the gate, as exponents plus
// the accumulated phase increment.
void gate_image(const CliffordGate& g, const uint8_t* a_in, const uint8_t* b_in, PauliWindow& acc) {
    const int m = g.n_sites;
    std::vector<uint8_t> col_a(m), col_b(m);
    for (int s = 0; s < m; ++s) {
        for (int rep = 0; rep < a_in[s]; ++rep) {
            for (int t = 0; t < m; ++t) {
                col_a[t] = g.symplectic.at(t, s);
                col_b[t] = g.symplectic.at(m + t, s);
            }
            acc.mul(col_a.data(), col_b.data(), g.phase_vector[s]);
        }
        for (int rep = 0; rep < b_in[s]; ++rep) {
            for (int t = 0; t < m; ++t) {
                col_a[t] = g.symplectic.at(t, m + s);
                col_b[t] = g.symplectic.at(m + t, m + s);
            }
            acc.mul(col_a.data(), col_b.data(), g.phase_vector[m + s]);
        }
    }
}

// Full-width Pauli product accumulator used by canonicalize / overlap_zero.
struct PauliRow {
    std::vector<uint8_t> a, b;
    int phase = 0;

    static PauliRow identity(int n) { return PauliRow{std::vector<uint8_t>(n, 0), std::vector<uint8_t>(n, 0), 0}; }
};

void row_mul(PauliRow& acc, const uint8_t* wa, const uint8_t* wb, int p, uint8_t d) {
    const int D = phase_modulus(d);
    const int ru = reorder_phase_unit(d);
    int cross = 0;
    const int n = int(acc.a.size());
    for (int t = 0; t < n; ++t) cross += int(acc.b[t]) * wa[t];
    acc.phase = (acc.phase + p + ru * cross) % D;
    const GfArith& ar = gf_arith(d);
    for (int t = 0; t < n; ++t) {
        acc.a[t] = ar.add[acc.a[t] * d + wa[t]];
        acc.b[t] = ar.add[acc.b[t] * d + wb[t]];
    }
}

void row_mul_tableau_row(PauliRow& acc, const StabilizerTableau& t, int row, int times) {
    for (int rep = 0; rep < times; ++rep)
        row_mul(acc, t.x_block.row(row), t.z_block.row(row), t.phases[row], t.d);
}

}  // namespace

bool CliffordGate::symplectic_ok() const {
    const int n2 = 2 * n_sites;
    if (symplectic.rows() != n2 || symplectic.cols() != n2) return false;
    std::vector<std::vector<uint8_t>> cols(n2, std::vector<uint8_t>(n2));
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n2; ++i) cols[j][i] = symplectic.at(i, j);
    for (int i = 0; i < n2; ++i) {
        for (int j = 0; j < n2; ++j) {
            int expect = 0;
            if (j == i + n_sites) expect = 1;
            if (j + n_sites == i) expect = d - 1;  // -1 mod d
            if (symp_form(cols[i], cols[j], d) != expect) return false;
        }
    }
    return true;
}

CliffordGate identity_gate(int n_sites, PrimeModulus d) {
    CliffordGate g;
    g.n_sites = n_sites;
    g.d = d.value();
    g.symplectic = GfMatrix::identity(2 * n_sites, d);
    g.phase_vector.assign(2 * n_sites, 0);
    return g;
}

CliffordGate named_gate(GateName name, PrimeModulus d) {
    const uint8_t dd = d.value();
    switch (name) {
        case GateName::H: {
            // X -> Z^{-1}, Z -> X, no phases.
            CliffordGate g = identity_gate(1, d);
            g.symplectic.at(0, 0) = 0;
            g.symplectic.at(1, 0) = uint8_t(dd - 1);
            g.symplectic.at(0, 1) = 1;
            g.symplectic.at(1, 1) = 0;
            return g;
        }
        case GateName::S: {
            // Qubits: X -> i XZ (Y); odd d: X -> omega X Z^{-1}. Z fixed.
            CliffordGate g = identity_gate(1, d);
            g.symplectic.at(1, 0) = dd == 2 ? 1 : uint8_t(dd - 1);
            g.phase_vector[0] = 1;
            return g;
        }
        case GateName::CADD: {
            // X1 -> X1 X2, X2 -> X2, Z1 -> Z1, Z2 -> Z1^{-1} Z2.
            CliffordGate g = identity_gate(2, d);
            g.symplectic.at(1, 0) = 1;
            g.symplectic.at(2, 3) = uint8_t(dd - 1);
            return g;
        }
    }
    throw std::invalid_argument("named_gate: unknown gate");
}

GfMatrix random_symplectic(int n, PrimeModulus d, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("random_symplectic: n must be >= 1");
    const uint8_t dd = d.value();
    GfMatrix m = GfMatrix::identity(2 * n, d);

    std::vector<Transvection> chain;
    std::vector<uint8_t> x(2 * n), z(2 * n), ej(2 * n), w(2 * n);
    for (int j = n - 1; j >= 0; --j) {
        // Active coordinates for this step.
        std::vector<int> support;
        for (int i = j; i < n; ++i) support.push_back(i);
        for (int i = n + j; i < 2 * n; ++i) support.push_back(i);

        // Uniform nonzero image for the j-th X generator.
        std::fill(x.begin(), x.end(), 0);
        for (;;) {
            bool nz = false;
            for (int i : support) {
                x[i] = rng.residue(dd);
                nz = nz || x[i];
            }
            if (nz) break;
        }
        // Uniform partner image with <x, z> = 1.
        std::fill(z.begin(), z.end(), 0);
        int pivot = -1;
        for (int i : support) z[i] = rng.residue(dd);
        for (int i = j; i < n; ++i) {
            if (x[i] != 0) { pivot = n + i; break; }
            if (x[n + i] != 0) { pivot = i; break; }
        }
        {
            const GfArith& ar = gf_arith(dd);
            z[pivot] = 0;
            const int have = symp_form(x, z, dd);
            // coefficient of z[pivot] inside <x, z>
            int coef = (pivot >= n) ? x[pivot - n] : (dd - x[pivot + n]) % dd;
            const uint8_t need = uint8_t((1 - have % dd + 2 * dd) % dd);
            z[pivot] = ar.mul[ar.inv[uint8_t(coef)] * dd + need];
        }

        chain.clear();
        std::fill(ej.begin(), ej.end(), 0);
        ej[j] = 1;
        std::vector<Transvection> chain_x;
        chain_to(chain_x, ej, x, dd, support, rng);
        // w = T^{-1}(z): reversed chain with negated coefficients.
        w = z;
        {
            const GfArith& ar = gf_arith(dd);
            for (auto it = chain_x.rbegin(); it != chain_x.rend(); ++it) {
                Transvection inv{it->h, ar.neg[it->c]};
                apply_transvection(w, inv, dd);
            }
        }
        // Step map U_j = T o T2: the partner chain acts first, then the chain
        // taking e_j to x.
        chain_partner(chain, j, n, w, dd, support, rng);
        chain.insert(chain.end(), chain_x.begin(), chain_x.end());

        // Left-compose the step map onto the accumulated columns. Columns
        // outside the active set are fixed by every transvection in the chain.
        std::vector<uint8_t> col(2 * n);
        for (int cidx : support) {
            for (int i = 0; i < 2 * n; ++i) col[i] = m.at(i, cidx);
            for (const Transvection& t : chain) apply_transvection(col, t, dd);
            for (int i = 0; i < 2 * n; ++i) m.at(i, cidx) = col[i];
        }
    }
    return m;
}

std::vector<uint8_t> random_gate_phases(const GfMatrix& symplectic, RngStream& rng) {
    const uint8_t d = symplectic.mod();
    const int n2 = symplectic.cols();
    const int n = n2 / 2;
    std::vector<uint8_t> p(n2);
    for (int j = 0; j < n2; ++j) {
        if (d != 2) {
            p[j] = rng.residue(d);
        } else {
            // Hermitian image: phase parity equals the number of sites where
            // the image has both X and Z support.
            int y = 0;
            for (int s = 0; s < n; ++s) y += int(symplectic.at(s, j)) * symplectic.at(n + s, j);
            p[j] = uint8_t((y + 2 * rng.bit()) % 4);
        }
    }
    return p;
}

CliffordGate random_clifford(int n_sites, PrimeModulus d, RngStream& rng) {
    CliffordGate g;
    g.n_sites = n_sites;
    g.d = d.value();
    g.symplectic = random_symplectic(n_sites, d, rng);
    g.phase_vector = random_gate_phases(g.symplectic, rng);
    return g;
}

StabilizerTableau StabilizerTableau::zero_state(int n, PrimeModulus d) {
    StabilizerTableau t;
    t.n = n;
    t.d = d.value();
    t.phases.assign(n, 0);
    t.x_block = GfMatrix(n, n, d);
    t.z_block = GfMatrix::identity(n, d);
    return t;
}

bool StabilizerTableau::is_valid() const {
    GfMatrix full(n, 2 * n, PrimeModulus(d));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            full.at(i, j) = x_block.at(i, j);
            full.at(i, n + j) = z_block.at(i, j);
        }
    }
    if (rank_gf(full) != n) return false;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            int s = 0;
            for (int t = 0; t < n; ++t)
                s += int(x_block.at(i, t)) * z_block.at(j, t) - int(z_block.at(i, t)) * x_block.at(j, t);
            if (((s % d) + d) % d != 0) return false;
        }
    }
    return true;
}

void StabilizerTableau::canonicalize() {
    const GfArith& ar = gf_arith(d);
    auto entry = [&](int row, int col) -> uint8_t {
        return col < n ? x_block.at(row, col) : z_block.at(row, col - n);
    };
    auto row_as_pauli = [&](int row) {
        PauliRow p = PauliRow::identity(n);
        row_mul(p, x_block.row(row), z_block.row(row), phases[row], d);
        return p;
    };
    auto store_row = [&](int row, const PauliRow& p) {
        for (int t = 0; t < n; ++t) {
            x_block.at(row, t) = p.a[t];
            z_block.at(row, t) = p.b[t];
        }
        phases[row] = uint8_t(p.phase);
    };

    int r = 0;
    for (int c = 0; c < 2 * n && r < n; ++c) {
        int piv = -1;
        for (int i = r; i < n; ++i) {
            if (entry(i, c) != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        if (piv != r) {
            for (int t = 0; t < n; ++t) {
                std::swap(x_block.at(r, t), x_block.at(piv, t));
                std::swap(z_block.at(r, t), z_block.at(piv, t));
            }
            std::swap(phases[r], phases[piv]);
        }
        // Scale the pivot row (as a group element) so the pivot entry is 1.
        const uint8_t e = entry(r, c);
        if (e != 1) {
            const uint8_t pw = ar.inv[e];
            PauliRow acc = PauliRow::identity(n);
            PauliRow base = row_as_pauli(r);
            for (int rep = 0; rep < pw; ++rep) row_mul(acc, base.a.data(), base.b.data(), base.phase, d);
            store_row(r, acc);
        }
        // Clear the column everywhere else.
        for (int i = 0; i < n; ++i) {
            if (i == r) continue;
            const uint8_t v = entry(i, c);
            if (v == 0) continue;
            const uint8_t times = ar.neg[v];
            PauliRow acc = row_as_pauli(i);
            PauliRow base = row_as_pauli(r);
            for (int rep = 0; rep < times; ++rep) row_mul(acc, base.a.data(), base.b.data(), base.phase, d);
            store_row(i, acc);
        }
        ++r;
    }
}

bool StabilizerTableau::same_state(const StabilizerTableau& other) const {
    if (n != other.n || d != other.d) return false;
    StabilizerTableau a = *this, b = other;
    a.canonicalize();
    b.canonicalize();
    return a.phases == b.phases && a.x_block == b.x_block && a.z_block == b.z_block;
}

void apply_gate(StabilizerTableau& t, const CliffordGate& gate, int first_site) {
    const int m = gate.n_sites;
    if (gate.d != t.d) throw std::invalid_argument("apply_gate: modulus mismatch");
    if (first_site < 0 || first_site + m > t.n)
        throw std::invalid_argument("apply_gate: support out of range");
    const int D = phase_modulus(t.d);
    std::vector<uint8_t> a_in(m), b_in(m);
    PauliWindow acc(m, t.d);
    for (int i = 0; i < t.n; ++i) {
        bool nz = false;
        for (int s = 0; s < m; ++s) {
            a_in[s] = t.x_block.at(i, first_site + s);
            b_in[s] = t.z_block.at(i, first_site + s);
            nz = nz || a_in[s] || b_in[s];
        }
        if (!nz) continue;
        std::fill(acc.a.begin(), acc.a.end(), 0);
        std::fill(acc.b.begin(), acc.b.end(), 0);
        acc.phase = 0;
        gate_image(gate, a_in.data(), b_in.data(), acc);
        for (int s = 0; s < m; ++s) {
            t.x_block.at(i, first_site + s) = acc.a[s];
            t.z_block.at(i, first_site + s) = acc.b[s];
        }
        t.phases[i] = uint8_t((t.phases[i] + acc.phase) % D);
    }
}

int participation_entropy(const StabilizerTableau& t) { return rank_gf(t.x_block); }

OverlapSample overlap_zero(const StabilizerTableau& t) {
    OverlapSample out;
    out.g = participation_entropy(t);
    out.w_log_d = t.n - out.g;

    const auto kernel = kernel_basis_gf(transpose_gf(t.x_block));
    const int D = phase_modulus(t.d);

    auto element_phase = [&](const std::vector<uint8_t>& coeff) {
        PauliRow acc = PauliRow::identity(t.n);
        for (int j = 0; j < t.n; ++j)
            if (coeff[j]) row_mul_tableau_row(acc, t, j, coeff[j]);
        for (int s = 0; s < t.n; ++s) {
            if (acc.a[s] != 0) throw std::runtime_error("overlap_zero: kernel product not Z-only");
        }
        return acc.phase;
    };

    std::vector<int> phases(kernel.size());
    bool trivial = true;
    for (size_t i = 0; i < kernel.size(); ++i) {
        phases[i] = element_phase(kernel[i]);
        trivial = trivial && phases[i] == 0;
    }

    // For qubits the phase group Z_4 is finer than the exponent field, so also
    // confirm additivity on products of basis pairs.
    if (t.d == 2 && kernel.size() >= 2 && kernel.size() <= 32) {
        const GfArith& ar = gf_arith(t.d);
        for (size_t i = 0; i < kernel.size(); ++i) {
            for (size_t j = i + 1; j < kernel.size(); ++j) {
                std::vector<uint8_t> c(t.n);
                for (int s = 0; s < t.n; ++s) c[s] = ar.add[kernel[i][s] * t.d + kernel[j][s]];
                if (element_phase(c) != (phases[i] + phases[j]) % D)
                    throw std::runtime_error("overlap_zero: phase character not additive");
            }
        }
    }

    out.in_support = trivial;
    if (!out.in_support) out.w_log_d = 0;
    return out;
}

CircuitArchitecture brickwork_architecture(int N, PrimeModulus d) {
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("brickwork_architecture: N must be even");
    CircuitArchitecture arch;
    arch.n = N;
    arch.d = d.value();
    arch.kind = ArchitectureKind::brickwork;
    std::vector<GateSupport> even, odd;
    for (int i = 0; i + 1 < N; i += 2) even.push_back({i, 2});
    for (int i = 1; i + 1 < N; i += 2) odd.push_back({i, 2});
    arch.layers.push_back(even);
    arch.layers.push_back(odd);
    return arch;
}

CircuitArchitecture staircase_architecture(int N, int r, PrimeModulus d) {
    if (r < 1 || r > N - 1) throw std::invalid_argument("staircase_architecture: need 1 <= r <= N-1");
    CircuitArchitecture arch;
    arch.n = N;
    arch.d = d.value();
    arch.kind = ArchitectureKind::staircase;
    for (int s = 0; s + r + 1 <= N; ++s) arch.layers.push_back({{s, r + 1}});
    return arch;
}

CircuitArchitecture glued_architecture(int N, int r, PrimeModulus d) {
    if (r < 1 || N % r != 0 || N < 2 * r)
        throw std::invalid_argument("glued_architecture: need r >= 1, r | N, N >= 2r");
    CircuitArchitecture arch;
    arch.n = N;
    arch.d = d.value();
    arch.kind = ArchitectureKind::glued;
    for (int s = 0; (s + 2) * r <= N; ++s) arch.layers.push_back({{s * r, 2 * r}});
    return arch;
}

void run_architecture(const CircuitArchitecture& arch, StabilizerTableau& t, RngStream& rng,
                      int depth) {
    if (arch.n != t.n || arch.d != t.d)
        throw std::invalid_argument("run_architecture: architecture/state mismatch");
    if (arch.layers.empty()) return;
    const PrimeModulus d(arch.d);
    for (int step = 0; step < depth; ++step) {
        const auto& layer = arch.layers[size_t(step) % arch.layers.size()];
        for (const GateSupport& s : layer) {
            CliffordGate g = random_clifford(s.n_sites, d, rng);
            apply_gate(t, g, s.first);
        }
    }
}

Gf2Evolver::Gf2Evolver(int n)
    : n_(n), words_((n + 63) / 64), a_cols_(size_t(n) * words_, 0),
      b_cols_(size_t(n) * words_, 0), scratch_() {
    reset_zero_state();
}

void Gf2Evolver::reset_zero_state() {
    std::fill(a_cols_.begin(), a_cols_.end(), 0);
    std::fill(b_cols_.begin(), b_cols_.end(), 0);
    for (int s = 0; s < n_; ++s) b_cols_[size_t(s) * words_ + (s >> 6)] = 1ULL << (s & 63);
}

void Gf2Evolver::apply_symplectic(const GfMatrix& m, int first_site) {
    const int two_m = m.rows();
    const int mm = two_m / 2;
    if (first_site < 0 || first_site + mm > n_)
        throw std::invalid_argument("Gf2Evolver: support out of range");
    scratch_.assign(size_t(two_m) * words_, 0);
    auto in_col = [&](int i) -> const uint64_t* {
        return (i < mm ? a_cols_.data() + size_t(first_site + i) * words_
                       : b_cols_.data() + size_t(first_site + i - mm) * words_);
    };
    for (int o = 0; o < two_m; ++o) {
        uint64_t* dst = scratch_.data() + size_t(o) * words_;
        for (int i = 0; i < two_m; ++i) {
            if (m.at(o, i)) {
                const uint64_t* src = in_col(i);
                for (int w = 0; w < words_; ++w) dst[w] ^= src[w];
            }
        }
    }
    for (int o = 0; o < two_m; ++o) {
        uint64_t* dst = (o < mm ? a_cols_.data() + size_t(first_site + o) * words_
                                : b_cols_.data() + size_t(first_site + o - mm) * words_);
        const uint64_t* src = scratch_.data() + size_t(o) * words_;
        for (int w = 0; w < words_; ++w) dst[w] = src[w];
    }
}

int Gf2Evolver::x_rank() const {
    scratch_ = a_cols_;
    int r = 0;
    for (int c = 0; c < n_ && r < n_; ++c) {
        const int wi = c >> 6;
        const uint64_t bit = 1ULL << (c & 63);
        int piv = -1;
        for (int i = r; i < n_; ++i) {
            if (scratch_[size_t(i) * words_ + wi] & bit) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        if (piv != r)
            for (int w = 0; w < words_; ++w)
                std::swap(scratch_[size_t(r) * words_ + w], scratch_[size_t(piv) * words_ + w]);
        for (int i = r + 1; i < n_; ++i) {
            if (scratch_[size_t(i) * words_ + wi] & bit) {
                uint64_t* ri = scratch_.data() + size_t(i) * words_;
                const uint64_t* rr = scratch_.data() + size_t(r) * words_;
                for (int w = wi; w < words_; ++w) ri[w] ^= rr[w];
            }
        }
        ++r;
    }
    return r;
}

int sample_g_packed(const CircuitArchitecture& arch, RngStream& rng, int depth,
                    Gf2Evolver& scratch) {
    if (arch.d != 2) throw std::invalid_argument("sample_g_packed: qubit path only");
    if (scratch.sites() != arch.n) throw std::invalid_argument("sample_g_packed: size mismatch");
    const PrimeModulus d(2);
    scratch.reset_zero_state();
    for (int step = 0; step < depth; ++step) {
        const auto& layer = arch.layers[size_t(step) % arch.layers.size()];
        for (const GateSupport& s : layer) {
            GfMatrix m = random_symplectic(s.n_sites, d, rng);
            (void)random_gate_phases(m, rng);  // keep the stream aligned with the generic path
            scratch.apply_symplectic(m, s.first);
        }
    }
    return scratch.x_rank();
}

int sample_g_generic(const CircuitArchitecture& arch, RngStream& rng, int depth) {
    StabilizerTableau t = StabilizerTableau::zero_state(arch.n, PrimeModulus(arch.d));
    run_architecture(arch, t, rng, depth);
    return participation_entropy(t);
}

int sample_g_global(int N, PrimeModulus d, RngStream& rng) {
    GfMatrix m = random_symplectic(N, d, rng);
    (void)random_gate_phases(m, rng);
    // Stabilizer rows are the images of Z_1..Z_N; g is the rank of their
    // X-exponent block.
    GfMatrix xb(N, N, d);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) xb.at(i, j) = m.at(i, N + j);
    return rank_gf(xb);
}

}  // namespace cliffstat
