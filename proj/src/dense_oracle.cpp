#include "cliffstat/dense_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace cliffstat {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::complex<double> tau_of(uint8_t d) {
    if (d == 2) return {0.0, 1.0};
    return std::polar(1.0, -2.0 * kPi / double(d));
}

long long dim_pow(uint8_t d, int n) {
    long long out = 1;
    for (int i = 0; i < n; ++i) out *= d;
    return out;
}

// Digits of basis index x, site 0 most significant.
void to_digits(long long x, uint8_t d, int n, std::vector<int>& out) {
    out.assign(n, 0);
    for (int s = n - 1; s >= 0; --s) {
        out[s] = int(x % d);
        x /= d;
    }
}

}  // namespace

CMatrix dense_x(PrimeModulus d) {
    const int dd = d.value();
    CMatrix x = CMatrix::Zero(dd, dd);
    for (int m = 0; m < dd; ++m) x((m - 1 + dd) % dd, m) = 1.0;
    return x;
}

CMatrix dense_z(PrimeModulus d) {
    const int dd = d.value();
    const std::complex<double> omega = std::polar(1.0, -2.0 * kPi / double(dd));
    CMatrix z = CMatrix::Zero(dd, dd);
    for (int m = 0; m < dd; ++m) z(m, m) = std::pow(omega, m);
    return z;
}

CMatrix dense_pauli(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b, int phase,
                    PrimeModulus d) {
    const int n = int(a.size());
    const uint8_t dd = d.value();
    const long long dim = dim_pow(dd, n);
    if (dim > 4096) throw std::invalid_argument("dense_pauli: dimension cap exceeded");
    // Monomial action: X^a Z^b |m> = omega^{b.m} |m - a>.
    CMatrix p = CMatrix::Zero(dim, dim);
    std::vector<int> digits;
    for (long long col = 0; col < dim; ++col) {
        to_digits(col, dd, n, digits);
        double ph = 0.0;
        long long row = 0;
        for (int s = 0; s < n; ++s) {
            ph += double(b[s]) * digits[s];
            row = row * dd + (digits[s] - a[s] + dd) % dd;
        }
        p(row, col) = std::polar(1.0, -2.0 * kPi * ph / dd);
    }
    return std::pow(tau_of(dd), phase) * p;
}

CMatrix dense_named_gate(GateName name, PrimeModulus d) {
    const int dd = d.value();
    const std::complex<double> omega = std::polar(1.0, -2.0 * kPi / double(dd));
    switch (name) {
        case GateName::H: {
            CMatrix h(dd, dd);
            for (int m = 0; m < dd; ++m)
                for (int n2 = 0; n2 < dd; ++n2) h(m, n2) = std::pow(omega, m * n2) / std::sqrt(double(dd));
            return h;
        }
        case GateName::S: {
            CMatrix s = CMatrix::Zero(dd, dd);
            if (dd == 2) {
                s(0, 0) = 1.0;
                s(1, 1) = {0.0, 1.0};
            } else {
                for (int m = 0; m < dd; ++m) s(m, m) = std::pow(omega, m * (m - 1) * (dd + 1) / 2);
            }
            return s;
        }
        case GateName::CADD: {
            CMatrix c = CMatrix::Zero(dd * dd, dd * dd);
            for (int m = 0; m < dd; ++m)
                for (int n2 = 0; n2 < dd; ++n2) c(m * dd + (m + n2) % dd, m * dd + n2) = 1.0;
            return c;
        }
    }
    throw std::invalid_argument("dense_named_gate: unknown gate");
}

CMatrix gate_to_unitary(const CliffordGate& gate) {
    const int n = gate.n_sites;
    const uint8_t d = gate.d;
    const long long dim = dim_pow(d, n);
    if (dim > 4096) throw std::invalid_argument("gate_to_unitary: dimension cap exceeded");

    // Image of a basis Pauli under the gate, as dense matrix.
    auto image_dense = [&](const std::vector<uint8_t>& a_in, const std::vector<uint8_t>& b_in) {
        StabilizerTableau probe;  // reuse the tableau machinery on a 1-row probe
        probe.n = n;
        probe.d = d;
        probe.phases = {0};
        probe.x_block = GfMatrix(1, n, PrimeModulus(d));
        probe.z_block = GfMatrix(1, n, PrimeModulus(d));
        for (int s = 0; s < n; ++s) {
            probe.x_block.at(0, s) = a_in[s];
            probe.z_block.at(0, s) = b_in[s];
        }
        apply_gate(probe, gate, 0);
        std::vector<uint8_t> a(n), b(n);
        for (int s = 0; s < n; ++s) {
            a[s] = probe.x_block.at(0, s);
            b[s] = probe.z_block.at(0, s);
        }
        return dense_pauli(a, b, probe.phases[0], PrimeModulus(d));
    };

    // |psi0> = U|0...0>: unique state stabilized by the images of Z_1..Z_n.
    CMatrix rho = CMatrix::Identity(dim, dim);
    std::vector<uint8_t> a(n, 0), b(n, 0);
    for (int j = 0; j < n; ++j) {
        std::fill(a.begin(), a.end(), 0);
        std::fill(b.begin(), b.end(), 0);
        b[j] = 1;
        const CMatrix g = image_dense(a, b);
        CMatrix proj = CMatrix::Identity(dim, dim);
        CMatrix gp = CMatrix::Identity(dim, dim);
        for (int rep = 1; rep < d; ++rep) {
            gp = gp * g;
            proj += gp;
        }
        rho = rho * (proj / double(d));
    }
    int best = 0;
    double best_norm = -1.0;
    for (int c = 0; c < dim; ++c) {
        const double nn = rho.col(c).norm();
        if (nn > best_norm) {
            best_norm = nn;
            best = c;
        }
    }
    if (best_norm < 1e-9) throw std::runtime_error("gate_to_unitary: degenerate projector product");
    const CVector psi0 = rho.col(best) / best_norm;

    // U|x> = image(P(-x, 0)) |psi0>, since |x> = P(-x, 0)|0>.
    CMatrix u(dim, dim);
    std::vector<int> digits;
    for (long long x = 0; x < dim; ++x) {
        to_digits(x, d, n, digits);
        for (int s = 0; s < n; ++s) a[s] = uint8_t((d - digits[s]) % d);
        std::fill(b.begin(), b.end(), 0);
        u.col(x) = image_dense(a, b) * psi0;
    }
    return u;
}

CMatrix circuit_to_unitary(const std::vector<std::pair<CliffordGate, int>>& gates, int n,
                           PrimeModulus d) {
    const long long dim = dim_pow(d.value(), n);
    if (dim > 4096) throw std::invalid_argument("circuit_to_unitary: dimension cap exceeded");
    CMatrix u = CMatrix::Identity(dim, dim);
    for (const auto& [gate, first] : gates) {
        const long long left = dim_pow(d.value(), first);
        const long long mid = dim_pow(d.value(), gate.n_sites);
        const long long right = dim / (left * mid);
        const CMatrix g = gate_to_unitary(gate);
        CMatrix embedded = CMatrix::Zero(dim, dim);
        for (long long l = 0; l < left; ++l)
            for (long long r = 0; r < right; ++r)
                for (long long i = 0; i < mid; ++i)
                    for (long long j = 0; j < mid; ++j)
                        embedded((l * mid + i) * right + r, (l * mid + j) * right + r) = g(i, j);
        u = embedded * u;
    }
    return u;
}

CVector tableau_to_statevector(const StabilizerTableau& t) {
    const long long dim = dim_pow(t.d, t.n);
    if (dim > 4096) throw std::invalid_argument("tableau_to_statevector: dimension cap exceeded");
    CMatrix rho = CMatrix::Identity(dim, dim);
    for (int j = 0; j < t.n; ++j) {
        std::vector<uint8_t> a(t.n), b(t.n);
        for (int s = 0; s < t.n; ++s) {
            a[s] = t.x_block.at(j, s);
            b[s] = t.z_block.at(j, s);
        }
        const CMatrix g = dense_pauli(a, b, t.phases[j], PrimeModulus(t.d));
        CMatrix proj = CMatrix::Identity(dim, dim);
        CMatrix gp = CMatrix::Identity(dim, dim);
        for (int rep = 1; rep < t.d; ++rep) {
            gp = gp * g;
            proj += gp;
        }
        rho = rho * (proj / double(t.d));
    }
    int best = 0;
    double best_norm = -1.0;
    for (int c = 0; c < dim; ++c) {
        const double nn = rho.col(c).norm();
        if (nn > best_norm) {
            best_norm = nn;
            best = c;
        }
    }
    if (best_norm < 1e-9) throw std::runtime_error("tableau_to_statevector: degenerate projector");
    return rho.col(best) / best_norm;
}

}  // namespace cliffstat
