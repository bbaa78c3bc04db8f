#include "cliffstat/replica.hpp"

#include <cmath>
#include <stdexcept>

#include "cliffstat/rng.hpp"

namespace cliffstat {

namespace {

// Orthonormalized single-site frame. The commutant vectors are linearly
// dependent on one qudit whenever k - 1 > 1, so raw coefficient vectors carry
// null directions that are invisible to every contraction but inflate MPS
// ranks. Factor the single-site Gram as G = W^T W with W of full row rank rho;
// in W-coordinates the 2-norm equals the physical norm, which is what
// singular-value truncation needs.
struct ReducedFrame {
    int m = 0;              // commutant size
    int rdim = 0;           // rank of the single-site Gram
    Eigen::MatrixXd wmap;   // rho x m, columns w_sigma
    Eigen::VectorXd fvec;   // per-site final covector: f . w_sigma = 1
    Eigen::MatrixXd wg2;    // exact inverse of the two-site Gram
};

ReducedFrame reduced_frame(const CommutantBasis& basis) {
    ReducedFrame fr;
    fr.m = basis.size();
    const auto ge = gram_matrix(basis, 1);
    Eigen::MatrixXd g(fr.m, fr.m);
    for (int i = 0; i < fr.m; ++i)
        for (int j = 0; j < fr.m; ++j) g(i, j) = to_double(ge[i][j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double cutoff = 1e-12 * ev.cwiseAbs().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < fr.m; ++i)
        if (ev(i) > cutoff) keep.push_back(i);
    fr.rdim = int(keep.size());
    fr.wmap.resize(fr.rdim, fr.m);
    Eigen::VectorXd lambda(fr.rdim);
    for (int t = 0; t < fr.rdim; ++t) {
        lambda(t) = ev(keep[t]);
        fr.wmap.row(t) = std::sqrt(ev(keep[t])) * es.eigenvectors().col(keep[t]).transpose();
    }
    // f solves W^T f = all-ones; W W^T = diag(lambda)
    fr.fvec = lambda.cwiseInverse().asDiagonal() * (fr.wmap * Eigen::VectorXd::Ones(fr.m));
    const Eigen::VectorXd check = fr.wmap.transpose() * fr.fvec;
    if ((check - Eigen::VectorXd::Ones(fr.m)).cwiseAbs().maxCoeff() > 1e-9)
        throw std::runtime_error("reduced_frame: boundary covector construction failed");

    const auto wge = gram_inverse_exact(basis, 2);
    fr.wg2.resize(fr.m, fr.m);
    for (int i = 0; i < fr.m; ++i)
        for (int j = 0; j < fr.m; ++j) fr.wg2(i, j) = to_double(wge[i][j]);
    return fr;
}

struct SvdResult {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;  // columns are right singular vectors
};

SvdResult exact_svd(const Eigen::MatrixXd& a) {
    SvdResult out;
    if (a.rows() <= 96 && a.cols() <= 96) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        out.v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        out.v = svd.matrixV();
    }
    return out;
}

// Randomized range-finder SVD with power iterations: only the leading `want`
// triplets, accurate when the spectrum decays past the kept rank. The
// projection seed depends only on the matrix shape, so results are
// reproducible run to run.
[[maybe_unused]] SvdResult randomized_svd(const Eigen::MatrixXd& a, int want) {
    const int rows = int(a.rows()), cols = int(a.cols());
    const int r = std::min({want, rows, cols});
    RngStream rng(SplitMix64::mix(0x52534844ULL, (uint64_t(rows) << 20) | uint64_t(cols)));
    Eigen::MatrixXd omega(cols, r);
    for (int i = 0; i < cols; ++i)
        for (int j = 0; j < r; ++j) {
            const double u1 = std::max(rng.real01(), 1e-300);
            const double u2 = rng.real01();
            omega(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        }
    Eigen::MatrixXd q =
        (a * omega).householderQr().householderQ() * Eigen::MatrixXd::Identity(rows, r);
    for (int it = 0; it < 2; ++it) {
        const Eigen::MatrixXd z = (a.transpose() * q).householderQr().householderQ() *
                                  Eigen::MatrixXd::Identity(cols, r);
        q = (a * z).householderQr().householderQ() * Eigen::MatrixXd::Identity(rows, r);
    }
    const Eigen::MatrixXd b = q.transpose() * a;  // r x cols
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult out;
    out.u = q * svd.matrixU();
    out.s = svd.singularValues();
    out.v = svd.matrixV();
    return out;
}

int truncation_rank(const Eigen::VectorXd& s, const EvolveOptions& opts) {
    const double smax = s.size() ? s(0) : 0.0;
    if (!(smax > 0.0)) throw std::runtime_error("replica evolve: zero state");
    const double floor = std::max(opts.truncation_cutoff, 1e-14);
    int keep = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > floor * smax) ++keep;
    if (keep < 1) keep = 1;
    if (opts.max_keep > 0 && keep > opts.max_keep) keep = opts.max_keep;
    if (keep > opts.bond_cap)
        throw std::runtime_error("replica evolve: bond dimension exceeded the configured cap");
    return keep;
}

// Gauge bookkeeping. A layer is applied exactly (the two-site gate output
// factorizes without any SVD), then one left-to-right QR pass and one
// right-to-left truncating SVD pass compress every bond with orthonormal
// environments on both sides, which is what keeps the truncation bias far
// below the per-layer singular-value tail.

void left_qr_pass(ReplicaMps& mps) {
    const int sd = mps.site_dim;
    for (int i = 0; i + 1 < mps.n_sites; ++i) {
        auto& ai = mps.a[i];
        const int chi_l = int(ai[0].rows());
        const int chi_r = int(ai[0].cols());
        Eigen::MatrixXd blk(chi_l * sd, chi_r);
        for (int p = 0; p < sd; ++p) blk.middleRows(p * chi_l, chi_l) = ai[p];
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(blk);
        const int keep = std::min(chi_l * sd, chi_r);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(chi_l * sd, keep);
        Eigen::MatrixXd r = qr.matrixQR().topRows(keep).template triangularView<Eigen::Upper>();
        const double mx = r.cwiseAbs().maxCoeff();
        if (mx > 0.0) {
            r /= mx;
            mps.log_scale += std::log(mx);
        }
        for (int p = 0; p < sd; ++p) ai[p] = q.middleRows(p * chi_l, chi_l);
        auto& aj = mps.a[i + 1];
        for (int p = 0; p < sd; ++p) aj[p] = (r * aj[p]).eval();
    }
}

// Sweep right-to-left with truncation; leaves the chain right-canonical with
// the overall scale folded into log_scale. Call after left_qr_pass so each
// truncation sees orthonormal environments.
void sweep_center_to_front(ReplicaMps& mps, const EvolveOptions& opts) {
    const int sd = mps.site_dim;
    for (int i = mps.n_sites - 1; i > 0; --i) {
        auto& ai = mps.a[i];
        const int chi_l = int(ai[0].rows());
        const int chi_r = int(ai[0].cols());
        Eigen::MatrixXd blk(chi_l, sd * chi_r);
        for (int p = 0; p < sd; ++p) blk.middleCols(p * chi_r, chi_r) = ai[p];
        SvdResult svd = exact_svd(blk);
        const int keep = truncation_rank(svd.s, opts);
        for (int p = 0; p < sd; ++p)
            ai[p] = svd.v.block(p * chi_r, 0, chi_r, keep).transpose().eval();
        const Eigen::MatrixXd carry = svd.u.leftCols(keep) * svd.s.head(keep).asDiagonal();
        auto& ah = mps.a[i - 1];
        for (int p = 0; p < sd; ++p) ah[p] = (ah[p] * carry).eval();
    }
    double mx = 0.0;
    for (int p = 0; p < sd; ++p) mx = std::max(mx, mps.a[0][p].cwiseAbs().maxCoeff());
    if (!(mx > 0.0)) throw std::runtime_error("replica evolve: zero state");
    for (int p = 0; p < sd; ++p) mps.a[0][p] /= mx;
    mps.log_scale += std::log(mx);
}

// Exact two-site gate application. The result theta[(a p), (q b)] is stored as
// the new left tensor with bond index (q, b); the right tensor becomes the
// matching delta and is right-isometric by construction. No information is
// discarded here; the per-layer compression does the truncation.
void apply_gate_exact(ReplicaMps& mps, const BulkGate& gate, int i, const EvolveOptions& opts) {
    const int sd = mps.site_dim;
    auto& ai = mps.a[i];
    auto& aj = mps.a[i + 1];
    const int chi_l = int(ai[0].rows());
    const int chi_m = int(ai[0].cols());
    const int chi_r = int(aj[0].cols());
    (void)chi_m;
    if (double(chi_l) * sd * double(chi_r) * sd > 6.0e8 || chi_r * sd > 8 * opts.bond_cap)
        throw std::runtime_error("replica evolve: bond dimension exceeded the configured cap");

    Eigen::MatrixXd x(sd * sd, chi_l * chi_r);
    for (int p = 0; p < sd; ++p) {
        for (int q = 0; q < sd; ++q) {
            const Eigen::MatrixXd blk = ai[p] * aj[q];
            for (int al = 0; al < chi_l; ++al)
                for (int be = 0; be < chi_r; ++be) x(p * sd + q, al * chi_r + be) = blk(al, be);
        }
    }
    const Eigen::MatrixXd xp = gate.w * x;

    std::vector<Eigen::MatrixXd> left(sd), right(sd);
    for (int p = 0; p < sd; ++p) {
        left[p].resize(chi_l, sd * chi_r);
        for (int q = 0; q < sd; ++q)
            for (int al = 0; al < chi_l; ++al)
                for (int be = 0; be < chi_r; ++be)
                    left[p](al, q * chi_r + be) = xp(p * sd + q, al * chi_r + be);
    }
    for (int q = 0; q < sd; ++q) {
        right[q] = Eigen::MatrixXd::Zero(sd * chi_r, chi_r);
        for (int be = 0; be < chi_r; ++be) right[q](q * chi_r + be, be) = 1.0;
    }
    ai = std::move(left);
    aj = std::move(right);
}

}  // namespace

BulkGate build_bulk_gate(const CommutantBasis& basis, PrimeModulus d) {
    if (basis.d != d.value()) throw std::invalid_argument("build_bulk_gate: modulus mismatch");
    const ReducedFrame fr = reduced_frame(basis);

    BulkGate gate;
    gate.deff = fr.m;
    gate.site_dim = fr.rdim;
    // W' = sum_{p} (w_p kron w_p) sum_t Wg(d^2)_{p,t} (w_t kron w_t)^T
    Eigen::MatrixXd out(fr.rdim * fr.rdim, fr.m);
    for (int p = 0; p < fr.m; ++p) {
        const Eigen::VectorXd wp = fr.wmap.col(p);
        for (int a = 0; a < fr.rdim; ++a)
            for (int b = 0; b < fr.rdim; ++b) out(a * fr.rdim + b, p) = wp(a) * wp(b);
    }
    gate.w = out * fr.wg2 * out.transpose();
    gate.frame = fr.wmap;
    gate.boundary_covector = fr.fvec;
    return gate;
}

int ReplicaMps::max_bond() const {
    int b = 1;
    for (const auto& site : a) b = std::max(b, int(site[0].cols()));
    return b;
}

ReplicaMps initial_state(int N, const CommutantBasis& basis, PrimeModulus d,
                         const std::map<int, std::vector<double>>& doped_sites) {
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("initial_state: N must be even");
    const ReducedFrame fr = reduced_frame(basis);
    const int m = fr.m;

    auto site_weights = [&](int site) {
        auto it = doped_sites.find(site);
        if (it == doped_sites.end()) return Eigen::VectorXd::Ones(m).eval();
        if (int(it->second.size()) != m)
            throw std::invalid_argument("initial_state: purity vector has wrong length");
        Eigen::VectorXd v(m);
        for (int i = 0; i < m; ++i) v(i) = it->second[i];
        return v;
    };

    ReplicaMps mps;
    mps.n_sites = N;
    mps.site_dim = fr.rdim;
    mps.log_scale = 0.0;
    mps.boundary_covector = fr.fvec;
    mps.a.resize(N);
    for (int pair = 0; pair < N / 2; ++pair) {
        const Eigen::VectorXd wl = site_weights(2 * pair);
        const Eigen::VectorXd wr = site_weights(2 * pair + 1);
        // pair coefficients in commutant space, then mapped to the frame
        Eigen::VectorXd c(m);
        for (int p = 0; p < m; ++p) {
            double acc = 0.0;
            for (int t = 0; t < m; ++t) acc += fr.wg2(p, t) * wl(t) * wr(t);
            c(p) = acc;
        }
        Eigen::MatrixXd pair_block = Eigen::MatrixXd::Zero(fr.rdim, fr.rdim);
        for (int p = 0; p < m; ++p)
            pair_block += c(p) * fr.wmap.col(p) * fr.wmap.col(p).transpose();

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(pair_block,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        int keep = 0;
        for (int t = 0; t < s.size(); ++t)
            if (s(t) > 1e-14 * s(0)) ++keep;
        if (keep < 1) keep = 1;
        auto& left = mps.a[2 * pair];
        auto& right = mps.a[2 * pair + 1];
        left.assign(fr.rdim, Eigen::MatrixXd(1, keep));
        right.assign(fr.rdim, Eigen::MatrixXd(keep, 1));
        for (int p = 0; p < fr.rdim; ++p)
            for (int t = 0; t < keep; ++t) {
                left[p](0, t) = svd.matrixU()(p, t) * s(t);
                right[p](t, 0) = svd.matrixV()(p, t);
            }
    }
    return mps;
}

double contract_log_d(const ReplicaMps& mps, PrimeModulus d) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    double local_scale = 0.0;
    for (int site = 0; site < mps.n_sites; ++site) {
        Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(mps.a[site][0].cols());
        for (int p = 0; p < mps.site_dim; ++p)
            next += mps.boundary_covector(p) * (v * mps.a[site][p]);
        const double nn = next.cwiseAbs().maxCoeff();
        if (!(nn > 0.0)) throw std::runtime_error("contract_log_d: vanishing contraction");
        local_scale += std::log(nn);
        v = next / nn;
    }
    const double scalar = v(0);
    if (!(scalar > 0.0)) throw std::runtime_error("contract_log_d: nonpositive average");
    const double ln_d = std::log(double(d.value()));
    return (mps.n_sites * ln_d + mps.log_scale + local_scale + std::log(scalar)) / ln_d;
}

std::vector<DepthRecord> evolve(ReplicaMps& mps, const BulkGate& gate, PrimeModulus d, int depth,
                                const EvolveOptions& opts) {
    if (gate.site_dim != mps.site_dim) throw std::invalid_argument("evolve: gate/state mismatch");
    if (opts.truncation_cutoff < 0 || opts.truncation_cutoff > 1e-8)
        throw std::invalid_argument("evolve: cutoff must lie in [0, 1e-8]");
    std::vector<DepthRecord> out;
    left_qr_pass(mps);
    sweep_center_to_front(mps, opts);
    out.push_back({1, contract_log_d(mps, d), mps.max_bond()});
    for (int t = 2; t <= depth; ++t) {
        // layer parity: odd-bond gates at even t, even-bond gates at odd t
        const int start = (t % 2 == 0) ? 1 : 0;
        for (int i = start; i + 1 < mps.n_sites; i += 2) apply_gate_exact(mps, gate, i, opts);
        left_qr_pass(mps);
        sweep_center_to_front(mps, opts);
        out.push_back({t, contract_log_d(mps, d), mps.max_bond()});
    }
    return out;
}

std::vector<double> delta_s3(const std::vector<DepthRecord>& series, LogValue reference) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& rec : series) out.push_back(reference.log_d - rec.logd_e_ik);
    return out;
}

std::vector<double> k2_dense_reference(int N, PrimeModulus d, int depth) {
    if (N < 2 || N % 2 != 0 || N > 24) throw std::invalid_argument("k2_dense_reference: bad N");
    const double dd = d.value();
    // Closed-form k = 2 single-site Gram and two-site Weingarten on
    // {identity, swap}: G(d) = [[d^2, d], [d, d^2]], Wg = G(d^2)^{-1}.
    const double g1[2][2] = {{dd * dd, dd}, {dd, dd * dd}};
    const double det = dd * dd * dd * dd * dd * dd * dd * dd - dd * dd * dd * dd;
    const double wg2[2][2] = {{dd * dd * dd * dd / det, -dd * dd / det},
                              {-dd * dd / det, dd * dd * dd * dd / det}};

    double w[4][4];
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            for (int s = 0; s < 2; ++s)
                for (int s2 = 0; s2 < 2; ++s2) {
                    double acc = 0.0;
                    if (p == q)
                        for (int t = 0; t < 2; ++t) acc += wg2[p][t] * g1[t][s] * g1[t][s2];
                    w[p * 2 + q][s * 2 + s2] = acc;
                }

    const size_t dim = size_t(1) << N;
    std::vector<double> v(dim, 0.0);
    // Bell-pair initial state: equal pair indices, weight G_{2,2,d}^{-1} each.
    const double c = 1.0 / (dd * dd * dd * dd + dd * dd);
    double log_scale = (N / 2) * std::log(c);
    for (size_t idx = 0; idx < dim; ++idx) {
        bool ok = true;
        for (int pair = 0; pair < N / 2 && ok; ++pair) {
            const int b0 = int(idx >> (N - 1 - 2 * pair)) & 1;
            const int b1 = int(idx >> (N - 2 - 2 * pair)) & 1;
            ok = b0 == b1;
        }
        if (ok) v[idx] = 1.0;
    }

    const double ln_d = std::log(dd);
    auto contract = [&]() {
        double s = 0.0;
        for (double x : v) s += x;
        return (N * ln_d + log_scale + std::log(s)) / ln_d;
    };

    std::vector<double> out;
    out.push_back(contract());
    std::vector<double> next(dim);
    for (int t = 2; t <= depth; ++t) {
        const int start = (t % 2 == 0) ? 1 : 0;
        for (int i = start; i + 1 < N; i += 2) {
            const int sh0 = N - 1 - i;
            const int sh1 = N - 2 - i;
            std::fill(next.begin(), next.end(), 0.0);
            for (size_t idx = 0; idx < dim; ++idx) {
                const double amp = v[idx];
                if (amp == 0.0) continue;
                const int s0 = int(idx >> sh0) & 1;
                const int s1 = int(idx >> sh1) & 1;
                const size_t base = idx & ~((size_t(1) << sh0) | (size_t(1) << sh1));
                for (int p = 0; p < 2; ++p)
                    for (int q = 0; q < 2; ++q) {
                        const double wv = w[p * 2 + q][s0 * 2 + s1];
                        if (wv == 0.0) continue;
                        const size_t tgt = base | (size_t(p) << sh0) | (size_t(q) << sh1);
                        next[tgt] += wv * amp;
                    }
            }
            std::swap(v, next);
        }
        double mx = 0.0;
        for (double x : v) mx = std::max(mx, std::abs(x));
        if (!(mx > 0.0)) throw std::runtime_error("k2_dense_reference: vanished");
        for (double& x : v) x /= mx;
        log_scale += std::log(mx);
        out.push_back(contract());
    }
    return out;
}

}  // namespace cliffstat
