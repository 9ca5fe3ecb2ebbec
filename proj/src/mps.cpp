#include "mpsqc/mps.hpp"

#include <algorithm>
#include <cmath>

namespace mpsqc {

Matrix Tensor3::lp_r() const {
    Matrix m(static_cast<Eigen::Index>(l * 2), static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < l * 2; ++i)
        for (std::size_t j = 0; j < r; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d[i * r + j];
    return m;
}

Matrix Tensor3::l_pr() const {
    Matrix m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(2 * r));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < 2 * r; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d[i * 2 * r + j];
    return m;
}

Tensor3 Tensor3::from_lp_r(const Matrix& m, std::size_t l) {
    Tensor3 t(l, static_cast<std::size_t>(m.cols()));
    for (std::size_t i = 0; i < l * 2; ++i)
        for (std::size_t j = 0; j < t.r; ++j) t.d[i * t.r + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return t;
}

Tensor3 Tensor3::from_l_pr(const Matrix& m, std::size_t r) {
    Tensor3 t(static_cast<std::size_t>(m.rows()), r);
    for (std::size_t i = 0; i < t.l; ++i)
        for (std::size_t j = 0; j < 2 * r; ++j) t.d[i * 2 * r + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return t;
}

std::size_t MPS::max_bond() const {
    std::size_t chi = 1;
    for (const auto& t : tensors) chi = std::max({chi, t.l, t.r});
    return chi;
}

MPS product_state(int n, const std::vector<double>& angles) {
    if (n < 1) throw std::invalid_argument("product_state needs n >= 1");
    if (static_cast<int>(angles.size()) != n) throw std::invalid_argument("angle count mismatch");
    MPS s;
    s.tensors.resize(n);
    for (int k = 0; k < n; ++k) {
        Tensor3 t(1, 1);
        t.at(0, 0, 0) = std::cos(angles[k]);
        t.at(0, 1, 0) = std::sin(angles[k]);
        s.tensors[k] = t;
    }
    s.form = CanonicalForm::left;
    return s;
}

MPS random_mps(int n, std::size_t chi, Rng& rng) {
    MPS s;
    s.tensors.resize(n);
    auto bond = [&](int k) {  // bond between sites k-1 and k
        if (k <= 0 || k >= n) return std::size_t{1};
        const double cap_l = std::pow(2.0, k);
        const double cap_r = std::pow(2.0, n - k);
        std::size_t b = chi;
        if (cap_l < static_cast<double>(b)) b = static_cast<std::size_t>(cap_l);
        if (cap_r < static_cast<double>(b)) b = static_cast<std::size_t>(cap_r);
        return b;
    };
    for (int k = 0; k < n; ++k) {
        Tensor3 t(bond(k), bond(k + 1));
        for (auto& v : t.d) v = rng.cnormal();
        s.tensors[k] = t;
    }
    s.form = CanonicalForm::none;
    return s;
}

MPS canonicalize(const MPS& s, CanonicalForm form) {
    const int n = s.n();
    MPS out = s;
    out.form = form;
    if (form == CanonicalForm::left) {
        Matrix carry = Matrix::Identity(1, 1);
        for (int k = 0; k < n; ++k) {
            const auto& t = out.tensors[k];
            Matrix m(static_cast<Eigen::Index>(carry.rows() * 2), static_cast<Eigen::Index>(t.r));
            {
                Matrix merged = carry * t.l_pr();  // (l', 2r)
                for (Eigen::Index a = 0; a < merged.rows(); ++a)
                    for (std::size_t p = 0; p < 2; ++p)
                        for (std::size_t b = 0; b < t.r; ++b)
                            m(a * 2 + static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(b)) =
                                merged(a, static_cast<Eigen::Index>(p * t.r + b));
            }
            if (k < n - 1) {
                Matrix q, r;
                qr_thin(m, q, r);
                out.tensors[k] = Tensor3::from_lp_r(q, static_cast<std::size_t>(carry.rows()));
                carry = r;
            } else {
                const double nrm = m.norm();
                if (nrm < 1e-14) throw NumericalError("cannot canonicalize zero-norm state");
                out.tensors[k] = Tensor3::from_lp_r(m / nrm, static_cast<std::size_t>(carry.rows()));
            }
        }
    } else if (form == CanonicalForm::right) {
        Matrix carry = Matrix::Identity(1, 1);
        for (int k = n - 1; k >= 0; --k) {
            const auto& t = out.tensors[k];
            Matrix m(static_cast<Eigen::Index>(t.l), static_cast<Eigen::Index>(2 * carry.cols()));
            {
                Matrix merged = t.lp_r() * carry;  // (2l, r')
                for (std::size_t a = 0; a < t.l; ++a)
                    for (std::size_t p = 0; p < 2; ++p)
                        for (Eigen::Index b = 0; b < carry.cols(); ++b)
                            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(p) * carry.cols() + b) =
                                merged(static_cast<Eigen::Index>(a * 2 + p), b);
            }
            if (k > 0) {
                Matrix q, r;
                qr_thin(m.adjoint(), q, r);
                out.tensors[k] = Tensor3::from_l_pr(q.adjoint(), static_cast<std::size_t>(carry.cols()));
                carry = r.adjoint();
            } else {
                const double nrm = m.norm();
                if (nrm < 1e-14) throw NumericalError("cannot canonicalize zero-norm state");
                out.tensors[k] = Tensor3::from_l_pr(m / nrm, static_cast<std::size_t>(carry.cols()));
            }
        }
    } else {
        out.form = CanonicalForm::none;
    }
    return out;
}

StateVector to_dense(const MPS& s) {
    const int n = s.n();
    if (n > 14) throw std::invalid_argument("to_dense cap exceeded");
    // row vector over (configurations x right bond), expanded site by site
    std::vector<cd> acc(s.tensors[0].r * 2);
    for (int p = 0; p < 2; ++p)
        for (std::size_t b = 0; b < s.tensors[0].r; ++b)
            acc[p * s.tensors[0].r + b] = s.tensors[0].at(0, p, b);
    std::size_t rows = 2;
    for (int k = 1; k < n; ++k) {
        const auto& t = s.tensors[k];
        std::vector<cd> next(rows * 2 * t.r, cd{0.0, 0.0});
        for (std::size_t x = 0; x < rows; ++x)
            for (int p = 0; p < 2; ++p)
                for (std::size_t b = 0; b < t.r; ++b) {
                    cd v{0.0, 0.0};
                    for (std::size_t a = 0; a < t.l; ++a) v += acc[x * t.l + a] * t.at(a, p, b);
                    next[(x * 2 + p) * t.r + b] = v;
                }
        acc = std::move(next);
        rows *= 2;
    }
    StateVector psi;
    psi.n = n;
    psi.amps = std::move(acc);
    return psi;
}

cd overlap(const MPS& a, const MPS& b) {
    if (a.n() != b.n()) throw std::invalid_argument("overlap: length mismatch");
    // E(x, y) = sum over contracted sites of conj(A)..B
    Matrix env = Matrix::Identity(1, 1);
    for (int k = 0; k < a.n(); ++k) {
        const auto& ta = a.tensors[k];
        const auto& tb = b.tensors[k];
        Matrix next = Matrix::Zero(static_cast<Eigen::Index>(ta.r), static_cast<Eigen::Index>(tb.r));
        for (std::size_t x = 0; x < ta.l; ++x)
            for (std::size_t y = 0; y < tb.l; ++y) {
                const cd e = env(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
                if (e == cd{0.0, 0.0}) continue;
                for (int p = 0; p < 2; ++p)
                    for (std::size_t bx = 0; bx < ta.r; ++bx) {
                        const cd ca = std::conj(ta.at(x, p, bx)) * e;
                        if (ca == cd{0.0, 0.0}) continue;
                        for (std::size_t by = 0; by < tb.r; ++by)
                            next(static_cast<Eigen::Index>(bx), static_cast<Eigen::Index>(by)) += ca * tb.at(y, p, by);
                    }
            }
        env = std::move(next);
    }
    return env(0, 0);
}

MPO mpo_from_pauli(const PauliSum& h, int n) {
    if (h.terms.empty()) throw std::invalid_argument("empty operator");
    const std::size_t T = h.terms.size();
    auto site_op = [&](const PauliTerm& t, int site) {
        Matrix op = Matrix::Identity(2, 2);
        for (const auto& [q, p] : t.ops)
            if (q == site) {
                switch (p) {
                    case 'X': op << 0, 1, 1, 0; break;
                    case 'Y': op << cd{0, 0}, cd{0, -1}, cd{0, 1}, cd{0, 0}; break;
                    case 'Z': op << 1, 0, 0, -1; break;
                }
            }
        return op;
    };
    MPO mpo;
    mpo.tensors.resize(n);
    for (int k = 0; k < n; ++k) {
        const std::size_t l = (k == 0) ? 1 : T;
        const std::size_t r = (k == n - 1) ? 1 : T;
        Tensor4 w(l, r);
        for (std::size_t t = 0; t < T; ++t) {
            Matrix op = site_op(h.terms[t], k);
            if (k == 0) op *= h.terms[t].coeff;
            const std::size_t a = (k == 0) ? 0 : t;
            const std::size_t b = (k == n - 1) ? 0 : t;
            for (int po = 0; po < 2; ++po)
                for (int pi = 0; pi < 2; ++pi) w.at(a, po, pi, b) += op(po, pi);
        }
        mpo.tensors[k] = w;
    }

    // compress: left-to-right QR, then right-to-left SVD with relative cutoff
    auto lq_r = [](const Tensor4& w) {
        Matrix m(static_cast<Eigen::Index>(w.l * 4), static_cast<Eigen::Index>(w.r));
        for (std::size_t i = 0; i < w.l * 4; ++i)
            for (std::size_t j = 0; j < w.r; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w.d[i * w.r + j];
        return m;
    };
    auto from_lq_r = [](const Matrix& m, std::size_t l) {
        Tensor4 w(l, static_cast<std::size_t>(m.cols()));
        for (std::size_t i = 0; i < l * 4; ++i)
            for (std::size_t j = 0; j < w.r; ++j) w.d[i * w.r + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        return w;
    };
    for (int k = 0; k < n - 1; ++k) {
        Matrix m = lq_r(mpo.tensors[k]);
        Matrix q, r;
        if (m.rows() >= m.cols()) {
            qr_thin(m, q, r);
        } else {  // wide: SVD-based split keeps things well-formed
            auto svd = svd_truncated(m, static_cast<std::size_t>(m.rows()), 0.0);
            q = svd.u.as_matrix();
            Matrix v = svd.v.as_matrix();
            r = Matrix::Zero(q.cols(), m.cols());
            for (Eigen::Index i = 0; i < q.cols(); ++i) r.row(i) = svd.s[static_cast<std::size_t>(i)] * v.row(i);
        }
        mpo.tensors[k] = from_lq_r(q, mpo.tensors[k].l);
        // absorb r into the next site: (r x r') * (r' ,4, rr)
        const Tensor4& nx = mpo.tensors[k + 1];
        Tensor4 merged(static_cast<std::size_t>(r.rows()), nx.r);
        for (std::size_t a = 0; a < merged.l; ++a)
            for (int po = 0; po < 2; ++po)
                for (int pi = 0; pi < 2; ++pi)
                    for (std::size_t b = 0; b < nx.r; ++b) {
                        cd v{0.0, 0.0};
                        for (std::size_t c = 0; c < nx.l; ++c)
                            v += r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) * nx.at(c, po, pi, b);
                        merged.at(a, po, pi, b) = v;
                    }
        mpo.tensors[k + 1] = merged;
    }
    for (int k = n - 1; k > 0; --k) {
        // split (l, (4 r)) by SVD, keep right factor here, absorb U*S left
        const Tensor4& w = mpo.tensors[k];
        Matrix m(static_cast<Eigen::Index>(w.l), static_cast<Eigen::Index>(4 * w.r));
        for (std::size_t i = 0; i < w.l; ++i)
            for (std::size_t j = 0; j < 4 * w.r; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w.d[i * 4 * w.r + j];
        auto svd = svd_truncated(m, std::min<std::size_t>(w.l, 4 * w.r), 1e-12);
        const std::size_t keep = svd.s.size();
        Matrix v = svd.v.as_matrix();  // keep x (4r)
        Tensor4 right(keep, w.r);
        for (std::size_t i = 0; i < keep; ++i)
            for (std::size_t j = 0; j < 4 * w.r; ++j) right.d[i * 4 * w.r + j] = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        mpo.tensors[k] = right;
        Matrix us = svd.u.as_matrix();
        for (std::size_t c = 0; c < keep; ++c) us.col(static_cast<Eigen::Index>(c)) *= svd.s[c];
        const Tensor4& pv = mpo.tensors[k - 1];
        Tensor4 merged(pv.l, keep);
        for (std::size_t a = 0; a < pv.l; ++a)
            for (int po = 0; po < 2; ++po)
                for (int pi = 0; pi < 2; ++pi)
                    for (std::size_t b = 0; b < keep; ++b) {
                        cd acc{0.0, 0.0};
                        for (std::size_t c = 0; c < pv.r; ++c)
                            acc += pv.at(a, po, pi, c) * us(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(b));
                        merged.at(a, po, pi, b) = acc;
                    }
        mpo.tensors[k - 1] = merged;
    }
    return mpo;
}

Matrix mpo_dense(const MPO& h) {
    const int n = h.n();
    if (n > 12) throw std::invalid_argument("mpo_dense cap exceeded");
    // accumulate operator over first k sites as matrix over (2^k x 2^k) x bond
    std::size_t dim = 2;
    std::vector<Matrix> acc(h.tensors[0].r);
    for (std::size_t b = 0; b < h.tensors[0].r; ++b) {
        Matrix m(2, 2);
        for (int po = 0; po < 2; ++po)
            for (int pi = 0; pi < 2; ++pi) m(po, pi) = h.tensors[0].at(0, po, pi, b);
        acc[b] = m;
    }
    for (int k = 1; k < n; ++k) {
        const auto& w = h.tensors[k];
        std::vector<Matrix> next(w.r, Matrix::Zero(static_cast<Eigen::Index>(dim * 2), static_cast<Eigen::Index>(dim * 2)));
        for (std::size_t b = 0; b < w.r; ++b)
            for (std::size_t a = 0; a < w.l; ++a) {
                Matrix site(2, 2);
                for (int po = 0; po < 2; ++po)
                    for (int pi = 0; pi < 2; ++pi) site(po, pi) = w.at(a, po, pi, b);
                if (site.cwiseAbs().maxCoeff() == 0.0) continue;
                next[b] += kron(acc[a], site);
            }
        acc = std::move(next);
        dim *= 2;
    }
    return acc[0];
}

double expectation(const MPS& s, const MPO& h) {
    if (s.n() != h.n()) throw std::invalid_argument("expectation: length mismatch");
    // env(a_bra, w, a_ket), flattened as vector of matrices per w
    std::vector<Matrix> env(1, Matrix::Identity(1, 1));
    std::size_t wl = 1;
    for (int k = 0; k < s.n(); ++k) {
        const auto& t = s.tensors[k];
        const auto& w = h.tensors[k];
        std::vector<Matrix> next(w.r, Matrix::Zero(static_cast<Eigen::Index>(t.r), static_cast<Eigen::Index>(t.r)));
        for (std::size_t wi = 0; wi < wl; ++wi) {
            for (std::size_t wo = 0; wo < w.r; ++wo) {
                // op(po, pi) block for this (wi, wo)
                for (int po = 0; po < 2; ++po)
                    for (int pi = 0; pi < 2; ++pi) {
                        const cd c = w.at(wi, po, pi, wo);
                        if (c == cd{0.0, 0.0}) continue;
                        // next(a', b') += c * conj(T(a, po, a')) env(a, b) T(b, pi, b')
                        for (std::size_t a = 0; a < t.l; ++a)
                            for (std::size_t b = 0; b < t.l; ++b) {
                                const cd e = env[wi](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                                if (e == cd{0.0, 0.0}) continue;
                                for (std::size_t ap = 0; ap < t.r; ++ap) {
                                    const cd left = std::conj(t.at(a, po, ap)) * e * c;
                                    if (left == cd{0.0, 0.0}) continue;
                                    for (std::size_t bp = 0; bp < t.r; ++bp)
                                        next[wo](static_cast<Eigen::Index>(ap), static_cast<Eigen::Index>(bp)) +=
                                            left * t.at(b, pi, bp);
                                }
                            }
                    }
            }
        }
        env = std::move(next);
        wl = w.r;
    }
    const cd v = env[0](0, 0);
    if (std::abs(v.imag()) > 1e-10) throw NumericalError("MPO expectation has imaginary residue");
    return v.real();
}

namespace {

// merge sites k,k+1 with gate applied, SVD-split; S renormalized, S goes right
void gate_split(MPS& s, const Matrix& g, int k, std::size_t chi_max, double cutoff) {
    Tensor3& tl = s.tensors[k];
    Tensor3& tr = s.tensors[k + 1];
    const std::size_t l = tl.l, r = tr.r;
    // theta(a, p, q, b)
    Matrix theta = Matrix::Zero(static_cast<Eigen::Index>(l * 2), static_cast<Eigen::Index>(2 * r));
    for (std::size_t a = 0; a < l; ++a)
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                for (std::size_t b = 0; b < r; ++b) {
                    cd v{0.0, 0.0};
                    for (std::size_t c = 0; c < tl.r; ++c) v += tl.at(a, p, c) * tr.at(c, q, b);
                    theta(static_cast<Eigen::Index>(a * 2 + p), static_cast<Eigen::Index>(q * r + b)) = v;
                }
    // apply gate on the physical pair: theta'(a, p', q', b) = g[(p',q'),(p,q)] theta
    Matrix out = Matrix::Zero(theta.rows(), theta.cols());
    for (std::size_t a = 0; a < l; ++a)
        for (std::size_t b = 0; b < r; ++b)
            for (int po = 0; po < 2; ++po)
                for (int qo = 0; qo < 2; ++qo) {
                    cd v{0.0, 0.0};
                    for (int p = 0; p < 2; ++p)
                        for (int q = 0; q < 2; ++q)
                            v += g(po * 2 + qo, p * 2 + q) * theta(static_cast<Eigen::Index>(a * 2 + p), static_cast<Eigen::Index>(q * r + b));
                    out(static_cast<Eigen::Index>(a * 2 + po), static_cast<Eigen::Index>(qo * r + b)) = v;
                }
    auto svd = svd_truncated(out, chi_max, cutoff);
    const std::size_t keep = svd.s.size();
    double nrm = 0.0;
    for (double sv : svd.s) nrm += sv * sv;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-300) throw NumericalError("two-site gate produced zero state");
    Matrix u = svd.u.as_matrix();
    Matrix v = svd.v.as_matrix();
    for (std::size_t i = 0; i < keep; ++i) v.row(static_cast<Eigen::Index>(i)) *= svd.s[i] / nrm;
    tl = Tensor3::from_lp_r(u, l);
    // v rows indexed by kept bond, columns (q, b)
    Tensor3 nr(keep, r);
    for (std::size_t c = 0; c < keep; ++c)
        for (int q = 0; q < 2; ++q)
            for (std::size_t b = 0; b < r; ++b) nr.at(c, q, b) = v(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(q * r + b));
    s.tensors[k + 1] = nr;
}

void move_center_right(MPS& s, int k) {
    Matrix q, r;
    qr_thin(s.tensors[k].lp_r(), q, r);
    const std::size_t l = s.tensors[k].l;
    s.tensors[k] = Tensor3::from_lp_r(q, l);
    const Tensor3& nx = s.tensors[k + 1];
    Tensor3 merged(static_cast<std::size_t>(r.rows()), nx.r);
    for (std::size_t a = 0; a < merged.l; ++a)
        for (int p = 0; p < 2; ++p)
            for (std::size_t b = 0; b < nx.r; ++b) {
                cd v{0.0, 0.0};
                for (std::size_t c = 0; c < nx.l; ++c) v += r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) * nx.at(c, p, b);
                merged.at(a, p, b) = v;
            }
    s.tensors[k + 1] = merged;
}

void move_center_left(MPS& s, int k) {
    Matrix q, r;
    qr_thin(s.tensors[k].l_pr().adjoint(), q, r);
    const std::size_t rr = s.tensors[k].r;
    s.tensors[k] = Tensor3::from_l_pr(q.adjoint(), rr);
    Matrix carry = r.adjoint();  // (l, keep)
    const Tensor3& pv = s.tensors[k - 1];
    Tensor3 merged(pv.l, static_cast<std::size_t>(carry.cols()));
    for (std::size_t a = 0; a < pv.l; ++a)
        for (int p = 0; p < 2; ++p)
            for (std::size_t b = 0; b < merged.r; ++b) {
                cd v{0.0, 0.0};
                for (std::size_t c = 0; c < pv.r; ++c) v += pv.at(a, p, c) * carry(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(b));
                merged.at(a, p, b) = v;
            }
    s.tensors[k - 1] = merged;
}

}  // namespace

MPS apply_two_site_gate(const MPS& s, const Matrix& g, int site, std::size_t chi_max,
                        double cutoff) {
    if (site < 0 || site >= s.n() - 1) throw std::invalid_argument("two-site gate site out of range");
    MPS out = s;
    gate_split(out, g, site, chi_max, cutoff);
    out.form = CanonicalForm::none;
    return out;
}

MPS tebd_imaginary(const MPS& s, const std::vector<std::pair<int, Matrix>>& bonds, double dtau,
                   int steps, std::size_t chi_max) {
    if (dtau <= 0.0) throw std::invalid_argument("dtau must be positive");
    const int n = s.n();
    for (const auto& [k, hloc] : bonds) {
        if (k < 0 || k >= n - 1) throw std::invalid_argument("bond index out of range");
        if ((hloc - hloc.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw NumericalError("bond term not Hermitian");
    }
    if (steps == 0) return s;

    std::vector<std::pair<int, Matrix>> gates;
    for (const auto& [k, hloc] : bonds) gates.emplace_back(k, hermitian_expm(hloc, cd{-dtau, 0.0}));
    std::stable_sort(gates.begin(), gates.end(), [](const auto& a, const auto& b) {
        const bool ea = a.first % 2 == 0, eb = b.first % 2 == 0;
        if (ea != eb) return ea;
        return a.first < b.first;
    });

    MPS cur = canonicalize(s, CanonicalForm::right);  // center at 0
    int center = 0;
    auto goto_site = [&](int k) {
        while (center < k) { move_center_right(cur, center); ++center; }
        while (center > k) { move_center_left(cur, center); --center; }
    };
    for (int step = 0; step < steps; ++step) {
        for (const auto& [k, g] : gates) {
            goto_site(k);
            gate_split(cur, g, k, chi_max, tol::svd_cutoff);
            center = k + 1;
        }
    }
    goto_site(0);
    // trailing center tensor carries the norm; scale it out
    double nrm = 0.0;
    for (const auto& v : cur.tensors[0].d) nrm += std::norm(v);
    nrm = std::sqrt(nrm);
    for (auto& v : cur.tensors[0].d) v /= nrm;
    cur.form = CanonicalForm::right;
    return cur;
}

DmrgResult dmrg_ground_state(const MPO& h, int n, std::size_t chi_max, int sweeps,
                             std::uint64_t seed) {
    if (chi_max < 1) throw std::invalid_argument("chi_max must be >= 1");
    if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
    if (h.n() != n) throw std::invalid_argument("MPO length mismatch");
    Rng rng(seed);
    MPS psi = canonicalize(random_mps(n, chi_max, rng), CanonicalForm::right);

    // left environments L[k]: contraction of sites < k; L[k](a_bra, w, a_ket)
    // stored as vector over w of (bond x bond) matrices
    std::vector<std::vector<Matrix>> lenv(n + 1), renv(n + 1);
    lenv[0] = {Matrix::Identity(1, 1)};
    renv[n] = {Matrix::Identity(1, 1)};

    auto contract_left = [&](int k) {
        const auto& t = psi.tensors[k];
        const auto& w = h.tensors[k];
        std::vector<Matrix> next(w.r, Matrix::Zero(static_cast<Eigen::Index>(t.r), static_cast<Eigen::Index>(t.r)));
        for (std::size_t wi = 0; wi < w.l; ++wi)
            for (std::size_t wo = 0; wo < w.r; ++wo)
                for (int po = 0; po < 2; ++po)
                    for (int pi = 0; pi < 2; ++pi) {
                        const cd c = w.at(wi, po, pi, wo);
                        if (c == cd{0.0, 0.0}) continue;
                        for (std::size_t a = 0; a < t.l; ++a)
                            for (std::size_t b = 0; b < t.l; ++b) {
                                const cd e = lenv[k][wi](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                                if (e == cd{0.0, 0.0}) continue;
                                for (std::size_t ap = 0; ap < t.r; ++ap) {
                                    const cd left = std::conj(t.at(a, po, ap)) * e * c;
                                    if (left == cd{0.0, 0.0}) continue;
                                    for (std::size_t bp = 0; bp < t.r; ++bp)
                                        next[wo](static_cast<Eigen::Index>(ap), static_cast<Eigen::Index>(bp)) += left * t.at(b, pi, bp);
                                }
                            }
                    }
        lenv[k + 1] = std::move(next);
    };
    auto contract_right = [&](int k) {
        const auto& t = psi.tensors[k];
        const auto& w = h.tensors[k];
        std::vector<Matrix> next(w.l, Matrix::Zero(static_cast<Eigen::Index>(t.l), static_cast<Eigen::Index>(t.l)));
        for (std::size_t wi = 0; wi < w.l; ++wi)
            for (std::size_t wo = 0; wo < w.r; ++wo)
                for (int po = 0; po < 2; ++po)
                    for (int pi = 0; pi < 2; ++pi) {
                        const cd c = w.at(wi, po, pi, wo);
                        if (c == cd{0.0, 0.0}) continue;
                        for (std::size_t ap = 0; ap < t.r; ++ap)
                            for (std::size_t bp = 0; bp < t.r; ++bp) {
                                const cd e = renv[k + 1][wo](static_cast<Eigen::Index>(ap), static_cast<Eigen::Index>(bp));
                                if (e == cd{0.0, 0.0}) continue;
                                for (std::size_t a = 0; a < t.l; ++a) {
                                    const cd right = std::conj(t.at(a, po, ap)) * e * c;
                                    if (right == cd{0.0, 0.0}) continue;
                                    for (std::size_t b = 0; b < t.l; ++b)
                                        next[wi](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += right * t.at(b, pi, bp);
                                }
                            }
                    }
        renv[k] = std::move(next);
    };
    for (int k = n - 1; k >= 1; --k) contract_right(k);

    double last_e = 0.0;
    DmrgResult res;
    auto solve_bond = [&](int k, bool to_right) {
        const auto& wl = h.tensors[k];
        const auto& wr = h.tensors[k + 1];
        const std::size_t al = psi.tensors[k].l;
        const std::size_t ar = psi.tensors[k + 1].r;
        const std::size_t dim = al * 4 * ar;
        Matrix heff = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t wi = 0; wi < wl.l; ++wi)
            for (std::size_t wm = 0; wm < wl.r; ++wm)
                for (std::size_t wo = 0; wo < wr.r; ++wo)
                    for (int p = 0; p < 2; ++p)
                        for (int pp = 0; pp < 2; ++pp) {
                            const cd c1 = wl.at(wi, p, pp, wm);
                            if (c1 == cd{0.0, 0.0}) continue;
                            for (int q = 0; q < 2; ++q)
                                for (int qp = 0; qp < 2; ++qp) {
                                    const cd c2 = wr.at(wm, q, qp, wo);
                                    if (c2 == cd{0.0, 0.0}) continue;
                                    const cd cc = c1 * c2;
                                    for (std::size_t a = 0; a < al; ++a)
                                        for (std::size_t aa = 0; aa < al; ++aa) {
                                            const cd le = lenv[k][wi](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(aa));
                                            if (le == cd{0.0, 0.0}) continue;
                                            for (std::size_t b = 0; b < ar; ++b)
                                                for (std::size_t bb = 0; bb < ar; ++bb) {
                                                    const cd re = renv[k + 2][wo](static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(bb));
                                                    if (re == cd{0.0, 0.0}) continue;
                                                    const std::size_t row = ((a * 2 + p) * 2 + q) * ar + b;
                                                    const std::size_t col = ((aa * 2 + pp) * 2 + qp) * ar + bb;
                                                    heff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += le * cc * re;
                                                }
                                        }
                                }
                        }
        Eigen::VectorXd vals;
        Matrix vecs;
        hermitian_eig(heff, vals, vecs);
        last_e = vals(0);
        Vector ground = vecs.col(0);
        Matrix theta(static_cast<Eigen::Index>(al * 2), static_cast<Eigen::Index>(2 * ar));
        for (std::size_t a = 0; a < al; ++a)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    for (std::size_t b = 0; b < ar; ++b)
                        theta(static_cast<Eigen::Index>(a * 2 + p), static_cast<Eigen::Index>(q * ar + b)) =
                            ground(static_cast<Eigen::Index>(((a * 2 + p) * 2 + q) * ar + b));
        auto svd = svd_truncated(theta, chi_max, tol::svd_cutoff);
        const std::size_t keep = svd.s.size();
        double nrm = 0.0;
        for (double sv : svd.s) nrm += sv * sv;
        nrm = std::sqrt(nrm);
        Matrix u = svd.u.as_matrix();
        Matrix v = svd.v.as_matrix();
        if (to_right) {
            for (std::size_t i = 0; i < keep; ++i) v.row(static_cast<Eigen::Index>(i)) *= svd.s[i] / nrm;
        } else {
            for (std::size_t i = 0; i < keep; ++i) u.col(static_cast<Eigen::Index>(i)) *= svd.s[i] / nrm;
        }
        psi.tensors[k] = Tensor3::from_lp_r(u, al);
        Tensor3 nr(keep, ar);
        for (std::size_t c = 0; c < keep; ++c)
            for (int q = 0; q < 2; ++q)
                for (std::size_t b = 0; b < ar; ++b) nr.at(c, q, b) = v(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(q * ar + b));
        psi.tensors[k + 1] = nr;
        if (to_right) contract_left(k); else contract_right(k + 1);
    };

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int k = 0; k < n - 1; ++k) solve_bond(k, true);
        for (int k = n - 2; k >= 0; --k) solve_bond(k, false);
        res.sweep_energies.push_back(last_e);
    }
    psi.form = CanonicalForm::none;
    res.state = canonicalize(psi, CanonicalForm::left);
    res.energy = expectation(res.state, h);
    return res;
}

TruncateResult truncate(const MPS& s, std::size_t chi_max) {
    if (chi_max < 1) throw std::invalid_argument("chi_max must be >= 1");
    MPS orig = canonicalize(s, CanonicalForm::right);
    MPS cur = orig;
    const int n = cur.n();
    int center = 0;
    for (int k = 0; k < n - 1; ++k) {
        // center at k; split with truncation, center moves right
        Matrix theta = cur.tensors[k].lp_r();
        auto svd = svd_truncated(theta, chi_max, tol::svd_cutoff);
        const std::size_t keep = svd.s.size();
        double nrm = 0.0;
        for (double sv : svd.s) nrm += sv * sv;
        nrm = std::sqrt(nrm);
        Matrix u = svd.u.as_matrix();
        Matrix v = svd.v.as_matrix();
        for (std::size_t i = 0; i < keep; ++i) v.row(static_cast<Eigen::Index>(i)) *= svd.s[i] / nrm;
        cur.tensors[k] = Tensor3::from_lp_r(u, cur.tensors[k].l);
        const Tensor3& nx = cur.tensors[k + 1];
        Tensor3 merged(keep, nx.r);
        for (std::size_t a = 0; a < keep; ++a)
            for (int p = 0; p < 2; ++p)
                for (std::size_t b = 0; b < nx.r; ++b) {
                    cd acc{0.0, 0.0};
                    for (std::size_t c = 0; c < nx.l; ++c) acc += v(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) * nx.at(c, p, b);
                    merged.at(a, p, b) = acc;
                }
        cur.tensors[k + 1] = merged;
        center = k + 1;
    }
    (void)center;
    // renormalize the final site
    double nrm = 0.0;
    for (const auto& v : cur.tensors[n - 1].d) nrm += std::norm(v);
    nrm = std::sqrt(nrm);
    for (auto& v : cur.tensors[n - 1].d) v /= nrm;
    cur.form = CanonicalForm::left;
    TruncateResult res;
    res.fidelity = std::norm(overlap(cur, orig));
    res.state = std::move(cur);
    return res;
}

}  // namespace mpsqc
