#include "mpsqc/compiler.hpp"

#include <cmath>
#include <map>

#include "mpsqc/common.hpp"

namespace mpsqc {

Matrix embed_isometry(const Matrix& v) {
    const Eigen::Index rows = v.rows(), cols = v.cols();
    if (cols > rows) throw std::invalid_argument("isometry must be tall");
    const double dev = (v.adjoint() * v - Matrix::Identity(cols, cols)).cwiseAbs().maxCoeff();
    if (dev > 1e-8) throw NumericalError("input is not an isometry");
    Matrix u(rows, rows);
    u.leftCols(cols) = v;
    Eigen::Index have = cols;
    for (Eigen::Index e = 0; e < rows && have < rows; ++e) {
        Vector cand = Vector::Zero(rows);
        cand(e) = 1.0;
        for (Eigen::Index c = 0; c < have; ++c) cand -= u.col(c).dot(cand) * u.col(c);
        // re-orthogonalize once for numerical stability
        for (Eigen::Index c = 0; c < have; ++c) cand -= u.col(c).dot(cand) * u.col(c);
        const double nrm = cand.norm();
        if (nrm > 1e-8) u.col(have++) = cand / nrm;
    }
    if (have < rows) throw NumericalError("isometry completion failed");
    return u;
}

namespace {

// raw staircase unitaries of a left-canonical chi<=2 MPS, in application
// order: H_k for k = n-1 down to 1 (pair (k-1, k)), then the 2x2 boundary
void staircase_unitaries(const MPS& s, std::vector<Matrix>& h, Matrix& u0) {
    const int n = s.n();
    h.clear();
    for (int k = n - 1; k >= 1; --k) {
        const Tensor3& t = s.tensors[k];
        if (t.l > 2 || t.r > 2) throw std::invalid_argument("staircase needs bond dimension <= 2");
        Matrix m = Matrix::Zero(4, static_cast<Eigen::Index>(t.r));
        for (std::size_t a = 0; a < t.l; ++a)
            for (int p = 0; p < 2; ++p)
                for (std::size_t bcol = 0; bcol < t.r; ++bcol)
                    m(static_cast<Eigen::Index>(a * 2 + p), static_cast<Eigen::Index>(bcol)) =
                        t.at(a, p, bcol);
        h.push_back(embed_isometry(m));
    }
    const Tensor3& t0 = s.tensors[0];
    Matrix m0(2, static_cast<Eigen::Index>(t0.r));
    for (int p = 0; p < 2; ++p)
        for (std::size_t bcol = 0; bcol < t0.r; ++bcol)
            m0(p, static_cast<Eigen::Index>(bcol)) = t0.at(0, p, bcol);
    u0 = embed_isometry(m0);
}

MPS as_left_canonical(const MPS& s) {
    if (s.form == CanonicalForm::left) return s;
    if (s.form == CanonicalForm::right) return canonicalize(s, CanonicalForm::left);
    throw std::invalid_argument("staircase compilation needs a canonical-form state");
}

}  // namespace

CompiledStaircase mps_to_staircase(const MPS& s, bool adjoint) {
    const MPS sl = as_left_canonical(s);
    const int n = sl.n();
    if (sl.max_bond() > 2) throw std::invalid_argument("staircase needs bond dimension <= 2");
    std::vector<Matrix> h;
    Matrix u0;
    staircase_unitaries(sl, h, u0);

    CompiledStaircase cs;
    cs.n = n;
    cs.adjoint = adjoint;
    if (!adjoint) {
        for (int i = 0; i < n - 1; ++i) {
            StairGate g;
            g.q0 = n - 2 - i;  // H_k on (k-1, k), k = n-1-i
            g.angles = kak_decompose(h[i]);
            cs.gates.push_back(g);
        }
    } else {
        for (int i = n - 2; i >= 0; --i) {
            StairGate g;
            g.q0 = n - 2 - i;  // H_k^dag on (k-1, k), applied k = 1 up to n-1
            g.angles = kak_decompose(h[i].adjoint());
            cs.gates.push_back(g);
        }
        u0 = u0.adjoint().eval();
    }
    auto [u0s, ph] = su2_normalize(u0);
    cs.boundary_zyz = zyz_angles(u0s);
    cs.boundary_phase = std::arg(ph);
    return cs;
}

Matrix stair_gate_unitary(const StairGate& g) { return kak_reconstruct(g.angles); }

namespace {

// 15 primitive gates realizing one KAK block on (a, b); the block's global
// phase is returned for accumulation by the caller
double emit_kak_block(Circuit& c, std::vector<double>& x0, int a, int b, const KAKAngles* r) {
    auto push1 = [&](GateKind k, int q, double ang) {
        Gate g;
        g.kind = k;
        g.q0 = q;
        c.gates.push_back(g);
        x0.push_back(ang);
    };
    auto push2 = [&](GateKind k, double ang) {
        Gate g;
        g.kind = k;
        g.q0 = a;
        g.q1 = b;
        c.gates.push_back(g);
        x0.push_back(ang);
    };
    static const KAKAngles zero{};
    const KAKAngles& k = r ? *r : zero;
    push1(GateKind::rz, a, k.pre_left[0]);
    push1(GateKind::rz, b, k.pre_right[0]);
    push1(GateKind::ry, a, k.pre_left[1]);
    push1(GateKind::ry, b, k.pre_right[1]);
    push1(GateKind::rz, a, k.pre_left[2]);
    push1(GateKind::rz, b, k.pre_right[2]);
    push2(GateKind::xx, 2 * k.interaction[0]);
    push2(GateKind::yy, 2 * k.interaction[1]);
    push2(GateKind::zz, 2 * k.interaction[2]);
    push1(GateKind::rz, a, k.post_left[0]);
    push1(GateKind::rz, b, k.post_right[0]);
    push1(GateKind::ry, a, k.post_left[1]);
    push1(GateKind::ry, b, k.post_right[1]);
    push1(GateKind::rz, a, k.post_left[2]);
    push1(GateKind::rz, b, k.post_right[2]);
    return k.global_phase;
}

void emit_rycrx_block(Circuit& c, std::vector<double>& x0, int a, int b) {
    auto push1 = [&](int q) {
        Gate g;
        g.kind = GateKind::ry;
        g.q0 = q;
        c.gates.push_back(g);
        x0.push_back(0.0);
    };
    auto pushc = [&]() {
        Gate g;
        g.kind = GateKind::crx;
        g.q0 = a;
        g.q1 = b;
        c.gates.push_back(g);
        x0.push_back(0.0);
    };
    push1(a);
    push1(b);
    pushc();
    push1(a);
    push1(b);
    pushc();
}

void emit_boundary(Circuit& c, std::vector<double>& x0, const std::array<double, 3>& zyz) {
    for (GateKind k : {GateKind::rz, GateKind::ry, GateKind::rz}) {
        Gate g;
        g.kind = k;
        g.q0 = 0;
        c.gates.push_back(g);
    }
    x0.push_back(zyz[0]);
    x0.push_back(zyz[1]);
    x0.push_back(zyz[2]);
}

}  // namespace

std::pair<Circuit, std::vector<double>> staircase_circuit(const CompiledStaircase& diag) {
    Circuit c;
    c.n = diag.n;
    std::vector<double> x0;
    if (diag.adjoint) {
        emit_boundary(c, x0, diag.boundary_zyz);
        c.global_phase += diag.boundary_phase;
    }
    for (const auto& g : diag.gates)
        c.global_phase += emit_kak_block(c, x0, g.q0, g.q0 + 1, &g.angles);
    if (!diag.adjoint) {
        emit_boundary(c, x0, diag.boundary_zyz);
        c.global_phase += diag.boundary_phase;
    }
    return {std::move(c), std::move(x0)};
}

std::pair<Circuit, std::vector<double>> init_brickwall(const CompiledStaircase& diag,
                                                       const AdjacentDiagonal* adjacent, int depth,
                                                       OffdiagKind offdiag) {
    const int n = diag.n;
    const bool has_adjacent = adjacent && !adjacent->gates.empty();
    if (has_adjacent && diag.adjoint)
        throw std::invalid_argument("adjacent diagonal is only compiled in the preparation convention");
    const int min_depth = (n - 1) + (has_adjacent ? 1 : 0);
    if (depth < min_depth) throw std::invalid_argument("depth too small for the compiled diagonals");

    // compiled slots keyed by (layer, first qubit of the pair)
    auto key = [n](int layer, int q0) { return layer * n + q0; };
    std::map<int, const KAKAngles*> slots;
    if (!diag.adjoint) {
        for (const auto& g : diag.gates) slots[key(n - 2 - g.q0, g.q0)] = &g.angles;
        if (has_adjacent)
            for (const auto& g : adjacent->gates) slots[key(n - g.q0, g.q0)] = &g.angles;
    } else {
        for (const auto& g : diag.gates) slots[key(g.q0, g.q0)] = &g.angles;
    }

    Circuit c;
    c.n = n;
    std::vector<double> x0;
    if (diag.adjoint) {
        emit_boundary(c, x0, diag.boundary_zyz);
        c.global_phase += diag.boundary_phase;
    }
    for (int ell = 0; ell < depth; ++ell) {
        const int par = diag.adjoint ? (ell % 2) : (((n - 2 - ell) % 2) + 2) % 2;
        for (int q = par; q < n - 1; q += 2) {
            const auto it = slots.find(key(ell, q));
            if (it != slots.end()) {
                c.global_phase += emit_kak_block(c, x0, q, q + 1, it->second);
            } else if (offdiag == OffdiagKind::ry_crx) {
                emit_rycrx_block(c, x0, q, q + 1);
            } else {
                emit_kak_block(c, x0, q, q + 1, nullptr);
            }
        }
        if (!diag.adjoint && ell == n - 2) {
            emit_boundary(c, x0, diag.boundary_zyz);
            c.global_phase += diag.boundary_phase;
        }
    }
    return {std::move(c), std::move(x0)};
}

namespace {

// positions of the chi<=4 two-diagonal ansatz in application order:
// kind 0 = main H_k, kind 1 = adjacent a_j, kind 2 = boundary
struct Chi4Pos {
    int kind;
    int idx;
};

std::vector<Chi4Pos> chi4_positions(int n) {
    std::vector<Chi4Pos> pos;
    for (int ell = 0; ell < n; ++ell) {
        if (n - 1 - ell >= 1) pos.push_back({0, n - 1 - ell});
        const int j = n + 1 - ell;
        if (j >= 2 && j <= n - 1) pos.push_back({1, j});
    }
    pos.push_back({2, 0});
    return pos;
}

void apply_pair(StateVector& psi, const Matrix& u, int q0) { apply_gate_2q(psi, u, q0, q0 + 1); }

}  // namespace

AdjacentDiagonal approx_compile_chi4(const MPS& s, int iterations, std::uint64_t seed,
                                     CompiledStaircase* main_out) {
    (void)seed;  // the alternating fit is deterministic from its initialization
    const int n = s.n();
    if (s.max_bond() > 4) throw UnsupportedBondDimension("approximate compilation supports bonds <= 4");
    if (s.form == CanonicalForm::none) throw std::invalid_argument("chi4 compile needs a canonical-form state");

    StateVector target = to_dense(s);
    normalize(target);

    const TruncateResult base = truncate(s, 2);
    std::vector<Matrix> main_h;
    Matrix u0;
    staircase_unitaries(base.state, main_h, u0);
    // main_h[i] acts on pair (n-2-i, n-1-i); index by k: H_k = main_h[n-1-k]
    std::map<int, Matrix> main;
    for (int i = 0; i < n - 1; ++i) main[n - 1 - i] = main_h[i];
    std::map<int, Matrix> adj;
    for (int j = 2; j <= n - 1; ++j) adj[j] = Matrix::Identity(4, 4);

    const std::vector<Chi4Pos> pos = chi4_positions(n);

    auto apply_pos = [&](StateVector& psi, const Chi4Pos& p, bool dagger) {
        const Matrix* u = nullptr;
        if (p.kind == 0)
            u = &main[p.idx];
        else if (p.kind == 1)
            u = &adj[p.idx];
        if (p.kind == 2) {
            const Matrix m = dagger ? Matrix(u0.adjoint()) : u0;
            apply_gate_1q(psi, m, 0);
        } else {
            const Matrix m = dagger ? Matrix(u->adjoint()) : *u;
            apply_pair(psi, m, p.idx - 1);
        }
    };

    auto fidelity = [&]() {
        StateVector phi = StateVector::zero_state(n);
        for (const auto& p : pos) apply_pos(phi, p, false);
        const cd ov = inner(target, phi);
        return std::norm(ov);
    };

    AdjacentDiagonal out;
    out.fidelity_trace.push_back(fidelity());

    // alternating single-gate updates: with all other gates fixed the optimal
    // gate maximizing |<target|circuit|0>| is V U^dag from the SVD of the
    // gate environment
    auto environment2 = [&](std::size_t idx) {
        StateVector v = StateVector::zero_state(n);
        for (std::size_t i = 0; i < idx; ++i) apply_pos(v, pos[i], false);
        StateVector u = target;
        for (std::size_t i = pos.size(); i-- > idx + 1;) apply_pos(u, pos[i], true);
        const int q0 = pos[idx].idx - 1;
        const std::size_t mh = std::size_t{1} << (n - 1 - q0);
        const std::size_t ml = std::size_t{1} << (n - 2 - q0);
        Matrix e = Matrix::Zero(4, 4);
        for (std::size_t i = 0; i < v.dim(); ++i) {
            if (i & (mh | ml)) continue;
            for (int a = 0; a < 4; ++a) {
                const cd ua = std::conj(u.amps[i | ((a >> 1) ? mh : 0) | ((a & 1) ? ml : 0)]);
                for (int b = 0; b < 4; ++b)
                    e(a, b) += ua * v.amps[i | ((b >> 1) ? mh : 0) | ((b & 1) ? ml : 0)];
            }
        }
        return e;
    };
    auto environment1 = [&](std::size_t idx) {
        StateVector v = StateVector::zero_state(n);
        for (std::size_t i = 0; i < idx; ++i) apply_pos(v, pos[i], false);
        StateVector u = target;
        for (std::size_t i = pos.size(); i-- > idx + 1;) apply_pos(u, pos[i], true);
        const std::size_t m0 = std::size_t{1} << (n - 1);
        Matrix e = Matrix::Zero(2, 2);
        for (std::size_t i = 0; i < v.dim(); ++i) {
            if (i & m0) continue;
            for (int a = 0; a < 2; ++a) {
                const cd ua = std::conj(u.amps[i | (a ? m0 : 0)]);
                for (int b = 0; b < 2; ++b) e(a, b) += ua * v.amps[i | (b ? m0 : 0)];
            }
        }
        return e;
    };
    auto optimal_gate = [](const Matrix& e) {
        Eigen::JacobiSVD<Matrix> svd(e.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
        return Matrix(svd.matrixV() * svd.matrixU().adjoint());
    };

    for (int it = 0; it < iterations; ++it) {
        for (std::size_t idx = 0; idx < pos.size(); ++idx) {
            const Chi4Pos& p = pos[idx];
            if (p.kind == 2) {
                u0 = optimal_gate(environment1(idx));
            } else if (p.kind == 0) {
                main[p.idx] = optimal_gate(environment2(idx));
            } else {
                adj[p.idx] = optimal_gate(environment2(idx));
            }
        }
        out.fidelity_trace.push_back(fidelity());
    }

    if (main_out) {
        main_out->n = n;
        main_out->adjoint = false;
        main_out->gates.clear();
        for (int i = 0; i < n - 1; ++i) {
            StairGate g;
            g.q0 = n - 2 - i;
            g.angles = kak_decompose(main[n - 1 - i]);
            main_out->gates.push_back(g);
        }
        auto [u0s, ph] = su2_normalize(u0);
        main_out->boundary_zyz = zyz_angles(u0s);
        main_out->boundary_phase = std::arg(ph);
    }
    for (int j = 2; j <= n - 1; ++j) {
        StairGate g;
        g.q0 = j - 1;
        g.angles = kak_decompose(adj[j]);
        out.gates.push_back(g);
    }
    return out;
}

CompileResult compile_to_circuit(const MPS& s, int depth, OffdiagKind offdiag, bool adjoint,
                                 int fit_iterations, std::uint64_t seed) {
    CompileResult res;
    const std::size_t chi = s.max_bond();
    if (chi > 4)
        throw UnsupportedBondDimension("cannot compile bond dimension " + std::to_string(chi) +
                                       ", the supported maximum is 4");
    if (chi <= 2) {
        CompiledStaircase diag = mps_to_staircase(s, adjoint);
        auto [c, p] = init_brickwall(diag, nullptr, depth, offdiag);
        res.circuit = std::move(c);
        res.params = std::move(p);
        return res;
    }
    if (adjoint)
        throw std::invalid_argument("adjoint compilation supports bond dimension <= 2");
    CompiledStaircase diag;
    AdjacentDiagonal adjacent = approx_compile_chi4(s, fit_iterations, seed, &diag);
    auto [c, p] = init_brickwall(diag, &adjacent, depth, offdiag);
    res.circuit = std::move(c);
    res.params = std::move(p);
    res.fidelity = adjacent.fidelity_trace.back();
    res.approximate = true;
    return res;
}

}  // namespace mpsqc
