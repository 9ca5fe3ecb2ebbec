#include "mpsqc/kak.hpp"

#include <algorithm>
#include <cmath>

#include "mpsqc/common.hpp"

namespace mpsqc {

namespace {

const double kPi = 3.14159265358979323846;

Matrix magic_basis() {
    Matrix b(4, 4);
    const double s = 1.0 / std::sqrt(2.0);
    const cd i{0.0, 1.0};
    b << s, 0, 0, i * s,
         0, i * s, s, 0,
         0, i * s, -s, 0,
         s, 0, 0, -i * s;
    return b;
}

// eigenphase rows of the magic-basis diagonalization of exp(-i k_a P_a P_a):
// phase_j = -(F k)_j
Eigen::Matrix<double, 4, 3> freq_matrix() {
    Eigen::Matrix<double, 4, 3> f;
    f << 1, -1, 1,
         1, 1, -1,
         -1, -1, -1,
         -1, 1, 1;
    return f;
}

// simultaneous diagonalization of commuting real symmetric 4x4 matrices:
// eigendecompose x, then rediagonalize y inside each (near-)degenerate block
Eigen::Matrix4d simultaneous_diag(const Eigen::Matrix4d& x, const Eigen::Matrix4d& y) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(x);
    const Eigen::Vector4d w = es.eigenvalues();
    const Eigen::Matrix4d v = es.eigenvectors();
    Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
    int i = 0;
    while (i < 4) {
        int j = i;
        while (j + 1 < 4 && w(j + 1) - w(i) < 1e-9) ++j;
        const auto blk = v.middleCols(i, j - i + 1);
        Eigen::MatrixXd sub = blk.transpose() * y * blk;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(sub);
        p.middleCols(i, j - i + 1) = blk * es2.eigenvectors();
        i = j + 1;
    }
    if (p.determinant() < 0) p.col(3) *= -1.0;
    return p;
}

// rank-1 split of an exact Kronecker product k = a (x) b via realignment
std::pair<Matrix, Matrix> split_kron(const Matrix& k) {
    Matrix r(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) r(i * 2 + j, a * 2 + b) = k(i * 2 + a, j * 2 + b);
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double s0 = std::sqrt(svd.singularValues()(0));
    Matrix a(2, 2), b(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            a(i, j) = svd.matrixU()(i * 2 + j, 0) * s0;
            b(i, j) = std::conj(svd.matrixV()(i * 2 + j, 0)) * s0;
        }
    return {a, b};
}

void check_unitary(const Matrix& u) {
    if (u.rows() != 4 || u.cols() != 4) throw std::invalid_argument("expected a 4x4 matrix");
    const double dev = (u.adjoint() * u - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff();
    if (dev > 1e-8) throw NumericalError("matrix is not unitary");
}

Matrix matrix_power(Matrix m, int n) {
    Matrix acc = Matrix::Identity(m.rows(), m.cols());
    for (int i = 0; i < n; ++i) acc = m * acc;
    return acc;
}

}  // namespace

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << cd{0, 0}, cd{0, -1}, cd{0, 1}, cd{0, 0};
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix rz_matrix(double theta) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::exp(cd{0.0, -theta / 2});
    m(1, 1) = std::exp(cd{0.0, theta / 2});
    return m;
}

Matrix ry_matrix(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Matrix m(2, 2);
    m << c, -s, s, c;
    return m;
}

Matrix crx_matrix(double theta) {
    Matrix m = Matrix::Identity(4, 4);
    const cd c{std::cos(theta / 2), 0.0};
    const cd is{0.0, -std::sin(theta / 2)};
    m(2, 2) = c;
    m(2, 3) = is;
    m(3, 2) = is;
    m(3, 3) = c;
    return m;
}

namespace {
Matrix two_body_rotation(double theta, const Matrix& p) {
    const Matrix pp = kron(p, p);
    return std::cos(theta / 2) * Matrix::Identity(4, 4) - cd{0.0, std::sin(theta / 2)} * pp;
}
}  // namespace

Matrix xx_matrix(double theta) { return two_body_rotation(theta, pauli_x()); }
Matrix yy_matrix(double theta) { return two_body_rotation(theta, pauli_y()); }
Matrix zz_matrix(double theta) { return two_body_rotation(theta, pauli_z()); }

std::pair<Matrix, cd> su2_normalize(const Matrix& u) {
    const cd det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    const cd ph = std::sqrt(det);
    return {u / ph, ph};
}

std::array<double, 3> zyz_angles(const Matrix& v) {
    const double b = 2.0 * std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
    double a = 0.0, c = 0.0;
    if (std::abs(v(0, 0)) > 1e-12 && std::abs(v(1, 0)) > 1e-12) {
        const double cpa = -2.0 * std::arg(v(0, 0));
        const double cma = 2.0 * std::arg(v(1, 0));
        c = (cpa + cma) / 2;
        a = (cpa - cma) / 2;
    } else if (std::abs(v(0, 0)) <= 1e-12) {
        c = 2.0 * std::arg(v(1, 0));
    } else {
        c = -2.0 * std::arg(v(0, 0));
    }
    return {a, b, c};
}

Matrix interaction_gate(const std::array<double, 3>& k) {
    const Matrix h = k[0] * kron(pauli_x(), pauli_x()) + k[1] * kron(pauli_y(), pauli_y()) +
                     k[2] * kron(pauli_z(), pauli_z());
    return hermitian_expm(h, cd{0.0, -1.0});
}

KAKAngles kak_decompose(const Matrix& u) {
    check_unitary(u);
    const Matrix b = magic_basis();
    const cd det_u = u.determinant();
    const cd d = std::pow(det_u, 0.25);
    const Matrix v = u / d;
    const Matrix vm = b.adjoint() * v * b;
    const Matrix m = vm.transpose() * vm;

    const Eigen::Matrix4d p = simultaneous_diag(m.real(), m.imag());
    const Matrix pc = p.cast<cd>();
    const Matrix dm = pc.transpose() * m * pc;
    Eigen::Vector4d phis;
    for (int i = 0; i < 4; ++i) phis(i) = 0.5 * std::arg(dm(i, i));

    // det(M) = 1 forces sum(phis) = 0 mod pi; reduce it to exactly the zero
    // representative. A single pi shift fixes odd multiples; pairs of pi
    // shifts remove whole turns while keeping the orthogonal factor special.
    double s = phis.sum();
    if (static_cast<long>(std::lround(s / kPi)) % 2 != 0) {
        phis(0) -= kPi * (s >= 0 ? 1.0 : -1.0);
        s = phis.sum();
    }
    while (std::lround(s / kPi) >= 2) {
        int i0 = 0, i1 = 1;
        for (int i = 0; i < 4; ++i)
            if (phis(i) > phis(i0)) i0 = i;
        i1 = (i0 == 0) ? 1 : 0;
        for (int i = 0; i < 4; ++i)
            if (i != i0 && phis(i) > phis(i1)) i1 = i;
        phis(i0) -= kPi;
        phis(i1) -= kPi;
        s = phis.sum();
    }
    while (std::lround(s / kPi) <= -2) {
        int i0 = 0, i1 = 1;
        for (int i = 0; i < 4; ++i)
            if (phis(i) < phis(i0)) i0 = i;
        i1 = (i0 == 0) ? 1 : 0;
        for (int i = 0; i < 4; ++i)
            if (i != i0 && phis(i) < phis(i1)) i1 = i;
        phis(i0) += kPi;
        phis(i1) += kPi;
        s = phis.sum();
    }

    Matrix ahalf = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) ahalf(i, i) = std::exp(cd{0.0, phis(i)});
    Matrix k1m = vm * pc * ahalf.conjugate();
    if (k1m.imag().cwiseAbs().maxCoeff() > 1e-7)
        throw NumericalError("orthogonal factor failed the reality check");
    k1m = k1m.real().cast<cd>();

    // F columns are mutually orthogonal with norm 2, so least squares is a
    // scaled transpose product
    const Eigen::Matrix<double, 4, 3> f = freq_matrix();
    const Eigen::Vector3d kvec = f.transpose() * (-phis) / 4.0;

    Matrix k1 = b * k1m * b.adjoint();
    Matrix k2 = b * pc.transpose() * b.adjoint();

    // Weyl chamber canonicalization with explicit matrix bookkeeping:
    // invariant  u = d * (k1 * lpre) * A(kk) * (rpost * k2)
    std::array<double, 3> kk{kvec(0), kvec(1), kvec(2)};
    Matrix lpre = Matrix::Identity(4, 4);
    Matrix rpost = Matrix::Identity(4, 4);
    const Matrix paulis[3] = {pauli_x(), pauli_y(), pauli_z()};

    auto shift = [&](int a, long n) {
        if (n == 0) return;
        const Matrix pp = kron(paulis[a], paulis[a]);
        const Matrix mn = matrix_power(cd{0.0, -1.0} * pp, static_cast<int>(((n % 4) + 4) % 4));
        kk[a] -= static_cast<double>(n) * kPi / 2;
        rpost = mn * rpost;
    };
    auto conj = [&](const Matrix& g1, const Matrix& g2, const std::array<double, 3>& knew) {
        const Matrix g = kron(g1, g2);
        lpre = lpre * g.adjoint();
        rpost = g * rpost;
        kk = knew;
    };

    for (int a = 0; a < 3; ++a) {
        shift(a, std::lround(kk[a] / (kPi / 2)));
        if (kk[a] <= -kPi / 4 + 1e-15) shift(a, -1);
    }

    Matrix sgate(2, 2);
    sgate << 1, 0, 0, cd{0, 1};
    Matrix had(2, 2);
    const double r2 = 1.0 / std::sqrt(2.0);
    had << r2, r2, r2, -r2;
    const Matrix sx = hermitian_expm(pauli_x(), cd{0.0, -kPi / 4});
    const Matrix id2 = Matrix::Identity(2, 2);

    auto sort_magnitudes = [&]() {
        for (int pass = 0; pass < 3; ++pass) {
            if (std::abs(kk[0]) < std::abs(kk[1])) conj(sgate, sgate, {kk[1], kk[0], kk[2]});
            if (std::abs(kk[1]) < std::abs(kk[2])) conj(sx, sx, {kk[0], kk[2], kk[1]});
        }
    };
    auto fix_signs = [&]() {
        auto flip = [&](int a, int bb) {
            const int c = 3 - a - bb;
            std::array<double, 3> knew = kk;
            knew[a] *= -1;
            knew[bb] *= -1;
            conj(paulis[c], id2, knew);
        };
        if (kk[0] < 0 && kk[1] < 0)
            flip(0, 1);
        else if (kk[0] < 0)
            flip(0, 2);
        else if (kk[1] < 0)
            flip(1, 2);
    };
    sort_magnitudes();
    fix_signs();
    sort_magnitudes();
    fix_signs();
    (void)had;

    const Matrix k1f = k1 * lpre;
    const Matrix k2f = rpost * k2;

    auto [post_l_raw, post_r_raw] = split_kron(k1f);
    auto [pre_l_raw, pre_r_raw] = split_kron(k2f);
    auto [post_l, p1] = su2_normalize(post_l_raw);
    auto [post_r, p2] = su2_normalize(post_r_raw);
    auto [pre_l, p3] = su2_normalize(pre_l_raw);
    auto [pre_r, p4] = su2_normalize(pre_r_raw);

    KAKAngles out;
    out.pre_left = zyz_angles(pre_l);
    out.pre_right = zyz_angles(pre_r);
    out.post_left = zyz_angles(post_l);
    out.post_right = zyz_angles(post_r);
    out.interaction = kk;
    out.global_phase = std::arg(d * p1 * p2 * p3 * p4);
    return out;
}

namespace {
Matrix zyz_matrix(const std::array<double, 3>& t) {
    return rz_matrix(t[2]) * ry_matrix(t[1]) * rz_matrix(t[0]);
}
}  // namespace

Matrix kak_reconstruct(const KAKAngles& a) {
    const Matrix post = kron(zyz_matrix(a.post_left), zyz_matrix(a.post_right));
    const Matrix pre = kron(zyz_matrix(a.pre_left), zyz_matrix(a.pre_right));
    return std::exp(cd{0.0, a.global_phase}) * post * interaction_gate(a.interaction) * pre;
}

}  // namespace mpsqc
