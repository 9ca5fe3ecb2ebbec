#pragma once

#include <array>
#include <utility>

#include "mpsqc/tensor.hpp"

namespace mpsqc {

// Euler triples are stored in application order: {a, b, c} realizes
// Rz(c) * Ry(b) * Rz(a), i.e. Rz(a) acts first.
struct KAKAngles {
    std::array<double, 3> pre_left{};
    std::array<double, 3> pre_right{};
    std::array<double, 3> post_left{};
    std::array<double, 3> post_right{};
    std::array<double, 3> interaction{};  // (kx, ky, kz), pi/4 >= kx >= ky >= |kz|
    double global_phase = 0.0;
};

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

Matrix rz_matrix(double theta);
Matrix ry_matrix(double theta);
Matrix crx_matrix(double theta);  // control = more significant qubit of the 4x4 basis
Matrix xx_matrix(double theta);
Matrix yy_matrix(double theta);
Matrix zz_matrix(double theta);

// normalize a 2x2 unitary into SU(2); returns (v, phase) with u = phase * v
std::pair<Matrix, cd> su2_normalize(const Matrix& u);

// Euler angles of an SU(2) matrix, application order (a, b, c)
std::array<double, 3> zyz_angles(const Matrix& v);

// exp(-i (kx XX + ky YY + kz ZZ))
Matrix interaction_gate(const std::array<double, 3>& k);

KAKAngles kak_decompose(const Matrix& u);
Matrix kak_reconstruct(const KAKAngles& a);

}  // namespace mpsqc
