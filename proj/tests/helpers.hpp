#pragma once

#include <cstdlib>
#include <string>

#include "mpsqc/rng.hpp"
#include "mpsqc/statevector.hpp"
#include "mpsqc/tensor.hpp"

namespace test_helpers {

using mpsqc::cd;
using mpsqc::Matrix;
using mpsqc::Rng;
using mpsqc::Vector;

inline Matrix random_matrix(Rng& rng, int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.cnormal();
    return m;
}

inline Matrix random_hermitian(Rng& rng, int n) {
    Matrix m = random_matrix(rng, n, n);
    return (m + m.adjoint()) / 2.0;
}

// Haar-distributed via QR of a Gaussian matrix with the phase convention fixed
inline Matrix random_unitary(Rng& rng, int n) {
    Matrix m = random_matrix(rng, n, n);
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        cd d = r(i, i);
        q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : cd(1.0, 0.0);
    }
    return q;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline mpsqc::StateVector random_state(Rng& rng, int n) {
    mpsqc::StateVector s = mpsqc::StateVector::zero_state(n);
    for (auto& a : s.amps) a = rng.cnormal();
    mpsqc::normalize(s);
    return s;
}

inline std::string fixture_path(const std::string& name) {
    const char* dir = std::getenv("MPSQC_FIXTURES");
    return (dir ? std::string(dir) : std::string("fixtures")) + "/" + name;
}

}  // namespace test_helpers
