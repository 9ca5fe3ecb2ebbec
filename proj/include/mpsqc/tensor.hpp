#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "mpsqc/common.hpp"

namespace mpsqc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dense complex tensor, row-major linearization. The last axis varies fastest;
// reshapes are metadata-only.
struct DenseTensor {
    std::vector<std::size_t> shape;
    std::vector<cd> data;

    DenseTensor() = default;
    explicit DenseTensor(std::vector<std::size_t> s);

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    cd& operator[](std::size_t i) { return data[i]; }
    const cd& operator[](std::size_t i) const { return data[i]; }

    DenseTensor reshaped(std::vector<std::size_t> s) const;

    // rank-2 only
    Matrix as_matrix() const;
    static DenseTensor from_matrix(const Matrix& m);
};

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::size_t>& axes_a,
                     const std::vector<std::size_t>& axes_b);

struct SvdResult {
    DenseTensor u;               // orthonormal columns
    std::vector<double> s;       // descending
    DenseTensor v;               // orthonormal rows
};

SvdResult svd_truncated(const DenseTensor& m, std::size_t chi_max, double cutoff);
SvdResult svd_truncated(const Matrix& m, std::size_t chi_max, double cutoff);

struct QrResult {
    DenseTensor q;
    DenseTensor r;
};

QrResult qr_decompose(const DenseTensor& m);
void qr_thin(const Matrix& m, Matrix& q, Matrix& r);

DenseTensor hermitian_expm(const DenseTensor& h, cd scale);
Matrix hermitian_expm(const Matrix& h, cd scale);

struct EigResult {
    std::vector<double> values;  // ascending
    DenseTensor vectors;         // column k = eigenvector k
};

EigResult hermitian_eig(const DenseTensor& h);
void hermitian_eig(const Matrix& h, Eigen::VectorXd& values, Matrix& vectors);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace mpsqc
