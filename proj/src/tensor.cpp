#include "mpsqc/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mpsqc {

DenseTensor::DenseTensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    std::size_t total = 1;
    for (std::size_t d : shape) {
        if (d < 1) throw std::invalid_argument("tensor dimension must be >= 1");
        total *= d;
    }
    data.assign(total, cd{0.0, 0.0});
}

DenseTensor DenseTensor::reshaped(std::vector<std::size_t> s) const {
    std::size_t total = 1;
    for (std::size_t d : s) total *= d;
    if (total != data.size()) throw std::invalid_argument("reshape size mismatch");
    DenseTensor out;
    out.shape = std::move(s);
    out.data = data;
    return out;
}

Matrix DenseTensor::as_matrix() const {
    if (rank() != 2) throw std::invalid_argument("as_matrix requires rank 2");
    const auto rows = static_cast<Eigen::Index>(shape[0]);
    const auto cols = static_cast<Eigen::Index>(shape[1]);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data[static_cast<std::size_t>(i) * cols + j];
    return m;
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
    DenseTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            t.data[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
    return t;
}

namespace {

std::vector<std::size_t> row_major_strides(const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> st(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;) st[i - 1] = st[i] * shape[i];
    return st;
}

// copy with axes permuted so that `perm[k]` becomes axis k of the output
std::vector<cd> permute_copy(const DenseTensor& t, const std::vector<std::size_t>& perm) {
    const auto src_strides = row_major_strides(t.shape);
    std::vector<std::size_t> out_shape(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) out_shape[k] = t.shape[perm[k]];
    const auto out_strides = row_major_strides(out_shape);

    std::vector<cd> out(t.size());
    std::vector<std::size_t> idx(perm.size(), 0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        std::size_t rem = flat, src = 0;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            const std::size_t coord = rem / out_strides[k];
            rem %= out_strides[k];
            src += coord * src_strides[perm[k]];
        }
        out[flat] = t.data[src];
    }
    return out;
}

}  // namespace

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::size_t>& axes_a,
                     const std::vector<std::size_t>& axes_b) {
    if (axes_a.size() != axes_b.size()) throw std::invalid_argument("contract: axis count mismatch");
    for (std::size_t k = 0; k < axes_a.size(); ++k) {
        if (axes_a[k] >= a.rank() || axes_b[k] >= b.rank())
            throw std::invalid_argument("contract: axis out of range");
        if (a.shape[axes_a[k]] != b.shape[axes_b[k]])
            throw std::invalid_argument("contract: paired axes differ in dimension");
    }

    auto free_axes = [](const DenseTensor& t, const std::vector<std::size_t>& paired) {
        std::vector<std::size_t> free;
        for (std::size_t ax = 0; ax < t.rank(); ++ax)
            if (std::find(paired.begin(), paired.end(), ax) == paired.end()) free.push_back(ax);
        return free;
    };
    const auto free_a = free_axes(a, axes_a);
    const auto free_b = free_axes(b, axes_b);

    std::vector<std::size_t> perm_a = free_a;
    perm_a.insert(perm_a.end(), axes_a.begin(), axes_a.end());
    std::vector<std::size_t> perm_b = axes_b;
    perm_b.insert(perm_b.end(), free_b.begin(), free_b.end());

    std::size_t m = 1, k = 1, n = 1;
    for (auto ax : free_a) m *= a.shape[ax];
    for (auto ax : axes_a) k *= a.shape[ax];
    for (auto ax : free_b) n *= b.shape[ax];

    const auto pa = permute_copy(a, perm_a);
    const auto pb = permute_copy(b, perm_b);

    using RowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> ma(pa.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    Eigen::Map<const RowMat> mb(pb.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    RowMat mc = ma * mb;

    std::vector<std::size_t> out_shape;
    for (auto ax : free_a) out_shape.push_back(a.shape[ax]);
    for (auto ax : free_b) out_shape.push_back(b.shape[ax]);
    if (out_shape.empty()) out_shape.push_back(1);

    DenseTensor out(out_shape);
    std::copy(mc.data(), mc.data() + mc.size(), out.data.begin());
    return out;
}

SvdResult svd_truncated(const Matrix& m, std::size_t chi_max, double cutoff) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const std::size_t full = static_cast<std::size_t>(sv.size());

    std::size_t keep = 0;
    const double smax = full > 0 ? sv(0) : 0.0;
    for (std::size_t i = 0; i < full; ++i)
        if (sv(static_cast<Eigen::Index>(i)) >= cutoff * smax) ++keep;
    keep = std::min(keep, chi_max);
    if (keep == 0) keep = 1;

    SvdResult r;
    Matrix u = svd.matrixU().leftCols(static_cast<Eigen::Index>(keep));
    Matrix v = svd.matrixV().leftCols(static_cast<Eigen::Index>(keep)).adjoint();
    r.u = DenseTensor::from_matrix(u);
    r.v = DenseTensor::from_matrix(v);
    r.s.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) r.s[i] = sv(static_cast<Eigen::Index>(i));
    return r;
}

SvdResult svd_truncated(const DenseTensor& m, std::size_t chi_max, double cutoff) {
    if (m.rank() != 2) throw std::invalid_argument("svd_truncated requires a matrix");
    return svd_truncated(m.as_matrix(), chi_max, cutoff);
}

void qr_thin(const Matrix& m, Matrix& q, Matrix& r) {
    if (m.rows() < m.cols()) throw std::invalid_argument("qr_decompose requires rows >= cols");
    Eigen::HouseholderQR<Matrix> qr(m);
    q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    Matrix rr = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    r = rr;
}

QrResult qr_decompose(const DenseTensor& m) {
    if (m.rank() != 2) throw std::invalid_argument("qr_decompose requires a matrix");
    Matrix q, r;
    qr_thin(m.as_matrix(), q, r);
    return {DenseTensor::from_matrix(q), DenseTensor::from_matrix(r)};
}

namespace {
void check_hermitian(const Matrix& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("matrix not square");
    const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw NumericalError("matrix not Hermitian");
}
}  // namespace

void hermitian_eig(const Matrix& h, Eigen::VectorXd& values, Matrix& vectors) {
    check_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    values = es.eigenvalues();
    vectors = es.eigenvectors();
}

EigResult hermitian_eig(const DenseTensor& h) {
    Eigen::VectorXd vals;
    Matrix vecs;
    hermitian_eig(h.as_matrix(), vals, vecs);
    EigResult r;
    r.values.assign(vals.data(), vals.data() + vals.size());
    r.vectors = DenseTensor::from_matrix(vecs);
    return r;
}

Matrix hermitian_expm(const Matrix& h, cd scale) {
    Eigen::VectorXd vals;
    Matrix vecs;
    hermitian_eig(h, vals, vecs);
    Vector phases(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) phases(i) = std::exp(scale * vals(i));
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

DenseTensor hermitian_expm(const DenseTensor& h, cd scale) {
    if (h.rank() != 2) throw std::invalid_argument("hermitian_expm requires a matrix");
    return DenseTensor::from_matrix(hermitian_expm(h.as_matrix(), scale));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace mpsqc
