#include "mpsqc/statevector.hpp"

#include <cmath>

namespace mpsqc {

StateVector StateVector::zero_state(int n) {
    StateVector psi;
    psi.n = n;
    psi.amps.assign(std::size_t{1} << n, cd{0.0, 0.0});
    psi.amps[0] = 1.0;
    return psi;
}

namespace {

struct Gate1 {
    cd u00, u01, u10, u11;
};

inline Gate1 load1(const Matrix& u) { return {u(0, 0), u(0, 1), u(1, 0), u(1, 1)}; }

}  // namespace

void apply_gate_1q_serial(StateVector& psi, const Matrix& u, int q) {
    if (q < 0 || q >= psi.n) throw std::invalid_argument("qubit index out of range");
    const std::size_t mask = std::size_t{1} << (psi.n - 1 - q);
    const Gate1 g = load1(u);
    const std::size_t half = psi.dim() >> 1;
    auto& a = psi.amps;
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t lo = ((i & ~(mask - 1)) << 1) | (i & (mask - 1));
        const std::size_t hi = lo | mask;
        const cd a0 = a[lo], a1 = a[hi];
        a[lo] = g.u00 * a0 + g.u01 * a1;
        a[hi] = g.u10 * a0 + g.u11 * a1;
    }
}

namespace {

// below this many loop iterations the omp region costs more than it saves
constexpr std::size_t kParallelGrain = std::size_t{1} << 11;

}  // namespace

void apply_gate_1q_parallel(StateVector& psi, const Matrix& u, int q) {
#ifdef MPSQC_OPENMP
    if (psi.dim() >> 1 < kParallelGrain) {
        apply_gate_1q_serial(psi, u, q);
        return;
    }
    if (q < 0 || q >= psi.n) throw std::invalid_argument("qubit index out of range");
    const std::size_t mask = std::size_t{1} << (psi.n - 1 - q);
    const Gate1 g = load1(u);
    const std::int64_t half = static_cast<std::int64_t>(psi.dim() >> 1);
    auto& a = psi.amps;
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < half; ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const std::size_t lo = ((i & ~(mask - 1)) << 1) | (i & (mask - 1));
        const std::size_t hi = lo | mask;
        const cd a0 = a[lo], a1 = a[hi];
        a[lo] = g.u00 * a0 + g.u01 * a1;
        a[hi] = g.u10 * a0 + g.u11 * a1;
    }
#else
    apply_gate_1q_serial(psi, u, q);
#endif
}

void apply_gate_1q(StateVector& psi, const Matrix& u, int q) { apply_gate_1q_parallel(psi, u, q); }

namespace {

// enumerate indices with the two masked bit positions cleared (m_hi > m_lo)
inline std::size_t spread2(std::size_t i, std::size_t m_hi, std::size_t m_lo) {
    const std::size_t y = ((i & ~(m_lo - 1)) << 1) | (i & (m_lo - 1));
    return ((y & ~(m_hi - 1)) << 1) | (y & (m_hi - 1));
}

}  // namespace

void apply_gate_2q_serial(StateVector& psi, const Matrix& u, int q_hi, int q_lo) {
    if (q_hi == q_lo) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    if (q_hi < 0 || q_hi >= psi.n || q_lo < 0 || q_lo >= psi.n)
        throw std::invalid_argument("qubit index out of range");
    const std::size_t mh = std::size_t{1} << (psi.n - 1 - q_hi);
    const std::size_t ml = std::size_t{1} << (psi.n - 1 - q_lo);
    const std::size_t m_big = std::max(mh, ml), m_small = std::min(mh, ml);
    const std::size_t quarter = psi.dim() >> 2;
    auto& a = psi.amps;
    cd g[4][4];
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) g[r][c] = u(r, c);
    for (std::size_t i = 0; i < quarter; ++i) {
        const std::size_t base = spread2(i, m_big, m_small);
        const std::size_t j00 = base;
        const std::size_t j01 = base | ml;
        const std::size_t j10 = base | mh;
        const std::size_t j11 = base | mh | ml;
        const cd a00 = a[j00], a01 = a[j01], a10 = a[j10], a11 = a[j11];
        a[j00] = g[0][0] * a00 + g[0][1] * a01 + g[0][2] * a10 + g[0][3] * a11;
        a[j01] = g[1][0] * a00 + g[1][1] * a01 + g[1][2] * a10 + g[1][3] * a11;
        a[j10] = g[2][0] * a00 + g[2][1] * a01 + g[2][2] * a10 + g[2][3] * a11;
        a[j11] = g[3][0] * a00 + g[3][1] * a01 + g[3][2] * a10 + g[3][3] * a11;
    }
}

void apply_gate_2q_parallel(StateVector& psi, const Matrix& u, int q_hi, int q_lo) {
#ifdef MPSQC_OPENMP
    if (psi.dim() >> 2 < kParallelGrain) {
        apply_gate_2q_serial(psi, u, q_hi, q_lo);
        return;
    }
    if (q_hi == q_lo) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    if (q_hi < 0 || q_hi >= psi.n || q_lo < 0 || q_lo >= psi.n)
        throw std::invalid_argument("qubit index out of range");
    const std::size_t mh = std::size_t{1} << (psi.n - 1 - q_hi);
    const std::size_t ml = std::size_t{1} << (psi.n - 1 - q_lo);
    const std::size_t m_big = std::max(mh, ml), m_small = std::min(mh, ml);
    const std::int64_t quarter = static_cast<std::int64_t>(psi.dim() >> 2);
    auto& a = psi.amps;
    cd g[4][4];
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) g[r][c] = u(r, c);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < quarter; ++ii) {
        const std::size_t base = spread2(static_cast<std::size_t>(ii), m_big, m_small);
        const std::size_t j00 = base;
        const std::size_t j01 = base | ml;
        const std::size_t j10 = base | mh;
        const std::size_t j11 = base | mh | ml;
        const cd a00 = a[j00], a01 = a[j01], a10 = a[j10], a11 = a[j11];
        a[j00] = g[0][0] * a00 + g[0][1] * a01 + g[0][2] * a10 + g[0][3] * a11;
        a[j01] = g[1][0] * a00 + g[1][1] * a01 + g[1][2] * a10 + g[1][3] * a11;
        a[j10] = g[2][0] * a00 + g[2][1] * a01 + g[2][2] * a10 + g[2][3] * a11;
        a[j11] = g[3][0] * a00 + g[3][1] * a01 + g[3][2] * a10 + g[3][3] * a11;
    }
#else
    apply_gate_2q_serial(psi, u, q_hi, q_lo);
#endif
}

void apply_gate_2q(StateVector& psi, const Matrix& u, int q_hi, int q_lo) {
    apply_gate_2q_parallel(psi, u, q_hi, q_lo);
}

namespace {
constexpr std::size_t kChunks = 64;

template <typename F>
cd chunked_sum_serial(std::size_t len, F&& term) {
    cd partial[kChunks] = {};
    for (std::size_t c = 0; c < kChunks; ++c) {
        const std::size_t lo = c * len / kChunks;
        const std::size_t hi = (c + 1) * len / kChunks;
        cd s{0.0, 0.0};
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[c] = s;
    }
    cd total{0.0, 0.0};
    for (std::size_t c = 0; c < kChunks; ++c) total += partial[c];
    return total;
}

template <typename F>
cd chunked_sum_parallel(std::size_t len, F&& term) {
#ifdef MPSQC_OPENMP
    if (len < kParallelGrain) return chunked_sum_serial(len, std::forward<F>(term));
    cd partial[kChunks] = {};
#pragma omp parallel for schedule(static)
    for (std::int64_t cc = 0; cc < static_cast<std::int64_t>(kChunks); ++cc) {
        const std::size_t c = static_cast<std::size_t>(cc);
        const std::size_t lo = c * len / kChunks;
        const std::size_t hi = (c + 1) * len / kChunks;
        cd s{0.0, 0.0};
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[c] = s;
    }
    cd total{0.0, 0.0};
    for (std::size_t c = 0; c < kChunks; ++c) total += partial[c];
    return total;
#else
    return chunked_sum_serial(len, std::forward<F>(term));
#endif
}
}  // namespace

cd inner_serial(const StateVector& a, const StateVector& b) {
    if (a.n != b.n) throw std::invalid_argument("inner: size mismatch");
    const auto& x = a.amps;
    const auto& y = b.amps;
    return chunked_sum_serial(x.size(), [&](std::size_t i) { return std::conj(x[i]) * y[i]; });
}

cd inner_parallel(const StateVector& a, const StateVector& b) {
    if (a.n != b.n) throw std::invalid_argument("inner: size mismatch");
    const auto& x = a.amps;
    const auto& y = b.amps;
    return chunked_sum_parallel(x.size(), [&](std::size_t i) { return std::conj(x[i]) * y[i]; });
}

cd inner(const StateVector& a, const StateVector& b) { return inner_parallel(a, b); }

double norm(const StateVector& psi) { return std::sqrt(std::real(inner(psi, psi))); }

void normalize(StateVector& psi) {
    const double nrm = norm(psi);
    if (nrm <= 0.0) throw NumericalError("cannot normalize zero state");
    for (auto& v : psi.amps) v /= nrm;
}

double prob_all_zeros(const StateVector& psi) { return std::norm(psi.amps[0]); }

}  // namespace mpsqc
