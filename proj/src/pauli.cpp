#include "mpsqc/pauli.hpp"

#include <algorithm>
#include <bit>

namespace mpsqc {

int PauliSum::min_qubits() const {
    int hi = -1;
    for (const auto& t : terms)
        for (const auto& [q, p] : t.ops) hi = std::max(hi, q);
    return hi + 1;
}

PauliSum PauliSum::scaled(double factor) const {
    PauliSum out = *this;
    for (auto& t : out.terms) t.coeff *= factor;
    return out;
}

namespace {

struct TermMasks {
    std::size_t flip = 0;   // X and Y positions
    std::size_t yz = 0;     // sign positions: (-1)^popcount(idx & yz)
    int ny = 0;             // number of Y factors -> overall i^ny
    double coeff = 0.0;
};

TermMasks compile_term(const PauliTerm& t, int n) {
    TermMasks m;
    m.coeff = t.coeff;
    for (const auto& [q, p] : t.ops) {
        if (q < 0 || q >= n) throw std::invalid_argument("pauli term qubit index out of range");
        const std::size_t bit = std::size_t{1} << (n - 1 - q);
        switch (p) {
            case 'X': m.flip |= bit; break;
            case 'Y': m.flip |= bit; m.yz |= bit; ++m.ny; break;
            case 'Z': m.yz |= bit; break;
            default: throw std::invalid_argument("pauli term has invalid operator");
        }
    }
    return m;
}

inline cd i_power(int k) {
    switch (k & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

constexpr std::size_t kChunks = 64;

// below this length the omp region costs more than it saves
constexpr std::size_t kParallelGrain = std::size_t{1} << 11;

template <typename F>
cd chunked(std::size_t len, bool parallel, F&& term) {
    cd partial[kChunks] = {};
    if (parallel && len >= kParallelGrain) {
#ifdef MPSQC_OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t cc = 0; cc < static_cast<std::int64_t>(kChunks); ++cc) {
            const std::size_t c = static_cast<std::size_t>(cc);
            const std::size_t lo = c * len / kChunks, hi = (c + 1) * len / kChunks;
            cd s{0.0, 0.0};
            for (std::size_t i = lo; i < hi; ++i) s += term(i);
            partial[c] = s;
        }
    } else {
        for (std::size_t c = 0; c < kChunks; ++c) {
            const std::size_t lo = c * len / kChunks, hi = (c + 1) * len / kChunks;
            cd s{0.0, 0.0};
            for (std::size_t i = lo; i < hi; ++i) s += term(i);
            partial[c] = s;
        }
    }
    cd total{0.0, 0.0};
    for (std::size_t c = 0; c < kChunks; ++c) total += partial[c];
    return total;
}

double expectation_impl(const PauliSum& h, const StateVector& psi, bool parallel) {
    const auto& a = psi.amps;
    cd acc{0.0, 0.0};
    for (const auto& t : h.terms) {
        const TermMasks m = compile_term(t, psi.n);
        const cd yphase = i_power(m.ny);
        const cd val = chunked(a.size(), parallel, [&](std::size_t b) {
            const int sign = std::popcount(b & m.yz) & 1 ? -1 : 1;
            return std::conj(a[b ^ m.flip]) * (double(sign) * a[b]);
        });
        acc += m.coeff * yphase * val;
    }
    if (std::abs(acc.imag()) > 1e-10)
        throw NumericalError("expectation of Hermitian operator has imaginary residue");
    return acc.real();
}

}  // namespace

Matrix pauli_dense(const PauliSum& h, int n) {
    const std::size_t dim = std::size_t{1} << n;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& t : h.terms) {
        const TermMasks m = compile_term(t, n);
        const cd yphase = i_power(m.ny);
        for (std::size_t b = 0; b < dim; ++b) {
            const int sign = std::popcount(b & m.yz) & 1 ? -1 : 1;
            out(static_cast<Eigen::Index>(b ^ m.flip), static_cast<Eigen::Index>(b)) +=
                m.coeff * yphase * double(sign);
        }
    }
    return out;
}

StateVector pauli_apply(const PauliSum& h, const StateVector& psi) {
    StateVector out;
    out.n = psi.n;
    out.amps.assign(psi.dim(), cd{0.0, 0.0});
    for (const auto& t : h.terms) {
        const TermMasks m = compile_term(t, psi.n);
        const cd yphase = i_power(m.ny);
        for (std::size_t b = 0; b < psi.dim(); ++b) {
            const int sign = std::popcount(b & m.yz) & 1 ? -1 : 1;
            out.amps[b ^ m.flip] += m.coeff * yphase * (double(sign) * psi.amps[b]);
        }
    }
    return out;
}

double pauli_expectation_serial(const PauliSum& h, const StateVector& psi) {
    return expectation_impl(h, psi, false);
}

double pauli_expectation_parallel(const PauliSum& h, const StateVector& psi) {
    return expectation_impl(h, psi, true);
}

double pauli_expectation(const PauliSum& h, const StateVector& psi) {
    return expectation_impl(h, psi, true);
}

}  // namespace mpsqc
