#pragma once

#include <vector>

#include "mpsqc/tensor.hpp"

namespace mpsqc {

// Dense amplitudes over 2^n basis states. Qubit 0 is the most significant bit
// of the basis index: amplitude index bit (n-1-q) holds the value of qubit q.
struct StateVector {
    int n = 0;
    std::vector<cd> amps;

    static StateVector zero_state(int n);
    std::size_t dim() const { return amps.size(); }
};

// Gate kernels exist in two variants: a plain serial reference and an
// OpenMP-parallel version. Updates touch disjoint amplitude pairs, so the
// parallel results are bitwise identical to the serial ones at any thread
// count. The unqualified entry points dispatch to the parallel kernels.
void apply_gate_1q_serial(StateVector& psi, const Matrix& u, int q);
void apply_gate_1q_parallel(StateVector& psi, const Matrix& u, int q);
void apply_gate_1q(StateVector& psi, const Matrix& u, int q);

// two-qubit gate; the first listed qubit indexes the more significant bit of
// the 4x4 gate basis
void apply_gate_2q_serial(StateVector& psi, const Matrix& u, int q_hi, int q_lo);
void apply_gate_2q_parallel(StateVector& psi, const Matrix& u, int q_hi, int q_lo);
void apply_gate_2q(StateVector& psi, const Matrix& u, int q_hi, int q_lo);

// Reductions use a fixed 64-chunk partial-sum scheme: chunk sums are
// accumulated in index order serially, so serial and parallel results agree
// bitwise.
cd inner_serial(const StateVector& a, const StateVector& b);
cd inner_parallel(const StateVector& a, const StateVector& b);
cd inner(const StateVector& a, const StateVector& b);

double norm(const StateVector& psi);
void normalize(StateVector& psi);
double prob_all_zeros(const StateVector& psi);

}  // namespace mpsqc
