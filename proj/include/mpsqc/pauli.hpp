#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mpsqc/statevector.hpp"
#include "mpsqc/tensor.hpp"

namespace mpsqc {

// One Pauli string with a real weight. ops holds (qubit, P) with P in {X,Y,Z},
// sorted by qubit, each qubit at most once. Empty ops = identity term.
struct PauliTerm {
    double coeff = 0.0;
    std::vector<std::pair<int, char>> ops;
};

struct PauliSum {
    std::vector<PauliTerm> terms;

    // highest qubit index referenced plus one; 0 for a pure identity operator
    int min_qubits() const;
    PauliSum scaled(double factor) const;
};

// dense 2^n x 2^n assembly (test oracle and exact-diagonalization substrate)
Matrix pauli_dense(const PauliSum& h, int n);

StateVector pauli_apply(const PauliSum& h, const StateVector& psi);

// <psi|H|psi> via per-term bit arithmetic, no dense operator. Serial and
// parallel variants share the fixed-chunk reduction so results agree bitwise.
double pauli_expectation_serial(const PauliSum& h, const StateVector& psi);
double pauli_expectation_parallel(const PauliSum& h, const StateVector& psi);
double pauli_expectation(const PauliSum& h, const StateVector& psi);

}  // namespace mpsqc
