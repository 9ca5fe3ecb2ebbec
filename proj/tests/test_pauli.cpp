#include <doctest.h>

#include <vector>

#include "helpers.hpp"
#include "mpsqc/pauli.hpp"

using namespace mpsqc;
using test_helpers::random_state;

namespace {

Matrix pauli_1q(char p) {
    Matrix m(2, 2);
    m.setZero();
    switch (p) {
        case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 'Y': m(0, 1) = cd(0, -1); m(1, 0) = cd(0, 1); break;
        case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        default: m.setIdentity(); break;
    }
    return m;
}

// independent dense assembly by kron over all qubit slots
Matrix dense_oracle(const PauliSum& h, int n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    Matrix total(dim, dim);
    total.setZero();
    for (const auto& t : h.terms) {
        Matrix m = Matrix::Identity(1, 1);
        for (int q = 0; q < n; ++q) {
            char p = 'I';
            for (const auto& [tq, op] : t.ops)
                if (tq == q) p = op;
            m = kron(m, pauli_1q(p));
        }
        total += t.coeff * m;
    }
    return total;
}

PauliSum sample_op() {
    PauliSum h;
    h.terms.push_back({0.75, {}});
    h.terms.push_back({-1.25, {{0, 'Z'}, {2, 'Z'}}});
    h.terms.push_back({0.5, {{1, 'X'}}});
    h.terms.push_back({0.3, {{0, 'Y'}, {1, 'Y'}, {2, 'X'}}});
    return h;
}

Vector to_eigen(const StateVector& s) {
    Vector v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s.amps[i];
    return v;
}

}  // namespace

TEST_CASE("min_qubits reports the highest referenced qubit plus one") {
    CHECK(sample_op().min_qubits() == 3);
    PauliSum ident;
    ident.terms.push_back({2.0, {}});
    CHECK(ident.min_qubits() == 0);
}

TEST_CASE("scaled multiplies every coefficient") {
    PauliSum h = sample_op().scaled(-2.0);
    CHECK(h.terms[0].coeff == doctest::Approx(-1.5));
    CHECK(h.terms[1].coeff == doctest::Approx(2.5));
    CHECK(h.terms.size() == 4);
}

TEST_CASE("pauli_dense matches a direct kron assembly") {
    PauliSum h = sample_op();
    Matrix got = pauli_dense(h, 3);
    Matrix want = dense_oracle(h, 3);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((got - got.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pauli_apply agrees with the dense operator on random states") {
    Rng rng(201);
    PauliSum h = sample_op();
    for (int rep = 0; rep < 5; ++rep) {
        StateVector s = random_state(rng, 3);
        StateVector hs = pauli_apply(h, s);
        Vector want = dense_oracle(h, 3) * to_eigen(s);
        Vector got = to_eigen(hs);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("expectation agrees with the dense quadratic form") {
    Rng rng(202);
    PauliSum h = sample_op();
    Matrix dense = dense_oracle(h, 3);
    for (int rep = 0; rep < 5; ++rep) {
        StateVector s = random_state(rng, 3);
        Vector v = to_eigen(s);
        const double want = (v.adjoint() * dense * v)(0, 0).real();
        CHECK(pauli_expectation(h, s) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("serial and parallel expectation agree bitwise") {
    Rng rng(203);
    PauliSum h = sample_op();
    for (int rep = 0; rep < 3; ++rep) {
        StateVector s = random_state(rng, 6);
        PauliSum wide = h;
        wide.terms.push_back({0.11, {{4, 'X'}, {5, 'Z'}}});
        const double a = pauli_expectation_serial(wide, s);
        const double b = pauli_expectation_parallel(wide, s);
        CHECK(a == b);
    }
}

TEST_CASE("identity term shifts the expectation by its weight") {
    Rng rng(204);
    StateVector s = random_state(rng, 4);
    PauliSum h;
    h.terms.push_back({0.0, {{0, 'Z'}}});
    const double base = pauli_expectation(h, s);
    h.terms.push_back({3.5, {}});
    CHECK(pauli_expectation(h, s) == doctest::Approx(base + 3.5).epsilon(1e-13));
}

TEST_CASE("single Z expectation matches the bit-weighted probability sum") {
    Rng rng(205);
    const int n = 4, q = 2;
    StateVector s = random_state(rng, n);
    PauliSum h;
    h.terms.push_back({1.0, {{q, 'Z'}}});
    double want = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const int bit = static_cast<int>((i >> (n - 1 - q)) & 1u);
        want += (bit ? -1.0 : 1.0) * std::norm(s.amps[i]);
    }
    CHECK(pauli_expectation(h, s) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("terms referencing out-of-range qubits are rejected") {
    PauliSum h;
    h.terms.push_back({1.0, {{5, 'Z'}}});
    StateVector s = StateVector::zero_state(3);
    CHECK_THROWS_AS(pauli_expectation(h, s), std::invalid_argument);
    CHECK_THROWS_AS(pauli_dense(h, 3), std::invalid_argument);
}
