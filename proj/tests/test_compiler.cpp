#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mpsqc/compiler.hpp"

using namespace mpsqc;
using test_helpers::random_unitary;

namespace {

const double kPi = 3.14159265358979323846;

Matrix zyz_matrix(const std::array<double, 3>& a) {
    return rz_matrix(a[2]) * ry_matrix(a[1]) * rz_matrix(a[0]);
}

double fidelity_with_dense(const Circuit& c, const std::vector<double>& params, const MPS& s) {
    StateVector target = to_dense(canonicalize(s, CanonicalForm::left));
    normalize(target);
    StateVector got = run(c, params);
    return std::norm(inner(got, target));
}

MPS random_chi2(Rng& rng, int n) { return canonicalize(random_mps(n, 2, rng), CanonicalForm::left); }

}  // namespace

TEST_CASE("zyz angles reconstruct any SU(2) matrix") {
    Rng rng(501);
    for (int rep = 0; rep < 20; ++rep) {
        auto [v, phase] = su2_normalize(random_unitary(rng, 2));
        auto a = zyz_angles(v);
        CHECK((zyz_matrix(a) - v).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("su2_normalize splits a unitary into phase times determinant one") {
    Rng rng(502);
    Matrix u = random_unitary(rng, 2);
    auto [v, phase] = su2_normalize(u);
    CHECK(std::abs(v.determinant() - cd(1, 0)) < 1e-12);
    CHECK((u - phase * v).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("kak round trips random two qubit unitaries inside the canonical chamber") {
    Rng rng(503);
    for (int rep = 0; rep < 40; ++rep) {
        Matrix u = random_unitary(rng, 4);
        KAKAngles a = kak_decompose(u);
        Matrix back = kak_reconstruct(a);
        CHECK((back - u).cwiseAbs().maxCoeff() < 1e-9);
        const auto& k = a.interaction;
        CHECK(k[0] <= kPi / 4 + 1e-12);
        CHECK(k[0] >= k[1] - 1e-12);
        CHECK(k[1] >= std::abs(k[2]) - 1e-12);
        CHECK(k[1] >= -1e-12);
    }
}

TEST_CASE("kak handles structured gates") {
    std::vector<Matrix> cases;
    Matrix cnot(4, 4);
    cnot.setZero();
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    cases.push_back(cnot);
    Matrix swap(4, 4);
    swap.setZero();
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    cases.push_back(swap);
    cases.push_back(Matrix(Matrix::Identity(4, 4)));
    cases.push_back(kron(rz_matrix(0.9), ry_matrix(-0.3)));
    for (const auto& u : cases) {
        KAKAngles a = kak_decompose(u);
        CHECK((kak_reconstruct(a) - u).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("interaction gate matches the exponential of the two body generator") {
    std::array<double, 3> k = {0.31, 0.17, -0.05};
    Matrix gen = k[0] * kron(pauli_x(), pauli_x()) + k[1] * kron(pauli_y(), pauli_y()) +
                 k[2] * kron(pauli_z(), pauli_z());
    Matrix want = hermitian_expm(gen, cd(0, -1));
    CHECK((interaction_gate(k) - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embed_isometry keeps the input columns and returns a unitary") {
    Rng rng(504);
    Matrix u = random_unitary(rng, 4);
    Matrix v = u.leftCols(2);
    Matrix w = embed_isometry(v);
    REQUIRE(w.rows() == 4);
    REQUIRE(w.cols() == 4);
    CHECK((w.leftCols(2) - v).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((w.adjoint() * w - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(embed_isometry(Matrix(v.transpose())), std::invalid_argument);
}

TEST_CASE("staircase compilation is amplitude exact for bond dimension two") {
    Rng rng(505);
    for (int n = 2; n <= 7; ++n) {
        MPS s = random_chi2(rng, n);
        CompiledStaircase d = mps_to_staircase(s);
        auto [c, params] = staircase_circuit(d);
        StateVector got = run(c, params);
        StateVector want = to_dense(s);
        for (std::size_t i = 0; i < got.dim(); ++i)
            CHECK(std::abs(got.amps[i] - want.amps[i]) < 1e-9);
    }
}

TEST_CASE("staircase compilation handles product states") {
    MPS s = product_state(4, {0.3, 1.2, -0.7, 2.9});
    s = canonicalize(s, CanonicalForm::left);
    CompiledStaircase d = mps_to_staircase(s);
    auto [c, params] = staircase_circuit(d);
    StateVector got = run(c, params);
    StateVector want = to_dense(s);
    for (std::size_t i = 0; i < got.dim(); ++i) CHECK(std::abs(got.amps[i] - want.amps[i]) < 1e-9);
}

TEST_CASE("adjoint staircase maps the target state back to all zeros") {
    Rng rng(506);
    const int n = 5;
    MPS s = random_chi2(rng, n);
    CompiledStaircase d = mps_to_staircase(s, true);
    auto [c, params] = staircase_circuit(d);
    StateVector in = to_dense(s);
    const double p0 = prob_all_zeros(c, params, in);
    CHECK(p0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("adjoint staircase computes overlap magnitudes with arbitrary inputs") {
    Rng rng(507);
    const int n = 4;
    MPS s = random_chi2(rng, n);
    CompiledStaircase d = mps_to_staircase(s, true);
    auto [c, params] = staircase_circuit(d);
    StateVector target = to_dense(s);
    for (int rep = 0; rep < 5; ++rep) {
        StateVector in = test_helpers::random_state(rng, n);
        const double want = std::norm(inner(target, in));
        CHECK(prob_all_zeros(c, params, in) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("brickwall padding preserves the staircase state exactly") {
    Rng rng(508);
    for (int n : {3, 5, 6}) {
        MPS s = random_chi2(rng, n);
        CompiledStaircase d = mps_to_staircase(s);
        for (int extra : {0, 2}) {
            const int depth = (n - 1) + extra;
            auto [c, params] = init_brickwall(d, nullptr, depth, OffdiagKind::full_kak);
            StateVector got = run(c, params);
            StateVector want = to_dense(s);
            for (std::size_t i = 0; i < got.dim(); ++i)
                CHECK(std::abs(got.amps[i] - want.amps[i]) < 1e-9);
        }
    }
}

TEST_CASE("brickwall padding with the hardware block also preserves the state") {
    Rng rng(509);
    const int n = 4;
    MPS s = random_chi2(rng, n);
    CompiledStaircase d = mps_to_staircase(s);
    auto [c, params] = init_brickwall(d, nullptr, n + 1, OffdiagKind::ry_crx);
    StateVector got = run(c, params);
    StateVector want = to_dense(s);
    for (std::size_t i = 0; i < got.dim(); ++i)
        CHECK(std::abs(got.amps[i] - want.amps[i]) < 1e-9);
}

TEST_CASE("stair gate unitary matches the angle reconstruction") {
    Rng rng(510);
    MPS s = random_chi2(rng, 4);
    CompiledStaircase d = mps_to_staircase(s);
    for (const auto& g : d.gates)
        CHECK((stair_gate_unitary(g) - kak_reconstruct(g.angles)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chi four compilation improves on plain truncation") {
    Rng rng(511);
    const int n = 6;
    int wins = 0;
    for (int rep = 0; rep < 4; ++rep) {
        MPS s = canonicalize(random_mps(n, 4, rng), CanonicalForm::left);
        TruncateResult tr = truncate(s, 2);

        CompileResult r = compile_to_circuit(s, n, OffdiagKind::full_kak, false, 40, 17);
        CHECK(r.approximate);
        const double fid = fidelity_with_dense(r.circuit, r.params, s);
        CHECK(fid == doctest::Approx(r.fidelity).epsilon(1e-7));
        if (fid >= tr.fidelity - 1e-12) ++wins;
    }
    CHECK(wins == 4);
}

TEST_CASE("chi four fit fidelity trace never degrades") {
    Rng rng(512);
    MPS s = canonicalize(random_mps(5, 4, rng), CanonicalForm::left);
    CompiledStaircase main;
    AdjacentDiagonal adj = approx_compile_chi4(s, 25, 3, &main);
    REQUIRE(adj.fidelity_trace.size() >= 2);
    for (std::size_t i = 1; i < adj.fidelity_trace.size(); ++i)
        CHECK(adj.fidelity_trace[i] >= adj.fidelity_trace[i - 1] - 1e-12);
    CHECK(adj.fidelity_trace.back() <= 1.0 + 1e-9);
}

TEST_CASE("end to end compile rejects bond dimensions above four") {
    Rng rng(513);
    MPS s = canonicalize(random_mps(6, 8, rng), CanonicalForm::left);
    REQUIRE(s.max_bond() > 4);
    CHECK_THROWS_AS(compile_to_circuit(s, 6, OffdiagKind::full_kak), UnsupportedBondDimension);
}

TEST_CASE("end to end compile picks the exact route for small bonds") {
    Rng rng(514);
    MPS s = random_chi2(rng, 5);
    CompileResult r = compile_to_circuit(s, 6, OffdiagKind::full_kak);
    CHECK_FALSE(r.approximate);
    CHECK(r.fidelity == 1.0);
    CHECK(fidelity_with_dense(r.circuit, r.params, s) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("depths below the staircase length are rejected") {
    Rng rng(515);
    MPS s = random_chi2(rng, 6);
    CompiledStaircase d = mps_to_staircase(s);
    CHECK_THROWS_AS(init_brickwall(d, nullptr, 2, OffdiagKind::full_kak), std::invalid_argument);
}
