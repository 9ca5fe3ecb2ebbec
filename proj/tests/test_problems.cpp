#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "mpsqc/problems.hpp"

using namespace mpsqc;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& p) : path(p) {}
    ~TempFile() { std::remove(path.c_str()); }
};

// sum over edges crossing the partition, independent bit convention check
double cut_oracle(const WeightedGraph& g, std::uint64_t s) {
    double total = 0.0;
    for (const auto& e : g.edges) {
        const int bu = static_cast<int>((s >> (g.n - 1 - e.u)) & 1u);
        const int bv = static_cast<int>((s >> (g.n - 1 - e.v)) & 1u);
        if (bu != bv) total += e.w;
    }
    return total;
}

StateVector basis_state(int n, std::uint64_t idx) {
    StateVector s = StateVector::zero_state(n);
    s.amps[0] = 0.0;
    s.amps[idx] = 1.0;
    return s;
}

}  // namespace

TEST_CASE("graph files round trip and tolerate comments") {
    TempFile f("/tmp/mpsqc_test_graph.edges");
    {
        std::ofstream out(f.path);
        out << "# demo graph\n\n0 2 1.5\n1 2 0.25   # inline note\n";
    }
    WeightedGraph g = load_graph(f.path);
    CHECK(g.n == 3);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].u == 0);
    CHECK(g.edges[0].v == 2);
    CHECK(g.edges[0].w == 1.5);

    TempFile f2("/tmp/mpsqc_test_graph2.edges");
    save_graph(g, f2.path);
    WeightedGraph back = load_graph(f2.path);
    REQUIRE(back.edges.size() == g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        CHECK(back.edges[i].u == g.edges[i].u);
        CHECK(back.edges[i].v == g.edges[i].v);
        CHECK(back.edges[i].w == g.edges[i].w);
    }
}

TEST_CASE("malformed graph lines are rejected with their location") {
    TempFile f("/tmp/mpsqc_test_badgraph.edges");
    {
        std::ofstream out(f.path);
        out << "0 1 1.0\n0 x 2.0\n";
    }
    try {
        load_graph(f.path);
        FAIL("expected an IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_graph("/tmp/really_not_here.edges"), IoError);
}

TEST_CASE("cut_value follows the most significant bit convention") {
    WeightedGraph g;
    g.n = 3;
    g.edges = {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 4.0}};
    // assignment 0b100: vertex 0 alone on one side, cuts edges (0,1) and (0,2)
    CHECK(cut_value(g, 0b100) == doctest::Approx(5.0));
    CHECK(cut_value(g, 0b000) == doctest::Approx(0.0));
    CHECK(cut_value(g, 0b010) == doctest::Approx(3.0));
    for (std::uint64_t s = 0; s < 8; ++s) CHECK(cut_value(g, s) == doctest::Approx(cut_oracle(g, s)));
}

TEST_CASE("brute force finds the optimum and prefers the smallest assignment on ties") {
    WeightedGraph g;
    g.n = 2;
    g.edges = {{0, 1, 1.0}};
    MaxcutSolution s = brute_force_maxcut(g);
    // assignments 01 and 10 tie at value 1; 01 is numerically smaller
    CHECK(s.value == doctest::Approx(1.0));
    CHECK(s.assignment == 1);
    CHECK(s.bitstring == "01");
}

TEST_CASE("serial and parallel brute force agree on random weighted graphs") {
    Rng rng(701);
    for (int rep = 0; rep < 4; ++rep) {
        WeightedGraph g;
        g.n = 9;
        for (int u = 0; u < g.n; ++u)
            for (int v = u + 1; v < g.n; ++v)
                if (rng.uniform(0.0, 1.0) < 0.4)
                    g.edges.push_back({u, v, rng.uniform(0.1, 3.0)});
        if (g.edges.empty()) g.edges.push_back({0, 1, 1.0});
        MaxcutSolution a = brute_force_maxcut_serial(g);
        MaxcutSolution b = brute_force_maxcut_parallel(g);
        CHECK(a.value == b.value);
        CHECK(a.assignment == b.assignment);
        CHECK(a.bitstring == b.bitstring);
        // exhaustive verification against the oracle
        double best = -1.0;
        for (std::uint64_t s = 0; s < (1u << g.n); ++s) best = std::max(best, cut_oracle(g, s));
        CHECK(a.value == doctest::Approx(best));
    }
}

TEST_CASE("oversized instances are rejected") {
    WeightedGraph g;
    g.n = 30;
    g.edges = {{0, 29, 1.0}};
    CHECK_THROWS_AS(brute_force_maxcut(g), std::invalid_argument);
}

TEST_CASE("the cut operator doubles the cut value on basis states") {
    WeightedGraph g = default_maxcut_instance();
    PauliSum h = maxcut_hamiltonian(g);
    for (std::uint64_t s : {0ull, 1ull, 0b010101ull, 0b110010ull, 63ull}) {
        const double e = pauli_expectation(h, basis_state(g.n, s));
        CHECK(e == doctest::Approx(2.0 * cut_value(g, s)).epsilon(1e-12));
    }
}

TEST_CASE("the bundled instance has the documented optimum") {
    WeightedGraph g = default_maxcut_instance();
    REQUIRE(g.n == 6);
    MaxcutSolution s = brute_force_maxcut(g);
    CHECK(s.bitstring == "010101");
    CHECK(s.value == doctest::Approx(30.78).epsilon(1e-12));
}

TEST_CASE("both tfim representations define the same operator") {
    for (int n : {2, 3, 5}) {
        TfimTerms t = tfim_hamiltonian(n, 1.0, 0.9);
        Matrix from_pauli = pauli_dense(t.pauli, n);
        Matrix from_bonds = Matrix::Zero(1 << n, 1 << n);
        for (const auto& [site, bond] : t.bonds) {
            Matrix op = Matrix::Identity(1, 1);
            for (int q = 0; q < n; ++q) {
                if (q == site) {
                    op = kron(op, bond);
                    ++q;
                } else {
                    op = kron(op, Matrix(Matrix::Identity(2, 2)));
                }
            }
            from_bonds += op;
        }
        CHECK((from_pauli - from_bonds).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("tfim ground energy matches an independent dense diagonalization") {
    const int n = 2;
    const double j = 1.0, g = 0.7;
    TfimTerms t = tfim_hamiltonian(n, j, g);
    auto [energy, state] = exact_ground(t.pauli, n);

    Matrix z(2, 2), x(2, 2);
    z << 1, 0, 0, -1;
    x << 0, 1, 1, 0;
    Matrix h = -j * kron(z, z) - g * (kron(x, Matrix(Matrix::Identity(2, 2))) +
                                      kron(Matrix(Matrix::Identity(2, 2)), x));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    CHECK(energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
    // residual of the eigenpair
    Vector v(4);
    for (int i = 0; i < 4; ++i) v(i) = state.amps[static_cast<std::size_t>(i)];
    CHECK((h * v - energy * v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pauli files round trip bitwise") {
    PauliSum h;
    h.terms.push_back({-1.851, {}});
    h.terms.push_back({1.0 / 3.0, {{0, 'Z'}, {3, 'Z'}}});
    h.terms.push_back({-0.123456789012345678, {{1, 'X'}, {2, 'Y'}}});
    TempFile f("/tmp/mpsqc_test_h.txt");
    save_pauli_hamiltonian(h, f.path);
    PauliSum back = load_pauli_hamiltonian(f.path);
    REQUIRE(back.terms.size() == h.terms.size());
    for (std::size_t i = 0; i < h.terms.size(); ++i) {
        CHECK(back.terms[i].coeff == h.terms[i].coeff);
        CHECK(back.terms[i].ops == h.terms[i].ops);
    }
}

TEST_CASE("pauli parser rejects duplicate qubits and empty files") {
    TempFile f("/tmp/mpsqc_test_dup.txt");
    {
        std::ofstream out(f.path);
        out << "1.0 Z0 Z0\n";
    }
    CHECK_THROWS_AS(load_pauli_hamiltonian(f.path), IoError);
    {
        std::ofstream out(f.path);
        out << "# nothing but comments\n";
    }
    CHECK_THROWS_AS(load_pauli_hamiltonian(f.path), IoError);
}

TEST_CASE("pca recovers the dominant axis of an anisotropic cloud") {
    Rng rng(702);
    const int m = 400;
    Eigen::MatrixXd samples(m, 2);
    for (int i = 0; i < m; ++i) {
        const double t = 3.0 * rng.normal();
        const double s = 0.1 * rng.normal();
        // cloud stretched along (1,1)/sqrt(2), offset from the origin
        samples(i, 0) = 5.0 + (t + s) / std::sqrt(2.0);
        samples(i, 1) = -2.0 + (t - s) / std::sqrt(2.0);
    }
    PCAModel model = pca_fit(samples, true);
    CHECK(model.mean(0) == doctest::Approx(5.0).epsilon(0.2));
    CHECK(model.mean(1) == doctest::Approx(-2.0).epsilon(0.2));
    CHECK(model.eigenvalues(0) > model.eigenvalues(1));
    const double c = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(model.components(0, 0) - c) < 0.05);
    CHECK(std::abs(model.components(1, 0) - c) < 0.05);
    // orthonormal components
    Eigen::MatrixXd gram = model.components.transpose() * model.components;
    CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pca projection subtracts the mean before the component inner product") {
    Eigen::MatrixXd samples(3, 2);
    samples << 1.0, 0.0, 2.0, 0.5, 3.0, 1.0;
    PCAModel model = pca_fit(samples, true);
    std::vector<double> proj = pca_project(model, {2.0, 0.5}, 2);
    // the sample mean projects to the origin
    CHECK(std::abs(proj[0]) < 1e-12);
    CHECK(std::abs(proj[1]) < 1e-12);

    std::vector<double> p1 = pca_project(model, {3.0, 1.0}, 1);
    Eigen::Vector2d diff(1.0, 0.5);
    CHECK(p1[0] == doctest::Approx(model.components.col(0).dot(diff)).epsilon(1e-12));
    CHECK_THROWS_AS(pca_project(model, {1.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(pca_project(model, {1.0, 2.0}, 3), std::invalid_argument);
}

TEST_CASE("uncentered pca keeps a zero mean vector") {
    Eigen::MatrixXd samples(4, 2);
    samples << 1, 2, 3, 4, 5, 6, 7, 8;
    PCAModel model = pca_fit(samples, false);
    CHECK(model.mean.cwiseAbs().maxCoeff() == 0.0);
    std::vector<double> proj = pca_project(model, {1.0, 2.0}, 1);
    Eigen::Vector2d x(1.0, 2.0);
    CHECK(proj[0] == doctest::Approx(model.components.col(0).dot(x)).epsilon(1e-12));
}

TEST_CASE("pca component signs are deterministic") {
    Rng rng(703);
    Eigen::MatrixXd samples(50, 3);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 3; ++j) samples(i, j) = rng.normal();
    PCAModel a = pca_fit(samples, true);
    PCAModel b = pca_fit(samples, true);
    CHECK((a.components - b.components).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index c = 0; c < 3; ++c) {
        Eigen::Index imax = 0;
        a.components.col(c).cwiseAbs().maxCoeff(&imax);
        CHECK(a.components(imax, c) > 0.0);
    }
}

TEST_CASE("exact_ground matches the minimal eigenpair of the dense operator") {
    PauliSum h;
    h.terms.push_back({0.5, {{0, 'Z'}}});
    h.terms.push_back({-0.75, {{0, 'X'}, {1, 'X'}}});
    h.terms.push_back({0.25, {{1, 'Y'}}});
    auto [energy, state] = exact_ground(h, 2);
    Matrix dense = pauli_dense(h, 2);
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
    CHECK(energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-13));
    CHECK(norm(state) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pauli_expectation(h, state) == doctest::Approx(energy).epsilon(1e-12));
    CHECK_THROWS_AS(exact_ground(h, 15), std::invalid_argument);
}

TEST_CASE("synthetic clusters are balanced, deterministic, and separated") {
    LabeledDataset a = synthetic_two_cluster(6, 100, 0.8, 0.05, 4242);
    LabeledDataset b = synthetic_two_cluster(6, 100, 0.8, 0.05, 4242);
    REQUIRE(a.size() == 100);
    REQUIRE(a.n_features() == 6);
    int ones = 0;
    for (int y : a.labels) ones += y;
    CHECK(ones == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.labels[i] == b.labels[i]);
        for (std::size_t j = 0; j < 6; ++j) CHECK(a.features[i][j] == b.features[i][j]);
    }
    // per-class feature means straddle the shared center by the separation
    double mean0 = 0.0, mean1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double rowmean = 0.0;
        for (double v : a.features[i]) rowmean += v / 6.0;
        (a.labels[i] ? mean1 : mean0) += rowmean / 50.0;
    }
    CHECK(std::abs((mean1 - mean0) - (mean1 > mean0 ? 0.8 : -0.8)) < 0.1);

    LabeledDataset c = synthetic_two_cluster(6, 100, 0.8, 0.05, 77);
    bool differs = false;
    for (std::size_t i = 0; i < c.size() && !differs; ++i)
        if (c.features[i][0] != a.features[i][0]) differs = true;
    CHECK(differs);
}
