#include "mpsqc/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mpsqc/common.hpp"

#ifdef MPSQC_OPENMP
#include <omp.h>
#endif

namespace mpsqc {

namespace {

bool parse_double(const std::string& tok, double& out) {
    std::size_t used = 0;
    try {
        out = std::stod(tok, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == tok.size();
}

bool parse_int(const std::string& tok, int& out) {
    std::size_t used = 0;
    try {
        out = std::stoi(tok, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == tok.size();
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    WeightedGraph g;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(strip_comment(line));
        std::string tu, tv, tw;
        if (!(ss >> tu)) continue;
        auto fail = [&](const std::string& what) {
            throw IoError(path + ":" + std::to_string(lineno) + ": " + what);
        };
        if (!(ss >> tv >> tw)) fail("expected `u v w`");
        std::string extra;
        if (ss >> extra) fail("trailing token '" + extra + "'");
        WeightedGraph::Edge e;
        if (!parse_int(tu, e.u) || !parse_int(tv, e.v)) fail("bad vertex index");
        if (e.u < 0 || e.v < 0) fail("negative vertex index");
        if (e.u == e.v) fail("self loop");
        if (!parse_double(tw, e.w)) fail("bad weight '" + tw + "'");
        g.edges.push_back(e);
        g.n = std::max(g.n, std::max(e.u, e.v) + 1);
    }
    if (g.edges.empty()) throw IoError(path + ": no edges");
    return g;
}

void save_graph(const WeightedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write graph file: " + path);
    char buf[64];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof buf, "%.17g", e.w);
        out << e.u << " " << e.v << " " << buf << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

WeightedGraph default_maxcut_instance() {
    WeightedGraph g;
    g.n = 6;
    const double w[5] = {7.97, 4.95, 8.73, 7.28, 1.85};
    for (int i = 0; i < 5; ++i) g.edges.push_back({i, i + 1, w[i]});
    return g;
}

PauliSum maxcut_hamiltonian(const WeightedGraph& g) {
    PauliSum h;
    for (const auto& e : g.edges) {
        h.terms.push_back({e.w, {}});
        h.terms.push_back({-e.w, {{e.u, 'Z'}, {e.v, 'Z'}}});
    }
    return h;
}

double cut_value(const WeightedGraph& g, std::uint64_t assignment) {
    double total = 0.0;
    for (const auto& e : g.edges) {
        int bu = static_cast<int>((assignment >> (g.n - 1 - e.u)) & 1u);
        int bv = static_cast<int>((assignment >> (g.n - 1 - e.v)) & 1u);
        if (bu != bv) total += e.w;
    }
    return total;
}

namespace {

std::string to_bitstring(std::uint64_t s, int n) {
    std::string out(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q)
        if ((s >> (n - 1 - q)) & 1u) out[static_cast<std::size_t>(q)] = '1';
    return out;
}

void check_bruteforce_size(const WeightedGraph& g) {
    if (g.n < 1 || g.n > 24)
        throw std::invalid_argument("brute force limited to 1..24 vertices, got " +
                                    std::to_string(g.n));
}

}  // namespace

MaxcutSolution brute_force_maxcut_serial(const WeightedGraph& g) {
    check_bruteforce_size(g);
    const std::uint64_t total = std::uint64_t{1} << g.n;
    MaxcutSolution best{0, "", cut_value(g, 0)};
    for (std::uint64_t s = 1; s < total; ++s) {
        double v = cut_value(g, s);
        if (v > best.value) {
            best.value = v;
            best.assignment = s;
        }
    }
    best.bitstring = to_bitstring(best.assignment, g.n);
    return best;
}

MaxcutSolution brute_force_maxcut_parallel(const WeightedGraph& g) {
    check_bruteforce_size(g);
    const std::uint64_t total = std::uint64_t{1} << g.n;
    MaxcutSolution best{0, "", cut_value(g, 0)};
#ifdef MPSQC_OPENMP
#pragma omp parallel
    {
        MaxcutSolution local{0, "", cut_value(g, 0)};
#pragma omp for schedule(static)
        for (std::int64_t sl = 1; sl < static_cast<std::int64_t>(total); ++sl) {
            auto s = static_cast<std::uint64_t>(sl);
            double v = cut_value(g, s);
            if (v > local.value || (v == local.value && s < local.assignment)) {
                local.value = v;
                local.assignment = s;
            }
        }
#pragma omp critical
        {
            if (local.value > best.value ||
                (local.value == best.value && local.assignment < best.assignment)) {
                best.value = local.value;
                best.assignment = local.assignment;
            }
        }
    }
#else
    for (std::uint64_t s = 1; s < total; ++s) {
        double v = cut_value(g, s);
        if (v > best.value) {
            best.value = v;
            best.assignment = s;
        }
    }
#endif
    best.bitstring = to_bitstring(best.assignment, g.n);
    return best;
}

MaxcutSolution brute_force_maxcut(const WeightedGraph& g) {
    return brute_force_maxcut_parallel(g);
}

TfimTerms tfim_hamiltonian(int n, double j, double g) {
    if (n < 2) throw std::invalid_argument("tfim needs n >= 2");
    TfimTerms t;
    for (int i = 0; i + 1 < n; ++i)
        t.pauli.terms.push_back({-j, {{i, 'Z'}, {i + 1, 'Z'}}});
    for (int i = 0; i < n; ++i) t.pauli.terms.push_back({-g, {{i, 'X'}}});

    const Matrix z = pauli_dense(PauliSum{{{1.0, {{0, 'Z'}}}}}, 1);
    const Matrix x = pauli_dense(PauliSum{{{1.0, {{0, 'X'}}}}}, 1);
    const Matrix id = Matrix::Identity(2, 2);
    for (int i = 0; i + 1 < n; ++i) {
        double wl = (i == 0) ? 1.0 : 0.5;
        double wr = (i + 1 == n - 1) ? 1.0 : 0.5;
        Matrix bond = -j * kron(z, z) - g * (wl * kron(x, id) + wr * kron(id, x));
        t.bonds.emplace_back(i, bond);
    }
    return t;
}

PauliSum load_pauli_hamiltonian(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open hamiltonian file: " + path);
    PauliSum h;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(strip_comment(line));
        std::string tok;
        if (!(ss >> tok)) continue;
        auto fail = [&](const std::string& what) {
            throw IoError(path + ":" + std::to_string(lineno) + ": " + what);
        };
        PauliTerm term;
        if (!parse_double(tok, term.coeff)) fail("bad coefficient '" + tok + "'");
        while (ss >> tok) {
            if (tok.size() < 2) fail("bad operator '" + tok + "'");
            char p = tok[0];
            if (p != 'X' && p != 'Y' && p != 'Z') fail("bad operator '" + tok + "'");
            int q = 0;
            if (!parse_int(tok.substr(1), q) || q < 0) fail("bad qubit in '" + tok + "'");
            for (const auto& [prev, op] : term.ops) {
                (void)op;
                if (prev == q) fail("qubit " + std::to_string(q) + " repeated in term");
            }
            term.ops.emplace_back(q, p);
        }
        h.terms.push_back(std::move(term));
    }
    if (h.terms.empty()) throw IoError(path + ": no terms");
    return h;
}

void save_pauli_hamiltonian(const PauliSum& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write hamiltonian file: " + path);
    char buf[64];
    for (const auto& t : h.terms) {
        std::snprintf(buf, sizeof buf, "%.17g", t.coeff);
        out << buf;
        for (const auto& [q, p] : t.ops) out << " " << p << q;
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

PCAModel pca_fit(const Eigen::MatrixXd& samples, bool center) {
    const auto m = samples.rows();
    const auto f = samples.cols();
    if (m < 2) throw std::invalid_argument("pca needs at least 2 samples");
    if (f < 1) throw std::invalid_argument("pca needs at least 1 feature");

    PCAModel model;
    model.centered = center;
    model.mean = center ? Eigen::VectorXd(samples.colwise().mean())
                        : Eigen::VectorXd(Eigen::VectorXd::Zero(f));
    Eigen::MatrixXd x = samples;
    if (center) x.rowwise() -= model.mean.transpose();

    Eigen::MatrixXd cov = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw NumericalError("pca eigendecomposition failed");

    model.components.resize(f, f);
    model.eigenvalues.resize(f);
    for (Eigen::Index c = 0; c < f; ++c) {
        Eigen::Index src = f - 1 - c;  // solver returns ascending order
        model.eigenvalues(c) = es.eigenvalues()(src);
        Eigen::VectorXd col = es.eigenvectors().col(src);
        Eigen::Index imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        if (col(imax) < 0) col = -col;
        model.components.col(c) = col;
    }
    return model;
}

std::vector<double> pca_project(const PCAModel& m, const std::vector<double>& x,
                                int n_components) {
    const auto f = m.components.rows();
    if (static_cast<Eigen::Index>(x.size()) != f)
        throw std::invalid_argument("pca_project: feature count mismatch");
    if (n_components < 1 || n_components > f)
        throw std::invalid_argument("pca_project: bad component count");
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), f) - m.mean;
    Eigen::VectorXd proj = m.components.leftCols(n_components).transpose() * v;
    return {proj.data(), proj.data() + n_components};
}

std::pair<double, StateVector> exact_ground(const PauliSum& h, int n) {
    if (n < 1 || n > 14)
        throw std::invalid_argument("exact_ground limited to 1..14 qubits, got " +
                                    std::to_string(n));
    if (h.min_qubits() > n) throw std::invalid_argument("hamiltonian acts past qubit count");
    Matrix dense = pauli_dense(h, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
    if (es.info() != Eigen::Success) throw NumericalError("exact_ground eigensolver failed");
    StateVector psi = StateVector::zero_state(n);
    Vector col = es.eigenvectors().col(0);
    for (std::size_t i = 0; i < psi.amps.size(); ++i) psi.amps[i] = col(static_cast<Eigen::Index>(i));
    return {es.eigenvalues()(0), psi};
}

LabeledDataset synthetic_two_cluster(int n_features, int n_samples, double separation,
                                     double noise, std::uint64_t seed) {
    if (n_features < 1 || n_samples < 2)
        throw std::invalid_argument("synthetic dataset needs >= 1 feature and >= 2 samples");
    Rng rng(seed);
    LabeledDataset d;
    d.features.reserve(static_cast<std::size_t>(n_samples));
    d.labels.reserve(static_cast<std::size_t>(n_samples));
    const double base = 3.14159265358979323846 / 4.0;
    for (int i = 0; i < n_samples; ++i) {
        int label = i % 2;
        double center = base + (label ? 0.5 : -0.5) * separation;
        std::vector<double> x(static_cast<std::size_t>(n_features));
        for (auto& xi : x) xi = center + noise * rng.normal();
        d.features.push_back(std::move(x));
        d.labels.push_back(label);
    }
    return d;
}

}  // namespace mpsqc
