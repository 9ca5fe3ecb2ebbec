#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpsqc/mpsml.hpp"
#include "mpsqc/pauli.hpp"
#include "mpsqc/statevector.hpp"
#include "mpsqc/tensor.hpp"

namespace mpsqc {

struct WeightedGraph {
    struct Edge {
        int u = 0, v = 0;
        double w = 0.0;
    };
    int n = 0;
    std::vector<Edge> edges;
};

// text format: one `u v w` triple per line, 0-indexed; # comments and blank
// lines ignored; vertex count inferred as max index + 1
WeightedGraph load_graph(const std::string& path);
void save_graph(const WeightedGraph& g, const std::string& path);

// bundled 6-node chain instance with fixed weights; optimum known by brute force
WeightedGraph default_maxcut_instance();

// H = sum_ij w_ij (1 - Z_i Z_j); maximal-cut states are its top eigenstates,
// cut value = <H>/2
PauliSum maxcut_hamiltonian(const WeightedGraph& g);

// cut weight of one partition; bit u of the assignment is (s >> (n-1-u)) & 1
double cut_value(const WeightedGraph& g, std::uint64_t assignment);

struct MaxcutSolution {
    std::uint64_t assignment = 0;
    std::string bitstring;
    double value = 0.0;
};

// exhaustive search, n <= 24; ties resolved toward the numerically smallest
// assignment. Serial reference and OpenMP variant agree exactly.
MaxcutSolution brute_force_maxcut_serial(const WeightedGraph& g);
MaxcutSolution brute_force_maxcut_parallel(const WeightedGraph& g);
MaxcutSolution brute_force_maxcut(const WeightedGraph& g);

struct TfimTerms {
    PauliSum pauli;
    std::vector<std::pair<int, Matrix>> bonds;  // (site, 4x4 two-site term), fields split evenly
};

// open chain H = -j sum Z_i Z_{i+1} - g sum X_i in both representations
TfimTerms tfim_hamiltonian(int n, double j, double g);

// lines `<coeff> [<P><q>]*`, P in {X,Y,Z}; # comments allowed
PauliSum load_pauli_hamiltonian(const std::string& path);
void save_pauli_hamiltonian(const PauliSum& h, const std::string& path);

struct PCAModel {
    Eigen::MatrixXd components;   // columns, descending eigenvalue order
    Eigen::VectorXd eigenvalues;  // non-increasing
    Eigen::VectorXd mean;
    bool centered = true;
};

PCAModel pca_fit(const Eigen::MatrixXd& samples, bool center = true);
std::vector<double> pca_project(const PCAModel& m, const std::vector<double>& x, int n_components);

// dense diagonalization oracle, n <= 14
std::pair<double, StateVector> exact_ground(const PauliSum& h, int n);

// two Gaussian clusters in feature space with labels 0/1, balanced,
// deterministic in the seed; separable for small noise
LabeledDataset synthetic_two_cluster(int n_features, int n_samples, double separation,
                                     double noise, std::uint64_t seed);

}  // namespace mpsqc
