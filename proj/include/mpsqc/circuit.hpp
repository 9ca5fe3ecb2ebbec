#pragma once

#include <string>
#include <vector>

#include "mpsqc/pauli.hpp"
#include "mpsqc/statevector.hpp"

namespace mpsqc {

enum class GateKind { rz, ry, crx, xx, yy, zz, fixed };

struct Gate {
    GateKind kind = GateKind::rz;
    int q0 = 0;   // first listed qubit: more significant in the gate basis, control for crx
    int q1 = -1;  // -1 for single-qubit gates
    Matrix matrix;  // fixed kind only

    bool parametrized() const { return kind != GateKind::fixed; }
    bool two_qubit() const { return q1 >= 0; }
};

// Gates in application order. Each parametrized gate consumes one entry of the
// parameter vector, in gate order. global_phase multiplies the output state so
// circuits assembled from phase-normalized blocks stay amplitude-exact.
struct Circuit {
    int n = 0;
    std::vector<Gate> gates;
    double global_phase = 0.0;

    int n_params() const;
    std::vector<int> parameter_index() const;  // parameter slot -> gate position
};

// realized matrix of a gate at a given angle (2x2 or 4x4)
Matrix gate_matrix(const Gate& g, double theta);

StateVector run(const Circuit& c, const std::vector<double>& params);
StateVector run(const Circuit& c, const std::vector<double>& params, const StateVector& input);

double expectation(const Circuit& c, const std::vector<double>& params, const PauliSum& h);
double prob_all_zeros(const Circuit& c, const std::vector<double>& params);
double prob_all_zeros(const Circuit& c, const std::vector<double>& params, const StateVector& input);

// ry(x_i) on qubit i of |0...0>, i.e. the product of (cos(x_i/2), sin(x_i/2))
StateVector encode_inputs(const std::vector<double>& x);

struct EncodedDataset {
    std::vector<StateVector> inputs;
    std::vector<int> labels;  // 0 or 1
};

struct Objective {
    enum class Kind { energy, all_zeros_prob, bce };
    Kind kind = Kind::energy;
    PauliSum h;                            // energy
    StateVector input;                     // optional start state (empty: |0...0>)
    const EncodedDataset* data = nullptr;  // bce
    double bce_eps = 1e-7;

    static Objective energy(PauliSum hamiltonian);
    static Objective all_zeros_prob(StateVector input = {});
    static Objective bce(const EncodedDataset& data, double eps = 1e-7);
};

// Every objective evaluation (including shifted evaluations inside gradient)
// increments *fevals when given; this is the cost unit optimizers report.
double objective_value(const Circuit& c, const std::vector<double>& params, const Objective& obj,
                       long long* fevals = nullptr);

// parameter-shift gradient: two-term (+-pi/2) for rz/ry/xx/yy/zz, four-term for crx
std::vector<double> gradient(const Circuit& c, const std::vector<double>& params,
                             const Objective& obj, long long* fevals = nullptr);

std::string circuit_to_json(const Circuit& c, const std::vector<double>& params);
std::pair<Circuit, std::vector<double>> circuit_from_json(const std::string& text);
void save_circuit(const Circuit& c, const std::vector<double>& params, const std::string& path);
std::pair<Circuit, std::vector<double>> load_circuit(const std::string& path);

}  // namespace mpsqc
