#include "mpsqc/circuit.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mpsqc/common.hpp"
#include "mpsqc/kak.hpp"

namespace mpsqc {

int Circuit::n_params() const {
    int c = 0;
    for (const auto& g : gates) c += g.parametrized();
    return c;
}

std::vector<int> Circuit::parameter_index() const {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(gates.size()); ++i)
        if (gates[i].parametrized()) idx.push_back(i);
    return idx;
}

Matrix gate_matrix(const Gate& g, double theta) {
    switch (g.kind) {
        case GateKind::rz: return rz_matrix(theta);
        case GateKind::ry: return ry_matrix(theta);
        case GateKind::crx: return crx_matrix(theta);
        case GateKind::xx: return xx_matrix(theta);
        case GateKind::yy: return yy_matrix(theta);
        case GateKind::zz: return zz_matrix(theta);
        case GateKind::fixed: return g.matrix;
    }
    throw std::invalid_argument("unknown gate kind");
}

namespace {

void check_gate(const Gate& g, int n) {
    if (g.q0 < 0 || g.q0 >= n) throw std::invalid_argument("gate qubit out of range");
    if (g.two_qubit()) {
        if (g.q1 < 0 || g.q1 >= n) throw std::invalid_argument("gate qubit out of range");
        if (g.q1 == g.q0) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }
    const bool needs_two = g.kind == GateKind::crx || g.kind == GateKind::xx ||
                           g.kind == GateKind::yy || g.kind == GateKind::zz;
    if (needs_two && !g.two_qubit()) throw std::invalid_argument("gate kind requires two qubits");
    if ((g.kind == GateKind::rz || g.kind == GateKind::ry) && g.two_qubit())
        throw std::invalid_argument("rotation gate takes one qubit");
    if (g.kind == GateKind::fixed) {
        const Eigen::Index want = g.two_qubit() ? 4 : 2;
        if (g.matrix.rows() != want || g.matrix.cols() != want)
            throw std::invalid_argument("fixed gate matrix has wrong shape");
    }
}

StateVector run_impl(const Circuit& c, const std::vector<double>& params,
                     const StateVector* input) {
    if (static_cast<int>(params.size()) != c.n_params())
        throw std::invalid_argument("parameter count mismatch");
    StateVector psi;
    if (input) {
        if (input->n != c.n) throw std::invalid_argument("input state size mismatch");
        psi = *input;
    } else {
        psi = StateVector::zero_state(c.n);
    }
    std::size_t ip = 0;
    for (const auto& g : c.gates) {
        check_gate(g, c.n);
        const Matrix u = gate_matrix(g, g.parametrized() ? params[ip++] : 0.0);
        if (g.two_qubit())
            apply_gate_2q(psi, u, g.q0, g.q1);
        else
            apply_gate_1q(psi, u, g.q0);
    }
    if (c.global_phase != 0.0) {
        const cd ph = std::exp(cd{0.0, c.global_phase});
        for (auto& a : psi.amps) a *= ph;
    }
    return psi;
}

}  // namespace

StateVector run(const Circuit& c, const std::vector<double>& params) {
    return run_impl(c, params, nullptr);
}

StateVector run(const Circuit& c, const std::vector<double>& params, const StateVector& input) {
    return run_impl(c, params, &input);
}

double expectation(const Circuit& c, const std::vector<double>& params, const PauliSum& h) {
    if (h.min_qubits() > c.n) throw std::invalid_argument("operator acts outside the circuit");
    const StateVector psi = run(c, params);
    return pauli_expectation(h, psi);
}

double prob_all_zeros(const Circuit& c, const std::vector<double>& params) {
    return prob_all_zeros(run(c, params));
}

double prob_all_zeros(const Circuit& c, const std::vector<double>& params,
                      const StateVector& input) {
    return prob_all_zeros(run(c, params, input));
}

StateVector encode_inputs(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw std::invalid_argument("encode_inputs needs at least one feature");
    std::vector<cd> amps{cd{1.0, 0.0}};
    for (int q = 0; q < n; ++q) {
        const double c = std::cos(x[q] / 2), s = std::sin(x[q] / 2);
        std::vector<cd> next(amps.size() * 2);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            next[i * 2] = amps[i] * c;
            next[i * 2 + 1] = amps[i] * s;
        }
        amps = std::move(next);
    }
    StateVector psi;
    psi.n = n;
    psi.amps = std::move(amps);
    return psi;
}

Objective Objective::energy(PauliSum hamiltonian) {
    Objective o;
    o.kind = Kind::energy;
    o.h = std::move(hamiltonian);
    return o;
}

Objective Objective::all_zeros_prob(StateVector input) {
    Objective o;
    o.kind = Kind::all_zeros_prob;
    o.input = std::move(input);
    return o;
}

Objective Objective::bce(const EncodedDataset& data, double eps) {
    Objective o;
    o.kind = Kind::bce;
    o.data = &data;
    o.bce_eps = eps;
    return o;
}

namespace {

double bce_term(double f, int y, double eps) {
    const double fc = std::min(1.0 - eps, std::max(eps, f));
    return y ? -std::log(fc) : -std::log(1.0 - fc);
}

}  // namespace

double objective_value(const Circuit& c, const std::vector<double>& params, const Objective& obj,
                       long long* fevals) {
    if (fevals) ++*fevals;
    switch (obj.kind) {
        case Objective::Kind::energy:
            return expectation(c, params, obj.h);
        case Objective::Kind::all_zeros_prob:
            return obj.input.amps.empty() ? prob_all_zeros(c, params)
                                          : prob_all_zeros(c, params, obj.input);
        case Objective::Kind::bce: {
            if (!obj.data || obj.data->inputs.empty())
                throw std::invalid_argument("bce objective needs a dataset");
            double acc = 0.0;
            for (std::size_t i = 0; i < obj.data->inputs.size(); ++i)
                acc += bce_term(prob_all_zeros(c, params, obj.data->inputs[i]),
                                obj.data->labels[i], obj.bce_eps);
            return acc / static_cast<double>(obj.data->inputs.size());
        }
    }
    throw std::invalid_argument("unknown objective kind");
}

std::vector<double> gradient(const Circuit& c, const std::vector<double>& params,
                             const Objective& obj, long long* fevals) {
    if (static_cast<int>(params.size()) != c.n_params())
        throw std::invalid_argument("parameter count mismatch");
    const std::vector<int> slots = c.parameter_index();

    // BCE is not itself a trigonometric polynomial of each angle; the shift
    // rule applies to the per-sample all-zeros probability, combined by the
    // chain rule with weights fixed at the base point.
    std::vector<double> weights;
    if (obj.kind == Objective::Kind::bce) {
        if (!obj.data || obj.data->inputs.empty())
            throw std::invalid_argument("bce objective needs a dataset");
        if (fevals) ++*fevals;
        const double m = static_cast<double>(obj.data->inputs.size());
        weights.resize(obj.data->inputs.size());
        for (std::size_t i = 0; i < obj.data->inputs.size(); ++i) {
            const double f = prob_all_zeros(c, params, obj.data->inputs[i]);
            if (f < obj.bce_eps || f > 1.0 - obj.bce_eps) {
                weights[i] = 0.0;  // clamp plateau
            } else {
                weights[i] = (obj.data->labels[i] ? -1.0 / f : 1.0 / (1.0 - f)) / m;
            }
        }
    }

    auto shifted = [&](std::size_t slot, double delta) {
        std::vector<double> p = params;
        p[slot] += delta;
        if (obj.kind != Objective::Kind::bce) return objective_value(c, p, obj, fevals);
        if (fevals) ++*fevals;
        double acc = 0.0;
        for (std::size_t i = 0; i < obj.data->inputs.size(); ++i)
            acc += weights[i] * prob_all_zeros(c, p, obj.data->inputs[i]);
        return acc;
    };

    const double half_pi = 1.5707963267948966;
    // four-term rule constants for the half-controlled generator of crx
    const double c1 = (std::sqrt(2.0) + 1.0) / (4.0 * std::sqrt(2.0));
    const double c2 = (std::sqrt(2.0) - 1.0) / (4.0 * std::sqrt(2.0));

    std::vector<double> grad(slots.size());
    for (std::size_t si = 0; si < slots.size(); ++si) {
        if (c.gates[slots[si]].kind == GateKind::crx) {
            grad[si] = c1 * (shifted(si, half_pi) - shifted(si, -half_pi)) -
                       c2 * (shifted(si, 3 * half_pi) - shifted(si, -3 * half_pi));
        } else {
            grad[si] = 0.5 * (shifted(si, half_pi) - shifted(si, -half_pi));
        }
    }
    return grad;
}

namespace {

using json = nlohmann::ordered_json;

const char* kind_name(GateKind k) {
    switch (k) {
        case GateKind::rz: return "rz";
        case GateKind::ry: return "ry";
        case GateKind::crx: return "crx";
        case GateKind::xx: return "xx";
        case GateKind::yy: return "yy";
        case GateKind::zz: return "zz";
        case GateKind::fixed: return "fixed-unitary";
    }
    return "?";
}

GateKind kind_from(const std::string& s) {
    if (s == "rz") return GateKind::rz;
    if (s == "ry") return GateKind::ry;
    if (s == "crx") return GateKind::crx;
    if (s == "xx") return GateKind::xx;
    if (s == "yy") return GateKind::yy;
    if (s == "zz") return GateKind::zz;
    if (s == "fixed-unitary") return GateKind::fixed;
    throw IoError("unknown gate kind: " + s);
}

}  // namespace

std::string circuit_to_json(const Circuit& c, const std::vector<double>& params) {
    if (static_cast<int>(params.size()) != c.n_params())
        throw std::invalid_argument("parameter count mismatch");
    json j;
    j["n"] = c.n;
    j["global_phase"] = c.global_phase;
    json gates = json::array();
    std::size_t ip = 0;
    for (const auto& g : c.gates) {
        json jg;
        jg["kind"] = kind_name(g.kind);
        json qs = json::array({g.q0});
        if (g.two_qubit()) qs.push_back(g.q1);
        jg["qubits"] = std::move(qs);
        if (g.parametrized()) {
            jg["params"] = json::array({params[ip++]});
        } else {
            jg["params"] = json::array();
            json m = json::array();
            for (Eigen::Index r = 0; r < g.matrix.rows(); ++r) {
                json row = json::array();
                for (Eigen::Index col = 0; col < g.matrix.cols(); ++col)
                    row.push_back(json::array({g.matrix(r, col).real(), g.matrix(r, col).imag()}));
                m.push_back(std::move(row));
            }
            jg["matrix"] = std::move(m);
        }
        gates.push_back(std::move(jg));
    }
    j["gates"] = std::move(gates);
    return j.dump();
}

std::pair<Circuit, std::vector<double>> circuit_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("invalid circuit document: ") + e.what());
    }
    try {
        Circuit c;
        c.n = j.at("n").get<int>();
        c.global_phase = j.value("global_phase", 0.0);
        std::vector<double> params;
        for (const auto& jg : j.at("gates")) {
            Gate g;
            g.kind = kind_from(jg.at("kind").get<std::string>());
            const auto& qs = jg.at("qubits");
            g.q0 = qs.at(0).get<int>();
            g.q1 = qs.size() > 1 ? qs.at(1).get<int>() : -1;
            if (g.parametrized()) {
                params.push_back(jg.at("params").at(0).get<double>());
            } else {
                const auto& m = jg.at("matrix");
                const Eigen::Index dim = static_cast<Eigen::Index>(m.size());
                g.matrix = Matrix(dim, dim);
                for (Eigen::Index r = 0; r < dim; ++r)
                    for (Eigen::Index col = 0; col < dim; ++col)
                        g.matrix(r, col) = cd{m.at(r).at(col).at(0).get<double>(),
                                              m.at(r).at(col).at(1).get<double>()};
            }
            check_gate(g, c.n);
            c.gates.push_back(std::move(g));
        }
        return {std::move(c), std::move(params)};
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid circuit document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("invalid circuit document: ") + e.what());
    }
}

void save_circuit(const Circuit& c, const std::vector<double>& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << circuit_to_json(c, params) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

std::pair<Circuit, std::vector<double>> load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return circuit_from_json(text);
}

}  // namespace mpsqc
