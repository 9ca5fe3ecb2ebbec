#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mpsqc/circuit.hpp"
#include "mpsqc/common.hpp"
#include "mpsqc/compiler.hpp"
#include "mpsqc/mps.hpp"
#include "mpsqc/mpsml.hpp"
#include "mpsqc/optimize.hpp"
#include "mpsqc/problems.hpp"
#include "mpsqc/rng.hpp"
#include "mpsqc/runner.hpp"

namespace {

using namespace mpsqc;

constexpr double kPi = 3.14159265358979323846;

void print_value(double v) { std::printf("%.17g\n", v); }

// shared problem flags for pretrain / train / exact
struct ProblemFlags {
    std::string problem;
    std::string graph;
    std::string hamiltonian;
    int n = 0;
    double tfim_j = 1.0;
    double tfim_g = 1.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--problem", problem, "maxcut | tfim | hamiltonian-file");
        cmd->add_option("--graph", graph, "edge list for maxcut (default: bundled instance)");
        cmd->add_option("--hamiltonian", hamiltonian, "Pauli-sum text file");
        cmd->add_option("--n", n, "qubit count (tfim; optional elsewhere)");
        cmd->add_option("--tfim-j", tfim_j, "tfim coupling strength");
        cmd->add_option("--tfim-g", tfim_g, "tfim transverse field");
    }

    // the operator handed to minimizers: negated cut Hamiltonian for maxcut
    PauliSum minimized(int& qubits, WeightedGraph* graph_out = nullptr) const {
        if (problem == "maxcut") {
            WeightedGraph g = graph.empty() ? default_maxcut_instance() : load_graph(graph);
            if (graph_out) *graph_out = g;
            qubits = g.n;
            return maxcut_hamiltonian(g).scaled(-1.0);
        }
        if (problem == "tfim") {
            if (n < 2) throw std::invalid_argument("tfim needs --n >= 2");
            qubits = n;
            return tfim_hamiltonian(n, tfim_j, tfim_g).pauli;
        }
        if (problem == "hamiltonian-file") {
            if (hamiltonian.empty())
                throw std::invalid_argument("hamiltonian-file needs --hamiltonian");
            PauliSum h = load_pauli_hamiltonian(hamiltonian);
            qubits = n > 0 ? n : h.min_qubits();
            if (h.min_qubits() > qubits)
                throw std::invalid_argument("hamiltonian acts past --n qubits");
            return h;
        }
        throw std::invalid_argument("need --problem maxcut|tfim|hamiltonian-file");
    }
};

struct OptimizerFlags {
    std::string kind;
    double eta0 = 0.0;  // 0 = per-kind default
    double gamma = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int iterations = 200;
    double grad_tol = 0.0;
    double obj_tol = 0.0;

    void add_to(CLI::App* cmd, const std::string& default_kind) {
        kind = default_kind;
        cmd->add_option("--optimizer", kind, "gd-decay | bfgs | adam")
            ->default_str(default_kind);
        cmd->add_option("--eta0", eta0, "initial learning rate (0 = optimizer default)");
        cmd->add_option("--gamma", gamma, "gd-decay learning-rate decay");
        cmd->add_option("--beta1", beta1, "Adam first-moment decay");
        cmd->add_option("--beta2", beta2, "Adam second-moment decay");
        cmd->add_option("--adam-eps", adam_eps, "Adam epsilon");
        cmd->add_option("--iterations", iterations, "iteration budget");
        cmd->add_option("--grad-tol", grad_tol, "stop when gradient norm falls below");
        cmd->add_option("--obj-tol", obj_tol, "stop when objective change falls below");
    }

    OptimizerConfig build() const {
        OptimizerConfig cfg;
        cfg.kind = optimizer_kind_from(kind);
        cfg.eta0 = eta0 != 0.0 ? eta0 : (cfg.kind == OptimizerKind::adam ? 0.001 : 0.05);
        cfg.gamma = gamma;
        cfg.beta1 = beta1;
        cfg.beta2 = beta2;
        cfg.adam_eps = adam_eps;
        cfg.max_iterations = iterations;
        cfg.grad_tolerance = grad_tol;
        cfg.objective_tolerance = obj_tol;
        return cfg;
    }
};

OffdiagKind offdiag_from(const std::string& name) {
    if (name == "brickwall-kak") return OffdiagKind::full_kak;
    if (name == "brickwall-ry-crx") return OffdiagKind::ry_crx;
    throw std::invalid_argument("ansatz must be brickwall-kak or brickwall-ry-crx");
}

// ---------------------------------------------------------------- pretrain

struct PretrainCmd {
    ProblemFlags prob;
    std::string method;
    std::string dataset;
    double dtau = 1e-3;
    int steps = 30;
    int sweeps = 8;
    int epochs = 5;
    double lr = 0.05;
    std::size_t chi = 2;
    std::uint64_t seed = 1;
    std::string out;

    void run() const {
        std::string m = method;
        if (m.empty()) {
            if (!dataset.empty())
                m = "ml";
            else if (prob.problem == "maxcut")
                m = "tebd";
            else
                m = "dmrg";
        }
        if (m == "ml") {
            if (dataset.empty()) throw std::invalid_argument("--method ml needs --dataset");
            LabeledDataset d = load_labeled_csv(dataset);
            ClassifierConfig cfg;
            cfg.lr = lr;
            cfg.epochs = epochs;
            cfg.chi_max = chi;
            cfg.seed = seed;
            MPSClassifier clf(static_cast<int>(d.n_features()), cfg);
            std::vector<double> losses = clf.train(d);
            save_mps(clf.state(), out);
            print_value(losses.empty() ? clf.loss(d) : losses.back());
            return;
        }

        int n = 0;
        WeightedGraph graph;
        PauliSum h = prob.minimized(n, &graph);
        MPS state;
        if (m == "tebd") {
            std::vector<std::pair<int, Matrix>> bonds;
            if (prob.problem == "maxcut") {
                const Matrix z = pauli_dense(PauliSum{{{1.0, {{0, 'Z'}}}}}, 1);
                const Matrix id = Matrix::Identity(2, 2);
                for (const auto& e : graph.edges) {
                    if (std::abs(e.u - e.v) != 1)
                        throw std::invalid_argument("tebd needs a nearest-neighbour graph");
                    bonds.emplace_back(std::min(e.u, e.v), e.w * (kron(z, z) - kron(id, id)));
                }
            } else if (prob.problem == "tfim") {
                bonds = tfim_hamiltonian(n, prob.tfim_j, prob.tfim_g).bonds;
            } else {
                throw std::invalid_argument("tebd supports maxcut and tfim only");
            }
            MPS plus =
                product_state(n, std::vector<double>(static_cast<std::size_t>(n), kPi / 4));
            state = tebd_imaginary(plus, bonds, dtau, steps, chi);
        } else if (m == "dmrg") {
            state = dmrg_ground_state(mpo_from_pauli(h, n), n, chi, sweeps, seed).state;
        } else {
            throw std::invalid_argument("--method must be tebd, dmrg or ml");
        }
        save_mps(state, out);
        print_value(expectation(state, mpo_from_pauli(h, n)));
    }
};

// ----------------------------------------------------------------- compile

struct CompileCmd {
    std::string mps_path;
    int depth = 0;  // 0 = minimum feasible
    std::string ansatz = "brickwall-kak";
    bool adjoint = false;
    int fit_iterations = 60;
    std::uint64_t seed = 1;
    std::string out;

    void run() const {
        MPS s = load_mps(mps_path);
        int d = depth;
        if (d == 0) d = s.max_bond() <= 2 ? static_cast<int>(s.n()) - 1
                                          : static_cast<int>(s.n());
        CompileResult r = compile_to_circuit(s, d, offdiag_from(ansatz), adjoint,
                                             fit_iterations, seed);
        save_circuit(r.circuit, r.params, out);
        print_value(r.fidelity);
    }
};

// ------------------------------------------------------------------- train

struct TrainCmd {
    ProblemFlags prob;
    OptimizerFlags opt;
    std::string circuit_path;
    std::string init = "file";
    std::uint64_t seed = 1;
    std::string log_path;
    std::string out;

    void run() const {
        auto [circuit, params] = load_circuit(circuit_path);
        int n = 0;
        PauliSum h = prob.minimized(n);
        if (n != circuit.n)
            throw std::invalid_argument("circuit qubit count does not match the problem");

        std::vector<double> x0;
        if (init == "file") {
            x0 = params;
        } else if (init == "identity") {
            x0.assign(static_cast<std::size_t>(circuit.n_params()), 0.0);
        } else if (init == "random") {
            Rng rng(seed);
            x0.resize(static_cast<std::size_t>(circuit.n_params()));
            for (auto& v : x0) v = rng.uniform(-kPi, kPi);
        } else {
            throw std::invalid_argument("--init must be file, random or identity");
        }

        const Objective obj = Objective::energy(h);
        long long fevals = 0;
        ObjectiveFn f = [&](const std::vector<double>& x) {
            return objective_value(circuit, x, obj, &fevals);
        };
        GradientFn g = [&](const std::vector<double>& x) {
            return gradient(circuit, x, obj, &fevals);
        };
        MinimizeResult mr = minimize(f, g, &fevals, x0, opt.build());
        if (!log_path.empty()) save_runlog(mr.log, log_path);
        if (!out.empty()) save_circuit(circuit, mr.x, out);
        print_value(objective_value(circuit, mr.x, obj));
    }
};

// ---------------------------------------------------------------- classify

struct ClassifyCmd {
    std::string dataset;
    int n = 4;
    int depth = 4;
    std::string ansatz;
    std::string inits = "mps,random,identity";
    OptimizerFlags opt;
    int epochs = 5;
    std::size_t chi = 2;
    double lr = 0.05;
    std::uint64_t seed = 1;
    std::string output_dir = "classify-out";

    void run() const {
        ExperimentConfig cfg;
        cfg.problem = "classify";
        cfg.dataset_path = dataset;
        cfg.n_qubits = n;
        cfg.depth = depth;
        cfg.ansatz = ansatz;
        cfg.pretrain_epochs = epochs;
        cfg.pretrain_chi = chi;
        cfg.pretrain_lr = lr;
        cfg.seeds = {seed};
        cfg.output_dir = output_dir;
        cfg.opt = opt.build();
        cfg.opt_kind_set = true;
        apply_config_override(cfg, "inits", inits);
        ComparisonReport r = run_classifier_experiment(cfg);
        emit_report(r, cfg.output_dir);
        for (const auto& arm : r.runs)
            if (arm.init == cfg.inits.front() && !arm.accuracy.empty()) {
                print_value(arm.accuracy.back());
                return;
            }
    }
};

// -------------------------------------------------------------- experiment

struct ExperimentCmd {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;  // filled after parse

    void run() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = experiment_config_from_json(config_path);
        for (const auto& [key, value] : overrides) apply_config_override(cfg, key, value);
        ComparisonReport r = run_experiment(cfg);
        emit_report(r, cfg.output_dir);
        std::cerr << "wrote " << cfg.output_dir << "\n";
    }
};

// ------------------------------------------------------------------- exact

struct ExactCmd {
    ProblemFlags prob;

    void run() const {
        if (prob.problem.empty() && !prob.hamiltonian.empty()) {
            PauliSum h = load_pauli_hamiltonian(prob.hamiltonian);
            int n = prob.n > 0 ? prob.n : h.min_qubits();
            if (h.min_qubits() > n) throw std::invalid_argument("hamiltonian acts past --n");
            print_value(exact_ground(h, n).first);
            return;
        }
        int n = 0;
        PauliSum h = prob.minimized(n);
        print_value(exact_ground(h, n).first);
    }
};

// ----------------------------------------------------------------- inspect

struct InspectCmd {
    std::string file;

    static std::string describe_mps(const MPS& s) {
        std::ostringstream os;
        os << "mps n=" << s.n() << " chi=" << s.max_bond() << " form=";
        switch (s.form) {
            case CanonicalForm::left: os << "left"; break;
            case CanonicalForm::right: os << "right"; break;
            default: os << "none"; break;
        }
        os << " bonds=";
        for (std::size_t i = 0; i + 1 < s.tensors.size(); ++i)
            os << (i ? "," : "") << s.tensors[i].r;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", std::abs(overlap(s, s)));
        os << " norm2=" << buf << "\n";
        return os.str();
    }

    static std::string describe_circuit(const Circuit& c, const std::vector<double>& params) {
        std::ostringstream os;
        os << "circuit n=" << c.n << " gates=" << c.gates.size() << " params=" << params.size();
        int kinds[7] = {0};
        for (const auto& g : c.gates) kinds[static_cast<int>(g.kind)]++;
        const char* names[7] = {"rz", "ry", "crx", "xx", "yy", "zz", "fixed-unitary"};
        for (int k = 0; k < 7; ++k)
            if (kinds[k]) os << " " << names[k] << "=" << kinds[k];
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", c.global_phase);
        os << " global-phase=" << buf << "\n";
        return os.str();
    }

    void run() const {
        std::ifstream in(file);
        if (!in) throw IoError("cannot open: " + file);
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();

        std::string report;
        auto try_json = [&]() -> bool {
            nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
            if (j.is_discarded() || !j.is_object()) return false;
            try {
                if (j.contains("tensors")) {
                    report = describe_mps(mps_from_json(text));
                } else if (j.contains("gates")) {
                    auto [c, p] = circuit_from_json(text);
                    report = describe_circuit(c, p);
                } else if (j.contains("problem")) {
                    ExperimentConfig cfg = experiment_config_from_json(file);
                    validate_config(cfg);
                    std::ostringstream os;
                    os << "experiment config problem=" << cfg.problem << " depth=" << cfg.depth
                       << " seeds=" << cfg.seeds.size() << " inits=" << cfg.inits.size() << "\n";
                    report = os.str();
                } else {
                    throw IoError(file + ": unrecognized JSON artifact");
                }
            } catch (const IoError&) {
                throw;
            } catch (const std::exception& e) {
                throw IoError(file + ": " + e.what());
            }
            return true;
        };

        if (!try_json()) {
            // text formats, most specific first
            std::string first_line = text.substr(0, text.find('\n'));
            if (first_line == "step,objective,grad_norm,fevals,seconds") {
                std::size_t rows = std::count(text.begin(), text.end(), '\n');
                std::ostringstream os;
                os << "runlog steps=" << (rows ? rows - 1 : 0) << "\n";
                report = os.str();
            } else {
                try {
                    PauliSum h = load_pauli_hamiltonian(file);
                    std::ostringstream os;
                    os << "hamiltonian terms=" << h.terms.size() << " qubits=" << h.min_qubits()
                       << "\n";
                    report = os.str();
                } catch (const IoError&) {
                    try {
                        WeightedGraph g = load_graph(file);
                        double w = 0;
                        for (const auto& e : g.edges) w += e.w;
                        char buf[64];
                        std::snprintf(buf, sizeof buf, "%.17g", w);
                        std::ostringstream os;
                        os << "graph n=" << g.n << " edges=" << g.edges.size()
                           << " total-weight=" << buf << "\n";
                        report = os.str();
                    } catch (const IoError&) {
                        try {
                            LabeledDataset d = load_labeled_csv(file);
                            int pos = 0;
                            for (int y : d.labels) pos += y;
                            std::ostringstream os;
                            os << "dataset samples=" << d.size()
                               << " features=" << d.n_features() << " positives=" << pos << "\n";
                            report = os.str();
                        } catch (const IoError&) {
                            throw IoError(file + ": unrecognized artifact");
                        }
                    }
                }
            }
        }
        std::cout << report;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MPS-pretrained brick-wall circuit pipeline"};
    app.require_subcommand(1);

    PretrainCmd pretrain;
    auto* cmd_pre = app.add_subcommand("pretrain", "classically train an MPS and write it out");
    pretrain.prob.add_to(cmd_pre);
    cmd_pre->add_option("--method", pretrain.method, "tebd | dmrg | ml (default per problem)");
    cmd_pre->add_option("--dataset", pretrain.dataset, "labeled csv for --method ml");
    cmd_pre->add_option("--dtau", pretrain.dtau, "imaginary time step");
    cmd_pre->add_option("--steps", pretrain.steps, "tebd step count");
    cmd_pre->add_option("--sweeps", pretrain.sweeps, "dmrg sweep count");
    cmd_pre->add_option("--epochs", pretrain.epochs, "ml sweep count");
    cmd_pre->add_option("--lr", pretrain.lr, "ml learning rate");
    cmd_pre->add_option("--chi", pretrain.chi, "bond dimension cap");
    cmd_pre->add_option("--seed", pretrain.seed, "random seed");
    cmd_pre->add_option("--out", pretrain.out, "output MPS file")->required();
    cmd_pre->callback([&] { pretrain.run(); });

    CompileCmd compile;
    auto* cmd_comp = app.add_subcommand("compile", "turn an MPS into a brick-wall circuit");
    cmd_comp->add_option("--mps", compile.mps_path, "input MPS file")->required();
    cmd_comp->add_option("--depth", compile.depth, "brick-wall depth (0 = minimum)");
    cmd_comp->add_option("--ansatz", compile.ansatz, "brickwall-kak | brickwall-ry-crx");
    cmd_comp->add_flag("--adjoint", compile.adjoint, "compile the inverse map (classifier)");
    cmd_comp->add_option("--fit-iterations", compile.fit_iterations,
                         "alternating-fit iterations for chi in (2,4]");
    cmd_comp->add_option("--seed", compile.seed, "random seed");
    cmd_comp->add_option("--out", compile.out, "output circuit file")->required();
    cmd_comp->callback([&] { compile.run(); });

    TrainCmd train;
    auto* cmd_train = app.add_subcommand("train", "optimize circuit parameters on an energy");
    train.prob.add_to(cmd_train);
    train.opt.add_to(cmd_train, "bfgs");
    cmd_train->add_option("--circuit", train.circuit_path, "input circuit file")->required();
    cmd_train->add_option("--init", train.init, "file | random | identity");
    cmd_train->add_option("--seed", train.seed, "seed for --init random");
    cmd_train->add_option("--log", train.log_path, "write the optimization log csv here");
    cmd_train->add_option("--out", train.out, "write the trained circuit here");
    cmd_train->callback([&] { train.run(); });

    ClassifyCmd classify;
    auto* cmd_cls = app.add_subcommand("classify", "full classification pipeline on a dataset");
    classify.opt.add_to(cmd_cls, "adam");
    cmd_cls->add_option("--dataset", classify.dataset, "labeled csv")->required();
    cmd_cls->add_option("--n", classify.n, "qubit count (= retained components)");
    cmd_cls->add_option("--depth", classify.depth, "brick-wall depth");
    cmd_cls->add_option("--ansatz", classify.ansatz, "brickwall-kak | brickwall-ry-crx");
    cmd_cls->add_option("--inits", classify.inits, "comma list of mps,random,identity");
    cmd_cls->add_option("--epochs", classify.epochs, "MPS pretraining sweeps");
    cmd_cls->add_option("--chi", classify.chi, "MPS bond dimension cap");
    cmd_cls->add_option("--lr", classify.lr, "MPS sweep learning rate");
    cmd_cls->add_option("--seed", classify.seed, "random seed");
    cmd_cls->add_option("--output-dir", classify.output_dir, "report directory");
    cmd_cls->callback([&] { classify.run(); });

    ExperimentCmd experiment;
    auto* cmd_exp = app.add_subcommand("experiment", "run an init-comparison experiment");
    cmd_exp->add_option("--config", experiment.config_path, "experiment config json");
    static const char* override_keys[] = {
        "problem",        "graph",          "hamiltonian",     "dataset",       "ansatz",
        "depth",          "n-qubits",       "inits",           "seeds",         "output-dir",
        "tfim-j",         "tfim-g",         "pretrain-dtau",   "pretrain-steps",
        "pretrain-sweeps", "pretrain-epochs", "pretrain-chi",  "pretrain-lr",   "optimizer",
        "eta0",           "gamma",          "beta1",           "beta2",         "adam-eps",
        "iterations",     "grad-tol",       "obj-tol"};
    std::vector<std::string> override_values(std::size(override_keys));
    std::vector<CLI::Option*> override_opts;
    for (std::size_t i = 0; i < std::size(override_keys); ++i)
        override_opts.push_back(cmd_exp->add_option("--" + std::string(override_keys[i]),
                                                    override_values[i],
                                                    "config override"));
    cmd_exp->callback([&] {
        for (std::size_t i = 0; i < override_opts.size(); ++i)
            if (override_opts[i]->count())
                experiment.overrides.emplace_back(override_keys[i], override_values[i]);
        experiment.run();
    });

    ExactCmd exact;
    auto* cmd_exact = app.add_subcommand("exact", "dense minimum eigenvalue of a problem");
    exact.prob.add_to(cmd_exact);
    cmd_exact->callback([&] { exact.run(); });

    InspectCmd inspect;
    auto* cmd_ins = app.add_subcommand("inspect", "describe a serialized artifact");
    cmd_ins->add_option("--file", inspect.file, "artifact path")->required();
    cmd_ins->callback([&] { inspect.run(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const UnsupportedBondDimension& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
