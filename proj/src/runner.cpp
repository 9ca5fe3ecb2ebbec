#include "mpsqc/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mpsqc/circuit.hpp"
#include "mpsqc/common.hpp"
#include "mpsqc/compiler.hpp"
#include "mpsqc/mps.hpp"
#include "mpsqc/mpsml.hpp"
#include "mpsqc/problems.hpp"
#include "mpsqc/rng.hpp"

namespace mpsqc {

namespace {

constexpr double kPi = 3.14159265358979323846;

using json = nlohmann::json;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

[[noreturn]] void bad_config(const std::string& what) {
    throw std::invalid_argument("experiment config: " + what);
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    if (!j.is_object()) throw IoError(path + ": config must be a JSON object");

    ExperimentConfig cfg;
    cfg.opt.eta0 = 0.0;  // sentinel: per-optimizer default applied at run time
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "problem")
                cfg.problem = val.get<std::string>();
            else if (key == "graph")
                cfg.graph_path = val.get<std::string>();
            else if (key == "hamiltonian")
                cfg.hamiltonian_path = val.get<std::string>();
            else if (key == "dataset")
                cfg.dataset_path = val.get<std::string>();
            else if (key == "ansatz")
                cfg.ansatz = val.get<std::string>();
            else if (key == "depth")
                cfg.depth = val.get<int>();
            else if (key == "n-qubits")
                cfg.n_qubits = val.get<int>();
            else if (key == "inits")
                cfg.inits = val.get<std::vector<std::string>>();
            else if (key == "seeds")
                cfg.seeds = val.get<std::vector<std::uint64_t>>();
            else if (key == "output-dir")
                cfg.output_dir = val.get<std::string>();
            else if (key == "tfim-j")
                cfg.tfim_j = val.get<double>();
            else if (key == "tfim-g")
                cfg.tfim_g = val.get<double>();
            else if (key == "pretrain-dtau")
                cfg.pretrain_dtau = val.get<double>();
            else if (key == "pretrain-steps")
                cfg.pretrain_steps = val.get<int>();
            else if (key == "pretrain-sweeps")
                cfg.pretrain_sweeps = val.get<int>();
            else if (key == "pretrain-epochs")
                cfg.pretrain_epochs = val.get<int>();
            else if (key == "pretrain-chi")
                cfg.pretrain_chi = val.get<std::size_t>();
            else if (key == "pretrain-lr")
                cfg.pretrain_lr = val.get<double>();
            else if (key == "optimizer") {
                cfg.opt.kind = optimizer_kind_from(val.get<std::string>());
                cfg.opt_kind_set = true;
            } else if (key == "eta0")
                cfg.opt.eta0 = val.get<double>();
            else if (key == "gamma")
                cfg.opt.gamma = val.get<double>();
            else if (key == "beta1")
                cfg.opt.beta1 = val.get<double>();
            else if (key == "beta2")
                cfg.opt.beta2 = val.get<double>();
            else if (key == "adam-eps")
                cfg.opt.adam_eps = val.get<double>();
            else if (key == "iterations")
                cfg.opt.max_iterations = val.get<int>();
            else if (key == "grad-tol")
                cfg.opt.grad_tolerance = val.get<double>();
            else if (key == "obj-tol")
                cfg.opt.objective_tolerance = val.get<double>();
            else
                bad_config("unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return cfg;
}

void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value) {
    auto as_int = [&] {
        try {
            return std::stoi(value);
        } catch (const std::exception&) {
            bad_config("bad integer for " + key + ": '" + value + "'");
        }
    };
    auto as_double = [&] {
        try {
            return std::stod(value);
        } catch (const std::exception&) {
            bad_config("bad number for " + key + ": '" + value + "'");
        }
    };
    if (key == "problem")
        cfg.problem = value;
    else if (key == "graph")
        cfg.graph_path = value;
    else if (key == "hamiltonian")
        cfg.hamiltonian_path = value;
    else if (key == "dataset")
        cfg.dataset_path = value;
    else if (key == "ansatz")
        cfg.ansatz = value;
    else if (key == "depth")
        cfg.depth = as_int();
    else if (key == "n-qubits")
        cfg.n_qubits = as_int();
    else if (key == "inits")
        cfg.inits = split_list(value);
    else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& tok : split_list(value)) {
            try {
                cfg.seeds.push_back(std::stoull(tok));
            } catch (const std::exception&) {
                bad_config("bad seed '" + tok + "'");
            }
        }
    } else if (key == "output-dir")
        cfg.output_dir = value;
    else if (key == "tfim-j")
        cfg.tfim_j = as_double();
    else if (key == "tfim-g")
        cfg.tfim_g = as_double();
    else if (key == "pretrain-dtau")
        cfg.pretrain_dtau = as_double();
    else if (key == "pretrain-steps")
        cfg.pretrain_steps = as_int();
    else if (key == "pretrain-sweeps")
        cfg.pretrain_sweeps = as_int();
    else if (key == "pretrain-epochs")
        cfg.pretrain_epochs = as_int();
    else if (key == "pretrain-chi")
        cfg.pretrain_chi = static_cast<std::size_t>(as_int());
    else if (key == "pretrain-lr")
        cfg.pretrain_lr = as_double();
    else if (key == "optimizer") {
        cfg.opt.kind = optimizer_kind_from(value);
        cfg.opt_kind_set = true;
    } else if (key == "eta0")
        cfg.opt.eta0 = as_double();
    else if (key == "gamma")
        cfg.opt.gamma = as_double();
    else if (key == "beta1")
        cfg.opt.beta1 = as_double();
    else if (key == "beta2")
        cfg.opt.beta2 = as_double();
    else if (key == "adam-eps")
        cfg.opt.adam_eps = as_double();
    else if (key == "iterations")
        cfg.opt.max_iterations = as_int();
    else if (key == "grad-tol")
        cfg.opt.grad_tolerance = as_double();
    else if (key == "obj-tol")
        cfg.opt.objective_tolerance = as_double();
    else
        bad_config("unknown key '" + key + "'");
}

void validate_config(const ExperimentConfig& cfg) {
    static const std::vector<std::string> problems{"maxcut", "hamiltonian-file", "tfim",
                                                   "classify"};
    if (std::find(problems.begin(), problems.end(), cfg.problem) == problems.end())
        bad_config("problem must be one of maxcut, hamiltonian-file, tfim, classify");
    if (cfg.depth < 1) bad_config("depth must be >= 1");
    if (cfg.inits.empty()) bad_config("inits must be non-empty");
    for (const auto& i : cfg.inits)
        if (i != "mps" && i != "random" && i != "identity")
            bad_config("unknown init '" + i + "'");
    if (cfg.seeds.empty()) bad_config("seeds must be non-empty");
    if (!cfg.ansatz.empty() && cfg.ansatz != "brickwall-kak" && cfg.ansatz != "brickwall-ry-crx")
        bad_config("ansatz must be brickwall-kak or brickwall-ry-crx");
    if (cfg.problem == "hamiltonian-file" && cfg.hamiltonian_path.empty())
        bad_config("hamiltonian-file problem needs a hamiltonian path");
    if (cfg.problem == "classify" && cfg.dataset_path.empty())
        bad_config("classify problem needs a dataset path");
    if (cfg.problem == "classify" && cfg.n_qubits < 2)
        bad_config("classify needs n-qubits >= 2");
    if (cfg.problem == "tfim" && cfg.n_qubits < 2) bad_config("tfim needs n-qubits >= 2");
    if (cfg.pretrain_chi < 1 || cfg.pretrain_chi > 4)
        bad_config("pretrain-chi must be in 1..4 (the compiler ceiling)");
    if (cfg.pretrain_dtau <= 0) bad_config("pretrain-dtau must be positive");
    if (cfg.pretrain_steps < 0 || cfg.pretrain_sweeps < 1 || cfg.pretrain_epochs < 0)
        bad_config("pretraining budget must be non-negative (sweeps >= 1)");
}

long long fevals_to_convergence(const RunLog& log, double window) {
    if (log.iterations.empty()) return 0;
    double best = log.iterations.front().objective;
    for (const auto& e : log.iterations) best = std::min(best, e.objective);
    for (const auto& e : log.iterations)
        if (e.objective <= best + window) return e.fevals;
    return log.iterations.back().fevals;
}

namespace {

OffdiagKind resolve_offdiag(const ExperimentConfig& cfg) {
    if (cfg.ansatz == "brickwall-kak") return OffdiagKind::full_kak;
    if (cfg.ansatz == "brickwall-ry-crx") return OffdiagKind::ry_crx;
    return cfg.problem == "maxcut" ? OffdiagKind::ry_crx : OffdiagKind::full_kak;
}

OptimizerConfig resolve_optimizer(const ExperimentConfig& cfg) {
    OptimizerConfig opt = cfg.opt;
    if (!cfg.opt_kind_set) {
        if (cfg.problem == "maxcut")
            opt.kind = OptimizerKind::gd_decay;
        else if (cfg.problem == "classify")
            opt.kind = OptimizerKind::adam;
        else
            opt.kind = OptimizerKind::bfgs;
    }
    if (opt.eta0 == 0.0) opt.eta0 = (opt.kind == OptimizerKind::adam) ? 0.001 : 0.05;
    return opt;
}

std::vector<double> initial_params(const std::string& init, const CompileResult& compiled,
                                   std::uint64_t seed) {
    const auto np = static_cast<std::size_t>(compiled.circuit.n_params());
    if (init == "mps") return compiled.params;
    if (init == "identity") return std::vector<double>(np, 0.0);
    Rng rng(seed);
    std::vector<double> p(np);
    for (auto& v : p) v = rng.uniform(-kPi, kPi);
    return p;
}

void zero_seconds(RunLog& log) {
    for (auto& e : log.iterations) e.seconds = 0.0;
}

ArmRun make_arm(const std::string& init, std::uint64_t seed, MinimizeResult&& mr,
                double window) {
    ArmRun arm;
    arm.init = init;
    arm.seed = seed;
    arm.log = std::move(mr.log);
    zero_seconds(arm.log);
    if (!arm.log.iterations.empty()) {
        arm.initial_objective = arm.log.iterations.front().objective;
        arm.final_objective = arm.log.iterations.back().objective;
        arm.best_objective = arm.initial_objective;
        for (const auto& e : arm.log.iterations)
            arm.best_objective = std::min(arm.best_objective, e.objective);
    }
    arm.fevals_to_convergence = fevals_to_convergence(arm.log, window);
    return arm;
}

struct EnergySetup {
    PauliSum minimized;  // what the optimizer sees
    WeightedGraph graph;
    bool is_maxcut = false;
    int n = 0;
};

EnergySetup build_energy_setup(const ExperimentConfig& cfg) {
    EnergySetup s;
    if (cfg.problem == "maxcut") {
        s.graph = cfg.graph_path.empty() ? default_maxcut_instance() : load_graph(cfg.graph_path);
        s.minimized = maxcut_hamiltonian(s.graph).scaled(-1.0);
        s.is_maxcut = true;
        s.n = s.graph.n;
    } else if (cfg.problem == "tfim") {
        s.n = cfg.n_qubits;
        s.minimized = tfim_hamiltonian(s.n, cfg.tfim_j, cfg.tfim_g).pauli;
    } else {
        s.minimized = load_pauli_hamiltonian(cfg.hamiltonian_path);
        s.n = cfg.n_qubits > 0 ? cfg.n_qubits : s.minimized.min_qubits();
        if (s.minimized.min_qubits() > s.n) bad_config("hamiltonian acts past n-qubits");
    }
    if (cfg.n_qubits > 0 && cfg.n_qubits != s.n)
        bad_config("n-qubits does not match the problem input");
    return s;
}

MPS pretrain_energy_mps(const ExperimentConfig& cfg, const EnergySetup& s, std::uint64_t seed) {
    if (s.is_maxcut) {
        // imaginary-time evolution of the negated cut Hamiltonian from |+...+>
        std::vector<std::pair<int, Matrix>> bonds;
        const Matrix z = pauli_dense(PauliSum{{{1.0, {{0, 'Z'}}}}}, 1);
        const Matrix id = Matrix::Identity(2, 2);
        for (const auto& e : s.graph.edges) {
            if (std::abs(e.u - e.v) != 1)
                bad_config("tebd pretraining needs a nearest-neighbour graph");
            bonds.emplace_back(std::min(e.u, e.v), e.w * (kron(z, z) - kron(id, id)));
        }
        MPS plus = product_state(s.n, std::vector<double>(static_cast<std::size_t>(s.n), kPi / 4));
        return tebd_imaginary(plus, bonds, cfg.pretrain_dtau, cfg.pretrain_steps,
                              cfg.pretrain_chi);
    }
    DmrgResult r = dmrg_ground_state(mpo_from_pauli(s.minimized, s.n), s.n, cfg.pretrain_chi,
                                     cfg.pretrain_sweeps, seed);
    return r.state;
}

}  // namespace

ComparisonReport run_energy_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.problem == "classify") bad_config("classify is not an energy problem");
    const EnergySetup setup = build_energy_setup(cfg);
    const OffdiagKind offdiag = resolve_offdiag(cfg);
    const OptimizerConfig opt = resolve_optimizer(cfg);
    const bool want_mps =
        std::find(cfg.inits.begin(), cfg.inits.end(), std::string("mps")) != cfg.inits.end();

    ComparisonReport report;
    report.problem = cfg.problem;
    report.ansatz = offdiag == OffdiagKind::full_kak ? "brickwall-kak" : "brickwall-ry-crx";
    report.optimizer = optimizer_kind_name(opt.kind);
    report.depth = cfg.depth;
    report.n_qubits = setup.n;
    report.convergence_window = 1e-6;

    const Objective obj = Objective::energy(setup.minimized);
    for (std::uint64_t seed : cfg.seeds) {
        MPS source = want_mps
                         ? pretrain_energy_mps(cfg, setup, seed)
                         : product_state(setup.n,
                                         std::vector<double>(static_cast<std::size_t>(setup.n),
                                                             0.0));
        CompileResult compiled = compile_to_circuit(source, cfg.depth, offdiag, false, 60, seed);
        for (const auto& init : cfg.inits) {
            std::vector<double> x0 = initial_params(init, compiled, seed);
            long long fevals = 0;
            ObjectiveFn f = [&](const std::vector<double>& x) {
                return objective_value(compiled.circuit, x, obj, &fevals);
            };
            GradientFn g = [&](const std::vector<double>& x) {
                return gradient(compiled.circuit, x, obj, &fevals);
            };
            MinimizeResult mr = minimize(f, g, &fevals, x0, opt);
            report.runs.push_back(make_arm(init, seed, std::move(mr), report.convergence_window));
        }
    }
    return report;
}

ComparisonReport run_classifier_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.problem != "classify") bad_config("run_classifier_experiment needs problem=classify");
    const int n = cfg.n_qubits;
    const OffdiagKind offdiag = resolve_offdiag(cfg);
    const OptimizerConfig opt = resolve_optimizer(cfg);
    const bool want_mps =
        std::find(cfg.inits.begin(), cfg.inits.end(), std::string("mps")) != cfg.inits.end();

    LabeledDataset raw = load_labeled_csv(cfg.dataset_path);
    if (static_cast<int>(raw.n_features()) < n)
        bad_config("dataset has fewer features than n-qubits");

    // PCA front end: angle for qubit i = projection onto component i
    Eigen::MatrixXd x(static_cast<Eigen::Index>(raw.size()),
                      static_cast<Eigen::Index>(raw.n_features()));
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (std::size_t j = 0; j < raw.n_features(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = raw.features[i][j];
    PCAModel pca = pca_fit(x, true);
    LabeledDataset proj;
    proj.labels = raw.labels;
    for (const auto& row : raw.features) proj.features.push_back(pca_project(pca, row, n));

    EncodedDataset encoded;
    encoded.labels = proj.labels;
    for (const auto& row : proj.features) {
        std::vector<double> doubled(row);
        for (auto& v : doubled) v *= 2.0;  // ry(2x) matches the (cos x, sin x) feature map
        encoded.inputs.push_back(encode_inputs(doubled));
    }
    const Objective obj = Objective::bce(encoded);

    ComparisonReport report;
    report.problem = cfg.problem;
    report.ansatz = offdiag == OffdiagKind::full_kak ? "brickwall-kak" : "brickwall-ry-crx";
    report.optimizer = optimizer_kind_name(opt.kind);
    report.depth = cfg.depth;
    report.n_qubits = n;
    report.convergence_window = 0.02;

    for (std::uint64_t seed : cfg.seeds) {
        ClassifierConfig ccfg;
        ccfg.lr = cfg.pretrain_lr;
        ccfg.epochs = cfg.pretrain_epochs;
        ccfg.chi_max = cfg.pretrain_chi;
        ccfg.seed = seed;
        MPSClassifier clf(n, ccfg);
        if (want_mps) clf.train(proj);
        CompileResult compiled = compile_to_circuit(clf.state(), cfg.depth, offdiag, true);

        for (const auto& init : cfg.inits) {
            std::vector<double> x0 = initial_params(init, compiled, seed);
            long long fevals = 0;
            ObjectiveFn f = [&](const std::vector<double>& x) {
                return objective_value(compiled.circuit, x, obj, &fevals);
            };
            GradientFn g = [&](const std::vector<double>& x) {
                return gradient(compiled.circuit, x, obj, &fevals);
            };
            std::vector<double> accuracy;
            StepCallback track = [&](int, const std::vector<double>& at) {
                std::size_t hits = 0;
                for (std::size_t i = 0; i < encoded.inputs.size(); ++i) {
                    double p = prob_all_zeros(compiled.circuit, at, encoded.inputs[i]);
                    int pred = p < 0.5 ? 0 : 1;
                    if (pred == encoded.labels[i]) ++hits;
                }
                accuracy.push_back(static_cast<double>(hits) /
                                   static_cast<double>(encoded.inputs.size()));
            };
            MinimizeResult mr = minimize(f, g, &fevals, x0, opt, track);
            ArmRun arm = make_arm(init, seed, std::move(mr), report.convergence_window);
            arm.accuracy = std::move(accuracy);
            report.runs.push_back(std::move(arm));
        }
    }
    return report;
}

ComparisonReport run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    return cfg.problem == "classify" ? run_classifier_experiment(cfg)
                                     : run_energy_experiment(cfg);
}

void emit_report(const ComparisonReport& r, const std::string& dir) {
    if (r.runs.empty()) throw std::invalid_argument("emit_report: no runs to write");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);

    char buf[160];
    for (const auto& arm : r.runs)
        save_runlog(arm.log, dir + "/run_" + arm.init + "_" + std::to_string(arm.seed) + ".csv");

    {
        std::ofstream out(dir + "/long_table.csv");
        if (!out) throw IoError("cannot write long_table.csv");
        out << "init,seed,step,objective\n";
        for (const auto& arm : r.runs)
            for (const auto& e : arm.log.iterations) {
                std::snprintf(buf, sizeof buf, "%s,%llu,%d,%.17g\n", arm.init.c_str(),
                              static_cast<unsigned long long>(arm.seed), e.step, e.objective);
                out << buf;
            }
        if (!out) throw IoError("write failed: long_table.csv");
    }

    std::ofstream out(dir + "/summary.txt");
    if (!out) throw IoError("cannot write summary.txt");
    out << "problem " << r.problem << "\n";
    out << "ansatz " << r.ansatz << "\n";
    out << "optimizer " << r.optimizer << "\n";
    out << "depth " << r.depth << "\n";
    out << "qubits " << r.n_qubits << "\n";
    for (const auto& arm : r.runs) {
        std::snprintf(buf, sizeof buf,
                      "run init=%s seed=%llu initial=%.17g final=%.17g best=%.17g "
                      "fevals_to_convergence=%lld steps=%zu\n",
                      arm.init.c_str(), static_cast<unsigned long long>(arm.seed),
                      arm.initial_objective, arm.final_objective, arm.best_objective,
                      arm.fevals_to_convergence, arm.log.iterations.size());
        out << buf;
        if (!arm.accuracy.empty()) {
            out << "accuracy init=" << arm.init << " seed=" << arm.seed;
            for (double a : arm.accuracy) {
                std::snprintf(buf, sizeof buf, " %.17g", a);
                out << buf;
            }
            out << "\n";
        }
    }
    std::vector<std::string> order;
    for (const auto& arm : r.runs)
        if (std::find(order.begin(), order.end(), arm.init) == order.end())
            order.push_back(arm.init);
    for (const auto& init : order) {
        int count = 0;
        double sum = 0, lo = 0, hi = 0, fe = 0;
        for (const auto& arm : r.runs) {
            if (arm.init != init) continue;
            if (count == 0) {
                lo = hi = arm.final_objective;
            } else {
                lo = std::min(lo, arm.final_objective);
                hi = std::max(hi, arm.final_objective);
            }
            sum += arm.final_objective;
            fe += static_cast<double>(arm.fevals_to_convergence);
            ++count;
        }
        std::snprintf(buf, sizeof buf,
                      "aggregate init=%s runs=%d final_mean=%.17g final_min=%.17g "
                      "final_max=%.17g fevals_mean=%.17g\n",
                      init.c_str(), count, sum / count, lo, hi, fe / count);
        out << buf;
    }
    if (!out) throw IoError("write failed: summary.txt");
}

}  // namespace mpsqc
