#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpsqc/optimize.hpp"

namespace mpsqc {

// One experiment = one problem, one circuit topology, several (init, seed) arms
// that share everything except their initial parameter vector.
struct ExperimentConfig {
    std::string problem;  // maxcut | hamiltonian-file | tfim | classify
    std::string graph_path;
    std::string hamiltonian_path;
    std::string dataset_path;
    std::string ansatz;  // brickwall-kak | brickwall-ry-crx; empty = per-problem default
    int depth = 6;
    int n_qubits = 0;  // 0 = inferred from the problem input where possible
    std::vector<std::string> inits{"mps", "random", "identity"};
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = ".";

    double tfim_j = 1.0;
    double tfim_g = 1.0;

    double pretrain_dtau = 1e-3;
    int pretrain_steps = 30;
    int pretrain_sweeps = 8;
    int pretrain_epochs = 5;
    std::size_t pretrain_chi = 2;
    double pretrain_lr = 0.05;  // classifier sweeps only

    OptimizerConfig opt;
    bool opt_kind_set = false;  // false = pick the per-problem default optimizer
};

ExperimentConfig experiment_config_from_json(const std::string& path);
// `key value` override with the same names as the config file keys
void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value);
void validate_config(const ExperimentConfig& cfg);

struct ArmRun {
    std::string init;
    std::uint64_t seed = 0;
    RunLog log;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    double best_objective = 0.0;
    long long fevals_to_convergence = 0;
    std::vector<double> accuracy;  // classifier arms: train accuracy per logged step
};

struct ComparisonReport {
    std::string problem;
    std::string ansatz;
    std::string optimizer;
    int depth = 0;
    int n_qubits = 0;
    double convergence_window = 1e-6;
    std::vector<ArmRun> runs;
};

// first log step whose objective is within `window` of the run's best,
// returned as that entry's cumulative function-evaluation count
long long fevals_to_convergence(const RunLog& log, double window);

ComparisonReport run_energy_experiment(const ExperimentConfig& cfg);
ComparisonReport run_classifier_experiment(const ExperimentConfig& cfg);
ComparisonReport run_experiment(const ExperimentConfig& cfg);  // dispatch on cfg.problem

// writes run_<init>_<seed>.csv per arm, summary.txt, long_table.csv
void emit_report(const ComparisonReport& r, const std::string& dir);

}  // namespace mpsqc
