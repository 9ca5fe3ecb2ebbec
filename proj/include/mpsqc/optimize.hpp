#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mpsqc {

struct RunLogEntry {
    int step = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    long long fevals = 0;  // cumulative
    double seconds = 0.0;  // cumulative wall clock
};

struct RunLog {
    std::vector<RunLogEntry> iterations;
};

enum class OptimizerKind { gd_decay, bfgs, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::gd_decay;
    double eta0 = 0.05;
    double gamma = 0.01;  // decay of eta_t = eta0 / (1 + gamma t)
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int max_iterations = 200;
    double grad_tolerance = 0.0;
    double objective_tolerance = 0.0;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    std::uint64_t seed = 0;
};

struct MinimizeResult {
    std::vector<double> x;  // best-seen parameters
    RunLog log;
};

// objective: value at x, registering evaluations on the shared counter
// grad: gradient at x, registering its shifted evaluations on the counter
using ObjectiveFn = std::function<double(const std::vector<double>&)>;
using GradientFn = std::function<std::vector<double>(const std::vector<double>&)>;
using StepCallback = std::function<void(int, const std::vector<double>&)>;

MinimizeResult minimize(const ObjectiveFn& f, const GradientFn& g, long long* fevals,
                        const std::vector<double>& x0, const OptimizerConfig& cfg,
                        const StepCallback& on_step = {});

// delimiter-separated export with header step,objective,grad_norm,fevals,seconds
std::string runlog_csv(const RunLog& log);
void save_runlog(const RunLog& log, const std::string& path);

OptimizerKind optimizer_kind_from(const std::string& name);
std::string optimizer_kind_name(OptimizerKind k);

}  // namespace mpsqc
