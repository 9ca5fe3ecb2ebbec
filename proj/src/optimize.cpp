#include "mpsqc/optimize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mpsqc/common.hpp"

namespace mpsqc {

namespace {

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

bool finite(double x) { return std::isfinite(x); }

bool finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

struct Tracker {
    const ObjectiveFn& f;
    const GradientFn& g;
    long long* external;
    long long internal = 0;
    std::vector<double> best_x;
    double best_f = 0.0;
    bool has_best = false;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    double eval(const std::vector<double>& x) {
        const double v = f(x);
        if (!external) ++internal;
        if (!has_best || v < best_f) {
            best_f = v;
            best_x = x;
            has_best = true;
        }
        return v;
    }
    std::vector<double> grad(const std::vector<double>& x) { return g(x); }
    long long count() const { return external ? *external : internal; }
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void check_cfg(const OptimizerConfig& cfg) {
    if (cfg.eta0 <= 0) throw std::invalid_argument("learning rate must be positive");
    if (cfg.beta1 < 0 || cfg.beta1 >= 1 || cfg.beta2 < 0 || cfg.beta2 >= 1)
        throw std::invalid_argument("Adam betas must lie in [0, 1)");
    if (cfg.grad_tolerance < 0 || cfg.objective_tolerance < 0)
        throw std::invalid_argument("tolerances must be non-negative");
    if (cfg.max_iterations < 0) throw std::invalid_argument("max iterations must be non-negative");
}

[[noreturn]] void bad_iterate(int step) {
    throw NumericalError("non-finite objective or gradient at iteration " + std::to_string(step));
}

}  // namespace

MinimizeResult minimize(const ObjectiveFn& f, const GradientFn& g, long long* fevals,
                        const std::vector<double>& x0, const OptimizerConfig& cfg,
                        const StepCallback& on_step) {
    check_cfg(cfg);
    Tracker tr{f, g, fevals};
    RunLog log;

    std::vector<double> x = x0;
    double fx = tr.eval(x);
    if (!finite(fx)) bad_iterate(0);

    const std::size_t np = x.size();
    auto push_log = [&](int step, double obj, double gn, const std::vector<double>& at) {
        log.iterations.push_back({step, obj, gn, tr.count(), tr.seconds()});
        if (on_step) on_step(step, at);
    };

    if (cfg.kind == OptimizerKind::gd_decay) {
        bool stop_obj = false;
        for (int step = 0;; ++step) {
            const std::vector<double> gr = tr.grad(x);
            if (!finite(gr)) bad_iterate(step);
            const double gn = norm2(gr);
            push_log(step, fx, gn, x);
            if (gn <= cfg.grad_tolerance || stop_obj || step >= cfg.max_iterations) break;
            const double eta = cfg.eta0 / (1.0 + cfg.gamma * step);
            for (std::size_t i = 0; i < np; ++i) x[i] -= eta * gr[i];
            const double fprev = fx;
            fx = tr.eval(x);
            if (!finite(fx)) bad_iterate(step + 1);
            if (std::abs(fx - fprev) <= cfg.objective_tolerance) stop_obj = true;
        }
    } else if (cfg.kind == OptimizerKind::adam) {
        std::vector<double> m(np, 0.0), v(np, 0.0);
        bool stop_obj = false;
        for (int step = 0;; ++step) {
            const std::vector<double> gr = tr.grad(x);
            if (!finite(gr)) bad_iterate(step);
            const double gn = norm2(gr);
            push_log(step, fx, gn, x);
            if (gn <= cfg.grad_tolerance || stop_obj || step >= cfg.max_iterations) break;
            const double t = step + 1;
            const double c1 = 1.0 - std::pow(cfg.beta1, t);
            const double c2 = 1.0 - std::pow(cfg.beta2, t);
            for (std::size_t i = 0; i < np; ++i) {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gr[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gr[i] * gr[i];
                x[i] -= cfg.eta0 * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.adam_eps);
            }
            const double fprev = fx;
            fx = tr.eval(x);
            if (!finite(fx)) bad_iterate(step + 1);
            if (std::abs(fx - fprev) <= cfg.objective_tolerance) stop_obj = true;
        }
    } else {  // bfgs
        std::vector<std::vector<double>> h(np, std::vector<double>(np, 0.0));
        for (std::size_t i = 0; i < np; ++i) h[i][i] = 1.0;
        std::vector<double> gr = tr.grad(x);
        if (!finite(gr)) bad_iterate(0);
        for (int step = 0;; ++step) {
            const double gn = norm2(gr);
            push_log(step, fx, gn, x);
            if (gn <= cfg.grad_tolerance || step >= cfg.max_iterations) break;

            std::vector<double> d(np, 0.0);
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < np; ++j) d[i] -= h[i][j] * gr[j];
            double slope = dot(d, gr);
            if (slope >= 0) {  // fall back to steepest descent
                for (std::size_t i = 0; i < np; ++i) {
                    for (std::size_t j = 0; j < np; ++j) h[i][j] = (i == j) ? 1.0 : 0.0;
                    d[i] = -gr[i];
                }
                slope = dot(d, gr);
                if (slope >= 0) break;  // zero gradient, handled by the tolerance check above
            }

            double alpha = 1.0;
            double fnew = 0.0;
            bool accepted = false;
            std::vector<double> xn(np);
            while (alpha > 1e-14) {
                for (std::size_t i = 0; i < np; ++i) xn[i] = x[i] + alpha * d[i];
                fnew = tr.eval(xn);
                if (!finite(fnew)) bad_iterate(step + 1);
                if (fnew <= fx + cfg.armijo_c * alpha * slope) {
                    accepted = true;
                    break;
                }
                alpha *= cfg.backtrack_factor;
            }
            if (!accepted) break;  // line search exhausted: stationary for our purposes

            std::vector<double> gn2 = tr.grad(xn);
            if (!finite(gn2)) bad_iterate(step + 1);
            std::vector<double> s(np), y(np);
            for (std::size_t i = 0; i < np; ++i) {
                s[i] = xn[i] - x[i];
                y[i] = gn2[i] - gr[i];
            }
            const double sy = dot(s, y);
            if (sy > 1e-14) {
                const double rho = 1.0 / sy;
                // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
                std::vector<double> hy(np, 0.0);
                for (std::size_t i = 0; i < np; ++i)
                    for (std::size_t j = 0; j < np; ++j) hy[i] += h[i][j] * y[j];
                const double yhy = dot(y, hy);
                for (std::size_t i = 0; i < np; ++i)
                    for (std::size_t j = 0; j < np; ++j)
                        h[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) +
                                   rho * rho * yhy * s[i] * s[j] + rho * s[i] * s[j];
            }
            const double fprev = fx;
            x = xn;
            fx = fnew;
            gr = std::move(gn2);
            if (std::abs(fx - fprev) <= cfg.objective_tolerance) {
                push_log(step + 1, fx, norm2(gr), x);
                break;
            }
        }
    }

    MinimizeResult res;
    res.x = tr.has_best ? tr.best_x : x0;
    res.log = std::move(log);
    return res;
}

std::string runlog_csv(const RunLog& log) {
    std::string out = "step,objective,grad_norm,fevals,seconds\n";
    char buf[160];
    for (const auto& e : log.iterations) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%lld,%.17g\n", e.step, e.objective,
                      e.grad_norm, e.fevals, e.seconds);
        out += buf;
    }
    return out;
}

void save_runlog(const RunLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << runlog_csv(log);
    if (!out) throw IoError("write failed: " + path);
}

OptimizerKind optimizer_kind_from(const std::string& name) {
    if (name == "gd-decay") return OptimizerKind::gd_decay;
    if (name == "bfgs") return OptimizerKind::bfgs;
    if (name == "adam") return OptimizerKind::adam;
    throw IoError("unknown optimizer: " + name);
}

std::string optimizer_kind_name(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::gd_decay: return "gd-decay";
        case OptimizerKind::bfgs: return "bfgs";
        case OptimizerKind::adam: return "adam";
    }
    return "?";
}

}  // namespace mpsqc
