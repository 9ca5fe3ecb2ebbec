#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "mpsqc/common.hpp"
#include "mpsqc/optimize.hpp"

using namespace mpsqc;

namespace {

double rosenbrock(const std::vector<double>& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
}

std::vector<double> rosenbrock_grad(const std::vector<double>& x) {
    const double b = x[1] - x[0] * x[0];
    return {-2.0 * (1.0 - x[0]) - 400.0 * x[0] * b, 200.0 * b};
}

double quadratic(const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - static_cast<double>(i);
        v += (1.0 + static_cast<double>(i)) * d * d;
    }
    return v;
}

std::vector<double> quadratic_grad(const std::vector<double>& x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = 2.0 * (1.0 + static_cast<double>(i)) * (x[i] - static_cast<double>(i));
    return g;
}

template <typename F, typename G>
MinimizeResult run_min(F f, G g, std::vector<double> x0, OptimizerConfig cfg,
                       long long* fevals = nullptr) {
    long long local = 0;
    long long* counter = fevals ? fevals : &local;
    ObjectiveFn fo = [counter, f](const std::vector<double>& x) {
        ++*counter;
        return f(x);
    };
    GradientFn go = [counter, g](const std::vector<double>& x) {
        *counter += 2 * static_cast<long long>(x.size());
        return g(x);
    };
    return minimize(fo, go, counter, x0, cfg);
}

}  // namespace

TEST_CASE("bfgs minimizes the rosenbrock valley to high accuracy") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::bfgs;
    cfg.max_iterations = 300;
    cfg.grad_tolerance = 1e-10;
    auto r = run_min(rosenbrock, rosenbrock_grad, {-1.2, 1.0}, cfg);
    REQUIRE(r.x.size() == 2);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-6);
    CHECK(r.log.iterations.back().objective < 1e-12);
}

TEST_CASE("gradient descent with decay converges on a convex quadratic") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::gd_decay;
    cfg.eta0 = 0.1;
    cfg.gamma = 0.001;
    cfg.max_iterations = 2000;
    cfg.grad_tolerance = 1e-9;
    auto r = run_min(quadratic, quadratic_grad, {5.0, -3.0, 7.0}, cfg);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.x[i] - static_cast<double>(i)) < 1e-6);
}

TEST_CASE("adam converges on a convex quadratic") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::adam;
    cfg.eta0 = 0.05;
    cfg.max_iterations = 4000;
    cfg.grad_tolerance = 1e-9;
    auto r = run_min(quadratic, quadratic_grad, {4.0, 4.0, 4.0}, cfg);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.x[i] - static_cast<double>(i)) < 1e-4);
}

TEST_CASE("the log starts at the initial point and counts cumulative evaluations") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::gd_decay;
    cfg.eta0 = 0.01;
    cfg.max_iterations = 5;
    long long fevals = 0;
    auto r = run_min(quadratic, quadratic_grad, {2.0, 2.0}, cfg, &fevals);
    REQUIRE(!r.log.iterations.empty());
    CHECK(r.log.iterations.front().step == 0);
    CHECK(r.log.iterations.front().objective == doctest::Approx(quadratic({2.0, 2.0})));
    for (std::size_t i = 1; i < r.log.iterations.size(); ++i) {
        CHECK(r.log.iterations[i].fevals >= r.log.iterations[i - 1].fevals);
        CHECK(r.log.iterations[i].step > r.log.iterations[i - 1].step);
    }
    CHECK(r.log.iterations.back().fevals == fevals);
}

TEST_CASE("returned parameters are the best seen even if later steps regress") {
    // large fixed step on a steep quadratic oscillates; best-seen must win
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::gd_decay;
    cfg.eta0 = 0.9;
    cfg.gamma = 0.0;
    cfg.max_iterations = 25;
    auto r = run_min(quadratic, quadratic_grad, {3.0, 3.0}, cfg);
    const double returned = quadratic(r.x);
    double best_logged = r.log.iterations.front().objective;
    for (const auto& e : r.log.iterations) best_logged = std::min(best_logged, e.objective);
    CHECK(returned <= best_logged + 1e-12);
}

TEST_CASE("objective tolerance stops once successive values stall") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::gd_decay;
    cfg.eta0 = 0.1;
    cfg.max_iterations = 5000;
    cfg.objective_tolerance = 1e-3;
    auto r = run_min(quadratic, quadratic_grad, {2.0, 2.0}, cfg);
    const auto& it = r.log.iterations;
    REQUIRE(it.size() >= 2);
    CHECK(static_cast<int>(it.size()) < 5000);
    CHECK(std::abs(it.back().objective - it[it.size() - 2].objective) <= 1e-3);
}

TEST_CASE("step callback sees every logged step in order") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::adam;
    cfg.eta0 = 0.05;
    cfg.max_iterations = 7;
    long long fevals = 0;
    std::vector<int> steps;
    ObjectiveFn f = [&](const std::vector<double>& x) {
        ++fevals;
        return quadratic(x);
    };
    GradientFn g = [&](const std::vector<double>& x) {
        fevals += 2 * static_cast<long long>(x.size());
        return quadratic_grad(x);
    };
    auto r = minimize(f, g, &fevals, {1.0, 1.0}, cfg,
                      [&](int step, const std::vector<double>& x) {
                          steps.push_back(step);
                          CHECK(x.size() == 2);
                      });
    REQUIRE(steps.size() == r.log.iterations.size());
    for (std::size_t i = 0; i < steps.size(); ++i) CHECK(steps[i] == r.log.iterations[i].step);
}

TEST_CASE("restarting from a logged point reproduces the deterministic trajectory") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::gd_decay;
    cfg.eta0 = 0.05;
    cfg.gamma = 0.01;
    cfg.max_iterations = 50;
    auto a = run_min(quadratic, quadratic_grad, {2.5, -1.5}, cfg);
    auto b = run_min(quadratic, quadratic_grad, {2.5, -1.5}, cfg);
    REQUIRE(a.log.iterations.size() == b.log.iterations.size());
    for (std::size_t i = 0; i < a.log.iterations.size(); ++i)
        CHECK(a.log.iterations[i].objective == b.log.iterations[i].objective);
    for (std::size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
}

TEST_CASE("runlog csv carries full precision and the documented header") {
    RunLog log;
    log.iterations.push_back({0, 0.1234567891011121314, 1.0, 1, 0.0});
    log.iterations.push_back({1, -1.0 / 3.0, 0.5, 9, 0.0});
    const std::string csv = runlog_csv(log);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "step,objective,grad_norm,fevals,seconds");
    std::getline(in, line);
    // a value printed with %.17g parses back to the identical double
    const auto comma = line.find(',');
    const double back = std::stod(line.substr(comma + 1));
    CHECK(back == 0.1234567891011121314);
    std::getline(in, line);
    CHECK(std::stod(line.substr(line.find(',') + 1)) == -1.0 / 3.0);
}

TEST_CASE("invalid configurations are rejected") {
    OptimizerConfig cfg;
    cfg.eta0 = -1.0;
    CHECK_THROWS_AS(run_min(quadratic, quadratic_grad, {1.0}, cfg), std::invalid_argument);
    cfg = OptimizerConfig{};
    cfg.kind = OptimizerKind::adam;
    cfg.beta1 = 1.5;
    CHECK_THROWS_AS(run_min(quadratic, quadratic_grad, {1.0}, cfg), std::invalid_argument);
}

TEST_CASE("optimizer names round trip") {
    for (auto k : {OptimizerKind::gd_decay, OptimizerKind::bfgs, OptimizerKind::adam})
        CHECK(optimizer_kind_from(optimizer_kind_name(k)) == k);
    CHECK(optimizer_kind_name(OptimizerKind::gd_decay) == "gd-decay");
    CHECK_THROWS(optimizer_kind_from("newton"));
}

TEST_CASE("non finite objectives abort with a numerical error") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::gd_decay;
    cfg.eta0 = 0.1;
    cfg.max_iterations = 10;
    auto bad = [](const std::vector<double>& x) {
        return x[0] > 1e3 ? std::numeric_limits<double>::infinity() : -x[0] * x[0];
    };
    auto bad_grad = [](const std::vector<double>& x) { return std::vector<double>{-2.0 * x[0]}; };
    // diverges toward +inf objective input, the guard must trip
    CHECK_THROWS_AS(run_min(bad, bad_grad, {10.0}, [] {
                        OptimizerConfig c;
                        c.kind = OptimizerKind::gd_decay;
                        c.eta0 = 10.0;
                        c.gamma = 0.0;
                        c.max_iterations = 60;
                        return c;
                    }()),
                    NumericalError);
}
