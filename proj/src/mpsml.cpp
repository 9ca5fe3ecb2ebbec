#include "mpsqc/mpsml.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mpsqc/common.hpp"
#include "mpsqc/tensor.hpp"

namespace mpsqc {

namespace {

void check_dataset(const LabeledDataset& d) {
    if (d.features.empty()) throw std::invalid_argument("empty dataset");
    if (d.features.size() != d.labels.size())
        throw std::invalid_argument("feature/label count mismatch");
    const std::size_t f = d.features.front().size();
    if (f == 0) throw std::invalid_argument("dataset has zero features");
    for (const auto& row : d.features)
        if (row.size() != f) throw std::invalid_argument("ragged feature rows");
    for (int y : d.labels)
        if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
}

// <psi| contracted with the product feature state, site by site
cd overlap_with_features(const MPS& s, const std::vector<double>& x) {
    std::vector<cd> env{cd(1.0, 0.0)};
    for (std::size_t k = 0; k < s.tensors.size(); ++k) {
        const Tensor3& t = s.tensors[k];
        auto phi = feature_map(x[k]);
        std::vector<cd> next(t.r, cd(0.0, 0.0));
        for (std::size_t a = 0; a < t.l; ++a)
            for (int p = 0; p < 2; ++p) {
                cd f = env[a] * phi[static_cast<std::size_t>(p)];
                for (std::size_t b = 0; b < t.r; ++b)
                    next[b] += f * std::conj(t.at(a, p, b));
            }
        env = std::move(next);
    }
    return env[0];
}

}  // namespace

std::array<cd, 2> feature_map(double x) {
    return {cd(std::cos(x), 0.0), cd(std::sin(x), 0.0)};
}

double bce_loss(const std::vector<double>& outputs, const std::vector<int>& labels, double eps) {
    if (outputs.empty()) throw std::invalid_argument("bce_loss: empty inputs");
    if (outputs.size() != labels.size()) throw std::invalid_argument("bce_loss: size mismatch");
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("bce_loss: eps must be in (0, 0.5)");
    double total = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw std::invalid_argument("bce_loss: labels must be 0 or 1");
        double f = std::clamp(outputs[i], eps, 1.0 - eps);
        total += labels[i] ? -std::log(f) : -std::log(1.0 - f);
    }
    return total / static_cast<double>(outputs.size());
}

MPSClassifier::MPSClassifier(int n_features, const ClassifierConfig& cfg) : cfg_(cfg) {
    if (n_features < 2) throw std::invalid_argument("classifier needs >= 2 features");
    if (cfg.chi_max < 1) throw std::invalid_argument("classifier needs chi_max >= 1");
    Rng rng(cfg.seed);
    const double c = 1.0 / std::sqrt(2.0);
    state_.tensors.reserve(static_cast<std::size_t>(n_features));
    for (int k = 0; k < n_features; ++k) {
        Tensor3 t(1, 1);
        for (int p = 0; p < 2; ++p) t.at(0, p, 0) = c + 1e-2 * rng.cnormal();
        state_.tensors.push_back(std::move(t));
    }
    state_ = canonicalize(state_, CanonicalForm::right);
}

MPSClassifier::MPSClassifier(MPS state) : state_(std::move(state)) {
    if (state_.n() < 2) throw std::invalid_argument("classifier needs >= 2 sites");
    state_ = canonicalize(state_, CanonicalForm::right);
}

double MPSClassifier::decision_function(const std::vector<double>& x) const {
    if (x.size() != state_.tensors.size())
        throw std::invalid_argument("feature count does not match classifier sites");
    return std::norm(overlap_with_features(state_, x));
}

std::vector<double> MPSClassifier::decision_function(const LabeledDataset& d) const {
    std::vector<double> out;
    out.reserve(d.size());
    for (const auto& x : d.features) out.push_back(decision_function(x));
    return out;
}

int MPSClassifier::predict(const std::vector<double>& x) const {
    return decision_function(x) < 0.5 ? 0 : 1;
}

std::vector<int> MPSClassifier::predict(const LabeledDataset& d) const {
    std::vector<int> out;
    out.reserve(d.size());
    for (const auto& x : d.features) out.push_back(predict(x));
    return out;
}

double MPSClassifier::loss(const LabeledDataset& d) const {
    return bce_loss(decision_function(d), d.labels);
}

double MPSClassifier::accuracy(const LabeledDataset& d) const {
    check_dataset(d);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (predict(d.features[i]) == d.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(d.size());
}

double MPSClassifier::train_sweep(const LabeledDataset& d) {
    check_dataset(d);
    const std::size_t n = state_.tensors.size();
    if (d.n_features() != n)
        throw std::invalid_argument("feature count does not match classifier sites");
    const std::size_t m = d.size();
    const double eps = 1e-7;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    const bool minibatch = cfg_.batch > 0 && cfg_.batch < m;
    if (minibatch) {
        Rng rng(cfg_.seed * 0x9E3779B97F4A7C15ull + sweep_count_ + 1);
        for (std::size_t i = m - 1; i > 0; --i)
            std::swap(order[i], order[rng.integer(i + 1)]);
    }
    const std::size_t chunk = minibatch ? cfg_.batch : m;
    std::size_t cursor = 0;

    // left env of every sample carries conj(state) up to the active bond
    auto env_step = [](std::vector<cd>& env, const Tensor3& t, const std::array<cd, 2>& phi,
                       bool from_left) {
        std::vector<cd> next(from_left ? t.r : t.l, cd(0.0, 0.0));
        for (std::size_t a = 0; a < t.l; ++a)
            for (int p = 0; p < 2; ++p)
                for (std::size_t b = 0; b < t.r; ++b) {
                    cd w = std::conj(t.at(a, p, b)) * phi[static_cast<std::size_t>(p)];
                    if (from_left)
                        next[b] += env[a] * w;
                    else
                        next[a] += w * env[b];
                }
        env = std::move(next);
    };

    auto update_bond = [&](std::size_t k, bool moving_right) {
        Tensor3& tl = state_.tensors[k];
        Tensor3& tr = state_.tensors[k + 1];
        const std::size_t l = tl.l, r = tr.r;
        Matrix theta = tl.lp_r() * tr.l_pr();  // (l 2) x (2 r)

        std::size_t take = std::min(chunk, m);
        Matrix grad = Matrix::Zero(theta.rows(), theta.cols());
        for (std::size_t pick = 0; pick < take; ++pick) {
            const auto& x = d.features[order[(cursor + pick) % m]];
            const int y = d.labels[order[(cursor + pick) % m]];

            std::vector<cd> le{cd(1.0, 0.0)};
            for (std::size_t s = 0; s < k; ++s)
                env_step(le, state_.tensors[s], feature_map(x[s]), true);
            std::vector<cd> re{cd(1.0, 0.0)};
            for (std::size_t s = n; s-- > k + 2;)
                env_step(re, state_.tensors[s], feature_map(x[s]), false);

            auto pl = feature_map(x[k]);
            auto pr = feature_map(x[k + 1]);
            Vector ul(static_cast<Eigen::Index>(l * 2));
            for (std::size_t a = 0; a < l; ++a)
                for (int p = 0; p < 2; ++p)
                    ul(static_cast<Eigen::Index>(a * 2 + p)) =
                        le[a] * pl[static_cast<std::size_t>(p)];
            Vector vr(static_cast<Eigen::Index>(2 * r));
            for (int q = 0; q < 2; ++q)
                for (std::size_t b = 0; b < r; ++b)
                    vr(static_cast<Eigen::Index>(static_cast<std::size_t>(q) * r + b)) =
                        pr[static_cast<std::size_t>(q)] * re[b];

            cd o = ul.transpose() * theta.conjugate() * vr;
            double f = std::norm(o);
            double w = 0.0;
            if (f > eps && f < 1.0 - eps)
                w = (y ? -1.0 / f : 1.0 / (1.0 - f)) / static_cast<double>(take);
            if (w != 0.0) grad += (w * std::conj(o)) * (ul * vr.transpose());
        }
        if (minibatch) cursor = (cursor + take) % m;

        theta -= (2.0 * cfg_.lr) * grad;

        auto svd = svd_truncated(theta, cfg_.chi_max, tol::svd_cutoff);
        double snorm = 0.0;
        for (double sv : svd.s) snorm += sv * sv;
        snorm = std::sqrt(snorm);
        if (snorm < 1e-300) throw NumericalError("classifier state collapsed to zero");
        Matrix u = svd.u.as_matrix();
        Matrix v = svd.v.as_matrix();
        const auto keep = static_cast<Eigen::Index>(svd.s.size());
        if (moving_right) {
            for (Eigen::Index i = 0; i < keep; ++i)
                v.row(i) *= svd.s[static_cast<std::size_t>(i)] / snorm;
            tl = Tensor3::from_lp_r(u, l);
            tr = Tensor3::from_l_pr(v, r);
        } else {
            for (Eigen::Index i = 0; i < keep; ++i)
                u.col(i) *= svd.s[static_cast<std::size_t>(i)] / snorm;
            tl = Tensor3::from_lp_r(u, l);
            tr = Tensor3::from_l_pr(v, r);
        }
    };

    canonicalize(state_, CanonicalForm::right);
    for (std::size_t k = 0; k + 1 < n; ++k) update_bond(k, true);
    for (std::size_t k = n - 1; k-- > 0;) update_bond(k, false);
    state_.form = CanonicalForm::right;
    ++sweep_count_;
    return loss(d);
}

std::vector<double> MPSClassifier::train(const LabeledDataset& d) {
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg_.epochs));
    for (int e = 0; e < cfg_.epochs; ++e) history.push_back(train_sweep(d));
    return history;
}

LabeledDataset load_labeled_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    LabeledDataset d;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (auto& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ss(line);
        std::vector<double> vals;
        std::string tok;
        auto fail = [&](const std::string& what) {
            throw IoError(path + ":" + std::to_string(lineno) + ": " + what);
        };
        while (ss >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                fail("bad value '" + tok + "'");
            }
            if (used != tok.size()) fail("bad value '" + tok + "'");
            vals.push_back(v);
        }
        if (vals.empty()) continue;
        if (vals.size() < 2) fail("need at least one feature and a label");
        double lab = vals.back();
        vals.pop_back();
        if (lab != 0.0 && lab != 1.0) fail("label must be 0 or 1");
        if (!d.features.empty() && vals.size() != d.features.front().size())
            fail("inconsistent feature count");
        d.features.push_back(std::move(vals));
        d.labels.push_back(static_cast<int>(lab));
    }
    if (d.features.empty()) throw IoError(path + ": no samples");
    return d;
}

void save_labeled_csv(const LabeledDataset& d, const std::string& path) {
    check_dataset(d);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset: " + path);
    char buf[64];
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (double v : d.features[i]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ",";
        }
        out << d.labels[i] << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError(path + ": truncated header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

std::vector<std::vector<double>> load_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open idx file: " + path);
    if (read_be32(in, path) != 0x00000803u) throw IoError(path + ": not an idx image file");
    std::uint32_t count = read_be32(in, path);
    std::uint32_t rows = read_be32(in, path);
    std::uint32_t cols = read_be32(in, path);
    std::size_t pixels = std::size_t(rows) * cols;
    std::vector<std::vector<double>> out;
    out.reserve(count);
    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
            throw IoError(path + ": truncated image data");
        std::vector<double> img(pixels);
        for (std::size_t p = 0; p < pixels; ++p) img[p] = buf[p] / 255.0;
        out.push_back(std::move(img));
    }
    return out;
}

std::vector<int> load_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open idx file: " + path);
    if (read_be32(in, path) != 0x00000801u) throw IoError(path + ": not an idx label file");
    std::uint32_t count = read_be32(in, path);
    std::vector<unsigned char> buf(count);
    if (count && !in.read(reinterpret_cast<char*>(buf.data()), count))
        throw IoError(path + ": truncated label data");
    return {buf.begin(), buf.end()};
}

}  // namespace mpsqc
