#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mpsqc/common.hpp"
#include "mpsqc/mps.hpp"
#include "mpsqc/rng.hpp"

namespace mpsqc {

struct LabeledDataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;  // 0 or 1

    std::size_t size() const { return features.size(); }
    std::size_t n_features() const { return features.empty() ? 0 : features.front().size(); }
};

// delimiter-separated text, one sample per row, features first, integer label last
LabeledDataset load_labeled_csv(const std::string& path);
void save_labeled_csv(const LabeledDataset& d, const std::string& path);

// IDX containers (the MNIST container format), big-endian dimensions
std::vector<std::vector<double>> load_idx_images(const std::string& path);  // pixels scaled to [0,1]
std::vector<int> load_idx_labels(const std::string& path);

// single-feature embedding (cos x, sin x); unit norm for real x
std::array<cd, 2> feature_map(double x);

// binary cross-entropy with clamping to [eps, 1-eps]
double bce_loss(const std::vector<double>& outputs, const std::vector<int>& labels,
                double eps = 1e-7);

struct ClassifierConfig {
    double lr = 0.05;
    int epochs = 5;
    std::size_t chi_max = 8;
    std::uint64_t seed = 0;
    std::size_t batch = 0;  // 0 = full batch
};

class MPSClassifier {
  public:
    MPSClassifier(int n_features, const ClassifierConfig& cfg);
    explicit MPSClassifier(MPS state);

    const MPS& state() const { return state_; }
    const ClassifierConfig& config() const { return cfg_; }

    // overlap probability |<psi|phi(x)>|^2
    double decision_function(const std::vector<double>& x) const;
    std::vector<double> decision_function(const LabeledDataset& d) const;

    int predict(const std::vector<double>& x) const;
    std::vector<int> predict(const LabeledDataset& d) const;

    double loss(const LabeledDataset& d) const;
    double accuracy(const LabeledDataset& d) const;

    // one full left-to-right-to-left optimization sweep over merged bonds;
    // returns the post-sweep training loss
    double train_sweep(const LabeledDataset& d);
    std::vector<double> train(const LabeledDataset& d);  // cfg_.epochs sweeps, loss per sweep

  private:
    MPS state_;
    ClassifierConfig cfg_;
    std::uint64_t sweep_count_ = 0;
};

}  // namespace mpsqc
