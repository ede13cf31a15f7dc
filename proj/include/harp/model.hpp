#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "harp/features.hpp"
#include "harp/probability.hpp"

namespace harp {

enum class ClassWeighting : std::uint8_t { none, balanced };

struct GbdtConfig {
    int iterations = 1000;
    int max_depth = 5;
    int histogram_bins = 32;
    ClassWeighting class_weighting = ClassWeighting::balanced;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TreeNode {
    bool is_leaf = true;
    double leaf_value = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;   // value <= threshold goes left
    bool default_left = true; // where missing values route
    std::int32_t left = -1;
    std::int32_t right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const double* row) const;
};

// Boosted multiclass ensemble: one regression tree per class per iteration,
// softmax link, trained on histogram-binned features.
struct GbdtModel {
    GbdtConfig config;
    std::vector<std::string> class_names;
    std::vector<double> class_weights;        // per class, 0 for absent classes
    std::uint64_t schema_hash = 0;
    std::size_t feature_count = 0;
    std::vector<std::vector<double>> bin_edges; // per feature, ascending
    std::vector<Tree> trees;                    // iterations x classes, class-major per iteration
    std::vector<double> train_loss;             // mean weighted cross-entropy after each iteration

    std::size_t class_count() const { return class_names.size(); }
    int completed_iterations() const {
        return class_names.empty() ? 0 : static_cast<int>(trees.size() / class_names.size());
    }

    void save(const std::filesystem::path& path) const;
    static GbdtModel load(const std::filesystem::path& path);
};

// w_k = N / (K_present * n_k); absent classes get 0.
std::vector<double> compute_class_weights(const std::vector<int>& labels, std::size_t class_count);

GbdtModel fit(const FeatureMatrix& m, const std::vector<std::string>& class_names,
              const GbdtConfig& config, int threads = 0);

// Softmax over boosted scores; rows aligned with m's rows (ids copied over).
ProbabilityMatrix predict_proba(const GbdtModel& model, const FeatureMatrix& m, int threads = 0);

} // namespace harp
