#pragma once

#include <vector>

#include "harp/probability.hpp"

namespace harp {

// Gaussian kernel over prediction timesteps: w_k = exp(-k^2 / (2 sigma^2))
// for k in [-half_width, half_width], normalized to sum 1.
struct SmoothingConfig {
    int half_width_steps = 10;
    double sigma = 6.0;

    void validate() const;
    std::vector<double> kernel() const;
};

struct RuleBoostConfig {
    double min_presence_s = 50.0;
    double candidate_prob_floor = 0.2;
    double min_region_s = 30.0;

    void validate() const;
};

// Element-wise sum of aligned per-fold matrices (rows sum to fold count).
ProbabilityMatrix kfold_sum(const std::vector<ProbabilityMatrix>& per_fold);
// Sum then row-normalize.
ProbabilityMatrix kfold_vote(const std::vector<ProbabilityMatrix>& per_fold);

// Kernel truncated and re-normalized at sequence edges; rows stay normalized.
ProbabilityMatrix smooth(const ProbabilityMatrix& probs, const SmoothingConfig& cfg);

// For every class assigned less than min_presence_s in `labels`: the longest
// contiguous run of null-labeled timesteps whose normalized probability stays
// at or above the floor gets relabeled to that class, if the run is at least
// min_region_s long. Classes are scanned in ascending index order and null
// itself is never boosted.
std::vector<int> rule_boost(const ProbabilityMatrix& probs_summed, const std::vector<int>& labels,
                            const RuleBoostConfig& cfg);

// Sample i (time i/rate) takes the label of the nearest prediction timestep,
// ties toward the earlier timestep.
std::vector<int> expand_to_samples(const std::vector<int>& labels, std::size_t n_samples,
                                   int rate_hz, double stride_s = 0.5);

} // namespace harp
