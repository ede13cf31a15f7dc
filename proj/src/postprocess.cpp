#include "harp/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include "harp/error.hpp"

namespace harp {

void SmoothingConfig::validate() const {
    if (half_width_steps < 0) raise(Errc::invalid_config, "half_width_steps must be >= 0");
    if (sigma <= 0.0) raise(Errc::invalid_config, "sigma must be positive");
}

std::vector<double> SmoothingConfig::kernel() const {
    validate();
    std::vector<double> w(static_cast<std::size_t>(2 * half_width_steps + 1));
    double sum = 0.0;
    for (int k = -half_width_steps; k <= half_width_steps; ++k) {
        const double v = std::exp(-static_cast<double>(k) * static_cast<double>(k) /
                                  (2.0 * sigma * sigma));
        w[static_cast<std::size_t>(k + half_width_steps)] = v;
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}

void RuleBoostConfig::validate() const {
    if (min_presence_s < 0 || min_region_s < 0) {
        raise(Errc::invalid_config, "rule boost durations must be non-negative");
    }
    if (min_region_s > min_presence_s) {
        raise(Errc::invalid_config, "min_region_s must not exceed min_presence_s");
    }
    if (candidate_prob_floor < 0.0 || candidate_prob_floor > 1.0) {
        raise(Errc::invalid_config, "candidate_prob_floor must be in [0, 1]");
    }
}

// ---------------------------------------------------------------------------
// K-fold voting

namespace {

void check_alignment(const std::vector<ProbabilityMatrix>& per_fold) {
    if (per_fold.empty()) raise(Errc::misaligned_folds, "no fold matrices given");
    const ProbabilityMatrix& first = per_fold.front();
    for (const auto& pm : per_fold) {
        if (pm.rows() != first.rows() || pm.class_count != first.class_count ||
            pm.recording_ids != first.recording_ids ||
            pm.row_timestep != first.row_timestep || pm.row_recording != first.row_recording ||
            pm.row_variant != first.row_variant) {
            raise(Errc::misaligned_folds, "fold matrices are not aligned");
        }
    }
}

} // namespace

ProbabilityMatrix kfold_sum(const std::vector<ProbabilityMatrix>& per_fold) {
    check_alignment(per_fold);
    ProbabilityMatrix out = per_fold.front();
    for (std::size_t f = 1; f < per_fold.size(); ++f) {
        const auto& values = per_fold[f].values;
        for (std::size_t i = 0; i < values.size(); ++i) out.values[i] += values[i];
    }
    return out;
}

ProbabilityMatrix kfold_vote(const std::vector<ProbabilityMatrix>& per_fold) {
    ProbabilityMatrix out = kfold_sum(per_fold);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        double* p = out.row(r);
        double sum = 0.0;
        for (std::size_t c = 0; c < out.class_count; ++c) sum += p[c];
        if (sum > 0.0) {
            const double inv = 1.0 / sum;
            for (std::size_t c = 0; c < out.class_count; ++c) p[c] *= inv;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Temporal smoothing

ProbabilityMatrix smooth(const ProbabilityMatrix& probs, const SmoothingConfig& cfg) {
    const std::vector<double> kernel = cfg.kernel();
    const int half = cfg.half_width_steps;
    const std::size_t n = probs.rows();
    const std::size_t k = probs.class_count;

    ProbabilityMatrix out = probs;
    for (std::size_t t = 0; t < n; ++t) {
        const int lo = std::max<int>(-half, -static_cast<int>(t));
        const int hi = std::min<int>(half, static_cast<int>(n - 1 - t));
        // Truncate the kernel at the edges and re-normalize.
        double weight_sum = 0.0;
        for (int d = lo; d <= hi; ++d) weight_sum += kernel[static_cast<std::size_t>(d + half)];
        double* dst = out.row(t);
        for (std::size_t c = 0; c < k; ++c) dst[c] = 0.0;
        for (int d = lo; d <= hi; ++d) {
            const double w = kernel[static_cast<std::size_t>(d + half)] / weight_sum;
            const double* src = probs.row(t + static_cast<std::size_t>(static_cast<long>(d)));
            for (std::size_t c = 0; c < k; ++c) dst[c] += w * src[c];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rule-based activity boosting

std::vector<int> rule_boost(const ProbabilityMatrix& probs_summed, const std::vector<int>& labels,
                            const RuleBoostConfig& cfg) {
    cfg.validate();
    const std::size_t n = probs_summed.rows();
    if (labels.size() != n) raise(Errc::length_mismatch, "labels do not match the matrix rows");
    const std::size_t k = probs_summed.class_count;
    const double stride = probs_summed.stride_s;
    const auto min_presence_steps = static_cast<std::size_t>(cfg.min_presence_s / stride);
    const auto min_region_steps = static_cast<std::size_t>(cfg.min_region_s / stride);

    std::vector<int> out = labels;
    // Normalized probabilities (rows of the sum matrix sum to the fold count).
    std::vector<double> norm(n);

    for (std::size_t c = 1; c < k; ++c) {
        std::size_t assigned = 0;
        for (int y : out) assigned += static_cast<std::size_t>(y) == c ? 1 : 0;
        if (assigned >= min_presence_steps) continue;

        for (std::size_t t = 0; t < n; ++t) {
            const double* p = probs_summed.row(t);
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) sum += p[j];
            norm[t] = sum > 0.0 ? p[c] / sum : 0.0;
        }

        // Longest contiguous null-labeled run holding the floor; earliest wins ties.
        std::size_t best_begin = 0, best_len = 0;
        std::size_t run_begin = 0, run_len = 0;
        for (std::size_t t = 0; t <= n; ++t) {
            const bool qualifies =
                t < n && out[t] == 0 && norm[t] >= cfg.candidate_prob_floor;
            if (qualifies) {
                if (run_len == 0) run_begin = t;
                ++run_len;
            } else {
                if (run_len > best_len) {
                    best_len = run_len;
                    best_begin = run_begin;
                }
                run_len = 0;
            }
        }
        if (best_len >= min_region_steps && best_len > 0) {
            for (std::size_t t = best_begin; t < best_begin + best_len; ++t) {
                out[t] = static_cast<int>(c);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sample-wise expansion

std::vector<int> expand_to_samples(const std::vector<int>& labels, std::size_t n_samples,
                                   int rate_hz, double stride_s) {
    if (labels.empty()) raise(Errc::empty_predictions, "no prediction labels to expand");
    std::vector<int> out(n_samples);
    const double steps_per_sample = 1.0 / (static_cast<double>(rate_hz) * stride_s);
    const auto last = static_cast<double>(labels.size() - 1);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double pos = static_cast<double>(i) * steps_per_sample;
        // Nearest timestep; exact halves resolve toward the earlier one.
        double j = std::floor(pos + 0.5);
        if (j - pos == 0.5) j -= 1.0;
        j = std::clamp(j, 0.0, last);
        out[i] = labels[static_cast<std::size_t>(j)];
    }
    return out;
}

} // namespace harp
