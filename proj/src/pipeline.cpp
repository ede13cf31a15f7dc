#include "harp/pipeline.hpp"

namespace harp {

const char* mode_name(Mode mode) {
    switch (mode) {
    case Mode::raw: return "raw";
    case Mode::smv: return "smv";
    case Mode::stat2: return "stat2";
    case Mode::stat3: return "stat3";
    case Mode::sort: return "sort";
    case Mode::lr_swap: return "lr_swap";
    case Mode::ul_pair: return "ul_pair";
    }
    return "?";
}

std::optional<Mode> parse_mode(const std::string& name) {
    for (Mode mode : {Mode::raw, Mode::smv, Mode::stat2, Mode::stat3, Mode::sort, Mode::lr_swap,
                      Mode::ul_pair}) {
        if (name == mode_name(mode)) return mode;
    }
    return std::nullopt;
}

ChannelConfig base_channel_config(Mode mode) {
    return mode == Mode::smv ? ChannelConfig::smv : ChannelConfig::raw;
}

FeatureMatrix apply_mode(const FeatureMatrix& base, Mode mode) {
    switch (mode) {
    case Mode::raw:
    case Mode::smv: return base;
    case Mode::stat2: return rotation_invariant_aggregate(base, AggregationKind::stat2);
    case Mode::stat3: return rotation_invariant_aggregate(base, AggregationKind::stat3);
    case Mode::sort: return rotation_invariant_aggregate(base, AggregationKind::sort);
    case Mode::lr_swap: return lr_swap_expand(base);
    case Mode::ul_pair: return ul_pair_expand(base);
    }
    return base;
}

FeatureMatrix extract_for_mode(const Recording& rec, const WindowPlan& plan, Mode mode,
                               int threads) {
    return apply_mode(extract(rec, plan, base_channel_config(mode), threads), mode);
}

ProbabilityMatrix predict_recording(const GbdtModel& model, const Recording& rec,
                                    const WindowPlan& plan, Mode mode, int threads) {
    const FeatureMatrix features = extract_for_mode(rec, plan, mode, threads);
    ProbabilityMatrix probs = predict_proba(model, features, threads);
    probs.stride_s = plan.stride_s;
    return aggregate_variants(probs);
}

std::vector<int> predict_samples(const std::vector<GbdtModel>& fold_models, const Recording& rec,
                                 const PipelineSettings& settings) {
    if (fold_models.empty()) raise(Errc::empty_predictions, "no fold models given");
    std::vector<ProbabilityMatrix> per_fold;
    per_fold.reserve(fold_models.size());
    for (const GbdtModel& model : fold_models) {
        per_fold.push_back(
            predict_recording(model, rec, settings.window, settings.mode, settings.threads));
    }
    const ProbabilityMatrix summed = kfold_sum(per_fold);
    const ProbabilityMatrix voted = kfold_vote(per_fold);
    const ProbabilityMatrix smoothed = smooth(voted, settings.smoothing);
    std::vector<int> labels = argmax_labels(smoothed);
    labels = rule_boost(summed, labels, settings.rule_boost);
    return expand_to_samples(labels, rec.sample_count(), rec.sample_rate_hz, settings.window.stride_s);
}

} // namespace harp
