#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harp/augment.hpp"
#include "harp/features.hpp"
#include "harp/model.hpp"
#include "harp/postprocess.hpp"
#include "harp/types.hpp"

namespace harp {

// The seven feature configurations under evaluation.
enum class Mode : std::uint8_t { raw, smv, stat2, stat3, sort, lr_swap, ul_pair };

const char* mode_name(Mode mode);
std::optional<Mode> parse_mode(const std::string& name);

// Which base extraction a mode consumes (smv for Mode::smv, raw otherwise).
ChannelConfig base_channel_config(Mode mode);

// Applies the mode's matrix transformation to a base extraction.
FeatureMatrix apply_mode(const FeatureMatrix& base, Mode mode);

struct FoldPlan {
    int count = 3;
    std::uint64_t seed = 0;
};

struct PipelineSettings {
    Mode mode = Mode::raw;
    WindowPlan window;
    GbdtConfig gbdt;
    SmoothingConfig smoothing;
    RuleBoostConfig rule_boost;
    FoldPlan folds;
    int threads = 0;
};

// extract -> apply_mode, rows keep the recording's labels when present.
FeatureMatrix extract_for_mode(const Recording& rec, const WindowPlan& plan, Mode mode,
                               int threads = 0);

// Full inference for one recording under one model: extract, transform,
// predict, aggregate variants. Output has one normalized row per timestep.
ProbabilityMatrix predict_recording(const GbdtModel& model, const Recording& rec,
                                    const WindowPlan& plan, Mode mode, int threads = 0);

// Per-sample labels via the full post-processing chain:
// per-fold probabilities -> vote -> smooth -> argmax -> rule boost -> expand.
std::vector<int> predict_samples(const std::vector<GbdtModel>& fold_models, const Recording& rec,
                                 const PipelineSettings& settings);

} // namespace harp
