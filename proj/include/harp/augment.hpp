#pragma once

#include "harp/features.hpp"
#include "harp/probability.hpp"

namespace harp {

// Rotation-invariant collapse of the 3 axial values in every
// (limb, direction, window, feature) group.
enum class AggregationKind : std::uint8_t {
    stat2, // mean, std        (3 -> 2)
    stat3, // mean, std, skew  (3 -> 3)
    sort,  // min, mid, max    (3 -> 3)
};
const char* aggregation_name(AggregationKind kind);

FeatureMatrix rotation_invariant_aggregate(const FeatureMatrix& m, AggregationKind kind);

// 4 rows per input row: no-swap, upper swap, lower swap, both. A swap
// exchanges the left/right column blocks of the arm and/or leg pair.
FeatureMatrix lr_swap_expand(const FeatureMatrix& m);

// 4 rows per input row, one per (arm, leg) pair; columns re-keyed to the
// position-neutral arm_* / leg_* blocks.
FeatureMatrix ul_pair_expand(const FeatureMatrix& m);

// Soft voting: element-wise mean of the variant rows that share a
// (recording, timestep); output rows are normalized and untagged.
ProbabilityMatrix aggregate_variants(const ProbabilityMatrix& probs);

} // namespace harp
