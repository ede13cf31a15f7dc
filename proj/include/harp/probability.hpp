#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harp/variant.hpp"

namespace harp {

// Per-timestep class probabilities, the currency of all post-processing.
// Rows may carry variant tags between prediction and variant aggregation;
// the post-processing operations require a single recording with one
// untagged row per timestep.
struct ProbabilityMatrix {
    std::vector<std::string> recording_ids;
    std::vector<std::uint32_t> row_recording;
    std::vector<std::int64_t> row_timestep;
    std::vector<VariantTag> row_variant;
    std::size_t class_count = 0;
    std::vector<double> values; // rows x class_count, row-major
    double stride_s = 0.5;

    std::size_t rows() const { return row_timestep.size(); }
    double* row(std::size_t r) { return values.data() + r * class_count; }
    const double* row(std::size_t r) const { return values.data() + r * class_count; }

    // True when rows are exactly timesteps 0..n-1 of one recording, untagged.
    bool is_single_recording_series() const;
};

std::vector<int> argmax_labels(const ProbabilityMatrix& probs);

} // namespace harp
