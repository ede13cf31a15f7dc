#include "harp/probability.hpp"

#include <algorithm>

namespace harp {

bool ProbabilityMatrix::is_single_recording_series() const {
    if (recording_ids.size() != 1) return false;
    for (std::size_t r = 0; r < rows(); ++r) {
        if (row_timestep[r] != static_cast<std::int64_t>(r)) return false;
        if (!(row_variant[r] == VariantTag::none_tag())) return false;
    }
    return true;
}

std::vector<int> argmax_labels(const ProbabilityMatrix& probs) {
    std::vector<int> labels(probs.rows());
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const double* p = probs.row(r);
        labels[r] = static_cast<int>(std::max_element(p, p + probs.class_count) - p);
    }
    return labels;
}

} // namespace harp
