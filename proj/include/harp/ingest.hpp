#pragma once

#include <filesystem>
#include <vector>

#include "harp/types.hpp"

namespace harp {

// Result of mirror imputation. Timesteps where the limb and its mirror were
// both missing stay masked and are reported here instead of failing the run.
struct ImputeResult {
    Recording recording;
    std::vector<std::size_t> both_missing;
};

struct OrientationEntry {
    std::string subject_id;
    LimbId limb = LimbId::left_arm;
    int half = 0; // 0 = first half, 1 = second half
    double median_x = 0.0;
    bool flagged = false;
    std::vector<double> trace; // 1 Hz rolling median (120 s window), empty unless requested
};

// CSV layout: optional sbj_id column, 12 channel columns named
// {right_arm|left_arm|right_leg|left_leg}_acc_{x|y|z}, optional label column.
Recording load_recording(const std::filesystem::path& path, const Vocabulary& vocabulary);
void save_recording(const Recording& rec, const Vocabulary& vocabulary,
                    const std::filesystem::path& path);

ImputeResult impute_mirror_limb(const Recording& rec, LimbId limb);

std::vector<OrientationEntry> audit_orientation(const std::vector<Recording>& cohort,
                                                bool with_traces = false);

void save_orientation_report(const std::vector<OrientationEntry>& entries,
                             const std::filesystem::path& path);

} // namespace harp
