#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "harp/types.hpp"

namespace harp {

// Seeded generator of WEAR-shaped cohorts: per subject, two sessions of
// randomized activity order; every class appears once per subject.
struct SynthConfig {
    std::uint64_t seed = 1;
    int subjects = 6;
    int classes = 6; // workout classes, excluding null
    double activity_duration_min_s = 60.0;
    double activity_duration_max_s = 90.0;
    double null_gap_min_s = 5.0;
    double null_gap_max_s = 15.0;
    int sessions_per_subject = 2;
    double orientation_flip_prob = 0.0; // per limb, per session
    double limb_swap_prob = 0.0;        // per left/right pair, per session
    double noise_std_g = 0.05;
    // Deterministic overrides for closed-loop tests: flip these regardless of
    // orientation_flip_prob.
    std::vector<std::pair<LimbId, int>> forced_flips; // (limb, session index)

    void validate() const;
};

struct FlipEvent {
    std::string subject_id;
    LimbId limb;
    int session = 0;
};

struct SwapEvent {
    std::string subject_id;
    LimbLevel pair; // upper = arms swapped, lower = legs swapped
    int session = 0;
};

struct SynthResult {
    std::vector<Recording> recordings;
    Vocabulary vocabulary;
    std::vector<FlipEvent> flips;
    std::vector<SwapEvent> swaps;
    std::vector<std::vector<std::size_t>> session_bounds; // per subject, session end sample
};

SynthResult generate(const SynthConfig& cfg);

// Writes per-subject CSVs, the vocabulary file, and a manifest.
void write_cohort(const SynthResult& result, const std::filesystem::path& dir);

} // namespace harp
