#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "harp/types.hpp"
#include "harp/variant.hpp"

namespace harp {

// ---------------------------------------------------------------------------
// Window plan

enum class Direction : std::uint8_t { past = 0, future = 1 };
const char* direction_name(Direction d);

// Past window at timestep t covers samples in [t-w, t); future covers [t, t+w).
// Windows are clipped at recording boundaries, never padded.
struct WindowPlan {
    std::vector<double> sizes_s{1, 2, 4, 8, 16, 32};
    double stride_s = 0.5;
    int min_samples = 2;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Columns

struct FeatureColumnKey {
    std::string limb;    // left_arm / right_arm / left_leg / right_leg / arm / leg
    std::string signal;  // x / y / z / smv / agg_mean / agg_std / agg_skew / agg_min / agg_mid / agg_max
    Direction direction = Direction::past;
    double window_s = 0.0;
    std::string feature;

    bool operator==(const FeatureColumnKey&) const = default;

    std::string to_string() const; // limb|signal|direction|window|feature
    static FeatureColumnKey parse(const std::string& line);
};

enum class ChannelConfig : std::uint8_t { raw, smv };

// ---------------------------------------------------------------------------
// Matrix

// Rows are (recording, timestep, variant); NaN marks a missing feature value.
struct FeatureMatrix {
    std::vector<FeatureColumnKey> columns;
    std::vector<std::string> recording_ids;
    std::vector<std::uint32_t> row_recording;
    std::vector<std::int64_t> row_timestep;
    std::vector<VariantTag> row_variant;
    std::vector<int> row_label; // empty = unlabeled; otherwise one entry per row
    std::vector<double> values; // rows x columns, row-major

    std::size_t rows() const { return row_timestep.size(); }
    std::size_t cols() const { return columns.size(); }
    double* row(std::size_t r) { return values.data() + r * cols(); }
    const double* row(std::size_t r) const { return values.data() + r * cols(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

    bool has_labels() const { return !row_label.empty(); }
    std::uint64_t schema_hash() const;
    std::string schema_text() const;

    // Appends other's rows; schemas must match exactly.
    void append_rows(const FeatureMatrix& other);
};

// ---------------------------------------------------------------------------
// Per-window features

// Order matters: it fixes the column layout.
inline constexpr std::array<const char*, 13> kTimeDomainFeatureNames{
    "min",
    "max",
    "ptp",
    "iqr",
    "std",
    "skew",
    "kurtosis",
    "hjorth_mobility",
    "hjorth_complexity",
    "mean_crossing_rate",
    "differential_entropy",
    "petrosian_fd",
    "katz_fd",
};
inline constexpr const char* kSpectralEntropyName = "spectral_entropy";
inline constexpr int kTimeDomainFeatureCount = 13;
inline constexpr int kFeatureCount = 14;

// All 13 time-domain features over a window that has already been stripped of
// missing samples. Fewer than 2 samples degenerates to all-NaN.
std::array<double, 13> time_domain_features(std::span<const double> window);

// Normalized Shannon entropy of the one-sided periodogram (DC excluded), in
// [0, 1]. Needs at least 4 samples, NaN otherwise. The sample rate fixes the
// bin frequencies but cancels out of the normalized entropy.
double spectral_entropy(std::span<const double> window, double sample_rate_hz);

// Per-limb signal magnitude vector; NaN wherever the limb sample is missing.
std::array<std::vector<double>, 4> compute_smv(const Recording& rec);

// ---------------------------------------------------------------------------
// Extraction

std::vector<FeatureColumnKey> make_schema(const WindowPlan& plan, ChannelConfig config);

// One row per timestep t_j = j * stride, j = 0 .. floor(duration/stride).
// Parallel across timesteps; result independent of the thread count.
FeatureMatrix extract(const Recording& rec, const WindowPlan& plan, ChannelConfig config,
                      int threads = 0);

// Binary matrix + plain-text schema sidecar (one column key per line).
void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& base);
FeatureMatrix load_feature_matrix(const std::filesystem::path& base);

} // namespace harp
