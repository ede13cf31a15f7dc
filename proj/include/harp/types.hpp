#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "harp/error.hpp"

namespace harp {

constexpr int kWearSampleRateHz = 50;
constexpr double kAccelRangeG = 8.0;

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

// ---------------------------------------------------------------------------
// Limbs

enum class LimbId : std::uint8_t { left_arm = 0, right_arm = 1, left_leg = 2, right_leg = 3 };

constexpr std::array<LimbId, 4> kAllLimbs{LimbId::left_arm, LimbId::right_arm, LimbId::left_leg,
                                          LimbId::right_leg};

enum class LimbLevel : std::uint8_t { upper, lower };

constexpr LimbId mirror(LimbId limb) {
    switch (limb) {
    case LimbId::left_arm: return LimbId::right_arm;
    case LimbId::right_arm: return LimbId::left_arm;
    case LimbId::left_leg: return LimbId::right_leg;
    case LimbId::right_leg: return LimbId::left_leg;
    }
    return limb;
}

constexpr LimbLevel level(LimbId limb) {
    return (limb == LimbId::left_arm || limb == LimbId::right_arm) ? LimbLevel::upper
                                                                   : LimbLevel::lower;
}

const char* limb_name(LimbId limb);
std::optional<LimbId> parse_limb(const std::string& name);

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };
const char* axis_name(Axis axis);

// ---------------------------------------------------------------------------
// Labels

struct ActivityLabel {
    int index = 0;
    std::string name;
};

// Class-name <-> index mapping. Index 0 is always the "null" class.
class Vocabulary {
public:
    Vocabulary() = default;
    static Vocabulary from_names(std::vector<std::string> names);
    static Vocabulary load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    int index_of(const std::string& name) const; // throws label_not_in_vocabulary
    const std::string& name_of(int index) const;
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Recording

// One subject's untrimmed session: 4 limbs x 3 axes at 50 Hz. Masked samples
// keep NaN in the channel arrays; the mask is per (limb, sample).
struct Recording {
    std::string subject_id;
    int sample_rate_hz = kWearSampleRateHz;
    std::array<std::array<std::vector<double>, 3>, 4> channels; // [limb][axis]
    std::array<std::vector<std::uint8_t>, 4> missing;           // [limb][sample]
    std::optional<std::vector<int>> labels;                     // class indices per sample

    std::size_t sample_count() const { return channels[0][0].size(); }
    double duration_s() const {
        return static_cast<double>(sample_count()) / static_cast<double>(sample_rate_hz);
    }

    std::vector<double>& channel(LimbId limb, Axis axis) {
        return channels[static_cast<std::size_t>(limb)][static_cast<std::size_t>(axis)];
    }
    const std::vector<double>& channel(LimbId limb, Axis axis) const {
        return channels[static_cast<std::size_t>(limb)][static_cast<std::size_t>(axis)];
    }
    std::vector<std::uint8_t>& missing_mask(LimbId limb) {
        return missing[static_cast<std::size_t>(limb)];
    }
    const std::vector<std::uint8_t>& missing_mask(LimbId limb) const {
        return missing[static_cast<std::size_t>(limb)];
    }

    void resize(std::size_t n);
    // Checks the shared-length and value-range invariants; throws on violation.
    void validate() const;
};

bool bitwise_equal(const Recording& a, const Recording& b);

} // namespace harp
