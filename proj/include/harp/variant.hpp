#pragma once

#include <cstdint>
#include <string>

#include "harp/types.hpp"

namespace harp {

// Tag attached to every feature/probability row identifying which
// augmentation variant produced it.
struct VariantTag {
    enum class Kind : std::uint8_t { none = 0, lr_swap = 1, ul_pair = 2 };

    Kind kind = Kind::none;
    bool upper_swapped = false; // lr_swap
    bool lower_swapped = false; // lr_swap
    LimbId arm = LimbId::left_arm; // ul_pair
    LimbId leg = LimbId::left_leg; // ul_pair

    bool operator==(const VariantTag&) const = default;

    static VariantTag none_tag() { return {}; }
    static VariantTag lr(bool upper, bool lower) {
        VariantTag t;
        t.kind = Kind::lr_swap;
        t.upper_swapped = upper;
        t.lower_swapped = lower;
        return t;
    }
    static VariantTag ul(LimbId arm, LimbId leg) {
        VariantTag t;
        t.kind = Kind::ul_pair;
        t.arm = arm;
        t.leg = leg;
        return t;
    }

    std::string to_string() const;
    static VariantTag parse(const std::string& token);
};

// Total order used when sorting rows; matches the expansion order of the
// augmentation operations.
bool operator<(const VariantTag& a, const VariantTag& b);

} // namespace harp
