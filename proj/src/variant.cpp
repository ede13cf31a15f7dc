#include "harp/variant.hpp"

#include <tuple>

#include "harp/error.hpp"

namespace harp {

std::string VariantTag::to_string() const {
    switch (kind) {
    case Kind::none: return "none";
    case Kind::lr_swap:
        if (upper_swapped && lower_swapped) return "lr_swap:both";
        if (upper_swapped) return "lr_swap:upper";
        if (lower_swapped) return "lr_swap:lower";
        return "lr_swap:no_swap";
    case Kind::ul_pair:
        return std::string("ul_pair:") + limb_name(arm) + "+" + limb_name(leg);
    }
    return "none";
}

VariantTag VariantTag::parse(const std::string& token) {
    if (token == "none") return none_tag();
    if (token == "lr_swap:no_swap") return lr(false, false);
    if (token == "lr_swap:upper") return lr(true, false);
    if (token == "lr_swap:lower") return lr(false, true);
    if (token == "lr_swap:both") return lr(true, true);
    const std::string prefix = "ul_pair:";
    if (token.rfind(prefix, 0) == 0) {
        const auto plus = token.find('+', prefix.size());
        if (plus != std::string::npos) {
            const auto arm = parse_limb(token.substr(prefix.size(), plus - prefix.size()));
            const auto leg = parse_limb(token.substr(plus + 1));
            if (arm && leg) return ul(*arm, *leg);
        }
    }
    raise(Errc::invalid_config, "unknown variant tag \"" + token + "\"");
}

bool operator<(const VariantTag& a, const VariantTag& b) {
    const auto key = [](const VariantTag& t) {
        return std::make_tuple(static_cast<int>(t.kind), t.upper_swapped, t.lower_swapped,
                               static_cast<int>(t.arm), static_cast<int>(t.leg));
    };
    return key(a) < key(b);
}

} // namespace harp
