#include "harp/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "harp/error.hpp"

namespace harp {

const char* aggregation_name(AggregationKind kind) {
    switch (kind) {
    case AggregationKind::stat2: return "stat2";
    case AggregationKind::stat3: return "stat3";
    case AggregationKind::sort: return "sort";
    }
    return "?";
}

namespace {

bool is_axis_signal(const std::string& s) { return s == "x" || s == "y" || s == "z"; }

// Column indices of the x/y/z triple for each (limb, direction, window,
// feature) group, in first-appearance order. Throws unless the matrix has the
// full 3-axis structure.
struct RawGroups {
    // 3 column indices per group, x/y/z order
    std::vector<std::array<std::size_t, 3>> members;
    std::vector<std::size_t> group_of_first; // column index of the x member
};

RawGroups raw_axis_groups(const FeatureMatrix& m) {
    struct GroupKey {
        std::string limb;
        Direction dir;
        double window_s;
        std::string feature;
        auto operator<=>(const GroupKey&) const = default;
    };
    std::map<GroupKey, std::size_t> index;
    RawGroups groups;
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        const auto& key = m.columns[c];
        if (!is_axis_signal(key.signal) || !parse_limb(key.limb)) {
            raise(Errc::not_raw_config,
                  "column " + key.to_string() + " is not a raw axis feature");
        }
        const GroupKey gk{key.limb, key.direction, key.window_s, key.feature};
        auto it = index.find(gk);
        std::size_t g;
        if (it == index.end()) {
            g = groups.members.size();
            index.emplace(gk, g);
            groups.members.push_back({SIZE_MAX, SIZE_MAX, SIZE_MAX});
            groups.group_of_first.push_back(c);
        } else {
            g = it->second;
        }
        const std::size_t axis = key.signal == "x" ? 0 : (key.signal == "y" ? 1 : 2);
        if (groups.members[g][axis] != SIZE_MAX) {
            raise(Errc::not_raw_config, "duplicate column " + key.to_string());
        }
        groups.members[g][axis] = c;
    }
    for (const auto& g : groups.members) {
        if (g[0] == SIZE_MAX || g[1] == SIZE_MAX || g[2] == SIZE_MAX) {
            raise(Errc::not_raw_config, "incomplete x/y/z group");
        }
    }
    return groups;
}

void copy_row_ids(const FeatureMatrix& src, FeatureMatrix& dst) {
    dst.recording_ids = src.recording_ids;
    dst.row_recording = src.row_recording;
    dst.row_timestep = src.row_timestep;
    dst.row_variant = src.row_variant;
    dst.row_label = src.row_label;
}

} // namespace

// ---------------------------------------------------------------------------
// Rotation-invariant aggregation

FeatureMatrix rotation_invariant_aggregate(const FeatureMatrix& m, AggregationKind kind) {
    const RawGroups groups = raw_axis_groups(m);
    const std::size_t n_groups = groups.members.size();
    const std::size_t out_per_group = kind == AggregationKind::stat2 ? 2 : 3;

    FeatureMatrix out;
    copy_row_ids(m, out);
    out.columns.reserve(n_groups * out_per_group);
    static const char* kStatNames[3][3] = {
        {"agg_mean", "agg_std", nullptr},
        {"agg_mean", "agg_std", "agg_skew"},
        {"agg_min", "agg_mid", "agg_max"},
    };
    const auto* stat_names = kStatNames[static_cast<std::size_t>(kind)];
    for (std::size_t g = 0; g < n_groups; ++g) {
        FeatureColumnKey base = m.columns[groups.group_of_first[g]];
        for (std::size_t s = 0; s < out_per_group; ++s) {
            FeatureColumnKey key = base;
            key.signal = stat_names[s];
            out.columns.push_back(std::move(key));
        }
    }

    const std::size_t n_rows = m.rows();
    out.values.assign(n_rows * out.columns.size(), 0.0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double* in = m.row(r);
        double* dst = out.row(r);
        for (std::size_t g = 0; g < n_groups; ++g) {
            const auto& cols = groups.members[g];
            double v[3] = {in[cols[0]], in[cols[1]], in[cols[2]]};
            if (is_missing(v[0]) || is_missing(v[1]) || is_missing(v[2])) {
                for (std::size_t s = 0; s < out_per_group; ++s) *dst++ = missing_value();
                continue;
            }
            // Canonical order makes the statistics bit-identical under any
            // permutation of the axes.
            std::sort(std::begin(v), std::end(v));
            switch (kind) {
            case AggregationKind::stat2:
            case AggregationKind::stat3: {
                const double mean = (v[0] + v[1] + v[2]) / 3.0;
                const double da = v[0] - mean, db = v[1] - mean, dc = v[2] - mean;
                const double m2 = (da * da + db * db + dc * dc) / 3.0;
                *dst++ = mean;
                *dst++ = std::sqrt(m2);
                if (kind == AggregationKind::stat3) {
                    const double m3 = (da * da * da + db * db * db + dc * dc * dc) / 3.0;
                    *dst++ = m2 < 1e-12 ? 0.0 : m3 / std::pow(m2, 1.5);
                }
                break;
            }
            case AggregationKind::sort:
                *dst++ = v[0];
                *dst++ = v[1];
                *dst++ = v[2];
                break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Left-right swapping

namespace {

// Column permutation that exchanges the named limb blocks.
std::vector<std::size_t> swap_permutation(const FeatureMatrix& m, bool upper, bool lower) {
    std::map<std::string, std::size_t> by_key;
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        by_key.emplace(m.columns[c].to_string(), c);
    }
    std::vector<std::size_t> perm(m.columns.size());
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        FeatureColumnKey key = m.columns[c];
        const auto limb = parse_limb(key.limb);
        if (!limb) raise(Errc::not_raw_config, "column without a limb: " + key.to_string());
        const bool swap_this =
            (level(*limb) == LimbLevel::upper && upper) || (level(*limb) == LimbLevel::lower && lower);
        if (swap_this) key.limb = limb_name(mirror(*limb));
        const auto it = by_key.find(key.to_string());
        if (it == by_key.end()) {
            raise(Errc::not_raw_config, "no mirror column for " + m.columns[c].to_string());
        }
        perm[c] = it->second;
    }
    return perm;
}

} // namespace

FeatureMatrix lr_swap_expand(const FeatureMatrix& m) {
    raw_axis_groups(m); // structural check only

    const std::array<VariantTag, 4> tags{VariantTag::lr(false, false), VariantTag::lr(true, false),
                                         VariantTag::lr(false, true), VariantTag::lr(true, true)};
    std::array<std::vector<std::size_t>, 4> perms;
    for (std::size_t v = 0; v < 4; ++v) {
        perms[v] = swap_permutation(m, tags[v].upper_swapped, tags[v].lower_swapped);
    }

    FeatureMatrix out;
    out.columns = m.columns;
    out.recording_ids = m.recording_ids;
    const std::size_t n_rows = m.rows();
    const std::size_t n_cols = m.cols();
    out.values.resize(n_rows * 4 * n_cols);
    out.row_recording.reserve(n_rows * 4);
    out.row_timestep.reserve(n_rows * 4);
    out.row_variant.reserve(n_rows * 4);
    if (m.has_labels()) out.row_label.reserve(n_rows * 4);

    double* dst = out.values.data();
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double* src = m.row(r);
        for (std::size_t v = 0; v < 4; ++v) {
            const auto& perm = perms[v];
            for (std::size_t c = 0; c < n_cols; ++c) *dst++ = src[perm[c]];
            out.row_recording.push_back(m.row_recording[r]);
            out.row_timestep.push_back(m.row_timestep[r]);
            out.row_variant.push_back(tags[v]);
            if (m.has_labels()) out.row_label.push_back(m.row_label[r]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Upper-lower limb pairing

FeatureMatrix ul_pair_expand(const FeatureMatrix& m) {
    raw_axis_groups(m); // structural check only

    // Source columns per limb, in schema order.
    std::array<std::vector<std::size_t>, 4> limb_cols;
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        const auto limb = parse_limb(m.columns[c].limb);
        if (!limb) raise(Errc::not_raw_config, "column without a limb");
        limb_cols[static_cast<std::size_t>(*limb)].push_back(c);
    }
    const std::size_t arm_width = limb_cols[0].size();
    const std::size_t leg_width = limb_cols[2].size();
    for (LimbId limb : kAllLimbs) {
        const auto& cols = limb_cols[static_cast<std::size_t>(limb)];
        const std::size_t want = level(limb) == LimbLevel::upper ? arm_width : leg_width;
        if (cols.size() != want || cols.empty()) {
            raise(Errc::not_raw_config, "uneven limb column blocks");
        }
    }

    FeatureMatrix out;
    out.recording_ids = m.recording_ids;
    out.columns.reserve(arm_width + leg_width);
    for (std::size_t c : limb_cols[0]) {
        FeatureColumnKey key = m.columns[c];
        key.limb = "arm";
        out.columns.push_back(std::move(key));
    }
    for (std::size_t c : limb_cols[2]) {
        FeatureColumnKey key = m.columns[c];
        key.limb = "leg";
        out.columns.push_back(std::move(key));
    }

    const std::array<std::pair<LimbId, LimbId>, 4> pairs{
        std::pair{LimbId::left_arm, LimbId::left_leg},
        std::pair{LimbId::left_arm, LimbId::right_leg},
        std::pair{LimbId::right_arm, LimbId::left_leg},
        std::pair{LimbId::right_arm, LimbId::right_leg},
    };

    const std::size_t n_rows = m.rows();
    out.values.resize(n_rows * 4 * out.columns.size());
    out.row_recording.reserve(n_rows * 4);
    out.row_timestep.reserve(n_rows * 4);
    out.row_variant.reserve(n_rows * 4);
    if (m.has_labels()) out.row_label.reserve(n_rows * 4);

    double* dst = out.values.data();
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double* src = m.row(r);
        for (const auto& [arm, leg] : pairs) {
            for (std::size_t c : limb_cols[static_cast<std::size_t>(arm)]) *dst++ = src[c];
            for (std::size_t c : limb_cols[static_cast<std::size_t>(leg)]) *dst++ = src[c];
            out.row_recording.push_back(m.row_recording[r]);
            out.row_timestep.push_back(m.row_timestep[r]);
            out.row_variant.push_back(VariantTag::ul(arm, leg));
            if (m.has_labels()) out.row_label.push_back(m.row_label[r]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variant aggregation (soft voting)

ProbabilityMatrix aggregate_variants(const ProbabilityMatrix& probs) {
    const std::size_t k = probs.class_count;

    // (recording, timestep) -> row list, in first-appearance order.
    std::vector<std::pair<std::uint32_t, std::int64_t>> order;
    std::map<std::pair<std::uint32_t, std::int64_t>, std::vector<std::size_t>> grouped;
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const auto key = std::make_pair(probs.row_recording[r], probs.row_timestep[r]);
        auto& rows = grouped[key];
        if (rows.empty()) order.push_back(key);
        rows.push_back(r);
    }

    // Every timestep must carry the same variant set.
    std::vector<VariantTag> reference;
    for (const auto& key : order) {
        auto tags = grouped[key];
        std::vector<VariantTag> sorted;
        sorted.reserve(tags.size());
        for (std::size_t r : tags) sorted.push_back(probs.row_variant[r]);
        std::sort(sorted.begin(), sorted.end());
        if (reference.empty()) {
            reference = sorted;
        } else if (sorted != reference) {
            raise(Errc::inconsistent_variants, "timesteps disagree on their variant sets");
        }
    }

    ProbabilityMatrix out;
    out.recording_ids = probs.recording_ids;
    out.class_count = k;
    out.stride_s = probs.stride_s;
    out.values.reserve(order.size() * k);
    for (const auto& key : order) {
        const auto& rows = grouped[key];
        const double inv = 1.0 / static_cast<double>(rows.size());
        for (std::size_t c = 0; c < k; ++c) {
            double sum = 0.0;
            for (std::size_t r : rows) sum += probs.row(r)[c];
            out.values.push_back(sum * inv);
        }
        out.row_recording.push_back(key.first);
        out.row_timestep.push_back(key.second);
        out.row_variant.push_back(VariantTag::none_tag());
    }
    return out;
}

} // namespace harp
