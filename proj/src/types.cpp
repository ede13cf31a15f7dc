#include "harp/types.hpp"

#include <cstring>
#include <fstream>

#include "harp/text.hpp"

namespace harp {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::io_error: return "IoError";
    case Errc::missing_column: return "MissingColumn";
    case Errc::label_not_in_vocabulary: return "LabelNotInVocabulary";
    case Errc::empty_recording: return "EmptyRecording";
    case Errc::not_raw_config: return "NotRawConfig";
    case Errc::inconsistent_variants: return "InconsistentVariants";
    case Errc::empty_labels: return "EmptyLabels";
    case Errc::single_class: return "SingleClass";
    case Errc::schema_mismatch: return "SchemaMismatch";
    case Errc::misaligned_folds: return "MisalignedFolds";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::too_few_subjects: return "TooFewSubjects";
    case Errc::empty_predictions: return "EmptyPredictions";
    }
    return "UnknownError";
}

const char* limb_name(LimbId limb) {
    switch (limb) {
    case LimbId::left_arm: return "left_arm";
    case LimbId::right_arm: return "right_arm";
    case LimbId::left_leg: return "left_leg";
    case LimbId::right_leg: return "right_leg";
    }
    return "?";
}

std::optional<LimbId> parse_limb(const std::string& name) {
    for (LimbId limb : kAllLimbs) {
        if (name == limb_name(limb)) return limb;
    }
    return std::nullopt;
}

const char* axis_name(Axis axis) {
    switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary Vocabulary::from_names(std::vector<std::string> names) {
    if (names.empty() || names[0] != "null") {
        raise(Errc::invalid_config, "vocabulary must start with the \"null\" class");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            if (names[i] == names[j]) {
                raise(Errc::invalid_config, "duplicate class name \"" + names[i] + "\"");
            }
        }
    }
    Vocabulary v;
    v.names_ = std::move(names);
    return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::io_error, "cannot open vocabulary file " + path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (!t.empty()) names.emplace_back(t);
    }
    return from_names(std::move(names));
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) raise(Errc::io_error, "cannot write vocabulary file " + path.string());
    for (const auto& name : names_) out << name << '\n';
}

int Vocabulary::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return static_cast<int>(i);
    }
    raise(Errc::label_not_in_vocabulary, "\"" + name + "\"");
}

const std::string& Vocabulary::name_of(int index) const {
    if (index < 0 || static_cast<std::size_t>(index) >= names_.size()) {
        raise(Errc::label_not_in_vocabulary, "class index " + std::to_string(index));
    }
    return names_[static_cast<std::size_t>(index)];
}

// ---------------------------------------------------------------------------
// Recording

void Recording::resize(std::size_t n) {
    for (auto& limb : channels) {
        for (auto& axis : limb) axis.assign(n, 0.0);
    }
    for (auto& mask : missing) mask.assign(n, 0);
}

void Recording::validate() const {
    const std::size_t n = sample_count();
    if (n == 0) raise(Errc::empty_recording, "recording " + subject_id + " has zero samples");
    if (sample_rate_hz <= 0) raise(Errc::invalid_config, "sample rate must be positive");
    for (LimbId limb : kAllLimbs) {
        if (missing_mask(limb).size() != n) {
            raise(Errc::length_mismatch, "missing mask length differs from sample count");
        }
        for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
            const auto& ch = channel(limb, axis);
            if (ch.size() != n) {
                raise(Errc::length_mismatch, "channel lengths differ in recording " + subject_id);
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (missing_mask(limb)[i]) continue;
                const double v = ch[i];
                if (is_missing(v) || v < -kAccelRangeG || v > kAccelRangeG) {
                    raise(Errc::invalid_config, "sample out of [-8, 8] g range in " + subject_id);
                }
            }
        }
    }
    if (labels && labels->size() != n) {
        raise(Errc::length_mismatch, "label array length differs from sample count");
    }
}

bool bitwise_equal(const Recording& a, const Recording& b) {
    if (a.subject_id != b.subject_id || a.sample_rate_hz != b.sample_rate_hz) return false;
    if (a.sample_count() != b.sample_count()) return false;
    if (a.labels.has_value() != b.labels.has_value()) return false;
    if (a.labels && *a.labels != *b.labels) return false;
    for (LimbId limb : kAllLimbs) {
        if (a.missing_mask(limb) != b.missing_mask(limb)) return false;
        for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
            const auto& ca = a.channel(limb, axis);
            const auto& cb = b.channel(limb, axis);
            if (std::memcmp(ca.data(), cb.data(), ca.size() * sizeof(double)) != 0) return false;
        }
    }
    return true;
}

} // namespace harp
