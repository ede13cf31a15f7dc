#include "harp/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "harp/text.hpp"

namespace harp {

namespace {

std::string channel_column_name(LimbId limb, Axis axis) {
    return std::string(limb_name(limb)) + "_acc_" + axis_name(axis);
}

double median_of(std::vector<double>& scratch) {
    if (scratch.empty()) return 0.0;
    const std::size_t mid = scratch.size() / 2;
    std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end());
    double hi = scratch[mid];
    if (scratch.size() % 2 == 1) return hi;
    std::nth_element(scratch.begin(), scratch.begin() + mid - 1, scratch.begin() + mid);
    return 0.5 * (scratch[mid - 1] + hi);
}

} // namespace

// ---------------------------------------------------------------------------
// CSV round trip

Recording load_recording(const std::filesystem::path& path, const Vocabulary& vocabulary) {
    std::ifstream in(path);
    if (!in) raise(Errc::io_error, "cannot open recording " + path.string());

    std::string line;
    if (!std::getline(in, line)) raise(Errc::empty_recording, path.string());
    const std::vector<std::string> header = split(trim(line), ',');

    int sbj_col = -1;
    int label_col = -1;
    std::array<std::array<int, 3>, 4> channel_col{};
    for (auto& limb : channel_col) limb.fill(-1);

    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name(trim(header[c]));
        if (name == "sbj_id") {
            sbj_col = static_cast<int>(c);
        } else if (name == "label") {
            label_col = static_cast<int>(c);
        } else {
            for (LimbId limb : kAllLimbs) {
                for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
                    if (name == channel_column_name(limb, axis)) {
                        channel_col[static_cast<std::size_t>(limb)]
                                   [static_cast<std::size_t>(axis)] = static_cast<int>(c);
                    }
                }
            }
        }
    }
    for (LimbId limb : kAllLimbs) {
        for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
            if (channel_col[static_cast<std::size_t>(limb)][static_cast<std::size_t>(axis)] < 0) {
                raise(Errc::missing_column, channel_column_name(limb, axis));
            }
        }
    }

    Recording rec;
    rec.subject_id = path.stem().string();
    if (label_col >= 0) rec.labels.emplace();

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        if (sbj_col >= 0 && static_cast<std::size_t>(sbj_col) < cells.size()) {
            const auto sid = trim(cells[static_cast<std::size_t>(sbj_col)]);
            if (!sid.empty()) rec.subject_id = std::string(sid);
        }
        for (LimbId limb : kAllLimbs) {
            bool limb_missing = false;
            std::array<double, 3> vals{};
            for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
                const int c =
                    channel_col[static_cast<std::size_t>(limb)][static_cast<std::size_t>(axis)];
                std::optional<double> v;
                if (static_cast<std::size_t>(c) < cells.size()) {
                    v = parse_double(cells[static_cast<std::size_t>(c)]);
                }
                if (!v || is_missing(*v)) {
                    limb_missing = true;
                } else {
                    vals[static_cast<std::size_t>(axis)] =
                        std::clamp(*v, -kAccelRangeG, kAccelRangeG);
                }
            }
            for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
                rec.channel(limb, axis).push_back(
                    limb_missing ? missing_value() : vals[static_cast<std::size_t>(axis)]);
            }
            rec.missing_mask(limb).push_back(limb_missing ? 1 : 0);
        }
        if (label_col >= 0) {
            if (static_cast<std::size_t>(label_col) >= cells.size()) {
                raise(Errc::label_not_in_vocabulary, "empty label cell in " + path.string());
            }
            const std::string name(trim(cells[static_cast<std::size_t>(label_col)]));
            rec.labels->push_back(vocabulary.index_of(name));
        }
    }

    if (rec.sample_count() == 0) raise(Errc::empty_recording, path.string());
    return rec;
}

void save_recording(const Recording& rec, const Vocabulary& vocabulary,
                    const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) raise(Errc::io_error, "cannot write recording " + path.string());

    out << "sbj_id";
    for (LimbId limb : {LimbId::right_arm, LimbId::left_arm, LimbId::right_leg, LimbId::left_leg}) {
        for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
            out << ',' << channel_column_name(limb, axis);
        }
    }
    if (rec.labels) out << ",label";
    out << '\n';

    const std::size_t n = rec.sample_count();
    std::string row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        row += rec.subject_id;
        for (LimbId limb :
             {LimbId::right_arm, LimbId::left_arm, LimbId::right_leg, LimbId::left_leg}) {
            const bool miss = rec.missing_mask(limb)[i] != 0;
            for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
                row += ',';
                if (!miss) row += format_double(rec.channel(limb, axis)[i]);
            }
        }
        if (rec.labels) {
            row += ',';
            row += vocabulary.name_of((*rec.labels)[i]);
        }
        row += '\n';
        out << row;
    }
}

// ---------------------------------------------------------------------------
// Mirror imputation

ImputeResult impute_mirror_limb(const Recording& rec, LimbId limb) {
    ImputeResult result{rec, {}};
    Recording& out = result.recording;
    const LimbId other = mirror(limb);
    const std::size_t n = rec.sample_count();

    for (std::size_t i = 0; i < n; ++i) {
        if (!rec.missing_mask(limb)[i]) continue;
        if (rec.missing_mask(other)[i]) {
            result.both_missing.push_back(i);
            continue;
        }
        for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
            out.channel(limb, axis)[i] = rec.channel(other, axis)[i];
        }
        out.missing_mask(limb)[i] = 0;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Orientation audit

namespace {

// Centered 120 s rolling median of one half, emitted at 1 Hz.
std::vector<double> rolling_median_trace(const std::vector<double>& x,
                                         const std::vector<std::uint8_t>& mask, std::size_t begin,
                                         std::size_t end, int rate_hz) {
    std::vector<double> trace;
    const std::size_t half_window = static_cast<std::size_t>(60 * rate_hz);
    std::vector<double> scratch;
    for (std::size_t center = begin; center < end; center += static_cast<std::size_t>(rate_hz)) {
        const std::size_t lo = center > half_window ? center - half_window : 0;
        const std::size_t hi = std::min(end, center + half_window);
        scratch.clear();
        for (std::size_t i = std::max(lo, begin); i < hi; ++i) {
            if (!mask[i]) scratch.push_back(x[i]);
        }
        trace.push_back(median_of(scratch));
    }
    return trace;
}

} // namespace

std::vector<OrientationEntry> audit_orientation(const std::vector<Recording>& cohort,
                                                bool with_traces) {
    std::vector<OrientationEntry> entries;
    entries.reserve(cohort.size() * 8);

    std::vector<double> scratch;
    for (const Recording& rec : cohort) {
        const std::size_t n = rec.sample_count();
        const std::size_t mid = n / 2;
        for (LimbId limb : kAllLimbs) {
            const auto& x = rec.channel(limb, Axis::x);
            const auto& mask = rec.missing_mask(limb);
            for (int half = 0; half < 2; ++half) {
                const std::size_t begin = half == 0 ? 0 : mid;
                const std::size_t end = half == 0 ? mid : n;
                scratch.clear();
                for (std::size_t i = begin; i < end; ++i) {
                    if (!mask[i]) scratch.push_back(x[i]);
                }
                OrientationEntry e;
                e.subject_id = rec.subject_id;
                e.limb = limb;
                e.half = half;
                e.median_x = median_of(scratch);
                if (with_traces) {
                    e.trace = rolling_median_trace(x, mask, begin, end, rec.sample_rate_hz);
                }
                entries.push_back(std::move(e));
            }
        }
    }

    // Modal sign per limb over all half-medians; ties resolve to +1 (the
    // mounting convention aligns x with +1 g).
    for (LimbId limb : kAllLimbs) {
        int positive = 0;
        int negative = 0;
        for (const auto& e : entries) {
            if (e.limb != limb) continue;
            if (e.median_x > 0) ++positive;
            else if (e.median_x < 0) ++negative;
        }
        const int modal = negative > positive ? -1 : 1;
        for (auto& e : entries) {
            if (e.limb != limb) continue;
            const int sign = e.median_x > 0 ? 1 : (e.median_x < 0 ? -1 : 0);
            e.flagged = sign != 0 && sign != modal;
        }
    }
    return entries;
}

void save_orientation_report(const std::vector<OrientationEntry>& entries,
                             const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) raise(Errc::io_error, "cannot write orientation report " + path.string());
    out << "subject,limb,half,median_x,flagged\n";
    for (const auto& e : entries) {
        out << e.subject_id << ',' << limb_name(e.limb) << ',' << (e.half + 1) << ','
            << format_double(e.median_x) << ',' << (e.flagged ? 1 : 0) << '\n';
    }
}

} // namespace harp
