#include "harp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "harp/ingest.hpp"
#include "harp/rng.hpp"

namespace harp {

void SynthConfig::validate() const {
    if (subjects < 1) raise(Errc::invalid_config, "subjects must be positive");
    if (classes < 1 || classes > 18) raise(Errc::invalid_config, "classes must be in [1, 18]");
    if (activity_duration_min_s <= 0 || activity_duration_max_s < activity_duration_min_s) {
        raise(Errc::invalid_config, "bad activity duration range");
    }
    if (null_gap_min_s < 0 || null_gap_max_s < null_gap_min_s) {
        raise(Errc::invalid_config, "bad null gap range");
    }
    if (sessions_per_subject < 1) raise(Errc::invalid_config, "sessions must be positive");
    for (double p : {orientation_flip_prob, limb_swap_prob}) {
        if (p < 0.0 || p > 1.0) raise(Errc::invalid_config, "probabilities must be in [0, 1]");
    }
    if (noise_std_g < 0.0) raise(Errc::invalid_config, "noise_std_g must be non-negative");
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Fixed per-(class, limb, axis) signature, independent of the cohort seed so
// the same class looks the same in every synthetic cohort. Classes come in
// confusable pairs, mirroring the lunges / lunges-complex structure of real
// workout sets: the oscillation profile (frequencies, amplitudes) is shared
// within a pair, and the two members differ only by the sign of a posture
// offset on the x/z axes. Orientation flips negate exactly that structure, so
// a flipped limb genuinely votes for the wrong pair member.
struct ClassSignature {
    double f1 = 0.0, f2 = 0.0; // Hz
    double a1 = 0.0, a2 = 0.0; // g
    double dc = 0.0;           // g, sign-sensitive posture offset
};

ClassSignature class_signature(int cls, LimbId limb, Axis axis) {
    const int pair = (cls + 1) / 2;
    const double member = cls % 2 == 1 ? 1.0 : -1.0;
    // Keyed by limb level, not limb: movements are bilaterally symmetric, so
    // the left and right wearables of a level share their signature.
    Rng rng(Rng::mix(0xC1A55000 + static_cast<std::uint64_t>(pair),
                     static_cast<std::uint64_t>(level(limb)) * 16 +
                         static_cast<std::uint64_t>(axis)));
    ClassSignature sig;
    sig.f1 = 0.8 + 0.4 * static_cast<double>(rng.below(8));
    sig.f2 = 0.8 + 0.4 * static_cast<double>(rng.below(8));
    sig.a1 = 0.4 + 0.2 * static_cast<double>(rng.below(6));
    sig.a2 = 0.5 * sig.a1;
    const bool arm_dominant = pair % 2 == 1;
    const bool is_arm = level(limb) == LimbLevel::upper;
    const double dominance = (arm_dominant == is_arm) ? 1.0 : 0.45;
    const double axis_scale = axis == Axis::y ? 0.15 : 1.0;
    sig.a1 *= dominance * axis_scale;
    sig.a2 *= dominance * axis_scale;
    if (axis != Axis::y) {
        sig.dc = member * (0.15 + 0.1 * static_cast<double>(rng.below(4))) * dominance;
    }
    return sig;
}

struct Segment {
    int cls = 0; // 0 = null gap
    std::size_t samples = 0;
};

} // namespace

SynthResult generate(const SynthConfig& cfg) {
    cfg.validate();
    const int rate = kWearSampleRateHz;

    SynthResult result;
    std::vector<std::string> names{"null"};
    for (int c = 1; c <= cfg.classes; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "activity_%02d", c);
        names.emplace_back(buf);
    }
    result.vocabulary = Vocabulary::from_names(names);

    for (int s = 0; s < cfg.subjects; ++s) {
        Rng rng(Rng::mix(cfg.seed, static_cast<std::uint64_t>(s)));

        char sid[32];
        std::snprintf(sid, sizeof(sid), "sbj_%02d", s);

        // Deal the shuffled class list across sessions, one appearance per
        // subject, mirroring the two-session acquisition protocol.
        std::vector<int> class_order(static_cast<std::size_t>(cfg.classes));
        std::iota(class_order.begin(), class_order.end(), 1);
        rng.shuffle(class_order);

        const int sessions = cfg.sessions_per_subject;
        std::vector<std::vector<Segment>> session_segments(static_cast<std::size_t>(sessions));
        const auto draw_samples = [&](double lo_s, double hi_s) {
            const auto lo = static_cast<std::uint64_t>(std::llround(lo_s * rate));
            const auto hi = static_cast<std::uint64_t>(std::llround(hi_s * rate));
            return static_cast<std::size_t>(lo + rng.below(hi - lo + 1));
        };
        for (int sess = 0; sess < sessions; ++sess) {
            auto& segments = session_segments[static_cast<std::size_t>(sess)];
            const std::size_t begin = static_cast<std::size_t>(sess) * class_order.size() /
                                      static_cast<std::size_t>(sessions);
            const std::size_t end = static_cast<std::size_t>(sess + 1) * class_order.size() /
                                    static_cast<std::size_t>(sessions);
            segments.push_back({0, draw_samples(cfg.null_gap_min_s, cfg.null_gap_max_s)});
            for (std::size_t i = begin; i < end; ++i) {
                segments.push_back(
                    {class_order[i],
                     draw_samples(cfg.activity_duration_min_s, cfg.activity_duration_max_s)});
                segments.push_back({0, draw_samples(cfg.null_gap_min_s, cfg.null_gap_max_s)});
            }
        }

        // Orientation flips and device swaps per session.
        std::array<std::vector<bool>, 4> flipped; // [limb][session]
        for (LimbId limb : kAllLimbs) {
            auto& per_session = flipped[static_cast<std::size_t>(limb)];
            per_session.assign(static_cast<std::size_t>(sessions), false);
            for (int sess = 0; sess < sessions; ++sess) {
                if (rng.uniform01() < cfg.orientation_flip_prob) {
                    per_session[static_cast<std::size_t>(sess)] = true;
                }
            }
        }
        for (const auto& [limb, sess] : cfg.forced_flips) {
            if (sess >= 0 && sess < sessions) {
                flipped[static_cast<std::size_t>(limb)][static_cast<std::size_t>(sess)] = true;
            }
        }
        std::array<std::vector<bool>, 2> swapped; // [level][session]
        for (int lvl = 0; lvl < 2; ++lvl) {
            swapped[static_cast<std::size_t>(lvl)].assign(static_cast<std::size_t>(sessions),
                                                          false);
            for (int sess = 0; sess < sessions; ++sess) {
                if (rng.uniform01() < cfg.limb_swap_prob) {
                    swapped[static_cast<std::size_t>(lvl)][static_cast<std::size_t>(sess)] = true;
                }
            }
        }

        std::size_t total = 0;
        for (const auto& segments : session_segments) {
            for (const auto& seg : segments) total += seg.samples;
        }

        Recording rec;
        rec.subject_id = sid;
        rec.sample_rate_hz = rate;
        rec.resize(total);
        rec.labels.emplace(total, 0);

        std::vector<std::size_t> bounds;
        std::size_t cursor = 0;
        for (int sess = 0; sess < sessions; ++sess) {
            for (const Segment& seg : session_segments[static_cast<std::size_t>(sess)]) {
                for (LimbId limb : kAllLimbs) {
                    for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
                        auto& ch = rec.channel(limb, axis);
                        const double phase1 = rng.uniform(0.0, kTwoPi);
                        const double phase2 = rng.uniform(0.0, kTwoPi);
                        const ClassSignature sig =
                            seg.cls > 0 ? class_signature(seg.cls, limb, axis) : ClassSignature{};
                        const double gravity = axis == Axis::x ? 1.0 : 0.0;
                        for (std::size_t i = 0; i < seg.samples; ++i) {
                            const double t = static_cast<double>(i) / rate;
                            double v = gravity;
                            if (seg.cls > 0) {
                                v += sig.dc +
                                     sig.a1 * std::sin(kTwoPi * sig.f1 * t + phase1) +
                                     sig.a2 * std::sin(kTwoPi * sig.f2 * t + phase2);
                            }
                            if (cfg.noise_std_g > 0.0) v += rng.normal(0.0, cfg.noise_std_g);
                            ch[cursor + i] = std::clamp(v, -kAccelRangeG, kAccelRangeG);
                        }
                    }
                }
                if (seg.cls > 0) {
                    for (std::size_t i = 0; i < seg.samples; ++i) {
                        (*rec.labels)[cursor + i] = seg.cls;
                    }
                }
                cursor += seg.samples;
            }
            bounds.push_back(cursor);
        }

        // A flipped device reads the world frame rotated half a turn about y:
        // x and z change sign.
        std::size_t sess_begin = 0;
        for (int sess = 0; sess < sessions; ++sess) {
            const std::size_t sess_end = bounds[static_cast<std::size_t>(sess)];
            for (LimbId limb : kAllLimbs) {
                if (!flipped[static_cast<std::size_t>(limb)][static_cast<std::size_t>(sess)]) {
                    continue;
                }
                for (Axis axis : {Axis::x, Axis::z}) {
                    auto& ch = rec.channel(limb, axis);
                    for (std::size_t i = sess_begin; i < sess_end; ++i) ch[i] = -ch[i];
                }
                result.flips.push_back({sid, limb, sess});
            }
            for (int lvl = 0; lvl < 2; ++lvl) {
                if (!swapped[static_cast<std::size_t>(lvl)][static_cast<std::size_t>(sess)]) {
                    continue;
                }
                const LimbId a = lvl == 0 ? LimbId::left_arm : LimbId::left_leg;
                const LimbId b = mirror(a);
                for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
                    auto& ca = rec.channel(a, axis);
                    auto& cb = rec.channel(b, axis);
                    for (std::size_t i = sess_begin; i < sess_end; ++i) std::swap(ca[i], cb[i]);
                }
                result.swaps.push_back({sid, lvl == 0 ? LimbLevel::upper : LimbLevel::lower, sess});
            }
            sess_begin = sess_end;
        }

        result.session_bounds.push_back(std::move(bounds));
        result.recordings.push_back(std::move(rec));
    }
    return result;
}

void write_cohort(const SynthResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    result.vocabulary.save(dir / "vocabulary.txt");
    for (const Recording& rec : result.recordings) {
        save_recording(rec, result.vocabulary, dir / (rec.subject_id + ".csv"));
    }

    nlohmann::json manifest;
    manifest["subjects"] = nlohmann::json::array();
    for (std::size_t i = 0; i < result.recordings.size(); ++i) {
        nlohmann::json entry;
        entry["id"] = result.recordings[i].subject_id;
        entry["samples"] = result.recordings[i].sample_count();
        entry["session_bounds"] = result.session_bounds[i];
        manifest["subjects"].push_back(entry);
    }
    manifest["flips"] = nlohmann::json::array();
    for (const FlipEvent& f : result.flips) {
        manifest["flips"].push_back(
            {{"subject", f.subject_id}, {"limb", limb_name(f.limb)}, {"session", f.session}});
    }
    manifest["swaps"] = nlohmann::json::array();
    for (const SwapEvent& s : result.swaps) {
        manifest["swaps"].push_back(
            {{"subject", s.subject_id},
             {"pair", s.pair == LimbLevel::upper ? "arms" : "legs"},
             {"session", s.session}});
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) raise(Errc::io_error, "cannot write manifest");
    out << manifest.dump(2) << '\n';
}

} // namespace harp
