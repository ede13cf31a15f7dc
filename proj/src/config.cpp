#include "harp/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace harp {

namespace {

using nlohmann::json;

template <class T>
void read_field(const json& j, const char* name, T& out) {
    if (!j.contains(name)) return;
    try {
        out = j.at(name).get<T>();
    } catch (const json::exception&) {
        raise(Errc::invalid_config, std::string("bad value for \"") + name + "\"");
    }
}

void parse_pipeline(const json& j, PipelineSettings& s) {
    if (j.contains("mode")) {
        const auto name = j.at("mode").get<std::string>();
        const auto mode = parse_mode(name);
        if (!mode) raise(Errc::invalid_config, "unknown mode \"" + name + "\"");
        s.mode = *mode;
    }
    read_field(j, "threads", s.threads);
    if (j.contains("window")) {
        const json& w = j.at("window");
        read_field(w, "sizes_s", s.window.sizes_s);
        read_field(w, "stride_s", s.window.stride_s);
        read_field(w, "min_samples", s.window.min_samples);
        s.window.validate();
    }
    if (j.contains("gbdt")) {
        const json& g = j.at("gbdt");
        read_field(g, "iterations", s.gbdt.iterations);
        read_field(g, "max_depth", s.gbdt.max_depth);
        read_field(g, "histogram_bins", s.gbdt.histogram_bins);
        read_field(g, "learning_rate", s.gbdt.learning_rate);
        read_field(g, "seed", s.gbdt.seed);
        if (g.contains("class_weighting")) {
            const auto w = g.at("class_weighting").get<std::string>();
            if (w == "balanced") s.gbdt.class_weighting = ClassWeighting::balanced;
            else if (w == "none") s.gbdt.class_weighting = ClassWeighting::none;
            else raise(Errc::invalid_config, "class_weighting must be balanced or none");
        }
        s.gbdt.validate();
    }
    if (j.contains("smoothing")) {
        const json& sm = j.at("smoothing");
        read_field(sm, "half_width_steps", s.smoothing.half_width_steps);
        read_field(sm, "sigma", s.smoothing.sigma);
        s.smoothing.validate();
    }
    if (j.contains("rule_boost")) {
        const json& r = j.at("rule_boost");
        read_field(r, "min_presence_s", s.rule_boost.min_presence_s);
        read_field(r, "candidate_prob_floor", s.rule_boost.candidate_prob_floor);
        read_field(r, "min_region_s", s.rule_boost.min_region_s);
        s.rule_boost.validate();
    }
    if (j.contains("folds")) {
        const json& f = j.at("folds");
        read_field(f, "count", s.folds.count);
        read_field(f, "seed", s.folds.seed);
        if (s.folds.count < 1) raise(Errc::invalid_config, "fold count must be positive");
    }
}

void parse_synth(const json& j, SynthConfig& s) {
    read_field(j, "seed", s.seed);
    read_field(j, "subjects", s.subjects);
    read_field(j, "classes", s.classes);
    read_field(j, "activity_duration_min_s", s.activity_duration_min_s);
    read_field(j, "activity_duration_max_s", s.activity_duration_max_s);
    read_field(j, "null_gap_min_s", s.null_gap_min_s);
    read_field(j, "null_gap_max_s", s.null_gap_max_s);
    read_field(j, "sessions_per_subject", s.sessions_per_subject);
    read_field(j, "orientation_flip_prob", s.orientation_flip_prob);
    read_field(j, "limb_swap_prob", s.limb_swap_prob);
    read_field(j, "noise_std_g", s.noise_std_g);
    s.validate();
}

} // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& err) {
        raise(Errc::invalid_config, std::string("config is not valid JSON: ") + err.what());
    }
    PipelineConfig config;
    parse_pipeline(j, config.pipeline);
    if (j.contains("synth")) parse_synth(j.at("synth"), config.synth);
    return config;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::io_error, "cannot open config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

} // namespace harp
