#pragma once

#include <filesystem>

#include "harp/pipeline.hpp"
#include "harp/synth.hpp"

namespace harp {

// JSON config file backing the CLI; every section is optional and CLI flags
// override individual fields.
struct PipelineConfig {
    PipelineSettings pipeline;
    SynthConfig synth;

    static PipelineConfig from_file(const std::filesystem::path& path);
    static PipelineConfig from_json_text(const std::string& text);
};

} // namespace harp
