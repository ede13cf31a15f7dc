#pragma once

#include <stdexcept>
#include <string>

namespace harp {

// Every failure mode the pipeline can report. The CLI maps these to
// distinct exit codes (see tools/).
enum class Errc {
    invalid_config,
    io_error,
    missing_column,
    label_not_in_vocabulary,
    empty_recording,
    not_raw_config,
    inconsistent_variants,
    empty_labels,
    single_class,
    schema_mismatch,
    misaligned_folds,
    length_mismatch,
    too_few_subjects,
    empty_predictions,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace harp
