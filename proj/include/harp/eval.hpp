#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "harp/pipeline.hpp"
#include "harp/probability.hpp"
#include "harp/types.hpp"

namespace harp {

struct FoldAssignment {
    int fold_count = 0;
    std::vector<std::pair<std::string, int>> subject_fold; // subject -> fold

    int fold_of(const std::string& subject) const;
};

// Subjects shuffled by seed, dealt round-robin; fold sizes differ by <= 1.
FoldAssignment grouped_kfold(const std::vector<std::string>& subjects, int k, std::uint64_t seed);

struct EvalReport {
    std::size_t class_count = 0;
    double macro_f1 = 0.0;
    std::vector<double> per_class_f1;     // NaN for classes excluded from the mean
    std::vector<std::uint8_t> included;   // 0 when TP=FP=FN=0
    std::vector<std::int64_t> confusion;  // class_count x class_count, truth-major
    std::vector<std::pair<std::string, double>> per_subject_macro_f1;

    std::int64_t confusion_at(std::size_t truth, std::size_t pred) const {
        return confusion[truth * class_count + pred];
    }
    std::string to_text(const Vocabulary& vocabulary) const;
    void save_confusion_csv(const Vocabulary& vocabulary, const std::filesystem::path& path) const;
};

EvalReport macro_f1(const std::vector<int>& truth, const std::vector<int>& pred,
                    std::size_t class_count);

// Pools the confusion matrix over all pairs and records per-subject scores.
EvalReport evaluate_cohort(
    const std::vector<std::tuple<std::string, std::vector<int>, std::vector<int>>>& per_subject,
    std::size_t class_count);

struct CvResult {
    FoldAssignment folds;
    std::vector<GbdtModel> models;        // one per fold
    std::vector<ProbabilityMatrix> oof;   // one per recording, normalized, input order
    EvalReport report;                    // plain argmax
    EvalReport report_smoothed;           // smoothing applied first
};

// Grouped k-fold cross-validation over labeled recordings: trains one model
// per fold on the other folds' (augmented) rows and scores the out-of-fold
// predictions at prediction-timestep granularity, with and without smoothing.
CvResult run_cv(const std::vector<Recording>& recordings, const Vocabulary& vocabulary,
                const PipelineSettings& settings);

} // namespace harp
