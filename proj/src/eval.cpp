#include "harp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "harp/rng.hpp"
#include "harp/text.hpp"

namespace harp {

int FoldAssignment::fold_of(const std::string& subject) const {
    for (const auto& [name, fold] : subject_fold) {
        if (name == subject) return fold;
    }
    raise(Errc::misaligned_folds, "subject " + subject + " has no fold");
}

FoldAssignment grouped_kfold(const std::vector<std::string>& subjects, int k, std::uint64_t seed) {
    if (k < 1) raise(Errc::invalid_config, "fold count must be positive");
    if (subjects.size() < static_cast<std::size_t>(k)) {
        raise(Errc::too_few_subjects, std::to_string(subjects.size()) + " subjects for " +
                                          std::to_string(k) + " folds");
    }
    std::vector<std::string> shuffled = subjects;
    Rng rng(seed);
    rng.shuffle(shuffled);

    FoldAssignment assignment;
    assignment.fold_count = k;
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
        assignment.subject_fold.emplace_back(shuffled[i], static_cast<int>(i % static_cast<std::size_t>(k)));
    }
    return assignment;
}

// ---------------------------------------------------------------------------
// Scoring

EvalReport macro_f1(const std::vector<int>& truth, const std::vector<int>& pred,
                    std::size_t class_count) {
    if (truth.size() != pred.size()) {
        raise(Errc::length_mismatch, "truth and prediction lengths differ");
    }
    EvalReport report;
    report.class_count = class_count;
    report.confusion.assign(class_count * class_count, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto t = static_cast<std::size_t>(truth[i]);
        const auto p = static_cast<std::size_t>(pred[i]);
        if (t >= class_count || p >= class_count) {
            raise(Errc::label_not_in_vocabulary, "label outside the class range");
        }
        ++report.confusion[t * class_count + p];
    }

    report.per_class_f1.assign(class_count, std::nan(""));
    report.included.assign(class_count, 0);
    double sum = 0.0;
    std::size_t included = 0;
    for (std::size_t c = 0; c < class_count; ++c) {
        const std::int64_t tp = report.confusion[c * class_count + c];
        std::int64_t fn = 0, fp = 0;
        for (std::size_t j = 0; j < class_count; ++j) {
            if (j != c) {
                fn += report.confusion[c * class_count + j];
                fp += report.confusion[j * class_count + c];
            }
        }
        if (tp + fp + fn == 0) continue; // class absent from truth and predictions
        const double f1 = static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
        report.per_class_f1[c] = f1;
        report.included[c] = 1;
        sum += f1;
        ++included;
    }
    report.macro_f1 = included == 0 ? 0.0 : sum / static_cast<double>(included);
    return report;
}

EvalReport evaluate_cohort(
    const std::vector<std::tuple<std::string, std::vector<int>, std::vector<int>>>& per_subject,
    std::size_t class_count) {
    std::vector<int> truth_all;
    std::vector<int> pred_all;
    for (const auto& [subject, truth, pred] : per_subject) {
        truth_all.insert(truth_all.end(), truth.begin(), truth.end());
        pred_all.insert(pred_all.end(), pred.begin(), pred.end());
    }
    EvalReport report = macro_f1(truth_all, pred_all, class_count);
    for (const auto& [subject, truth, pred] : per_subject) {
        report.per_subject_macro_f1.emplace_back(subject,
                                                 macro_f1(truth, pred, class_count).macro_f1);
    }
    return report;
}

std::string EvalReport::to_text(const Vocabulary& vocabulary) const {
    std::string text;
    text += "macro_f1 " + format_double(macro_f1) + "\n";
    for (std::size_t c = 0; c < class_count; ++c) {
        text += "f1 " + vocabulary.name_of(static_cast<int>(c)) + " ";
        text += included[c] ? format_double(per_class_f1[c]) : "excluded";
        text += "\n";
    }
    for (const auto& [subject, f1] : per_subject_macro_f1) {
        text += "subject_macro_f1 " + subject + " " + format_double(f1) + "\n";
    }
    return text;
}

void EvalReport::save_confusion_csv(const Vocabulary& vocabulary,
                                    const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) raise(Errc::io_error, "cannot write confusion matrix " + path.string());
    out << "truth\\pred";
    for (std::size_t c = 0; c < class_count; ++c) {
        out << ',' << vocabulary.name_of(static_cast<int>(c));
    }
    out << '\n';
    for (std::size_t t = 0; t < class_count; ++t) {
        out << vocabulary.name_of(static_cast<int>(t));
        for (std::size_t p = 0; p < class_count; ++p) out << ',' << confusion_at(t, p);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Cross-validation

namespace {

std::vector<int> step_truth(const Recording& rec, double stride_s) {
    const auto stride_samples =
        static_cast<std::size_t>(std::llround(stride_s * rec.sample_rate_hz));
    const std::size_t n = rec.sample_count();
    const std::size_t steps = n / stride_samples + 1;
    std::vector<int> truth(steps);
    for (std::size_t j = 0; j < steps; ++j) {
        truth[j] = (*rec.labels)[std::min(j * stride_samples, n - 1)];
    }
    return truth;
}

} // namespace

CvResult run_cv(const std::vector<Recording>& recordings, const Vocabulary& vocabulary,
                const PipelineSettings& settings) {
    if (recordings.empty()) raise(Errc::too_few_subjects, "no recordings");
    for (const Recording& rec : recordings) {
        if (!rec.labels) raise(Errc::empty_labels, "recording " + rec.subject_id + " is unlabeled");
    }

    std::vector<std::string> subjects;
    for (const Recording& rec : recordings) {
        if (std::find(subjects.begin(), subjects.end(), rec.subject_id) == subjects.end()) {
            subjects.push_back(rec.subject_id);
        }
    }

    CvResult result;
    result.folds = grouped_kfold(subjects, settings.folds.count, settings.folds.seed);

    // Base features are extracted once and shared across folds.
    std::vector<FeatureMatrix> base;
    base.reserve(recordings.size());
    for (const Recording& rec : recordings) {
        base.push_back(
            extract(rec, settings.window, base_channel_config(settings.mode), settings.threads));
    }

    result.oof.resize(recordings.size());
    for (int fold = 0; fold < settings.folds.count; ++fold) {
        FeatureMatrix train;
        for (std::size_t i = 0; i < recordings.size(); ++i) {
            if (result.folds.fold_of(recordings[i].subject_id) != fold) {
                train.append_rows(apply_mode(base[i], settings.mode));
            }
        }
        GbdtModel model = fit(train, vocabulary.names(), settings.gbdt, settings.threads);
        for (std::size_t i = 0; i < recordings.size(); ++i) {
            if (result.folds.fold_of(recordings[i].subject_id) != fold) continue;
            ProbabilityMatrix probs =
                predict_proba(model, apply_mode(base[i], settings.mode), settings.threads);
            probs.stride_s = settings.window.stride_s;
            result.oof[i] = aggregate_variants(probs);
        }
        result.models.push_back(std::move(model));
    }

    std::vector<std::tuple<std::string, std::vector<int>, std::vector<int>>> plain;
    std::vector<std::tuple<std::string, std::vector<int>, std::vector<int>>> smoothed;
    for (std::size_t i = 0; i < recordings.size(); ++i) {
        std::vector<int> truth = step_truth(recordings[i], settings.window.stride_s);
        plain.emplace_back(recordings[i].subject_id, truth, argmax_labels(result.oof[i]));
        smoothed.emplace_back(recordings[i].subject_id, truth,
                              argmax_labels(smooth(result.oof[i], settings.smoothing)));
    }
    result.report = evaluate_cohort(plain, vocabulary.size());
    result.report_smoothed = evaluate_cohort(smoothed, vocabulary.size());
    return result;
}

} // namespace harp
