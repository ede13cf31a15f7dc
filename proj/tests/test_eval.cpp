#include <doctest.h>

#include <cmath>
#include <set>

#include "harp/eval.hpp"
#include "harp/synth.hpp"
#include "test_helpers.hpp"

using namespace harp;

TEST_CASE("grouped kfold deals shuffled subjects round-robin") {
    std::vector<std::string> subjects;
    for (int i = 0; i < 18; ++i) subjects.push_back("s" + std::to_string(i));
    const FoldAssignment folds = grouped_kfold(subjects, 3, 7);
    CHECK(folds.fold_count == 3);
    std::array<int, 3> sizes{};
    std::set<std::string> seen;
    for (const auto& [subject, fold] : folds.subject_fold) {
        ++sizes[static_cast<std::size_t>(fold)];
        seen.insert(subject);
    }
    CHECK(seen.size() == 18);
    CHECK(sizes[0] == 6);
    CHECK(sizes[1] == 6);
    CHECK(sizes[2] == 6);
}

TEST_CASE("grouped kfold with 4 subjects gives sizes 2/1/1") {
    const FoldAssignment folds = grouped_kfold({"a", "b", "c", "d"}, 3, 1);
    std::array<int, 3> sizes{};
    for (const auto& [subject, fold] : folds.subject_fold) {
        ++sizes[static_cast<std::size_t>(fold)];
    }
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::array<int, 3>{1, 1, 2});
}

TEST_CASE("grouped kfold is deterministic per seed") {
    std::vector<std::string> subjects{"a", "b", "c", "d", "e", "f", "g"};
    const FoldAssignment f1 = grouped_kfold(subjects, 3, 42);
    const FoldAssignment f2 = grouped_kfold(subjects, 3, 42);
    CHECK(f1.subject_fold == f2.subject_fold);
    const FoldAssignment f3 = grouped_kfold(subjects, 3, 43);
    CHECK(f1.subject_fold != f3.subject_fold);
}

TEST_CASE("grouped kfold rejects too few subjects") {
    CHECK_THROWS_AS(grouped_kfold({"a", "b"}, 3, 0), Error);
}

TEST_CASE("macro f1 hand-computed examples") {
    SUBCASE("perfect predictions") {
        const std::vector<int> y{0, 1, 2, 1, 0, 2};
        const EvalReport r = macro_f1(y, y, 3);
        CHECK(r.macro_f1 == doctest::Approx(1.0));
    }
    SUBCASE("binary example") {
        // truth (1,1,0,0), pred (1,0,0,0): F1_1 = 2/3, F1_0 = 0.8
        const EvalReport r = macro_f1({1, 1, 0, 0}, {1, 0, 0, 0}, 2);
        CHECK(r.per_class_f1[0] == doctest::Approx(0.8));
        CHECK(r.per_class_f1[1] == doctest::Approx(2.0 / 3.0));
        CHECK(r.macro_f1 == doctest::Approx((0.8 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
    }
    SUBCASE("everything wrong") {
        const EvalReport r = macro_f1({0, 0, 1, 1}, {1, 1, 0, 0}, 2);
        CHECK(r.macro_f1 == doctest::Approx(0.0));
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(macro_f1({0, 1}, {0}, 2), Error);
    }
}

TEST_CASE("classes absent from truth and predictions are excluded") {
    const EvalReport r = macro_f1({0, 0, 1}, {0, 1, 1}, 5);
    CHECK(r.included[0] == 1);
    CHECK(r.included[1] == 1);
    CHECK(r.included[2] == 0);
    CHECK(r.included[3] == 0);
    CHECK(std::isnan(r.per_class_f1[4]));
}

TEST_CASE("macro f1 is invariant under consistent class relabeling") {
    Rng rng(5);
    std::vector<int> truth(500), pred(500);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth[i] = static_cast<int>(rng.below(4));
        pred[i] = rng.uniform01() < 0.7 ? truth[i] : static_cast<int>(rng.below(4));
    }
    const double base = macro_f1(truth, pred, 4).macro_f1;
    const std::array<int, 4> perm{2, 3, 1, 0};
    std::vector<int> truth_p(truth.size()), pred_p(pred.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth_p[i] = perm[static_cast<std::size_t>(truth[i])];
        pred_p[i] = perm[static_cast<std::size_t>(pred[i])];
    }
    CHECK(macro_f1(truth_p, pred_p, 4).macro_f1 == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("confusion matrix row sums equal truth counts") {
    Rng rng(8);
    std::vector<int> truth(300), pred(300);
    std::array<std::int64_t, 3> counts{};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth[i] = static_cast<int>(rng.below(3));
        pred[i] = static_cast<int>(rng.below(3));
        ++counts[static_cast<std::size_t>(truth[i])];
    }
    const EvalReport r = macro_f1(truth, pred, 3);
    std::int64_t total = 0;
    for (std::size_t c = 0; c < 3; ++c) {
        std::int64_t row = 0;
        for (std::size_t p = 0; p < 3; ++p) row += r.confusion_at(c, p);
        CHECK(row == counts[c]);
        total += row;
    }
    CHECK(total == 300);
}

TEST_CASE("evaluate_cohort pools confusion and reports per-subject scores") {
    const std::vector<std::tuple<std::string, std::vector<int>, std::vector<int>>> pairs{
        {"s1", {0, 1, 1}, {0, 1, 0}},
        {"s2", {1, 1, 0}, {1, 1, 0}},
    };
    const EvalReport r = evaluate_cohort(pairs, 2);
    CHECK(r.per_subject_macro_f1.size() == 2);
    CHECK(r.per_subject_macro_f1[1].second == doctest::Approx(1.0));
    std::int64_t total = 0;
    for (auto v : r.confusion) total += v;
    CHECK(total == 6);
}

namespace {

PipelineSettings quick_settings(Mode mode, std::uint64_t seed) {
    PipelineSettings s;
    s.mode = mode;
    s.gbdt.iterations = 12;
    s.gbdt.max_depth = 3;
    s.gbdt.learning_rate = 0.3;
    s.folds.count = 3;
    s.folds.seed = seed;
    return s;
}

} // namespace

TEST_CASE("run_cv covers every recording out of fold exactly once") {
    SynthConfig cfg;
    cfg.seed = 19;
    cfg.subjects = 6;
    cfg.classes = 3;
    cfg.activity_duration_min_s = 10;
    cfg.activity_duration_max_s = 14;
    cfg.null_gap_min_s = 3;
    cfg.null_gap_max_s = 5;
    const SynthResult synth = generate(cfg);
    const CvResult cv = run_cv(synth.recordings, synth.vocabulary, quick_settings(Mode::raw, 19));

    CHECK(cv.models.size() == 3);
    REQUIRE(cv.oof.size() == synth.recordings.size());
    for (std::size_t i = 0; i < cv.oof.size(); ++i) {
        const auto stride_samples = static_cast<std::size_t>(0.5 * kWearSampleRateHz);
        const std::size_t expected = synth.recordings[i].sample_count() / stride_samples + 1;
        CHECK(cv.oof[i].rows() == expected);
        CHECK(cv.oof[i].is_single_recording_series());
    }
    // synthetic activities are easy: expect a strong in-domain score
    CHECK(cv.report.macro_f1 > 0.8);
    CHECK(cv.report_smoothed.macro_f1 > 0.8);
    CHECK(cv.report.per_subject_macro_f1.size() == 6);
}

TEST_CASE("run_cv works for every augmentation mode") {
    SynthConfig cfg;
    cfg.seed = 23;
    cfg.subjects = 3;
    cfg.classes = 2;
    cfg.activity_duration_min_s = 8;
    cfg.activity_duration_max_s = 10;
    cfg.null_gap_min_s = 2;
    cfg.null_gap_max_s = 3;
    const SynthResult synth = generate(cfg);
    for (Mode mode : {Mode::smv, Mode::stat2, Mode::sort, Mode::lr_swap, Mode::ul_pair}) {
        const CvResult cv = run_cv(synth.recordings, synth.vocabulary, quick_settings(mode, 23));
        CHECK(cv.models.size() == 3);
        CHECK(cv.report.macro_f1 >= 0.0);
        CHECK(cv.report.macro_f1 <= 1.0);
    }
}

TEST_CASE("run_cv rejects unlabeled recordings") {
    SynthConfig cfg;
    cfg.subjects = 3;
    cfg.classes = 2;
    cfg.activity_duration_min_s = 4;
    cfg.activity_duration_max_s = 5;
    SynthResult synth = generate(cfg);
    synth.recordings[1].labels.reset();
    CHECK_THROWS_AS(run_cv(synth.recordings, synth.vocabulary, quick_settings(Mode::raw, 1)),
                    Error);
}
