// harp: multi-wearable workout activity detection pipeline.
//
// Subcommands cover the full flow: synth -> audit/extract/cv -> train ->
// predict -> evaluate. A JSON config file provides defaults; flags override.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harp/config.hpp"
#include "harp/eval.hpp"
#include "harp/ingest.hpp"
#include "harp/pipeline.hpp"
#include "harp/synth.hpp"
#include "harp/text.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code_for(harp::Errc code) { return 3 + static_cast<int>(code); }

struct CohortFiles {
    harp::Vocabulary vocabulary;
    std::vector<fs::path> recordings; // sorted for reproducibility
};

CohortFiles scan_cohort(const fs::path& dir) {
    CohortFiles cohort;
    const fs::path vocab_path = dir / "vocabulary.txt";
    if (!fs::exists(vocab_path)) {
        harp::raise(harp::Errc::io_error, "no vocabulary.txt in " + dir.string());
    }
    cohort.vocabulary = harp::Vocabulary::load(vocab_path);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") cohort.recordings.push_back(entry.path());
    }
    std::sort(cohort.recordings.begin(), cohort.recordings.end());
    if (cohort.recordings.empty()) {
        harp::raise(harp::Errc::io_error, "no recordings in " + dir.string());
    }
    return cohort;
}

std::vector<harp::Recording> load_cohort(const CohortFiles& cohort) {
    std::vector<harp::Recording> recordings;
    recordings.reserve(cohort.recordings.size());
    for (const auto& path : cohort.recordings) {
        recordings.push_back(harp::load_recording(path, cohort.vocabulary));
    }
    return recordings;
}

void write_sample_predictions(const std::vector<int>& labels, const harp::Vocabulary& vocabulary,
                              const fs::path& path) {
    std::ofstream out(path);
    if (!out) harp::raise(harp::Errc::io_error, "cannot write predictions " + path.string());
    out << "sample_index,label_name\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << i << ',' << vocabulary.name_of(labels[i]) << '\n';
    }
}

std::vector<int> read_sample_predictions(const fs::path& path,
                                         const harp::Vocabulary& vocabulary) {
    std::ifstream in(path);
    if (!in) harp::raise(harp::Errc::io_error, "cannot open predictions " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
        harp::raise(harp::Errc::empty_predictions, path.string());
    }
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (harp::trim(line).empty()) continue;
        const auto cells = harp::split(line, ',');
        if (cells.size() != 2) {
            harp::raise(harp::Errc::io_error, "bad prediction line in " + path.string());
        }
        labels.push_back(vocabulary.index_of(std::string(harp::trim(cells[1]))));
    }
    if (labels.empty()) harp::raise(harp::Errc::empty_predictions, path.string());
    return labels;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-wearable workout activity detection pipeline"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path;
    int threads = 0;
    std::string mode_flag;
    std::optional<std::uint64_t> seed_flag;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--threads", threads, "worker thread cap (0 = all cores)");
    app.add_option("--mode", mode_flag, "raw|smv|stat2|stat3|sort|lr_swap|ul_pair");
    app.add_option("--seed", seed_flag, "seed shared by synth, folds and training");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled cohort");
    std::string synth_out;
    std::optional<int> synth_subjects, synth_classes;
    std::optional<double> flip_prob, swap_prob, noise_std;
    synth_cmd->add_option("--out", synth_out, "output cohort directory")->required();
    synth_cmd->add_option("--subjects", synth_subjects, "number of subjects");
    synth_cmd->add_option("--classes", synth_classes, "number of workout classes");
    synth_cmd->add_option("--flip-prob", flip_prob, "per-limb per-session orientation flip probability");
    synth_cmd->add_option("--swap-prob", swap_prob, "per-pair per-session device swap probability");
    synth_cmd->add_option("--noise-std", noise_std, "accelerometer noise std in g");

    // audit
    auto* audit_cmd = app.add_subcommand("audit", "report orientation anomalies per limb half");
    std::string audit_cohort, audit_out;
    bool audit_traces = false;
    audit_cmd->add_option("--cohort", audit_cohort, "cohort directory")->required();
    audit_cmd->add_option("--out", audit_out, "orientation report CSV")->required();
    audit_cmd->add_flag("--traces", audit_traces, "also write 1 Hz rolling-median traces");

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "extract a feature matrix from a recording");
    std::string extract_input, extract_vocab, extract_out;
    extract_cmd->add_option("--recording", extract_input, "recording CSV")->required();
    extract_cmd->add_option("--vocab", extract_vocab, "vocabulary file")->required();
    extract_cmd->add_option("--out", extract_out, "output matrix base path")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "fit a model on an extracted feature matrix");
    std::string train_features, train_vocab, train_out;
    train_cmd->add_option("--features", train_features, "feature matrix base path")->required();
    train_cmd->add_option("--vocab", train_vocab, "vocabulary file")->required();
    train_cmd->add_option("--out", train_out, "output model file")->required();

    // cv
    auto* cv_cmd = app.add_subcommand("cv", "grouped k-fold cross-validation over a cohort");
    std::string cv_cohort, cv_out;
    cv_cmd->add_option("--cohort", cv_cohort, "labeled cohort directory")->required();
    cv_cmd->add_option("--out-dir", cv_out, "output directory (models + reports)")->required();

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "per-sample predictions with post-processing");
    std::string predict_cohort, predict_out;
    std::vector<std::string> predict_models;
    predict_cmd->add_option("--cohort", predict_cohort, "cohort directory")->required();
    predict_cmd->add_option("--model", predict_models, "model file (repeat for fold ensembles)")
        ->required();
    predict_cmd->add_option("--out-dir", predict_out, "output directory")->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "sample-wise macro F1 of prediction files");
    std::string eval_truth, eval_pred, eval_out;
    eval_cmd->add_option("--truth", eval_truth, "labeled cohort directory")->required();
    eval_cmd->add_option("--predictions", eval_pred, "directory of pred_<subject>.csv files")
        ->required();
    eval_cmd->add_option("--out", eval_out, "report output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        harp::PipelineConfig config;
        if (!config_path.empty()) config = harp::PipelineConfig::from_file(config_path);
        if (threads > 0) config.pipeline.threads = threads;
        if (!mode_flag.empty()) {
            const auto mode = harp::parse_mode(mode_flag);
            if (!mode) harp::raise(harp::Errc::invalid_config, "unknown mode " + mode_flag);
            config.pipeline.mode = *mode;
        }
        if (seed_flag) {
            config.synth.seed = *seed_flag;
            config.pipeline.folds.seed = *seed_flag;
            config.pipeline.gbdt.seed = *seed_flag;
        }

        if (*synth_cmd) {
            if (synth_subjects) config.synth.subjects = *synth_subjects;
            if (synth_classes) config.synth.classes = *synth_classes;
            if (flip_prob) config.synth.orientation_flip_prob = *flip_prob;
            if (swap_prob) config.synth.limb_swap_prob = *swap_prob;
            if (noise_std) config.synth.noise_std_g = *noise_std;
            const harp::SynthResult result = harp::generate(config.synth);
            harp::write_cohort(result, synth_out);
            std::cout << "wrote " << result.recordings.size() << " recordings to " << synth_out
                      << "\n";
        } else if (*audit_cmd) {
            const CohortFiles cohort = scan_cohort(audit_cohort);
            const auto recordings = load_cohort(cohort);
            const auto entries = harp::audit_orientation(recordings, audit_traces);
            harp::save_orientation_report(entries, audit_out);
            if (audit_traces) {
                const fs::path trace_dir = fs::path(audit_out).parent_path();
                for (const auto& rec : recordings) {
                    std::ofstream out(trace_dir / ("traces_" + rec.subject_id + ".csv"));
                    out << "limb,half,second,median_x\n";
                    for (const auto& e : entries) {
                        if (e.subject_id != rec.subject_id) continue;
                        for (std::size_t s = 0; s < e.trace.size(); ++s) {
                            out << harp::limb_name(e.limb) << ',' << (e.half + 1) << ',' << s
                                << ',' << harp::format_double(e.trace[s]) << '\n';
                        }
                    }
                }
            }
            int flags = 0;
            for (const auto& e : entries) flags += e.flagged ? 1 : 0;
            std::cout << "audited " << recordings.size() << " recordings, " << flags
                      << " flagged halves\n";
        } else if (*extract_cmd) {
            const auto vocabulary = harp::Vocabulary::load(extract_vocab);
            const auto rec = harp::load_recording(extract_input, vocabulary);
            const harp::FeatureMatrix m = harp::extract_for_mode(
                rec, config.pipeline.window, config.pipeline.mode, config.pipeline.threads);
            harp::save_feature_matrix(m, extract_out);
            std::cout << "wrote " << m.rows() << " x " << m.cols() << " feature matrix to "
                      << extract_out << "\n";
        } else if (*train_cmd) {
            const auto vocabulary = harp::Vocabulary::load(train_vocab);
            const harp::FeatureMatrix m = harp::load_feature_matrix(train_features);
            const harp::GbdtModel model =
                harp::fit(m, vocabulary.names(), config.pipeline.gbdt, config.pipeline.threads);
            model.save(train_out);
            std::cout << "trained " << model.completed_iterations() << " iterations on "
                      << m.rows() << " rows\n";
        } else if (*cv_cmd) {
            const CohortFiles cohort = scan_cohort(cv_cohort);
            const auto recordings = load_cohort(cohort);
            const harp::CvResult result =
                harp::run_cv(recordings, cohort.vocabulary, config.pipeline);
            fs::create_directories(cv_out);
            for (std::size_t f = 0; f < result.models.size(); ++f) {
                result.models[f].save(fs::path(cv_out) /
                                      ("model_fold" + std::to_string(f) + ".bin"));
            }
            {
                std::ofstream report(fs::path(cv_out) / "report.txt");
                report << "== without smoothing ==\n"
                       << result.report.to_text(cohort.vocabulary) << "== with smoothing ==\n"
                       << result.report_smoothed.to_text(cohort.vocabulary);
            }
            result.report.save_confusion_csv(cohort.vocabulary,
                                             fs::path(cv_out) / "confusion.csv");
            result.report_smoothed.save_confusion_csv(
                cohort.vocabulary, fs::path(cv_out) / "confusion_smoothed.csv");
            std::cout << "macro_f1 " << harp::format_double(result.report.macro_f1) << "\n";
            std::cout << "macro_f1_smoothed "
                      << harp::format_double(result.report_smoothed.macro_f1) << "\n";
        } else if (*predict_cmd) {
            const CohortFiles cohort = scan_cohort(predict_cohort);
            std::vector<harp::GbdtModel> models;
            for (const auto& path : predict_models) models.push_back(harp::GbdtModel::load(path));
            fs::create_directories(predict_out);
            for (const auto& path : cohort.recordings) {
                const auto rec = harp::load_recording(path, cohort.vocabulary);
                const std::vector<int> labels =
                    harp::predict_samples(models, rec, config.pipeline);
                write_sample_predictions(labels, cohort.vocabulary,
                                         fs::path(predict_out) /
                                             ("pred_" + rec.subject_id + ".csv"));
            }
            std::cout << "wrote predictions for " << cohort.recordings.size() << " recordings\n";
        } else if (*eval_cmd) {
            const CohortFiles cohort = scan_cohort(eval_truth);
            std::vector<std::tuple<std::string, std::vector<int>, std::vector<int>>> pairs;
            for (const auto& path : cohort.recordings) {
                const auto rec = harp::load_recording(path, cohort.vocabulary);
                if (!rec.labels) {
                    harp::raise(harp::Errc::empty_labels,
                                "recording " + rec.subject_id + " has no labels");
                }
                const fs::path pred_path =
                    fs::path(eval_pred) / ("pred_" + rec.subject_id + ".csv");
                std::vector<int> pred = read_sample_predictions(pred_path, cohort.vocabulary);
                if (pred.size() != rec.sample_count()) {
                    harp::raise(harp::Errc::length_mismatch,
                                "prediction length differs for " + rec.subject_id);
                }
                pairs.emplace_back(rec.subject_id, *rec.labels, std::move(pred));
            }
            const harp::EvalReport report = harp::evaluate_cohort(pairs, cohort.vocabulary.size());
            if (!eval_out.empty()) {
                std::ofstream out(eval_out);
                out << report.to_text(cohort.vocabulary);
            }
            std::cout << "macro_f1 " << harp::format_double(report.macro_f1) << "\n";
        }
    } catch (const harp::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code_for(err.code());
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
