#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "harp/model.hpp"
#include "test_helpers.hpp"

using namespace harp;

namespace {

FeatureMatrix make_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                          int classes = 2) {
    FeatureMatrix m;
    for (std::size_t c = 0; c < cols; ++c) {
        m.columns.push_back(
            {"left_arm", "x", Direction::past, static_cast<double>(c + 1), "min"});
    }
    m.recording_ids = {"m"};
    Rng rng(seed);
    m.values.resize(rows * cols);
    for (double& v : m.values) v = rng.uniform(-3.0, 3.0);
    for (std::size_t r = 0; r < rows; ++r) {
        m.row_recording.push_back(0);
        m.row_timestep.push_back(static_cast<std::int64_t>(r));
        m.row_variant.push_back(VariantTag::none_tag());
        m.row_label.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))));
    }
    return m;
}

// Two clouds separated along a noisy linear boundary in 2 features.
FeatureMatrix separable_matrix(std::size_t rows, std::uint64_t seed) {
    FeatureMatrix m = make_matrix(rows, 2, seed);
    Rng rng(seed + 1);
    for (std::size_t r = 0; r < rows; ++r) {
        const bool positive = rng.uniform01() < 0.5;
        m.row_label[r] = positive ? 1 : 0;
        m.values[r * 2 + 0] = rng.uniform(0.0, 1.0) + (positive ? 1.5 : 0.0);
        m.values[r * 2 + 1] = rng.uniform(0.0, 1.0) - (positive ? 1.5 : 0.0);
    }
    return m;
}

std::vector<std::string> names2{"a", "b"};
std::vector<std::string> names3{"a", "b", "c"};

} // namespace

TEST_CASE("balanced class weights") {
    SUBCASE("uniform counts give unit weights") {
        std::vector<int> labels;
        for (int c = 0; c < 3; ++c) {
            for (int i = 0; i < 10; ++i) labels.push_back(c);
        }
        const auto w = compute_class_weights(labels, 3);
        CHECK(w[0] == doctest::Approx(1.0));
        CHECK(w[1] == doctest::Approx(1.0));
        CHECK(w[2] == doctest::Approx(1.0));
    }
    SUBCASE("counts 30/10") {
        std::vector<int> labels(30, 0);
        labels.insert(labels.end(), 10, 1);
        const auto w = compute_class_weights(labels, 2);
        CHECK(w[0] == doctest::Approx(40.0 / 60.0).epsilon(1e-12));
        CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("absent class gets zero") {
        std::vector<int> labels(5, 0);
        labels.insert(labels.end(), 5, 2);
        const auto w = compute_class_weights(labels, 3);
        CHECK(w[0] == doctest::Approx(1.0));
        CHECK(w[1] == doctest::Approx(0.0));
        CHECK(w[2] == doctest::Approx(1.0));
    }
    SUBCASE("empty labels throw") {
        CHECK_THROWS_AS(compute_class_weights({}, 2), Error);
    }
}

TEST_CASE("separable data fits to perfect training accuracy") {
    const FeatureMatrix m = separable_matrix(200, 31);
    GbdtConfig cfg;
    cfg.iterations = 50;
    cfg.max_depth = 3;
    const GbdtModel model = fit(m, names2, cfg);
    const ProbabilityMatrix probs = predict_proba(model, m);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* p = probs.row(r);
        const int arg = p[1] > p[0] ? 1 : 0;
        correct += arg == m.row_label[r] ? 1 : 0;
    }
    CHECK(correct == m.rows());
}

TEST_CASE("probability rows are normalized and bounded") {
    const FeatureMatrix m = make_matrix(64, 5, 77, 3);
    GbdtConfig cfg;
    cfg.iterations = 20;
    const GbdtModel model = fit(m, names3, cfg);
    const ProbabilityMatrix probs = predict_proba(model, m);
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const double* p = probs.row(r);
        double sum = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(p[c] >= 0.0);
            CHECK(p[c] <= 1.0);
            sum += p[c];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("training loss is non-increasing over 100 iterations") {
    const FeatureMatrix m = make_matrix(150, 8, 13, 3);
    GbdtConfig cfg;
    cfg.iterations = 100;
    cfg.max_depth = 4;
    const GbdtModel model = fit(m, names3, cfg);
    REQUIRE(model.train_loss.size() == 100);
    for (std::size_t i = 1; i < model.train_loss.size(); ++i) {
        CHECK(model.train_loss[i] <= model.train_loss[i - 1] * (1.0 + 1e-12) + 1e-12);
    }
}

namespace {

struct OracleSplit {
    double gain = -1.0;
    int feature = -1;
    double threshold = 0.0;
    bool missing_left = true;
};

// Exhaustive exact splitter over raw values; mirrors the documented gain
// formula and tie-breaking (feature asc, threshold asc, missing-left first).
OracleSplit exact_best_split(const FeatureMatrix& m, const std::vector<double>& grad,
                             const std::vector<double>& hess) {
    double tg = 0.0, th = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        tg += grad[i];
        th += hess[i];
    }
    const double lambda = 1e-3 * th + 1e-30;
    const auto score = [&](double g, double h) { return g * g / (h + lambda); };
    const double parent = score(tg, th);

    OracleSplit best;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        std::vector<double> distinct;
        double miss_g = 0.0, miss_h = 0.0;
        std::int64_t miss_n = 0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double v = m.at(i, f);
            if (is_missing(v)) {
                miss_g += grad[i];
                miss_h += hess[i];
                ++miss_n;
            } else {
                distinct.push_back(v);
            }
        }
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t t = 0; t + 1 < distinct.size(); ++t) {
            const double threshold = 0.5 * (distinct[t] + distinct[t + 1]);
            double lg = 0.0, lh = 0.0;
            std::int64_t ln = 0;
            for (std::size_t i = 0; i < m.rows(); ++i) {
                const double v = m.at(i, f);
                if (!is_missing(v) && v <= threshold) {
                    lg += grad[i];
                    lh += hess[i];
                    ++ln;
                }
            }
            const double rg = tg - miss_g - lg;
            const double rh = th - miss_h - lh;
            const std::int64_t rn =
                static_cast<std::int64_t>(m.rows()) - miss_n - ln;
            for (const bool missing_left : {true, false}) {
                const double gl = lg + (missing_left ? miss_g : 0.0);
                const double hl = lh + (missing_left ? miss_h : 0.0);
                const std::int64_t nl = ln + (missing_left ? miss_n : 0);
                const double gr = rg + (missing_left ? 0.0 : miss_g);
                const double hr = rh + (missing_left ? 0.0 : miss_h);
                const std::int64_t nr = rn + (missing_left ? 0 : miss_n);
                if (nl < 1 || nr < 1) continue;
                const double gain = score(gl, hl) + score(gr, hr) - parent;
                if (gain > best.gain) {
                    best = {gain, static_cast<int>(f), threshold, missing_left};
                }
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("histogram splitter matches the exact splitter on <= 32 distinct values") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        FeatureMatrix m = make_matrix(120, 6, seed * 101, 2);
        Rng rng(seed);
        // quantize features to few distinct values; sprinkle missing cells
        for (std::size_t f = 0; f < m.cols(); ++f) {
            const int levels = 2 + static_cast<int>(rng.below(31)); // 2..32
            for (std::size_t r = 0; r < m.rows(); ++r) {
                double& v = m.values[r * m.cols() + f];
                if (rng.uniform01() < 0.1) {
                    v = missing_value();
                } else {
                    v = static_cast<double>(static_cast<int>(
                            rng.below(static_cast<std::uint64_t>(levels)))) *
                        0.37 - 1.0;
                }
            }
        }

        // gradients the first tree of class 0 sees: p = 1/2 everywhere
        const auto weights = compute_class_weights(m.row_label, 2);
        std::vector<double> u(m.rows());
        double total = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            u[i] = weights[static_cast<std::size_t>(m.row_label[i])];
            total += u[i];
        }
        for (double& w : u) w /= total;
        std::vector<double> grad(m.rows()), hess(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            grad[i] = u[i] * (0.5 - (m.row_label[i] == 0 ? 1.0 : 0.0));
            hess[i] = u[i] * 0.25;
        }
        const OracleSplit oracle = exact_best_split(m, grad, hess);

        GbdtConfig cfg;
        cfg.iterations = 1;
        cfg.max_depth = 1;
        cfg.histogram_bins = 32;
        const GbdtModel model = fit(m, names2, cfg);
        const TreeNode& root = model.trees[0].nodes[0];
        REQUIRE_FALSE(root.is_leaf);
        CHECK(root.feature == oracle.feature);
        CHECK(root.threshold == doctest::Approx(oracle.threshold).epsilon(1e-12));
        CHECK(root.default_left == oracle.missing_left);
    }
}

TEST_CASE("fit is deterministic and thread-count independent") {
    testutil::TempDir dir("model_det");
    const FeatureMatrix m = make_matrix(100, 10, 5, 3);
    GbdtConfig cfg;
    cfg.iterations = 12;
    cfg.seed = 9;
    const GbdtModel a = fit(m, names3, cfg, 1);
    const GbdtModel b = fit(m, names3, cfg, 2);
    a.save(dir.path() / "a.bin");
    b.save(dir.path() / "b.bin");
    std::ifstream fa(dir.path() / "a.bin", std::ios::binary);
    std::ifstream fb(dir.path() / "b.bin", std::ios::binary);
    const std::string ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    const std::string bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(ba == bb);

    const ProbabilityMatrix p1 = predict_proba(a, m, 1);
    const ProbabilityMatrix p2 = predict_proba(a, m, 2);
    CHECK(std::memcmp(p1.values.data(), p2.values.data(),
                      p1.values.size() * sizeof(double)) == 0);
}

TEST_CASE("saved models reproduce predictions bit-exactly") {
    testutil::TempDir dir("model_io");
    const FeatureMatrix m = make_matrix(80, 6, 21, 3);
    GbdtConfig cfg;
    cfg.iterations = 15;
    const GbdtModel model = fit(m, names3, cfg);
    model.save(dir.path() / "model.bin");
    const GbdtModel loaded = GbdtModel::load(dir.path() / "model.bin");
    const ProbabilityMatrix a = predict_proba(model, m);
    const ProbabilityMatrix b = predict_proba(loaded, m);
    CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
    CHECK(loaded.train_loss == model.train_loss);
    CHECK(loaded.class_weights == model.class_weights);
}

TEST_CASE("duplicating every row leaves predictions unchanged") {
    const FeatureMatrix m = make_matrix(150, 8, 3, 3);
    FeatureMatrix doubled = m;
    doubled.append_rows(m);
    GbdtConfig cfg;
    cfg.iterations = 25;
    cfg.max_depth = 3;
    const GbdtModel one = fit(m, names3, cfg);
    const GbdtModel two = fit(doubled, names3, cfg);
    const ProbabilityMatrix pa = predict_proba(one, m);
    const ProbabilityMatrix pb = predict_proba(two, m);
    for (std::size_t i = 0; i < pa.values.size(); ++i) {
        CHECK(std::abs(pa.values[i] - pb.values[i]) <= 1e-9);
    }
}

TEST_CASE("an all-missing feature is never chosen for a split") {
    FeatureMatrix m = make_matrix(100, 5, 55, 2);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        m.values[r * m.cols() + 2] = missing_value();
    }
    GbdtConfig cfg;
    cfg.iterations = 10;
    const GbdtModel model = fit(m, names2, cfg);
    for (const Tree& tree : model.trees) {
        for (const TreeNode& node : tree.nodes) {
            if (!node.is_leaf) CHECK(node.feature != 2);
        }
    }
}

TEST_CASE("a model with zero completed iterations predicts uniform rows") {
    const FeatureMatrix m = make_matrix(10, 4, 66, 2);
    GbdtModel model;
    model.class_names = {"a", "b", "c", "d"};
    model.class_weights.assign(4, 1.0);
    model.feature_count = m.cols();
    model.schema_hash = m.schema_hash();
    const ProbabilityMatrix probs = predict_proba(model, m);
    for (std::size_t i = 0; i < probs.values.size(); ++i) {
        CHECK(probs.values[i] == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("fit and predict error paths") {
    SUBCASE("single class") {
        FeatureMatrix m = make_matrix(20, 3, 8, 2);
        std::fill(m.row_label.begin(), m.row_label.end(), 1);
        try {
            fit(m, names2, GbdtConfig{});
            FAIL("expected SingleClass");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::single_class);
        }
    }
    SUBCASE("unlabeled matrix") {
        FeatureMatrix m = make_matrix(20, 3, 8, 2);
        m.row_label.clear();
        try {
            fit(m, names2, GbdtConfig{});
            FAIL("expected EmptyLabels");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::empty_labels);
        }
    }
    SUBCASE("schema mismatch on predict") {
        const FeatureMatrix m = make_matrix(30, 3, 8, 2);
        GbdtConfig cfg;
        cfg.iterations = 2;
        const GbdtModel model = fit(m, names2, cfg);
        const FeatureMatrix other = make_matrix(5, 4, 9, 2);
        try {
            predict_proba(model, other);
            FAIL("expected SchemaMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::schema_mismatch);
        }
    }
    SUBCASE("bad config") {
        GbdtConfig cfg;
        cfg.histogram_bins = 300;
        CHECK_THROWS_AS(cfg.validate(), Error);
        cfg = GbdtConfig{};
        cfg.iterations = 0;
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
}

TEST_CASE("training rows from the separable example keep their argmax") {
    const FeatureMatrix m = separable_matrix(120, 77);
    GbdtConfig cfg;
    cfg.iterations = 40;
    cfg.max_depth = 3;
    const GbdtModel model = fit(m, names2, cfg);
    const ProbabilityMatrix probs = predict_proba(model, m);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* p = probs.row(r);
        CHECK((p[1] > p[0] ? 1 : 0) == m.row_label[r]);
    }
}
