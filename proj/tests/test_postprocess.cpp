#include <doctest.h>

#include <cmath>

#include "harp/postprocess.hpp"
#include "test_helpers.hpp"

using namespace harp;

namespace {

ProbabilityMatrix series(const std::vector<std::vector<double>>& rows,
                         const std::string& id = "r") {
    ProbabilityMatrix pm;
    pm.recording_ids = {id};
    pm.class_count = rows.empty() ? 0 : rows[0].size();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        pm.row_recording.push_back(0);
        pm.row_timestep.push_back(static_cast<std::int64_t>(t));
        pm.row_variant.push_back(VariantTag::none_tag());
        pm.values.insert(pm.values.end(), rows[t].begin(), rows[t].end());
    }
    return pm;
}

ProbabilityMatrix random_series(std::uint64_t seed, std::size_t steps, std::size_t classes) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows(steps, std::vector<double>(classes));
    for (auto& row : rows) {
        double sum = 0.0;
        for (double& v : row) {
            v = rng.uniform01();
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
    return series(rows);
}

} // namespace

TEST_CASE("smoothing kernel is unit-sum with the documented tail ratio") {
    const SmoothingConfig cfg;
    const std::vector<double> kernel = cfg.kernel();
    REQUIRE(kernel.size() == 21);
    double sum = 0.0;
    for (double w : kernel) sum += w;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    // w_10 / w_0 = exp(-100/72)
    CHECK(std::abs(kernel[20] / kernel[10] - std::exp(-100.0 / 72.0)) <= 1e-12);
    CHECK(std::abs(kernel[0] / kernel[10] - std::exp(-100.0 / 72.0)) <= 1e-12);
}

TEST_CASE("smoothing a constant-in-time matrix is the identity") {
    const ProbabilityMatrix pm = series(std::vector<std::vector<double>>(40, {0.2, 0.5, 0.3}));
    const ProbabilityMatrix out = smooth(pm, SmoothingConfig{});
    for (std::size_t i = 0; i < pm.values.size(); ++i) {
        CHECK(out.values[i] == doctest::Approx(pm.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("smoothing preserves row normalization") {
    const ProbabilityMatrix pm = random_series(7, 100, 5);
    const ProbabilityMatrix out = smooth(pm, SmoothingConfig{});
    for (std::size_t r = 0; r < out.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < out.class_count; ++c) sum += out.row(r)[c];
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("smoothing is linear") {
    const ProbabilityMatrix p = random_series(3, 60, 4);
    const ProbabilityMatrix q = random_series(4, 60, 4);
    const double a = 0.3, b = 0.7;
    ProbabilityMatrix mix = p;
    for (std::size_t i = 0; i < mix.values.size(); ++i) {
        mix.values[i] = a * p.values[i] + b * q.values[i];
    }
    const SmoothingConfig cfg;
    const ProbabilityMatrix sp = smooth(p, cfg);
    const ProbabilityMatrix sq = smooth(q, cfg);
    const ProbabilityMatrix sm = smooth(mix, cfg);
    for (std::size_t i = 0; i < sm.values.size(); ++i) {
        CHECK(sm.values[i] == doctest::Approx(a * sp.values[i] + b * sq.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("smoothing with half width 0 is the identity") {
    const ProbabilityMatrix pm = random_series(9, 30, 3);
    SmoothingConfig cfg;
    cfg.half_width_steps = 0;
    const ProbabilityMatrix out = smooth(pm, cfg);
    for (std::size_t i = 0; i < pm.values.size(); ++i) {
        CHECK(out.values[i] == doctest::Approx(pm.values[i]).epsilon(1e-15));
    }
}

TEST_CASE("an isolated single-step flip is removed by smoothing") {
    std::vector<std::vector<double>> rows(41, {0.9, 0.1});
    rows[20] = {0.1, 0.9}; // impulse inside a long run of class 0
    const ProbabilityMatrix out = smooth(series(rows), SmoothingConfig{});
    const std::vector<int> labels = argmax_labels(out);
    for (int y : labels) CHECK(y == 0);
}

TEST_CASE("kfold voting sums then normalizes") {
    SUBCASE("identical matrices vote to themselves") {
        const ProbabilityMatrix pm = random_series(11, 25, 4);
        const ProbabilityMatrix voted = kfold_vote({pm, pm, pm});
        for (std::size_t i = 0; i < pm.values.size(); ++i) {
            CHECK(voted.values[i] == doctest::Approx(pm.values[i]).epsilon(1e-12));
        }
        const ProbabilityMatrix summed = kfold_sum({pm, pm, pm});
        for (std::size_t r = 0; r < summed.rows(); ++r) {
            double sum = 0.0;
            for (std::size_t c = 0; c < summed.class_count; ++c) sum += summed.row(r)[c];
            CHECK(std::abs(sum - 3.0) <= 1e-9);
        }
    }
    SUBCASE("2:1 disagreement averages to 2/3") {
        const ProbabilityMatrix a = series({{1, 0}});
        const ProbabilityMatrix b = series({{0, 1}});
        const ProbabilityMatrix voted = kfold_vote({a, b, a});
        CHECK(voted.values[0] == doctest::Approx(2.0 / 3.0));
        CHECK(voted.values[1] == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("fold order does not matter") {
        const ProbabilityMatrix a = random_series(21, 10, 3);
        const ProbabilityMatrix b = random_series(22, 10, 3);
        const ProbabilityMatrix c = random_series(23, 10, 3);
        const ProbabilityMatrix v1 = kfold_vote({a, b, c});
        const ProbabilityMatrix v2 = kfold_vote({c, a, b});
        for (std::size_t i = 0; i < v1.values.size(); ++i) {
            CHECK(v1.values[i] == doctest::Approx(v2.values[i]).epsilon(1e-12));
        }
    }
    SUBCASE("misaligned folds are rejected") {
        const ProbabilityMatrix a = random_series(31, 10, 3);
        const ProbabilityMatrix b = random_series(32, 11, 3);
        CHECK_THROWS_AS(kfold_vote({a, b}), Error);
    }
}

namespace {

// Summed matrix (3 folds) holding probability `p` for class c and the rest on
// null, over [begin, end); elsewhere null-dominant.
ProbabilityMatrix boost_series(std::size_t steps, std::size_t cls, double p, std::size_t begin,
                               std::size_t end) {
    std::vector<std::vector<double>> rows(steps, std::vector<double>(4, 0.0));
    for (std::size_t t = 0; t < steps; ++t) {
        if (t >= begin && t < end) {
            rows[t][cls] = 3.0 * p;
            rows[t][0] = 3.0 * (1.0 - p);
        } else {
            rows[t][0] = 2.7;
            rows[t][1] = 0.3;
        }
    }
    return series(rows);
}

} // namespace

TEST_CASE("rule boost relabels a qualifying null region") {
    // class 2 assigned 0 s but holds probability 0.3 under a 60 s null stretch
    const std::size_t steps = 400;
    const ProbabilityMatrix summed = boost_series(steps, 2, 0.3, 100, 220);
    std::vector<int> labels(steps, 0);
    const std::vector<int> out = rule_boost(summed, labels, RuleBoostConfig{});
    for (std::size_t t = 0; t < steps; ++t) {
        CHECK(out[t] == ((t >= 100 && t < 220) ? 2 : 0));
    }
}

TEST_CASE("rule boost leaves classes meeting the presence rule untouched") {
    // class 2 already assigned 90 s
    const std::size_t steps = 400;
    const ProbabilityMatrix summed = boost_series(steps, 2, 0.3, 100, 220);
    std::vector<int> labels(steps, 0);
    for (std::size_t t = 300; t < 300 + 180; ++t) labels[std::min(t, steps - 1)] = 2;
    const std::vector<int> out = rule_boost(summed, labels, RuleBoostConfig{});
    CHECK(out == labels);
}

TEST_CASE("rule boost ignores regions shorter than the minimum") {
    // qualifying run of 10 s only
    const ProbabilityMatrix summed = boost_series(400, 2, 0.3, 100, 120);
    std::vector<int> labels(400, 0);
    const std::vector<int> out = rule_boost(summed, labels, RuleBoostConfig{});
    CHECK(out == labels);
}

TEST_CASE("rule boost never relabels non-null timesteps") {
    const std::size_t steps = 400;
    const ProbabilityMatrix summed = boost_series(steps, 2, 0.45, 100, 220);
    std::vector<int> labels(steps, 0);
    for (std::size_t t = 100; t < 220; ++t) labels[t] = 3; // an actual activity
    const std::vector<int> out = rule_boost(summed, labels, RuleBoostConfig{});
    CHECK(out == labels);
}

TEST_CASE("rule boost picks the longest qualifying run") {
    std::vector<std::vector<double>> rows(500, std::vector<double>(4, 0.0));
    for (std::size_t t = 0; t < 500; ++t) {
        const bool in_a = t >= 50 && t < 130;  // 40 s
        const bool in_b = t >= 300 && t < 440; // 70 s
        if (in_a || in_b) {
            rows[t][2] = 0.9;
            rows[t][0] = 2.1;
        } else {
            rows[t][0] = 3.0;
        }
    }
    std::vector<int> labels(500, 0);
    const std::vector<int> out = rule_boost(series(rows), labels, RuleBoostConfig{});
    for (std::size_t t = 0; t < 500; ++t) {
        CHECK(out[t] == ((t >= 300 && t < 440) ? 2 : 0));
    }
}

TEST_CASE("sample expansion covers every sample with the nearest step") {
    SUBCASE("interior steps cover 25 samples each") {
        std::vector<int> labels(121);
        for (std::size_t j = 0; j < labels.size(); ++j) labels[j] = static_cast<int>(j % 7);
        const std::vector<int> out = expand_to_samples(labels, 3000, 50);
        CHECK(out.size() == 3000);
        // sample 13 is 0.26 s -> step 1; sample 12 is 0.24 s -> step 0
        CHECK(out[12] == labels[0]);
        CHECK(out[13] == labels[1]);
        std::vector<int> counts(labels.size(), 0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            // recover which step each sample used
            const double pos = static_cast<double>(i) / 25.0;
            double j = std::floor(pos + 0.5);
            counts[static_cast<std::size_t>(std::min<double>(j, 120.0))]++;
        }
        for (std::size_t j = 1; j + 1 < counts.size(); ++j) CHECK(counts[j] == 25);
    }
    SUBCASE("a single prediction fills everything") {
        const std::vector<int> out = expand_to_samples({4}, 500, 50);
        CHECK(out.size() == 500);
        for (int y : out) CHECK(y == 4);
    }
    SUBCASE("empty predictions throw") {
        CHECK_THROWS_AS(expand_to_samples({}, 10, 50), Error);
    }
}
