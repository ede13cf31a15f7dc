#include "harp/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "harp/parallel.hpp"

namespace harp {

namespace {

// Leaf regularizer relative to the tree's root hessian, so that replicating
// the training data rescales every gain uniformly.
constexpr double kLeafL2Scale = 1e-3;
constexpr double kMinGain = 1e-12;
constexpr double kMaxNewtonStep = 10.0; // pre-learning-rate clamp
constexpr double kProbFloor = 1e-15;

} // namespace

void GbdtConfig::validate() const {
    if (iterations < 1) raise(Errc::invalid_config, "iterations must be at least 1");
    if (max_depth < 1) raise(Errc::invalid_config, "max_depth must be at least 1");
    if (histogram_bins < 2 || histogram_bins > 255) {
        raise(Errc::invalid_config, "histogram_bins must be in [2, 255]");
    }
    if (learning_rate <= 0.0) raise(Errc::invalid_config, "learning_rate must be positive");
}

double Tree::predict(const double* row) const {
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].is_leaf) {
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        const double v = row[node.feature];
        const bool left = is_missing(v) ? node.default_left : v <= node.threshold;
        idx = left ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(idx)].leaf_value;
}

std::vector<double> compute_class_weights(const std::vector<int>& labels,
                                          std::size_t class_count) {
    if (labels.empty()) raise(Errc::empty_labels, "no labels to weight");
    std::vector<std::int64_t> counts(class_count, 0);
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= class_count) {
            raise(Errc::label_not_in_vocabulary, "label index " + std::to_string(y));
        }
        ++counts[static_cast<std::size_t>(y)];
    }
    std::size_t present = 0;
    for (auto c : counts) present += c > 0 ? 1 : 0;
    std::vector<double> weights(class_count, 0.0);
    const double n = static_cast<double>(labels.size());
    for (std::size_t k = 0; k < class_count; ++k) {
        if (counts[k] > 0) {
            weights[k] = n / (static_cast<double>(present) * static_cast<double>(counts[k]));
        }
    }
    return weights;
}

// ---------------------------------------------------------------------------
// Quantile binning

namespace {

struct BinnedData {
    std::size_t rows = 0;
    std::size_t features = 0;
    std::uint8_t missing_bin = 0;              // == histogram_bins
    std::vector<std::uint8_t> bins;            // column-major [feature * rows + row]
    std::vector<std::vector<double>> edges;    // per feature, ascending cut values
};

BinnedData bin_features(const FeatureMatrix& m, int max_bins, int threads) {
    BinnedData data;
    data.rows = m.rows();
    data.features = m.cols();
    data.missing_bin = static_cast<std::uint8_t>(max_bins);
    data.bins.assign(data.rows * data.features, data.missing_bin);
    data.edges.resize(data.features);

    parallel_for(data.features, threads, [&](std::size_t f_begin, std::size_t f_end) {
        std::vector<double> sorted;
        for (std::size_t f = f_begin; f < f_end; ++f) {
            sorted.clear();
            for (std::size_t r = 0; r < data.rows; ++r) {
                const double v = m.at(r, f);
                if (!is_missing(v)) sorted.push_back(v);
            }
            if (sorted.empty()) continue; // all-missing feature, never splittable
            std::sort(sorted.begin(), sorted.end());

            auto& edges = data.edges[f];
            std::size_t distinct = 1;
            for (std::size_t i = 1; i < sorted.size(); ++i) {
                if (sorted[i] != sorted[i - 1]) ++distinct;
            }
            if (distinct <= static_cast<std::size_t>(max_bins)) {
                // One bucket per distinct value: the histogram splitter then
                // sees exactly the same candidate set as an exact splitter.
                for (std::size_t i = 1; i < sorted.size(); ++i) {
                    if (sorted[i] != sorted[i - 1]) {
                        edges.push_back(0.5 * (sorted[i] + sorted[i - 1]));
                    }
                }
            } else {
                // Mass quantiles over the distinct values; replicating every
                // row scales counts and targets alike, so the edges (and the
                // fitted model) are invariant under data duplication.
                std::vector<double> value;
                std::vector<std::size_t> cum;
                for (std::size_t i = 0; i < sorted.size(); ++i) {
                    if (i == 0 || sorted[i] != sorted[i - 1]) {
                        value.push_back(sorted[i]);
                        cum.push_back(i + 1);
                    } else {
                        ++cum.back();
                    }
                }
                const double total = static_cast<double>(sorted.size());
                std::size_t i = 0;
                for (int b = 1; b < max_bins; ++b) {
                    const double target =
                        static_cast<double>(b) * total / static_cast<double>(max_bins);
                    while (i < value.size() && static_cast<double>(cum[i]) < target) ++i;
                    if (i + 1 >= value.size()) break;
                    const double edge = 0.5 * (value[i] + value[i + 1]);
                    if (edges.empty() || edge > edges.back()) edges.push_back(edge);
                }
            }

            std::uint8_t* col = data.bins.data() + f * data.rows;
            for (std::size_t r = 0; r < data.rows; ++r) {
                const double v = m.at(r, f);
                if (is_missing(v)) continue;
                const auto it = std::lower_bound(edges.begin(), edges.end(), v);
                col[r] = static_cast<std::uint8_t>(it - edges.begin());
            }
        }
    });
    return data;
}

// ---------------------------------------------------------------------------
// Tree growing

struct Histogram {
    std::vector<double> g;
    std::vector<double> h;
    std::vector<std::int32_t> n;

    void reset(std::size_t slots) {
        g.assign(slots, 0.0);
        h.assign(slots, 0.0);
        n.assign(slots, 0);
    }
    void subtract(const Histogram& other) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] -= other.g[i];
            h[i] -= other.h[i];
            n[i] -= other.n[i];
        }
    }
};

struct SplitCandidate {
    double gain = -1.0;
    std::int32_t feature = -1;
    std::int32_t bin = -1;
    bool missing_left = true;
    double left_g = 0.0, left_h = 0.0;
    double right_g = 0.0, right_h = 0.0;
    std::int64_t left_n = 0, right_n = 0;
};

struct NodeWork {
    int tree_node = 0;
    std::size_t begin = 0, end = 0; // segment of the row-order buffer
    double g_sum = 0.0, h_sum = 0.0;
    Histogram hist;
};

class TreeBuilder {
public:
    TreeBuilder(const BinnedData& data, const GbdtConfig& cfg, int threads)
        : data_(data), cfg_(cfg), threads_(threads), stride_(data.missing_bin + std::size_t{1}) {
        order_.resize(data.rows);
        scratch_.resize(data.rows);
        feature_best_.resize(data.features);
    }

    // Grows one tree on (grad, hess) and immediately applies the shrunken
    // leaf values to the per-row scores (stride K, offset k).
    Tree grow(const double* grad, const double* hess, double* scores, std::size_t score_stride,
              std::size_t score_offset) {
        grad_ = grad;
        hess_ = hess;
        std::iota(order_.begin(), order_.end(), 0u);

        Tree tree;
        tree.nodes.emplace_back();

        std::vector<NodeWork> level(1);
        NodeWork& root = level[0];
        root.tree_node = 0;
        root.begin = 0;
        root.end = data_.rows;
        build_histogram(root);
        sum_from_hist(root);
        lambda_ = kLeafL2Scale * root.h_sum + 1e-30;

        for (int depth = 0; depth < cfg_.max_depth; ++depth) {
            std::vector<NodeWork> next;
            for (NodeWork& node : level) {
                const SplitCandidate split = find_best_split(node);
                if (split.gain <= kMinGain) {
                    finalize_leaf(tree, node, scores, score_stride, score_offset);
                    continue;
                }
                TreeNode& tn = tree.nodes[static_cast<std::size_t>(node.tree_node)];
                tn.is_leaf = false;
                tn.feature = split.feature;
                tn.threshold = data_.edges[static_cast<std::size_t>(split.feature)]
                                          [static_cast<std::size_t>(split.bin)];
                tn.default_left = split.missing_left;
                tn.left = static_cast<std::int32_t>(tree.nodes.size());
                tn.right = tn.left + 1;
                tree.nodes.emplace_back();
                tree.nodes.emplace_back();

                const std::size_t mid = partition(node, split);
                NodeWork left;
                left.tree_node = tn.left;
                left.begin = node.begin;
                left.end = mid;
                left.g_sum = split.left_g;
                left.h_sum = split.left_h;
                NodeWork right;
                right.tree_node = tn.right;
                right.begin = mid;
                right.end = node.end;
                right.g_sum = split.right_g;
                right.h_sum = split.right_h;

                if (depth + 1 < cfg_.max_depth) {
                    // Build the smaller child, derive the sibling by subtraction.
                    NodeWork* small = (left.end - left.begin) <= (right.end - right.begin)
                                          ? &left
                                          : &right;
                    NodeWork* big = small == &left ? &right : &left;
                    build_histogram(*small);
                    big->hist = std::move(node.hist);
                    big->hist.subtract(small->hist);
                }
                next.push_back(std::move(left));
                next.push_back(std::move(right));
            }
            level = std::move(next);
            if (level.empty()) break;
            if (depth + 1 == cfg_.max_depth) {
                for (NodeWork& node : level) {
                    finalize_leaf(tree, node, scores, score_stride, score_offset);
                }
            }
        }
        return tree;
    }

private:
    void sum_from_hist(NodeWork& node) {
        node.g_sum = 0.0;
        node.h_sum = 0.0;
        const double* g = node.hist.g.data();
        const double* h = node.hist.h.data();
        for (std::size_t b = 0; b < stride_; ++b) {
            node.g_sum += g[b];
            node.h_sum += h[b];
        }
    }

    void build_histogram(NodeWork& node) {
        node.hist.reset(stride_ * data_.features);
        const std::uint32_t* idx = order_.data() + node.begin;
        const std::size_t count = node.end - node.begin;
        parallel_for(data_.features, threads_, [&](std::size_t f_begin, std::size_t f_end) {
            for (std::size_t f = f_begin; f < f_end; ++f) {
                const std::uint8_t* col = data_.bins.data() + f * data_.rows;
                double* hg = node.hist.g.data() + f * stride_;
                double* hh = node.hist.h.data() + f * stride_;
                std::int32_t* hn = node.hist.n.data() + f * stride_;
                for (std::size_t i = 0; i < count; ++i) {
                    const std::uint32_t r = idx[i];
                    const std::uint8_t b = col[r];
                    hg[b] += grad_[r];
                    hh[b] += hess_[r];
                    ++hn[b];
                }
            }
        });
    }

    double leaf_score(double g, double h) const { return g * g / (h + lambda_); }

    SplitCandidate find_best_split(NodeWork& node) {
        const double parent = leaf_score(node.g_sum, node.h_sum);
        parallel_for(data_.features, threads_, [&](std::size_t f_begin, std::size_t f_end) {
            for (std::size_t f = f_begin; f < f_end; ++f) {
                feature_best_[f] = scan_feature(node, f, parent);
            }
        });
        SplitCandidate best;
        for (std::size_t f = 0; f < data_.features; ++f) {
            if (feature_best_[f].gain > best.gain) best = feature_best_[f];
        }
        return best;
    }

    SplitCandidate scan_feature(const NodeWork& node, std::size_t f, double parent) const {
        SplitCandidate best;
        const auto& edges = data_.edges[f];
        if (edges.empty()) return best;
        const double* hg = node.hist.g.data() + f * stride_;
        const double* hh = node.hist.h.data() + f * stride_;
        const std::int32_t* hn = node.hist.n.data() + f * stride_;

        const double miss_g = hg[data_.missing_bin];
        const double miss_h = hh[data_.missing_bin];
        const std::int64_t miss_n = hn[data_.missing_bin];
        const double total_g = node.g_sum;
        const double total_h = node.h_sum;
        const std::int64_t total_n = static_cast<std::int64_t>(node.end - node.begin);

        double left_g = 0.0, left_h = 0.0;
        std::int64_t left_n = 0;
        for (std::size_t t = 0; t < edges.size(); ++t) {
            left_g += hg[t];
            left_h += hh[t];
            left_n += hn[t];
            const double right_g = total_g - miss_g - left_g;
            const double right_h = total_h - miss_h - left_h;
            const std::int64_t right_n = total_n - miss_n - left_n;
            for (const bool missing_left : {true, false}) {
                const double lg = left_g + (missing_left ? miss_g : 0.0);
                const double lh = left_h + (missing_left ? miss_h : 0.0);
                const std::int64_t ln = left_n + (missing_left ? miss_n : 0);
                const double rg = right_g + (missing_left ? 0.0 : miss_g);
                const double rh = right_h + (missing_left ? 0.0 : miss_h);
                const std::int64_t rn = right_n + (missing_left ? 0 : miss_n);
                if (ln < 1 || rn < 1) continue;
                const double gain = leaf_score(lg, lh) + leaf_score(rg, rh) - parent;
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = static_cast<std::int32_t>(f);
                    best.bin = static_cast<std::int32_t>(t);
                    best.missing_left = missing_left;
                    best.left_g = lg;
                    best.left_h = lh;
                    best.left_n = ln;
                    best.right_g = rg;
                    best.right_h = rh;
                    best.right_n = rn;
                }
            }
        }
        return best;
    }

    std::size_t partition(const NodeWork& node, const SplitCandidate& split) {
        const std::uint8_t* col =
            data_.bins.data() + static_cast<std::size_t>(split.feature) * data_.rows;
        const std::uint8_t bin = static_cast<std::uint8_t>(split.bin);
        std::size_t lo = 0;
        std::size_t hi = 0;
        std::uint32_t* seg = order_.data() + node.begin;
        const std::size_t count = node.end - node.begin;
        std::uint32_t* tmp = scratch_.data();
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint32_t r = seg[i];
            const std::uint8_t b = col[r];
            const bool left = b == data_.missing_bin ? split.missing_left : b <= bin;
            if (left) seg[lo++] = r;
            else tmp[hi++] = r;
        }
        std::memcpy(seg + lo, tmp, hi * sizeof(std::uint32_t));
        return node.begin + lo;
    }

    void finalize_leaf(Tree& tree, const NodeWork& node, double* scores, std::size_t stride,
                       std::size_t offset) {
        double step = -node.g_sum / (node.h_sum + lambda_);
        step = std::clamp(step, -kMaxNewtonStep, kMaxNewtonStep);
        const double value = cfg_.learning_rate * step;
        TreeNode& tn = tree.nodes[static_cast<std::size_t>(node.tree_node)];
        tn.is_leaf = true;
        tn.leaf_value = value;
        for (std::size_t i = node.begin; i < node.end; ++i) {
            scores[order_[i] * stride + offset] += value;
        }
    }

    const BinnedData& data_;
    const GbdtConfig& cfg_;
    int threads_;
    std::size_t stride_;
    double lambda_ = 0.0;
    const double* grad_ = nullptr;
    const double* hess_ = nullptr;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> scratch_;
    std::vector<SplitCandidate> feature_best_;
};

} // namespace

// ---------------------------------------------------------------------------
// Fit

GbdtModel fit(const FeatureMatrix& m, const std::vector<std::string>& class_names,
              const GbdtConfig& config, int threads) {
    config.validate();
    if (!m.has_labels() || m.rows() == 0) raise(Errc::empty_labels, "training matrix is unlabeled");
    const std::size_t n = m.rows();
    const std::size_t k = class_names.size();

    std::vector<int> labels = m.row_label;
    std::vector<std::int64_t> counts(k, 0);
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= k) {
            raise(Errc::label_not_in_vocabulary, "label index " + std::to_string(y));
        }
        ++counts[static_cast<std::size_t>(y)];
    }
    std::size_t present = 0;
    for (auto c : counts) present += c > 0 ? 1 : 0;
    if (present < 2) raise(Errc::single_class, "training data has fewer than 2 classes");

    GbdtModel model;
    model.config = config;
    model.class_names = class_names;
    model.schema_hash = m.schema_hash();
    model.feature_count = m.cols();
    model.class_weights = config.class_weighting == ClassWeighting::balanced
                              ? compute_class_weights(labels, k)
                              : std::vector<double>(k, 1.0);

    // Normalized row weights: duplicating the data leaves gradients, gains and
    // leaf values unchanged.
    std::vector<double> row_weight(n);
    double weight_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        row_weight[i] = model.class_weights[static_cast<std::size_t>(labels[i])];
        weight_total += row_weight[i];
    }
    for (double& w : row_weight) w /= weight_total;

    BinnedData binned = bin_features(m, config.histogram_bins, threads);
    model.bin_edges = binned.edges;

    std::vector<double> scores(n * k, 0.0);
    std::vector<double> probs(n * k, 0.0);
    std::vector<double> grad(n);
    std::vector<double> hess(n);

    const auto compute_probs = [&] {
        parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const double* s = scores.data() + i * k;
                double* p = probs.data() + i * k;
                double mx = s[0];
                for (std::size_t c = 1; c < k; ++c) mx = std::max(mx, s[c]);
                double sum = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    p[c] = std::exp(s[c] - mx);
                    sum += p[c];
                }
                const double inv = 1.0 / sum;
                for (std::size_t c = 0; c < k; ++c) p[c] *= inv;
            }
        });
    };
    const auto weighted_loss = [&] {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = probs[i * k + static_cast<std::size_t>(labels[i])];
            loss -= row_weight[i] * std::log(std::max(p, kProbFloor));
        }
        return loss;
    };

    TreeBuilder builder(binned, config, threads);
    model.trees.reserve(static_cast<std::size_t>(config.iterations) * k);
    model.train_loss.reserve(static_cast<std::size_t>(config.iterations));

    for (int iter = 0; iter < config.iterations; ++iter) {
        compute_probs();
        if (iter > 0) model.train_loss.push_back(weighted_loss());
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = probs[i * k + c];
                const double y = labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
                grad[i] = row_weight[i] * (p - y);
                hess[i] = row_weight[i] * p * (1.0 - p);
            }
            model.trees.push_back(builder.grow(grad.data(), hess.data(), scores.data(), k, c));
        }
    }
    compute_probs();
    model.train_loss.push_back(weighted_loss());
    return model;
}

// ---------------------------------------------------------------------------
// Predict

ProbabilityMatrix predict_proba(const GbdtModel& model, const FeatureMatrix& m, int threads) {
    if (m.cols() != model.feature_count || m.schema_hash() != model.schema_hash) {
        raise(Errc::schema_mismatch, "feature matrix schema differs from the model's");
    }
    const std::size_t n = m.rows();
    const std::size_t k = model.class_count();

    ProbabilityMatrix out;
    out.recording_ids = m.recording_ids;
    out.row_recording = m.row_recording;
    out.row_timestep = m.row_timestep;
    out.row_variant = m.row_variant;
    out.class_count = k;
    out.values.assign(n * k, 0.0);

    const std::size_t iterations = model.class_names.empty() ? 0 : model.trees.size() / k;
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> scores(k);
        for (std::size_t i = begin; i < end; ++i) {
            const double* row = m.row(i);
            std::fill(scores.begin(), scores.end(), 0.0);
            for (std::size_t it = 0; it < iterations; ++it) {
                for (std::size_t c = 0; c < k; ++c) {
                    scores[c] += model.trees[it * k + c].predict(row);
                }
            }
            double mx = scores[0];
            for (std::size_t c = 1; c < k; ++c) mx = std::max(mx, scores[c]);
            double sum = 0.0;
            double* p = out.row(i);
            for (std::size_t c = 0; c < k; ++c) {
                p[c] = std::exp(scores[c] - mx);
                sum += p[c];
            }
            const double inv = 1.0 / sum;
            for (std::size_t c = 0; c < k; ++c) p[c] *= inv;
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr char kModelMagic[8] = {'H', 'A', 'R', 'P', 'G', 'B', '0', '1'};

template <class T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

} // namespace

void GbdtModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write model " + path.string());
    out.write(kModelMagic, sizeof(kModelMagic));
    write_pod(out, static_cast<std::int32_t>(config.iterations));
    write_pod(out, static_cast<std::int32_t>(config.max_depth));
    write_pod(out, static_cast<std::int32_t>(config.histogram_bins));
    write_pod(out, static_cast<std::uint8_t>(config.class_weighting));
    write_pod(out, config.learning_rate);
    write_pod(out, config.seed);
    write_pod(out, static_cast<std::uint32_t>(class_names.size()));
    for (const auto& name : class_names) {
        write_pod(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    out.write(reinterpret_cast<const char*>(class_weights.data()),
              static_cast<std::streamsize>(class_weights.size() * sizeof(double)));
    write_pod(out, schema_hash);
    write_pod(out, static_cast<std::uint64_t>(feature_count));
    for (const auto& edges : bin_edges) {
        write_pod(out, static_cast<std::uint32_t>(edges.size()));
        out.write(reinterpret_cast<const char*>(edges.data()),
                  static_cast<std::streamsize>(edges.size() * sizeof(double)));
    }
    write_pod(out, static_cast<std::uint64_t>(trees.size()));
    for (const auto& tree : trees) {
        write_pod(out, static_cast<std::uint32_t>(tree.nodes.size()));
        for (const auto& node : tree.nodes) {
            write_pod(out, static_cast<std::uint8_t>(node.is_leaf));
            write_pod(out, node.leaf_value);
            write_pod(out, node.feature);
            write_pod(out, node.threshold);
            write_pod(out, static_cast<std::uint8_t>(node.default_left));
            write_pod(out, node.left);
            write_pod(out, node.right);
        }
    }
    write_pod(out, static_cast<std::uint64_t>(train_loss.size()));
    out.write(reinterpret_cast<const char*>(train_loss.data()),
              static_cast<std::streamsize>(train_loss.size() * sizeof(double)));
    if (!out) raise(Errc::io_error, "short write on " + path.string());
}

GbdtModel GbdtModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open model " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        raise(Errc::io_error, path.string() + " is not a model file");
    }
    GbdtModel model;
    model.config.iterations = read_pod<std::int32_t>(in);
    model.config.max_depth = read_pod<std::int32_t>(in);
    model.config.histogram_bins = read_pod<std::int32_t>(in);
    model.config.class_weighting = static_cast<ClassWeighting>(read_pod<std::uint8_t>(in));
    model.config.learning_rate = read_pod<double>(in);
    model.config.seed = read_pod<std::uint64_t>(in);
    const auto k = read_pod<std::uint32_t>(in);
    model.class_names.resize(k);
    for (auto& name : model.class_names) {
        const auto len = read_pod<std::uint32_t>(in);
        name.assign(len, '\0');
        in.read(name.data(), len);
    }
    model.class_weights.resize(k);
    in.read(reinterpret_cast<char*>(model.class_weights.data()),
            static_cast<std::streamsize>(k * sizeof(double)));
    model.schema_hash = read_pod<std::uint64_t>(in);
    model.feature_count = read_pod<std::uint64_t>(in);
    model.bin_edges.resize(model.feature_count);
    for (auto& edges : model.bin_edges) {
        const auto cnt = read_pod<std::uint32_t>(in);
        edges.resize(cnt);
        in.read(reinterpret_cast<char*>(edges.data()),
                static_cast<std::streamsize>(cnt * sizeof(double)));
    }
    const auto tree_count = read_pod<std::uint64_t>(in);
    model.trees.resize(tree_count);
    for (auto& tree : model.trees) {
        const auto node_count = read_pod<std::uint32_t>(in);
        tree.nodes.resize(node_count);
        for (auto& node : tree.nodes) {
            node.is_leaf = read_pod<std::uint8_t>(in) != 0;
            node.leaf_value = read_pod<double>(in);
            node.feature = read_pod<std::int32_t>(in);
            node.threshold = read_pod<double>(in);
            node.default_left = read_pod<std::uint8_t>(in) != 0;
            node.left = read_pod<std::int32_t>(in);
            node.right = read_pod<std::int32_t>(in);
        }
    }
    const auto loss_count = read_pod<std::uint64_t>(in);
    model.train_loss.resize(loss_count);
    in.read(reinterpret_cast<char*>(model.train_loss.data()),
            static_cast<std::streamsize>(loss_count * sizeof(double)));
    if (!in) raise(Errc::io_error, "truncated model file " + path.string());
    return model;
}

} // namespace harp
