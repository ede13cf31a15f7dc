#include "harp/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include "harp/parallel.hpp"
#include "harp/text.hpp"

namespace harp {

// ---------------------------------------------------------------------------
// Window plan

const char* direction_name(Direction d) { return d == Direction::past ? "past" : "future"; }

void WindowPlan::validate() const {
    if (sizes_s.empty()) raise(Errc::invalid_config, "window plan needs at least one size");
    for (std::size_t i = 0; i < sizes_s.size(); ++i) {
        if (sizes_s[i] <= 0) raise(Errc::invalid_config, "window sizes must be positive");
        if (i > 0 && sizes_s[i] <= sizes_s[i - 1]) {
            raise(Errc::invalid_config, "window sizes must be strictly ascending");
        }
    }
    if (stride_s <= 0) raise(Errc::invalid_config, "stride must be positive");
    if (min_samples < 2) raise(Errc::invalid_config, "min_samples must be at least 2");
}

// ---------------------------------------------------------------------------
// Per-window features

std::array<double, 13> time_domain_features(std::span<const double> w) {
    std::array<double, 13> out;
    out.fill(missing_value());
    const std::size_t n = w.size();
    if (n < 2) return out;
    const double nn = static_cast<double>(n);

    double mn = w[0];
    double mx = w[0];
    double sum = 0.0;
    for (double v : w) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        sum += v;
    }
    const double mean = sum / nn;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : w) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nn;
    m3 /= nn;
    m4 /= nn;

    // Population variance of the first differences, two-pass so that constant
    // slopes come out exactly zero.
    const auto diff_variance = [](std::span<const double> x, int order) {
        const std::size_t m = x.size();
        if (m < static_cast<std::size_t>(order) + 2) return 0.0;
        const std::size_t cnt = m - static_cast<std::size_t>(order) - 1;
        const auto diff_at = [&](std::size_t i) {
            return order == 0 ? x[i + 1] - x[i] : x[i + 2] - 2.0 * x[i + 1] + x[i];
        };
        double s = 0.0;
        for (std::size_t i = 0; i < cnt; ++i) s += diff_at(i);
        const double mu = s / static_cast<double>(cnt);
        double var = 0.0;
        for (std::size_t i = 0; i < cnt; ++i) {
            const double d = diff_at(i) - mu;
            var += d * d;
        }
        return var / static_cast<double>(cnt);
    };
    const double var_x = m2;
    const double var_d = diff_variance(w, 0);
    const double var_dd = diff_variance(w, 1);
    const double mobility = var_x > 0.0 ? std::sqrt(var_d / var_x) : 0.0;
    const double mobility_d = var_d > 0.0 ? std::sqrt(var_dd / var_d) : 0.0;
    const double complexity = mobility > 0.0 ? mobility_d / mobility : 0.0;

    // Mean crossing rate: strict sign alternations of (x_i >= mean).
    int crossings = 0;
    bool prev_above = w[0] >= mean;
    for (std::size_t i = 1; i < n; ++i) {
        const bool above = w[i] >= mean;
        if (above != prev_above) ++crossings;
        prev_above = above;
    }

    // Petrosian: sign changes of the first difference, sign(0) = 0.
    int n_delta = 0;
    if (n >= 3) {
        const auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
        int prev = sgn(w[1] - w[0]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const int cur = sgn(w[i + 1] - w[i]);
            if (cur != prev) ++n_delta;
            prev = cur;
        }
    }
    const double log_n = std::log10(nn);
    const double petrosian =
        log_n / (log_n + std::log10(nn / (nn + 0.4 * static_cast<double>(n_delta))));

    // Katz: path length vs maximal excursion from the first sample.
    double path = 0.0;
    double excursion = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        path += std::abs(w[i] - w[i - 1]);
        excursion = std::max(excursion, std::abs(w[i] - w[0]));
    }
    double katz = 1.0;
    if (n > 2 && path > 0.0 && excursion > 0.0) {
        const double log_m = std::log10(nn - 1.0);
        katz = log_m / (log_m + std::log10(excursion / path));
    }

    // Linear-interpolation quantiles for the IQR.
    thread_local std::vector<double> sorted;
    sorted.assign(w.begin(), w.end());
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
        const double h = q * (nn - 1.0);
        const std::size_t lo = static_cast<std::size_t>(h);
        if (lo + 1 >= n) return sorted[n - 1];
        return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    };
    const double iqr = quantile(0.75) - quantile(0.25);

    constexpr double kVarianceFloor = 1e-12;
    const double skew = m2 < kVarianceFloor ? 0.0 : m3 / std::pow(m2, 1.5);
    const double kurtosis = m2 < kVarianceFloor ? 0.0 : m4 / (m2 * m2) - 3.0;
    const double diff_entropy =
        0.5 * std::log(2.0 * 3.14159265358979323846 * 2.71828182845904523536 *
                       std::max(m2, kVarianceFloor));

    out[0] = mn;
    out[1] = mx;
    out[2] = mx - mn;
    out[3] = iqr;
    out[4] = std::sqrt(m2);
    out[5] = skew;
    out[6] = kurtosis;
    out[7] = mobility;
    out[8] = complexity;
    out[9] = static_cast<double>(crossings);
    out[10] = diff_entropy;
    out[11] = petrosian;
    out[12] = katz;
    return out;
}

// ---------------------------------------------------------------------------
// Spectral entropy (periodogram via FFTW; plans cached per thread)

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftSlot {
    fftw_plan plan = nullptr;
    double* in = nullptr;
    fftw_complex* out = nullptr;
};

class FftCache {
public:
    ~FftCache() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        for (auto& [n, slot] : slots_) {
            fftw_destroy_plan(slot.plan);
            fftw_free(slot.in);
            fftw_free(slot.out);
        }
    }

    FftSlot& get(std::size_t n) {
        auto it = slots_.find(n);
        if (it != slots_.end()) return it->second;
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        FftSlot slot;
        slot.in = fftw_alloc_real(n);
        slot.out = fftw_alloc_complex(n / 2 + 1);
        slot.plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), slot.in, slot.out, FFTW_ESTIMATE);
        return slots_.emplace(n, slot).first->second;
    }

private:
    std::map<std::size_t, FftSlot> slots_;
};

thread_local FftCache tls_fft_cache;

} // namespace

double spectral_entropy(std::span<const double> w, double sample_rate_hz) {
    (void)sample_rate_hz; // bin probabilities are scale-free
    const std::size_t n = w.size();
    if (n < 4) return missing_value();

    double sum = 0.0;
    for (double v : w) sum += v;
    const double mean = sum / static_cast<double>(n);

    FftSlot& slot = tls_fft_cache.get(n);
    for (std::size_t i = 0; i < n; ++i) slot.in[i] = w[i] - mean;
    fftw_execute(slot.plan);

    // One-sided power, DC excluded.
    const std::size_t bins = n / 2;
    double total = 0.0;
    for (std::size_t k = 1; k <= bins; ++k) {
        const double re = slot.out[k][0];
        const double im = slot.out[k][1];
        total += re * re + im * im;
    }
    if (total < 1e-24) return 0.0;

    double entropy = 0.0;
    for (std::size_t k = 1; k <= bins; ++k) {
        const double re = slot.out[k][0];
        const double im = slot.out[k][1];
        const double p = (re * re + im * im) / total;
        if (p > 0.0) entropy -= p * std::log2(p);
    }
    return entropy / std::log2(static_cast<double>(bins));
}

// ---------------------------------------------------------------------------
// SMV

std::array<std::vector<double>, 4> compute_smv(const Recording& rec) {
    std::array<std::vector<double>, 4> smv;
    const std::size_t n = rec.sample_count();
    for (LimbId limb : kAllLimbs) {
        auto& out = smv[static_cast<std::size_t>(limb)];
        out.resize(n);
        const auto& x = rec.channel(limb, Axis::x);
        const auto& y = rec.channel(limb, Axis::y);
        const auto& z = rec.channel(limb, Axis::z);
        const auto& mask = rec.missing_mask(limb);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = mask[i] ? missing_value()
                             : std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
        }
    }
    return smv;
}

// ---------------------------------------------------------------------------
// Columns and schema

std::string FeatureColumnKey::to_string() const {
    return limb + "|" + signal + "|" + direction_name(direction) + "|" + format_double(window_s) +
           "|" + feature;
}

FeatureColumnKey FeatureColumnKey::parse(const std::string& line) {
    const auto fields = split(line, '|');
    if (fields.size() != 5) raise(Errc::schema_mismatch, "bad column key \"" + line + "\"");
    FeatureColumnKey key;
    key.limb = fields[0];
    key.signal = fields[1];
    if (fields[2] == "past") key.direction = Direction::past;
    else if (fields[2] == "future") key.direction = Direction::future;
    else raise(Errc::schema_mismatch, "bad direction in \"" + line + "\"");
    const auto w = parse_double(fields[3]);
    if (!w) raise(Errc::schema_mismatch, "bad window in \"" + line + "\"");
    key.window_s = *w;
    key.feature = fields[4];
    return key;
}

namespace {

bool window_has_spectral(double window_s) { return window_s > 1.0; }

void append_channel_keys(std::vector<FeatureColumnKey>& keys, const std::string& limb,
                         const std::string& signal, const WindowPlan& plan) {
    for (Direction dir : {Direction::past, Direction::future}) {
        for (double size : plan.sizes_s) {
            for (const char* feature : kTimeDomainFeatureNames) {
                keys.push_back({limb, signal, dir, size, feature});
            }
            if (window_has_spectral(size)) {
                keys.push_back({limb, signal, dir, size, kSpectralEntropyName});
            }
        }
    }
}

} // namespace

std::vector<FeatureColumnKey> make_schema(const WindowPlan& plan, ChannelConfig config) {
    plan.validate();
    std::vector<FeatureColumnKey> keys;
    for (LimbId limb : kAllLimbs) {
        if (config == ChannelConfig::raw) {
            for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
                append_channel_keys(keys, limb_name(limb), axis_name(axis), plan);
            }
        } else {
            append_channel_keys(keys, limb_name(limb), "smv", plan);
        }
    }
    return keys;
}

std::string FeatureMatrix::schema_text() const {
    std::string text;
    for (const auto& key : columns) {
        text += key.to_string();
        text += '\n';
    }
    return text;
}

std::uint64_t FeatureMatrix::schema_hash() const { return fnv1a64(schema_text()); }

void FeatureMatrix::append_rows(const FeatureMatrix& other) {
    if (rows() == 0 && columns.empty()) {
        *this = other;
        return;
    }
    if (columns != other.columns) {
        raise(Errc::schema_mismatch, "cannot append rows with a different schema");
    }
    if (has_labels() != other.has_labels() && rows() > 0 && other.rows() > 0) {
        raise(Errc::schema_mismatch, "cannot mix labeled and unlabeled rows");
    }
    std::vector<std::uint32_t> remap(other.recording_ids.size());
    for (std::size_t i = 0; i < other.recording_ids.size(); ++i) {
        const auto& id = other.recording_ids[i];
        auto it = std::find(recording_ids.begin(), recording_ids.end(), id);
        if (it == recording_ids.end()) {
            recording_ids.push_back(id);
            remap[i] = static_cast<std::uint32_t>(recording_ids.size() - 1);
        } else {
            remap[i] = static_cast<std::uint32_t>(it - recording_ids.begin());
        }
    }
    for (std::uint32_t r : other.row_recording) row_recording.push_back(remap[r]);
    row_timestep.insert(row_timestep.end(), other.row_timestep.begin(), other.row_timestep.end());
    row_variant.insert(row_variant.end(), other.row_variant.begin(), other.row_variant.end());
    row_label.insert(row_label.end(), other.row_label.begin(), other.row_label.end());
    values.insert(values.end(), other.values.begin(), other.values.end());
}

// ---------------------------------------------------------------------------
// Extraction

FeatureMatrix extract(const Recording& rec, const WindowPlan& plan, ChannelConfig config,
                      int threads) {
    plan.validate();
    rec.validate();

    const std::size_t n = rec.sample_count();
    const double rate = static_cast<double>(rec.sample_rate_hz);
    const double stride_samples_f = plan.stride_s * rate;
    const auto stride_samples = static_cast<std::size_t>(std::llround(stride_samples_f));
    if (stride_samples < 1 || std::abs(stride_samples_f - static_cast<double>(stride_samples)) > 1e-9) {
        raise(Errc::invalid_config, "stride must be a whole number of samples");
    }

    const std::size_t n_sizes = plan.sizes_s.size();
    std::vector<std::size_t> wsamp(n_sizes);
    for (std::size_t k = 0; k < n_sizes; ++k) {
        wsamp[k] = static_cast<std::size_t>(std::llround(plan.sizes_s[k] * rate));
        if (wsamp[k] < 1) raise(Errc::invalid_config, "window shorter than one sample");
    }
    const std::size_t wmax = wsamp.back();

    // Channel table; SMV channels are materialized first.
    std::array<std::vector<double>, 4> smv;
    if (config == ChannelConfig::smv) smv = compute_smv(rec);
    std::vector<const double*> channel_data;
    if (config == ChannelConfig::raw) {
        for (LimbId limb : kAllLimbs) {
            for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
                channel_data.push_back(rec.channel(limb, axis).data());
            }
        }
    } else {
        for (LimbId limb : kAllLimbs) {
            channel_data.push_back(smv[static_cast<std::size_t>(limb)].data());
        }
    }

    FeatureMatrix m;
    m.columns = make_schema(plan, config);
    const std::size_t n_rows = n / stride_samples + 1;
    const std::size_t n_cols = m.columns.size();
    m.values.assign(n_rows * n_cols, 0.0);
    m.recording_ids = {rec.subject_id};
    m.row_recording.assign(n_rows, 0);
    m.row_timestep.resize(n_rows);
    m.row_variant.assign(n_rows, VariantTag::none_tag());
    for (std::size_t j = 0; j < n_rows; ++j) m.row_timestep[j] = static_cast<std::int64_t>(j);
    if (rec.labels) {
        m.row_label.resize(n_rows);
        for (std::size_t j = 0; j < n_rows; ++j) {
            const std::size_t idx = std::min(j * stride_samples, n - 1);
            m.row_label[j] = (*rec.labels)[idx];
        }
    }

    const std::size_t spectral_per_size = 1;
    const int min_samples = plan.min_samples;
    const double sample_rate = rate;

    parallel_for(n_rows, threads, [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> buf;
        buf.reserve(wmax);
        std::vector<std::size_t> marks(n_sizes);

        for (std::size_t j = row_begin; j < row_end; ++j) {
            const std::size_t s = j * stride_samples;
            double* out = m.row(j);

            for (std::size_t c = 0; c < channel_data.size(); ++c) {
                const double* ch = channel_data[c];

                for (Direction dir : {Direction::past, Direction::future}) {
                    buf.clear();
                    if (dir == Direction::past) {
                        // Gather the largest window once; smaller windows are
                        // suffixes starting at the recorded marks.
                        const std::size_t lo = s > wmax ? s - wmax : 0;
                        std::ptrdiff_t next = static_cast<std::ptrdiff_t>(n_sizes) - 2;
                        marks[n_sizes - 1] = 0;
                        for (std::size_t i = lo; i < s; ++i) {
                            while (next >= 0 &&
                                   i >= (s > wsamp[static_cast<std::size_t>(next)]
                                             ? s - wsamp[static_cast<std::size_t>(next)]
                                             : 0)) {
                                marks[static_cast<std::size_t>(next)] = buf.size();
                                --next;
                            }
                            const double v = ch[i];
                            if (!is_missing(v)) buf.push_back(v);
                        }
                        while (next >= 0) {
                            marks[static_cast<std::size_t>(next)] = buf.size();
                            --next;
                        }
                    } else {
                        // Smaller future windows are prefixes ending at the marks.
                        const std::size_t hi = std::min(n, s + wmax);
                        std::size_t next = 0;
                        for (std::size_t i = s; i < hi; ++i) {
                            while (next < n_sizes && i >= std::min(n, s + wsamp[next])) {
                                marks[next] = buf.size();
                                ++next;
                            }
                            const double v = ch[i];
                            if (!is_missing(v)) buf.push_back(v);
                        }
                        while (next < n_sizes) {
                            marks[next] = buf.size();
                            ++next;
                        }
                    }

                    for (std::size_t k = 0; k < n_sizes; ++k) {
                        std::span<const double> window;
                        if (dir == Direction::past) {
                            window = std::span<const double>(buf.data() + marks[k],
                                                             buf.size() - marks[k]);
                        } else {
                            window = std::span<const double>(buf.data(), marks[k]);
                        }
                        const bool spectral = window_has_spectral(plan.sizes_s[k]);
                        if (window.size() < static_cast<std::size_t>(min_samples)) {
                            const std::size_t cnt =
                                kTimeDomainFeatureCount + (spectral ? spectral_per_size : 0);
                            for (std::size_t f = 0; f < cnt; ++f) *out++ = missing_value();
                            continue;
                        }
                        const auto td = time_domain_features(window);
                        for (double v : td) *out++ = v;
                        if (spectral) *out++ = spectral_entropy(window, sample_rate);
                    }
                }
            }
        }
    });

    return m;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

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

void write_string(std::ofstream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in) {
    const auto len = read_pod<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

void write_variant(std::ofstream& out, const VariantTag& t) {
    write_pod(out, static_cast<std::uint8_t>(t.kind));
    const std::uint8_t a = t.kind == VariantTag::Kind::ul_pair ? static_cast<std::uint8_t>(t.arm)
                                                               : (t.upper_swapped ? 1 : 0);
    const std::uint8_t b = t.kind == VariantTag::Kind::ul_pair ? static_cast<std::uint8_t>(t.leg)
                                                               : (t.lower_swapped ? 1 : 0);
    write_pod(out, a);
    write_pod(out, b);
}

VariantTag read_variant(std::ifstream& in) {
    const auto kind = static_cast<VariantTag::Kind>(read_pod<std::uint8_t>(in));
    const auto a = read_pod<std::uint8_t>(in);
    const auto b = read_pod<std::uint8_t>(in);
    switch (kind) {
    case VariantTag::Kind::none: return VariantTag::none_tag();
    case VariantTag::Kind::lr_swap: return VariantTag::lr(a != 0, b != 0);
    case VariantTag::Kind::ul_pair:
        return VariantTag::ul(static_cast<LimbId>(a), static_cast<LimbId>(b));
    }
    raise(Errc::io_error, "corrupt variant tag");
}

constexpr char kMatrixMagic[8] = {'H', 'A', 'R', 'P', 'F', 'M', '0', '1'};

} // namespace

void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& base) {
    {
        std::ofstream schema(base.string() + ".schema");
        if (!schema) raise(Errc::io_error, "cannot write schema " + base.string() + ".schema");
        schema << m.schema_text();
    }
    std::ofstream out(base, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write feature matrix " + base.string());
    out.write(kMatrixMagic, sizeof(kMatrixMagic));
    write_pod(out, static_cast<std::uint64_t>(m.rows()));
    write_pod(out, static_cast<std::uint64_t>(m.cols()));
    write_pod(out, m.schema_hash());
    write_pod(out, static_cast<std::uint8_t>(m.has_labels() ? 1 : 0));
    write_pod(out, static_cast<std::uint32_t>(m.recording_ids.size()));
    for (const auto& id : m.recording_ids) write_string(out, id);
    out.write(reinterpret_cast<const char*>(m.row_recording.data()),
              static_cast<std::streamsize>(m.row_recording.size() * sizeof(std::uint32_t)));
    out.write(reinterpret_cast<const char*>(m.row_timestep.data()),
              static_cast<std::streamsize>(m.row_timestep.size() * sizeof(std::int64_t)));
    for (const auto& v : m.row_variant) write_variant(out, v);
    if (m.has_labels()) {
        out.write(reinterpret_cast<const char*>(m.row_label.data()),
                  static_cast<std::streamsize>(m.row_label.size() * sizeof(int)));
    }
    out.write(reinterpret_cast<const char*>(m.values.data()),
              static_cast<std::streamsize>(m.values.size() * sizeof(double)));
    if (!out) raise(Errc::io_error, "short write on " + base.string());
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& base) {
    FeatureMatrix m;
    {
        std::ifstream schema(base.string() + ".schema");
        if (!schema) raise(Errc::io_error, "cannot open schema " + base.string() + ".schema");
        std::string line;
        while (std::getline(schema, line)) {
            if (!trim(line).empty()) m.columns.push_back(FeatureColumnKey::parse(line));
        }
    }
    std::ifstream in(base, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open feature matrix " + base.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMatrixMagic, sizeof(magic)) != 0) {
        raise(Errc::io_error, base.string() + " is not a feature matrix file");
    }
    const auto rows = read_pod<std::uint64_t>(in);
    const auto cols = read_pod<std::uint64_t>(in);
    const auto hash = read_pod<std::uint64_t>(in);
    const bool has_labels = read_pod<std::uint8_t>(in) != 0;
    if (cols != m.columns.size() || hash != m.schema_hash()) {
        raise(Errc::schema_mismatch, "schema sidecar does not match " + base.string());
    }
    const auto id_count = read_pod<std::uint32_t>(in);
    m.recording_ids.reserve(id_count);
    for (std::uint32_t i = 0; i < id_count; ++i) m.recording_ids.push_back(read_string(in));
    m.row_recording.resize(rows);
    in.read(reinterpret_cast<char*>(m.row_recording.data()),
            static_cast<std::streamsize>(rows * sizeof(std::uint32_t)));
    m.row_timestep.resize(rows);
    in.read(reinterpret_cast<char*>(m.row_timestep.data()),
            static_cast<std::streamsize>(rows * sizeof(std::int64_t)));
    m.row_variant.reserve(rows);
    for (std::uint64_t i = 0; i < rows; ++i) m.row_variant.push_back(read_variant(in));
    if (has_labels) {
        m.row_label.resize(rows);
        in.read(reinterpret_cast<char*>(m.row_label.data()),
                static_cast<std::streamsize>(rows * sizeof(int)));
    }
    m.values.resize(rows * cols);
    in.read(reinterpret_cast<char*>(m.values.data()),
            static_cast<std::streamsize>(m.values.size() * sizeof(double)));
    if (!in) raise(Errc::io_error, "truncated feature matrix " + base.string());
    return m;
}

} // namespace harp
