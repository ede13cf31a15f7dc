#pragma once

// Test-only oracles: direct-definition implementations of every feature,
// written from the documented formulas with no code shared with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// p-th central moment with population normalization.
inline double central_moment(const std::vector<double>& v, int p) {
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += std::pow(x - mu, p);
    return s / static_cast<double>(v.size());
}

inline double minimum(const std::vector<double>& v) {
    return *std::min_element(v.begin(), v.end());
}
inline double maximum(const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end());
}
inline double ptp(const std::vector<double>& v) { return maximum(v) - minimum(v); }

inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}
inline double iqr(const std::vector<double>& v) {
    return quantile(v, 0.75) - quantile(v, 0.25);
}

inline double stddev(const std::vector<double>& v) { return std::sqrt(central_moment(v, 2)); }

inline double skewness(const std::vector<double>& v) {
    const double m2 = central_moment(v, 2);
    if (m2 < 1e-12) return 0.0;
    return central_moment(v, 3) / std::pow(m2, 1.5);
}

inline double kurtosis_excess(const std::vector<double>& v) {
    const double m2 = central_moment(v, 2);
    if (m2 < 1e-12) return 0.0;
    return central_moment(v, 4) / (m2 * m2) - 3.0;
}

inline std::vector<double> first_diff(const std::vector<double>& v) {
    std::vector<double> d;
    for (std::size_t i = 1; i < v.size(); ++i) d.push_back(v[i] - v[i - 1]);
    return d;
}

inline double population_variance(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return central_moment(v, 2);
}

inline double hjorth_mobility(const std::vector<double>& v) {
    const double var_x = population_variance(v);
    if (var_x <= 0.0) return 0.0;
    return std::sqrt(population_variance(first_diff(v)) / var_x);
}

inline double hjorth_complexity(const std::vector<double>& v) {
    const double mob_x = hjorth_mobility(v);
    if (mob_x <= 0.0) return 0.0;
    return hjorth_mobility(first_diff(v)) / mob_x;
}

inline double mean_crossing_rate(const std::vector<double>& v) {
    const double mu = mean(v);
    int count = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const int prev = v[i - 1] >= mu ? 1 : -1;
        const int cur = v[i] >= mu ? 1 : -1;
        if (prev != cur) ++count;
    }
    return count;
}

inline double differential_entropy(const std::vector<double>& v) {
    const double var = std::max(central_moment(v, 2), 1e-12);
    return 0.5 * std::log(2.0 * M_PI * std::exp(1.0) * var);
}

inline double petrosian_fd(const std::vector<double>& v) {
    const std::vector<double> d = first_diff(v);
    const auto sgn = [](double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); };
    int n_delta = 0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (sgn(d[i]) != sgn(d[i - 1])) ++n_delta;
    }
    const double n = static_cast<double>(v.size());
    return std::log10(n) / (std::log10(n) + std::log10(n / (n + 0.4 * n_delta)));
}

inline double katz_fd(const std::vector<double>& v) {
    const std::size_t n = v.size();
    double path = 0.0;
    for (std::size_t i = 1; i < n; ++i) path += std::abs(v[i] - v[i - 1]);
    double d = 0.0;
    for (std::size_t i = 1; i < n; ++i) d = std::max(d, std::abs(v[i] - v[0]));
    if (n <= 2 || path == 0.0 || d == 0.0) return 1.0;
    const double log_m = std::log10(static_cast<double>(n - 1));
    return log_m / (log_m + std::log10(d / path));
}

// Normalized entropy of the one-sided periodogram via a direct O(n^2) DFT.
inline double spectral_entropy(const std::vector<double>& v) {
    const std::size_t n = v.size();
    const double mu = mean(v);
    const std::size_t bins = n / 2;
    std::vector<double> power(bins + 1, 0.0);
    for (std::size_t k = 1; k <= bins; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) /
                                 static_cast<double>(n);
            acc += (v[t] - mu) * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        power[k] = std::norm(acc);
    }
    double total = 0.0;
    for (std::size_t k = 1; k <= bins; ++k) total += power[k];
    if (total < 1e-24) return 0.0;
    double entropy = 0.0;
    for (std::size_t k = 1; k <= bins; ++k) {
        const double p = power[k] / total;
        if (p > 0.0) entropy -= p * std::log2(p);
    }
    return entropy / std::log2(static_cast<double>(bins));
}

} // namespace oracle
