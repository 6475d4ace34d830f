#include "hri/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "hri/errors.hpp"

namespace hri {

double logsumexp(std::span<const double> values) {
    double mx = kNegInf;
    for (double v : values) mx = std::max(mx, v);
    if (mx == kNegInf) return kNegInf;
    if (std::isinf(mx)) return mx;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

std::vector<double> softmax(std::span<const double> log_weights) {
    const double z = logsumexp(log_weights);
    if (z == kNegInf) throw ArgumentError("softmax: all weights are zero");
    std::vector<double> out(log_weights.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_weights[i] - z);
    return out;
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::categorical_log(std::span<const double> log_weights) {
    const auto p = softmax(log_weights);
    return categorical(p);
}

std::size_t Rng::categorical(std::span<const double> weights) {
    if (weights.empty()) throw ArgumentError("categorical: empty weight set");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ArgumentError("categorical: negative or NaN weight");
        total += w;
    }
    if (total <= 0.0) throw ArgumentError("categorical: zero total weight");
    double u = uniform() * total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    return last_positive;
}

double Rng::normal() {
    // Box-Muller; u1 in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

MeanInterval bootstrap_mean(std::span<const double> samples, int resamples, double level,
                            std::uint64_t seed) {
    if (samples.empty()) throw ArgumentError("bootstrap_mean: no samples");
    if (resamples < 1) throw ArgumentError("bootstrap_mean: resamples must be >= 1");
    const auto n = samples.size();
    MeanInterval out;
    for (double s : samples) out.mean += s;
    out.mean /= static_cast<double>(n);

    Rng rng(seed);
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += samples[rng.next_u64() % n];
        m = acc / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double alpha = (1.0 - level) / 2.0;
    auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(means.size() - 1) + 0.5));
        return means[std::min(idx, means.size() - 1)];
    };
    out.lower = at(alpha);
    out.upper = at(1.0 - alpha);
    return out;
}

}  // namespace hri
