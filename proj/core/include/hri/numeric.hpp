#pragma once

#include <cstdint>
#include <random>
#include <limits>
#include <span>
#include <vector>

namespace hri {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Max-shifted log-sum-exp; returns -inf for an empty span or all -inf entries.
double logsumexp(std::span<const double> values);

// exp(v - logsumexp(v)); all-(-inf) input is an error.
std::vector<double> softmax(std::span<const double> log_weights);

// Seeded generator. The engine sequence of mt19937_64 is fixed by the
// standard; the draws below avoid the implementation-defined distributions
// so sampled episodes match across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    // Index drawn with probability proportional to exp(log_weights[i]).
    std::size_t categorical_log(std::span<const double> log_weights);
    std::size_t categorical(std::span<const double> weights);
    double normal();

private:
    std::mt19937_64 engine_;
};

// Derive an independent stream seed from a base seed and a stream id.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct MeanInterval {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

// Percentile bootstrap interval of the mean.
MeanInterval bootstrap_mean(std::span<const double> samples, int resamples, double level,
                            std::uint64_t seed);

}  // namespace hri
