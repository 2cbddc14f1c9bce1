#pragma once

#include <cmath>
#include <cstdint>

#include "mechlab/core.hpp"
#include "mechlab/math.hpp"

namespace mechlab {

/// Monte-Carlo point estimate with its standard error.
struct EstimateWithCI {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
};

/// Streaming mean/variance accumulator (Welford), mergeable in fixed chunk
/// order so parallel runs reproduce the single-threaded result bit for bit.
class RunningStat {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningStat& other) {
        if (other.n_ == 0) return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(other.n_);
        const double delta = other.mean_ - mean_;
        mean_ += delta * nb / (na + nb);
        m2_ += other.m2_ + delta * delta * na * nb / (na + nb);
        n_ += other.n_;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double sample_variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    double std_error() const {
        return n_ > 1 ? std::sqrt(sample_variance() / static_cast<double>(n_)) : 0.0;
    }

    EstimateWithCI estimate() const {
        if (n_ == 0) throw ParameterError("RunningStat: no samples");
        return EstimateWithCI{mean_, std_error(), n_};
    }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Bernoulli counter; exact integer merge makes estimates independent of
/// accumulation order.
struct BinomialCounter {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;

    void add(bool hit) {
        ++trials;
        hits += hit ? 1u : 0u;
    }
    void merge(const BinomialCounter& other) {
        hits += other.hits;
        trials += other.trials;
    }

    EstimateWithCI estimate() const {
        if (trials == 0) throw ParameterError("BinomialCounter: no trials");
        const double p = static_cast<double>(hits) / static_cast<double>(trials);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
        return EstimateWithCI{p, se, trials};
    }
};

/// One-sided p-value for H0: true mean <= 0, normal approximation.
inline double one_sided_p_value(const EstimateWithCI& e) {
    if (e.std_error == 0.0) return e.mean > 0.0 ? 0.0 : 1.0;
    return 1.0 - norm_cdf(e.mean / e.std_error);
}

}  // namespace mechlab
