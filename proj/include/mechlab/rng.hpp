#pragma once

#include <cstdint>
#include <random>

#include "mechlab/core.hpp"
#include "mechlab/math.hpp"

namespace mechlab {

/// (master_seed, stream_id) fully determines a generated sequence. Parallel
/// work is partitioned into chunks; chunk c draws from stream_id + c, so
/// results never depend on thread count or scheduling.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    SeedSpec with_stream_offset(std::uint64_t offset) const {
        return SeedSpec{master_seed, stream_id + offset};
    }

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// One deterministic random stream. mt19937_64 is fully specified by the
/// standard, and all variate transforms here avoid the implementation-defined
/// std::*_distribution classes, so sequences are reproducible across hosts.
class RngStream {
public:
    explicit RngStream(SeedSpec seed) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(seed.master_seed),
            static_cast<std::uint32_t>(seed.master_seed >> 32),
            static_cast<std::uint32_t>(seed.stream_id),
            static_cast<std::uint32_t>(seed.stream_id >> 32),
        };
        gen_.seed(seq);
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on the open interval (0,1): never returns 0 or 1.
    double next_open01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform index in {0, ..., bound-1}.
    int next_index(int bound) {
        int r = static_cast<int>(next_open01() * bound);
        return r < bound ? r : bound - 1;
    }

    /// Standard normal via inverse-CDF transform.
    double next_normal() { return norm_quantile(next_open01()); }

private:
    std::mt19937_64 gen_;
};

}  // namespace mechlab
