#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mechlab/core.hpp"
#include "mechlab/distributions.hpp"
#include "mechlab/mechanisms.hpp"
#include "mechlab/payoff.hpp"

namespace mechlab {

struct FrontierPoint {
    WeightVector weights;
    std::vector<EstimateWithCI> payoffs;  // one per agent
};

struct Frontier {
    std::vector<FrontierPoint> points;
    std::string model_descriptor;
    std::size_t samples_per_point = 0;
};

/// Streams per frontier point are spaced far apart so a point's chunk streams
/// never collide with another point's.
inline constexpr std::uint64_t kFrontierStreamStride = std::uint64_t{1} << 20;

/// All weight vectors (a_1/k, ..., a_n/k) with nonnegative integer a summing
/// to k, in lexicographic order of (a_1, ..., a_n). C(k+n-1, n-1) points.
inline std::vector<WeightVector> simplex_grid(int n_agents, int resolution,
                                              std::size_t max_points = 10000) {
    if (n_agents < 2) throw ParameterError("simplex_grid: need at least 2 agents");
    if (resolution < 1) throw ParameterError("simplex_grid: resolution must be at least 1");
    double count = 1.0;  // C(k+n-1, n-1)
    for (int i = 1; i < n_agents; ++i)
        count *= static_cast<double>(resolution + i) / static_cast<double>(i);
    if (count > static_cast<double>(max_points) + 0.5)
        throw ParameterError("simplex_grid: " +
                             std::to_string(static_cast<long long>(count + 0.5)) +
                             " grid points exceed cap " + std::to_string(max_points));
    std::vector<WeightVector> grid;
    // Odometer over the first n-1 entries; the last entry absorbs the
    // remainder, so each valid head yields exactly one composition.
    std::vector<int> head(static_cast<std::size_t>(n_agents - 1), 0);
    for (;;) {
        int used = 0;
        for (int v : head) used += v;
        if (used <= resolution) {
            std::vector<double> w(static_cast<std::size_t>(n_agents));
            for (int i = 0; i + 1 < n_agents; ++i)
                w[static_cast<std::size_t>(i)] =
                    static_cast<double>(head[static_cast<std::size_t>(i)]) / resolution;
            w[static_cast<std::size_t>(n_agents - 1)] =
                static_cast<double>(resolution - used) / resolution;
            grid.emplace_back(std::move(w));
        }
        int pos = n_agents - 2;
        for (; pos >= 0; --pos) {
            if (++head[static_cast<std::size_t>(pos)] <= resolution) break;
            head[static_cast<std::size_t>(pos)] = 0;
        }
        if (pos < 0) break;
    }
    return grid;
}

/// Traces the efficient frontier: for each grid weight vector, estimates the
/// ex ante payoff profile of the corresponding weighted utilitarian rule.
inline Frontier sweep_simplex(const DistributionModel& model, int resolution, SeedSpec seed,
                              std::size_t n_samples, EnginePolicy engine = {},
                              std::size_t max_points = 10000) {
    if (n_samples == 0) throw ParameterError("sweep_simplex: n_samples must be positive");
    Frontier out;
    out.model_descriptor = model.descriptor();
    out.samples_per_point = n_samples;
    const auto grid = simplex_grid(model.dims().n_agents, resolution, max_points);
    out.points.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const Mechanism mech = WeightedUtilitarianRule(grid[j]);
        auto payoffs = ex_ante_payoffs(mech, model,
                                       seed.with_stream_offset(j * kFrontierStreamStride),
                                       n_samples, engine);
        out.points.push_back(FrontierPoint{grid[j], std::move(payoffs)});
    }
    return out;
}

/// lambda-scalarized comparison of one frontier point against a candidate
/// mechanism's payoff profile.
struct ScalarizationVerdict {
    WeightVector weights;
    double frontier_value = 0.0;   // lambda . pi(f_lambda)
    double candidate_value = 0.0;  // lambda . pi(g)
    double margin = 0.0;           // frontier_value - candidate_value
    double combined_se = 0.0;
    bool passed = false;  // margin >= -3 * combined_se
};

namespace detail {

inline double scalarize(const WeightVector& w, const std::vector<EstimateWithCI>& payoffs) {
    double acc = 0.0;
    for (int i = 0; i < w.size(); ++i) acc += w[i] * payoffs[static_cast<std::size_t>(i)].mean;
    return acc;
}

// Conservative: per-agent estimates share draws, so bound the scalarized SE
// by the weighted sum rather than the root-sum-square.
inline double scalarized_se(const WeightVector& w, const std::vector<EstimateWithCI>& payoffs) {
    double acc = 0.0;
    for (int i = 0; i < w.size(); ++i)
        acc += w[i] * payoffs[static_cast<std::size_t>(i)].std_error;
    return acc;
}

}  // namespace detail

/// Efficiency check: no mechanism's scalarized payoff may exceed the
/// frontier's at the same weights beyond noise.
inline std::vector<ScalarizationVerdict> scalarization_check(const Frontier& frontier,
                                                             const Mechanism& candidate,
                                                             const DistributionModel& model,
                                                             SeedSpec seed,
                                                             std::size_t n_samples,
                                                             EnginePolicy engine = {}) {
    if (frontier.points.empty()) throw ParameterError("scalarization_check: empty frontier");
    const auto candidate_payoffs = ex_ante_payoffs(candidate, model, seed, n_samples, engine);
    std::vector<ScalarizationVerdict> out;
    out.reserve(frontier.points.size());
    for (const auto& pt : frontier.points) {
        ScalarizationVerdict v{pt.weights};
        v.frontier_value = detail::scalarize(pt.weights, pt.payoffs);
        v.candidate_value = detail::scalarize(pt.weights, candidate_payoffs);
        v.margin = v.frontier_value - v.candidate_value;
        const double se_f = detail::scalarized_se(pt.weights, pt.payoffs);
        const double se_g = detail::scalarized_se(pt.weights, candidate_payoffs);
        v.combined_se = std::sqrt(se_f * se_f + se_g * se_g);
        v.passed = v.margin >= -3.0 * v.combined_se;
        out.push_back(std::move(v));
    }
    return out;
}

enum class DominanceVerdict { dominated, not_dominated_by_frontier };

inline const char* dominance_name(DominanceVerdict v) {
    return v == DominanceVerdict::dominated ? "dominated" : "not-dominated-by-frontier";
}

/// A candidate profile is dominated when some frontier point weakly exceeds
/// it everywhere (3-SE slack per coordinate) and strictly exceeds it
/// somewhere (beyond 3 SE).
inline DominanceVerdict dominance_test(const std::vector<EstimateWithCI>& candidate,
                                       const Frontier& frontier) {
    if (frontier.points.empty()) throw ParameterError("dominance_test: empty frontier");
    for (const auto& pt : frontier.points) {
        if (pt.payoffs.size() != candidate.size())
            throw DimensionError("dominance_test: agent count mismatch");
        bool weak_all = true;
        bool strict_some = false;
        for (std::size_t i = 0; i < candidate.size(); ++i) {
            const double se = std::sqrt(pt.payoffs[i].std_error * pt.payoffs[i].std_error +
                                        candidate[i].std_error * candidate[i].std_error);
            const double diff = pt.payoffs[i].mean - candidate[i].mean;
            if (diff < -3.0 * se) {
                weak_all = false;
                break;
            }
            if (diff > 3.0 * se) strict_some = true;
        }
        if (weak_all && strict_some) return DominanceVerdict::dominated;
    }
    return DominanceVerdict::not_dominated_by_frontier;
}

}  // namespace mechlab
