#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "mechlab/core.hpp"
#include "mechlab/distributions.hpp"
#include "mechlab/stats.hpp"

namespace mechlab {

/// Worker count for estimators. Chunk layout is fixed (kSampleChunkSize) and
/// chunk results merge in index order, so thread count never changes output.
struct EnginePolicy {
    int threads = 1;
};

struct InterimQuery {
    int agent = 0;
    TypeVector true_type;
    TypeVector reported_type;

    static InterimQuery truthful(int agent, TypeVector u) {
        InterimQuery q{agent, u, {}};
        q.reported_type = std::move(u);
        return q;
    }

    void validate(const ModelDims& dims) const {
        if (agent < 0 || agent >= dims.n_agents)
            throw DimensionError("InterimQuery: agent index out of range");
        validate_type_vector(true_type, dims.n_alternatives);
        validate_type_vector(reported_type, dims.n_alternatives);
    }
};

namespace detail {

/// Runs body(rng, count, acc) once per chunk, possibly across threads, and
/// returns per-chunk accumulators in chunk order. Chunk c draws from stream
/// seed + c regardless of which worker claims it.
template <class Acc, class ChunkBody>
std::vector<Acc> run_chunks(std::size_t n_samples, SeedSpec seed, int threads, ChunkBody body) {
    const std::size_t n_chunks = (n_samples + kSampleChunkSize - 1) / kSampleChunkSize;
    std::vector<Acc> accs(n_chunks);
    auto work = [&](std::size_t c) {
        RngStream rng(seed.with_stream_offset(c));
        const std::size_t lo = c * kSampleChunkSize;
        const std::size_t count = std::min(kSampleChunkSize, n_samples - lo);
        body(rng, count, accs[c]);
    };
    const std::size_t workers =
        std::min<std::size_t>(threads < 1 ? 1 : static_cast<std::size_t>(threads), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) work(c);
        return accs;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
                if (failed.load(std::memory_order_relaxed)) return;
                try {
                    work(c);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return accs;
}

inline std::vector<EstimateWithCI> merge_stat_vectors(std::vector<std::vector<RunningStat>> accs) {
    std::vector<RunningStat> total = std::move(accs.front());
    for (std::size_t c = 1; c < accs.size(); ++c)
        for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(accs[c][i]);
    std::vector<EstimateWithCI> out;
    out.reserve(total.size());
    for (const auto& s : total) out.push_back(s.estimate());
    return out;
}

inline EstimateWithCI merge_stats(std::vector<RunningStat> accs) {
    RunningStat total = accs.front();
    for (std::size_t c = 1; c < accs.size(); ++c) total.merge(accs[c]);
    return total.estimate();
}

}  // namespace detail

/// pi_i(f) = E[U_i(f(U))] for every agent. The inner expectation over the
/// lottery is computed exactly; only the type profile is sampled.
inline std::vector<EstimateWithCI> ex_ante_payoffs(const Mechanism& mechanism,
                                                   const DistributionModel& model, SeedSpec seed,
                                                   std::size_t n_samples,
                                                   EnginePolicy policy = {}) {
    if (n_samples == 0) throw ParameterError("ex_ante_payoffs: n_samples must be positive");
    const ModelDims dims = model.dims();
    using Acc = std::vector<RunningStat>;
    auto accs = detail::run_chunks<Acc>(
        n_samples, seed, policy.threads, [&](RngStream& rng, std::size_t count, Acc& acc) {
            acc.assign(static_cast<std::size_t>(dims.n_agents), RunningStat{});
            TypeProfile u(dims);
            std::vector<double> lot(static_cast<std::size_t>(dims.n_alternatives));
            for (std::size_t s = 0; s < count; ++s) {
                model.sample_into(rng, u);
                mechanism.choose_into(u, lot);
                for (int i = 0; i < dims.n_agents; ++i)
                    acc[static_cast<std::size_t>(i)].add(
                        expected_payoff_under_lottery(u.agent(i), lot));
            }
        });
    return detail::merge_stat_vectors(std::move(accs));
}

/// f(x, v_i | u_i): probability each alternative is selected when agent i's
/// true type is u_i but they report v_i, over the conditional law of the
/// others. Each draw contributes a full lottery, so the estimates sum to 1.
inline std::vector<EstimateWithCI> interim_choice_probabilities(const Mechanism& mechanism,
                                                                const DistributionModel& model,
                                                                const InterimQuery& query,
                                                                SeedSpec seed,
                                                                std::size_t n_samples,
                                                                EnginePolicy policy = {}) {
    if (n_samples == 0)
        throw ParameterError("interim_choice_probabilities: n_samples must be positive");
    const ModelDims dims = model.dims();
    query.validate(dims);
    const ConditionalSampler sampler = model.conditional_others(query.agent, query.true_type);
    using Acc = std::vector<RunningStat>;
    auto accs = detail::run_chunks<Acc>(
        n_samples, seed, policy.threads, [&](RngStream& rng, std::size_t count, Acc& acc) {
            acc.assign(static_cast<std::size_t>(dims.n_alternatives), RunningStat{});
            TypeProfile u(dims);
            std::vector<double> lot(static_cast<std::size_t>(dims.n_alternatives));
            for (std::size_t s = 0; s < count; ++s) {
                sampler.sample_into(rng, u);
                u.set_agent(query.agent, query.reported_type.span());
                mechanism.choose_into(u, lot);
                for (int x = 0; x < dims.n_alternatives; ++x)
                    acc[static_cast<std::size_t>(x)].add(lot[static_cast<std::size_t>(x)]);
            }
        });
    return detail::merge_stat_vectors(std::move(accs));
}

/// pi_i(f, v_i | u_i): the TRUE type is paid against the lottery induced by
/// the REPORTED type.
inline EstimateWithCI interim_payoff(const Mechanism& mechanism, const DistributionModel& model,
                                     const InterimQuery& query, SeedSpec seed,
                                     std::size_t n_samples, EnginePolicy policy = {}) {
    if (n_samples == 0) throw ParameterError("interim_payoff: n_samples must be positive");
    const ModelDims dims = model.dims();
    query.validate(dims);
    const ConditionalSampler sampler = model.conditional_others(query.agent, query.true_type);
    auto accs = detail::run_chunks<RunningStat>(
        n_samples, seed, policy.threads, [&](RngStream& rng, std::size_t count, RunningStat& acc) {
            TypeProfile u(dims);
            std::vector<double> lot(static_cast<std::size_t>(dims.n_alternatives));
            for (std::size_t s = 0; s < count; ++s) {
                sampler.sample_into(rng, u);
                u.set_agent(query.agent, query.reported_type.span());
                mechanism.choose_into(u, lot);
                acc.add(expected_payoff_under_lottery(query.true_type.span(), lot));
            }
        });
    return detail::merge_stats(std::move(accs));
}

/// Paired comparison of one deviation against truth-telling on common random
/// numbers: every conditional draw of the others is evaluated under both
/// reports and the per-draw payoff difference is accumulated.
struct PairedInterimComparison {
    EstimateWithCI truthful_payoff;
    EstimateWithCI deviant_payoff;
    EstimateWithCI gain;  // deviant minus truthful, paired per draw
    std::vector<EstimateWithCI> truthful_probs;
    std::vector<EstimateWithCI> deviant_probs;
};

inline PairedInterimComparison paired_interim_comparison(const Mechanism& mechanism,
                                                         const DistributionModel& model,
                                                         int agent, const TypeVector& true_type,
                                                         const TypeVector& reported_type,
                                                         SeedSpec seed, std::size_t n_samples,
                                                         EnginePolicy policy = {}) {
    if (n_samples == 0)
        throw ParameterError("paired_interim_comparison: n_samples must be positive");
    const ModelDims dims = model.dims();
    InterimQuery{agent, true_type, reported_type}.validate(dims);
    const ConditionalSampler sampler = model.conditional_others(agent, true_type);
    const std::size_t m = static_cast<std::size_t>(dims.n_alternatives);
    struct Acc {
        RunningStat truthful, deviant, gain;
        std::vector<RunningStat> truthful_probs, deviant_probs;
    };
    auto accs = detail::run_chunks<Acc>(
        n_samples, seed, policy.threads, [&](RngStream& rng, std::size_t count, Acc& acc) {
            acc.truthful_probs.assign(m, RunningStat{});
            acc.deviant_probs.assign(m, RunningStat{});
            TypeProfile u(dims);
            std::vector<double> lot_t(m), lot_d(m);
            for (std::size_t s = 0; s < count; ++s) {
                sampler.sample_into(rng, u);  // sets row `agent` to the true type
                mechanism.choose_into(u, lot_t);
                u.set_agent(agent, reported_type.span());
                mechanism.choose_into(u, lot_d);
                const double pay_t =
                    expected_payoff_under_lottery(true_type.span(), lot_t);
                const double pay_d =
                    expected_payoff_under_lottery(true_type.span(), lot_d);
                acc.truthful.add(pay_t);
                acc.deviant.add(pay_d);
                acc.gain.add(pay_d - pay_t);
                for (std::size_t x = 0; x < m; ++x) {
                    acc.truthful_probs[x].add(lot_t[x]);
                    acc.deviant_probs[x].add(lot_d[x]);
                }
            }
        });
    Acc total = std::move(accs.front());
    for (std::size_t c = 1; c < accs.size(); ++c) {
        total.truthful.merge(accs[c].truthful);
        total.deviant.merge(accs[c].deviant);
        total.gain.merge(accs[c].gain);
        for (std::size_t x = 0; x < m; ++x) {
            total.truthful_probs[x].merge(accs[c].truthful_probs[x]);
            total.deviant_probs[x].merge(accs[c].deviant_probs[x]);
        }
    }
    PairedInterimComparison out;
    out.truthful_payoff = total.truthful.estimate();
    out.deviant_payoff = total.deviant.estimate();
    out.gain = total.gain.estimate();
    for (std::size_t x = 0; x < m; ++x) {
        out.truthful_probs.push_back(total.truthful_probs[x].estimate());
        out.deviant_probs.push_back(total.deviant_probs[x].estimate());
    }
    return out;
}

/// CRN estimate of pi_i(f, v_i | u_i) - pi_i(f, u_i | u_i). Reporting the
/// true type gives exactly zero mean and zero variance.
inline EstimateWithCI paired_deviation_gain(const Mechanism& mechanism,
                                            const DistributionModel& model, int agent,
                                            const TypeVector& true_type,
                                            const TypeVector& reported_type, SeedSpec seed,
                                            std::size_t n_samples, EnginePolicy policy = {}) {
    if (n_samples == 0) throw ParameterError("paired_deviation_gain: n_samples must be positive");
    const ModelDims dims = model.dims();
    InterimQuery{agent, true_type, reported_type}.validate(dims);
    const ConditionalSampler sampler = model.conditional_others(agent, true_type);
    auto accs = detail::run_chunks<RunningStat>(
        n_samples, seed, policy.threads, [&](RngStream& rng, std::size_t count, RunningStat& acc) {
            TypeProfile u(dims);
            std::vector<double> lot_t(static_cast<std::size_t>(dims.n_alternatives));
            std::vector<double> lot_d(static_cast<std::size_t>(dims.n_alternatives));
            for (std::size_t s = 0; s < count; ++s) {
                sampler.sample_into(rng, u);
                mechanism.choose_into(u, lot_t);
                u.set_agent(agent, reported_type.span());
                mechanism.choose_into(u, lot_d);
                acc.add(expected_payoff_under_lottery(true_type.span(), lot_d) -
                        expected_payoff_under_lottery(true_type.span(), lot_t));
            }
        });
    return detail::merge_stats(std::move(accs));
}

}  // namespace mechlab
