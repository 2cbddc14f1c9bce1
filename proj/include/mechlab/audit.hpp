#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mechlab/core.hpp"
#include "mechlab/distributions.hpp"
#include "mechlab/mechanisms.hpp"
#include "mechlab/payoff.hpp"
#include "mechlab/stats.hpp"

namespace mechlab {

/// A type satisfying the gap condition that makes extremization profitable
/// under the weights: u(b) = max u < 1 and 0 < u(b) - u(a) < weight_bound,
/// where weight_bound = (sum of the other agents' weights) / own weight.
struct ExtremizationCase {
    int agent = 0;
    TypeVector true_type;
    int best_alternative = 0;  // b
    int runner_up = 0;         // a
    double weight_bound = 0.0;
};

/// Tests the gap condition for agent i under weights lambda. Returns the case
/// with b = the argmax and a = the qualifying alternative with the smallest
/// gap (largest u(a)), or nothing if no alternative qualifies.
inline std::optional<ExtremizationCase> check_condition_u(const WeightVector& lambda, int agent,
                                                          const TypeVector& u) {
    if (agent < 0 || agent >= lambda.size())
        throw DimensionError("check_condition_u: agent index out of range");
    if (u.size() < 2) throw DimensionError("check_condition_u: need at least 2 alternatives");
    validate_type_vector(u, u.size());
    const double li = lambda[agent];
    if (li == 0.0)
        throw PreconditionError("check_condition_u: agent must have positive weight");
    const double bound = (1.0 - li) / li;  // weights are normalized
    const int b = argmax_with_tiebreak(u.span());
    if (u[b] >= 1.0) return std::nullopt;
    int best_a = -1;
    for (int x = 0; x < u.size(); ++x) {
        if (x == b) continue;
        const double gap = u[b] - u[x];
        if (gap > 0.0 && gap < bound && (best_a < 0 || u[x] > u[best_a])) best_a = x;
    }
    if (best_a < 0) return std::nullopt;
    return ExtremizationCase{agent, u, b, best_a, bound};
}

/// The constructed deviation: report payoff 1 for the best alternative, truth
/// everywhere else.
inline TypeVector extremize(const TypeVector& u, int b) {
    if (u.size() == 0) throw DimensionError("extremize: empty type");
    if (b < 0 || b >= u.size()) throw DimensionError("extremize: alternative index out of range");
    if (b != argmax_with_tiebreak(u.span()))
        throw PreconditionError("extremize: b must be the argmax of u");
    if (u[b] >= 1.0) throw PreconditionError("extremize: u(b) is already 1");
    TypeVector out = u;
    out[b] = 1.0;
    return out;
}

enum class AuditVerdict { violation_certified, no_violation_detected, inconclusive };

inline const char* verdict_name(AuditVerdict v) {
    switch (v) {
        case AuditVerdict::violation_certified: return "violation-certified";
        case AuditVerdict::no_violation_detected: return "no-violation-detected";
        case AuditVerdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

struct DeviationReport {
    EstimateWithCI truthful_payoff;
    EstimateWithCI deviant_payoff;
    EstimateWithCI paired_gain;
    double p_value = 1.0;
    AuditVerdict verdict = AuditVerdict::no_violation_detected;
    TypeVector deviation_used;
};

/// One-sided test at `significance`; sample sizes escalate by x10 from the
/// requested count (capped) while the result is positive but not significant.
struct AuditPolicy {
    double significance = 0.01;
    std::size_t max_samples = 10'000'000;
    int max_stages = 3;
    EnginePolicy engine{};
};

namespace detail {

inline AuditVerdict classify(const EstimateWithCI& gain, double p, double significance) {
    if (gain.mean > 0.0 && p < significance) return AuditVerdict::violation_certified;
    if (gain.mean <= 0.0) return AuditVerdict::no_violation_detected;
    return AuditVerdict::inconclusive;
}

}  // namespace detail

/// Extremization audit result: the deviation report plus the interim
/// probability of the runner-up alternative under both reports (the theory
/// predicts a strict drop).
struct ExtremizationAudit {
    DeviationReport report;
    EstimateWithCI prob_runner_up_truthful;
    EstimateWithCI prob_runner_up_deviant;
    std::size_t samples_used = 0;
};

/// Paired CRN audit of the extremization deviation under the lambda-weighted
/// utilitarian rule. Escalates sample size before settling on inconclusive.
inline ExtremizationAudit audit_extremization(const WeightVector& lambda,
                                              const DistributionModel& model,
                                              const ExtremizationCase& c, SeedSpec seed,
                                              std::size_t n_samples, AuditPolicy policy = {}) {
    if (n_samples == 0) throw ParameterError("audit_extremization: n_samples must be positive");
    const Mechanism mech = WeightedUtilitarianRule(lambda);
    const TypeVector deviation = extremize(c.true_type, c.best_alternative);
    std::size_t n = n_samples;
    for (int stage = 0;; ++stage) {
        n = std::min(n, policy.max_samples);
        const PairedInterimComparison cmp = paired_interim_comparison(
            mech, model, c.agent, c.true_type, deviation, seed, n, policy.engine);
        const double p = one_sided_p_value(cmp.gain);
        const AuditVerdict verdict = detail::classify(cmp.gain, p, policy.significance);
        const bool exact = cmp.gain.std_error == 0.0;
        const bool last = stage + 1 >= policy.max_stages || n >= policy.max_samples;
        if (verdict == AuditVerdict::inconclusive && !exact && !last) {
            n *= 10;
            continue;
        }
        ExtremizationAudit out;
        out.report = DeviationReport{cmp.truthful_payoff, cmp.deviant_payoff, cmp.gain,
                                     p,                   verdict,            deviation};
        out.prob_runner_up_truthful = cmp.truthful_probs[static_cast<std::size_t>(c.runner_up)];
        out.prob_runner_up_deviant = cmp.deviant_probs[static_cast<std::size_t>(c.runner_up)];
        out.samples_used = n;
        return out;
    }
}

/// The two factors of the selection-probability factorization for the
/// runner-up alternative: P(E | u_i) where E = {S(a) > S(x) for all x other
/// than a, b}, and P(S(a) > S(b) | E, u_i). The first factor does not involve
/// the reported payoff for b, so its estimate is bit-identical across such
/// reports on common random numbers.
struct EventEDecomposition {
    EstimateWithCI prob_event;
    EstimateWithCI prob_a_beats_b_given_event;
    bool conditional_defined = true;  // false when no draw landed in E
    std::size_t draws_in_event = 0;
};

inline EventEDecomposition event_E_decomposition(const WeightVector& lambda,
                                                 const DistributionModel& model,
                                                 const ExtremizationCase& c, double reported_b,
                                                 SeedSpec seed, std::size_t n_samples,
                                                 EnginePolicy engine = {}) {
    if (n_samples == 0) throw ParameterError("event_E_decomposition: n_samples must be positive");
    if (!(reported_b >= 0.0 && reported_b <= 1.0))
        throw ParameterError("event_E_decomposition: reported payoff must lie in [0,1]");
    const ModelDims dims = model.dims();
    if (lambda.size() != dims.n_agents)
        throw DimensionError("event_E_decomposition: weights/model agent mismatch");
    TypeVector report = c.true_type;
    report[c.best_alternative] = reported_b;
    InterimQuery{c.agent, c.true_type, report}.validate(dims);
    const ConditionalSampler sampler = model.conditional_others(c.agent, c.true_type);
    struct Acc {
        BinomialCounter event;   // E over all draws
        BinomialCounter a_wins;  // S(a) > S(b) within E
    };
    auto accs = detail::run_chunks<Acc>(
        n_samples, seed, engine.threads, [&](RngStream& rng, std::size_t count, Acc& acc) {
            TypeProfile u(dims);
            std::vector<double> score(static_cast<std::size_t>(dims.n_alternatives));
            for (std::size_t s = 0; s < count; ++s) {
                sampler.sample_into(rng, u);
                u.set_agent(c.agent, report.span());
                for (int x = 0; x < dims.n_alternatives; ++x) {
                    double v = 0.0;
                    for (int j = 0; j < dims.n_agents; ++j) v += lambda[j] * u(j, x);
                    score[static_cast<std::size_t>(x)] = v;
                }
                const double sa = score[static_cast<std::size_t>(c.runner_up)];
                bool in_event = true;
                for (int x = 0; x < dims.n_alternatives; ++x) {
                    if (x == c.runner_up || x == c.best_alternative) continue;
                    if (!(sa > score[static_cast<std::size_t>(x)])) {
                        in_event = false;
                        break;
                    }
                }
                acc.event.add(in_event);
                if (in_event)
                    acc.a_wins.add(sa > score[static_cast<std::size_t>(c.best_alternative)]);
            }
        });
    Acc total;
    for (const auto& a : accs) {
        total.event.merge(a.event);
        total.a_wins.merge(a.a_wins);
    }
    EventEDecomposition out;
    out.prob_event = total.event.estimate();
    out.draws_in_event = total.a_wins.trials;
    if (total.a_wins.trials == 0) {
        out.conditional_defined = false;
        out.prob_a_beats_b_given_event = EstimateWithCI{0.0, 0.0, 0};
    } else {
        out.prob_a_beats_b_given_event = total.a_wins.estimate();
    }
    return out;
}

/// Candidate grid for the general deviation search: every report whose
/// coordinates all come from `levels`, plus the extremization candidate when
/// utilitarian weights are supplied and the gap condition holds.
struct DeviationGridSpec {
    std::vector<double> levels{0.0, 0.5, 1.0};
    std::size_t max_candidates = 729;
    std::optional<WeightVector> utilitarian_weights;
};

namespace detail {

inline std::vector<TypeVector> build_candidate_grid(const DeviationGridSpec& spec, int m) {
    if (spec.levels.empty()) throw ParameterError("DeviationGridSpec: empty level set");
    for (double v : spec.levels)
        if (!(v >= 0.0 && v <= 1.0))
            throw ParameterError("DeviationGridSpec: levels must lie in [0,1]");
    double count = 1.0;
    for (int x = 0; x < m; ++x) count *= static_cast<double>(spec.levels.size());
    if (count > static_cast<double>(spec.max_candidates))
        throw ParameterError("DeviationGridSpec: grid of " + std::to_string(static_cast<long long>(count)) +
                             " candidates exceeds cap " + std::to_string(spec.max_candidates));
    std::vector<TypeVector> grid;
    grid.reserve(static_cast<std::size_t>(count));
    TypeVector cur(std::vector<double>(static_cast<std::size_t>(m), spec.levels.front()));
    std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
    for (;;) {
        grid.push_back(cur);
        int x = m - 1;
        for (; x >= 0; --x) {
            auto& k = idx[static_cast<std::size_t>(x)];
            if (++k < spec.levels.size()) {
                cur[x] = spec.levels[k];
                break;
            }
            k = 0;
            cur[x] = spec.levels.front();
        }
        if (x < 0) break;
    }
    return grid;
}

}  // namespace detail

/// Grid search for any profitable deviation under an arbitrary mechanism. All
/// candidates are evaluated with the same seed, so every comparison shares the
/// conditional draws. Single-stage: the verdict is certified or
/// no-violation-detected.
inline DeviationReport search_deviation(const Mechanism& mechanism,
                                        const DistributionModel& model, int agent,
                                        const TypeVector& true_type,
                                        const DeviationGridSpec& spec, SeedSpec seed,
                                        std::size_t n_samples, AuditPolicy policy = {}) {
    if (n_samples == 0) throw ParameterError("search_deviation: n_samples must be positive");
    const ModelDims dims = model.dims();
    InterimQuery{agent, true_type, true_type}.validate(dims);
    std::vector<TypeVector> candidates = detail::build_candidate_grid(spec, dims.n_alternatives);
    if (spec.utilitarian_weights) {
        try {
            if (auto c = check_condition_u(*spec.utilitarian_weights, agent, true_type))
                candidates.push_back(extremize(c->true_type, c->best_alternative));
        } catch (const PreconditionError&) {
            // zero-weight agent: the constructed deviation is undefined, grid still applies
        }
    }
    int best = -1;             // best significant candidate
    int best_any = -1;         // largest mean overall
    EstimateWithCI best_gain{0.0, 0.0, 1};
    EstimateWithCI best_any_gain{0.0, 0.0, 1};
    std::vector<EstimateWithCI> gains;
    gains.reserve(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const EstimateWithCI g = paired_deviation_gain(mechanism, model, agent, true_type,
                                                       candidates[k], seed, n_samples,
                                                       policy.engine);
        gains.push_back(g);
        if (best_any < 0 || g.mean > best_any_gain.mean) {
            best_any = static_cast<int>(k);
            best_any_gain = g;
        }
        const double p = one_sided_p_value(g);
        if (g.mean > 0.0 && p < policy.significance &&
            (best < 0 || g.mean > best_gain.mean)) {
            best = static_cast<int>(k);
            best_gain = g;
        }
    }
    const int chosen = best >= 0 ? best : best_any;
    const PairedInterimComparison cmp =
        paired_interim_comparison(mechanism, model, agent, true_type,
                                  candidates[static_cast<std::size_t>(chosen)], seed, n_samples,
                                  policy.engine);
    DeviationReport out;
    out.truthful_payoff = cmp.truthful_payoff;
    out.deviant_payoff = cmp.deviant_payoff;
    out.paired_gain = cmp.gain;
    out.p_value = one_sided_p_value(cmp.gain);
    out.deviation_used = candidates[static_cast<std::size_t>(chosen)];
    out.verdict = best >= 0 ? AuditVerdict::violation_certified
                            : AuditVerdict::no_violation_detected;
    return out;
}

}  // namespace mechlab
