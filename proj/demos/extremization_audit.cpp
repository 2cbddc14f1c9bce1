// Walks the extremization audit on the two-agent running example, then shows
// the event-E factorization that explains *why* the deviation pays.

#include <cstdio>

#include "mechlab/mechlab.hpp"

using namespace mechlab;

int main() {
    const ModelDims dims(2, 2);
    const auto model = DistributionModel::independent(dims, MarginalSpec::uniform());
    const WeightVector lambda{0.5, 0.5};
    const TypeVector u{0.6, 0.7};

    const auto c = check_condition_u(lambda, 0, u);
    if (!c) {
        std::puts("type does not meet the deviation condition; nothing to audit");
        return 0;
    }
    std::printf("agent %d, type (%.2f, %.2f): best alternative %d, runner-up %d\n", c->agent,
                u[0], u[1], c->best_alternative, c->runner_up);

    const auto audit = audit_extremization(lambda, model, *c, SeedSpec{2024, 0}, 1000000);
    const auto& r = audit.report;
    std::printf("truthful interim payoff  %.6f +- %.6f\n", r.truthful_payoff.mean,
                r.truthful_payoff.std_error);
    std::printf("extremized report %s    %.6f +- %.6f\n",
                format_type_vector(r.deviation_used).c_str(), r.deviant_payoff.mean,
                r.deviant_payoff.std_error);
    std::printf("paired gain              %.6f (p = %.3g) -> %s\n", r.paired_gain.mean, r.p_value,
                verdict_name(r.verdict));
    std::printf("P(runner-up chosen): truthful %.4f, extremized %.4f\n",
                audit.prob_runner_up_truthful.mean, audit.prob_runner_up_deviant.mean);

    // With m = 2 the conditioning event E is vacuous, so add a third
    // alternative to make the factorization non-trivial.
    const ModelDims dims3(2, 3);
    const auto model3 = DistributionModel::independent(dims3, MarginalSpec::uniform());
    const TypeVector u3{0.55, 0.7, 0.2};
    const auto c3 = check_condition_u(lambda, 0, u3);
    std::puts("\nthree alternatives, type (0.55, 0.7, 0.2):");
    for (double vb : {0.7, 0.85, 1.0}) {
        const auto d =
            event_E_decomposition(lambda, model3, *c3, vb, SeedSpec{2025, 0}, 400000);
        std::printf("  report u(b)=%.2f: P(E)=%.4f, P(a beats b | E)=%.4f, product=%.4f\n", vb,
                    d.prob_event.mean, d.prob_a_beats_b_given_event.mean,
                    d.prob_event.mean * d.prob_a_beats_b_given_event.mean);
    }
    std::puts("P(E) is identical across reports; only the conditional factor moves.");
    return 0;
}
