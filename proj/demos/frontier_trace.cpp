// Traces the payoff frontier of the weighted utilitarian family and checks a
// few familiar voting rules against it.

#include <cstdio>

#include "mechlab/mechlab.hpp"

using namespace mechlab;

int main() {
    const ModelDims dims(2, 2);
    const auto model = DistributionModel::independent(dims, MarginalSpec::uniform());

    const auto frontier = sweep_simplex(model, 10, SeedSpec{99, 0}, 200000, EnginePolicy{2});
    std::puts("lambda_1  pi_1      pi_2");
    for (const auto& pt : frontier.points)
        std::printf("  %.1f    %.4f    %.4f\n", pt.weights[0], pt.payoffs[0].mean,
                    pt.payoffs[1].mean);

    struct Named {
        const char* name;
        Mechanism mech;
    };
    const Named rules[] = {
        {"uniform-random", UniformRandomRule{}},
        {"random-dictatorship", RandomDictatorshipRule(WeightVector::equal(2))},
        {"plurality", PluralityRule{}},
        {"borda", BordaRule{}},
    };
    std::puts("\nworst scalarization margin vs the frontier (negative would beat it):");
    std::uint64_t stream = 1;
    for (const auto& rule : rules) {
        const auto verdicts = scalarization_check(frontier, rule.mech, model,
                                                  SeedSpec{99, stream++ << 24}, 200000);
        double worst = 1e9;
        for (const auto& v : verdicts) worst = std::min(worst, v.margin);
        std::printf("  %-20s %+.4f\n", rule.name, worst);
    }
    return 0;
}
