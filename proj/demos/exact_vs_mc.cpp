// Exact enumeration against the Monte Carlo engine on a small finite model.

#include <cstdio>

#include "mechlab/mechlab.hpp"

using namespace mechlab;

int main() {
    std::vector<WeightedProfile> atoms{
        {TypeProfile::from_rows({TypeVector{1.0, 0.0}, TypeVector{1.0, 0.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{1.0, 0.0}, TypeVector{0.0, 1.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{0.0, 1.0}, TypeVector{1.0, 0.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{0.0, 1.0}, TypeVector{0.0, 1.0}}), 0.25},
    };
    const FiniteModel fm(atoms);
    const auto dist = fm.to_distribution();

    const Mechanism rules[] = {
        WeightedUtilitarianRule(WeightVector::equal(2)),
        DictatorialRule(0),
        UniformRandomRule{},
    };
    for (const auto& mech : rules) {
        const auto exact = exact_ex_ante(mech, fm);
        const auto mc = ex_ante_payoffs(mech, dist, SeedSpec{7, 0}, 200000, EnginePolicy{2});
        std::printf("%s\n", mech.descriptor().c_str());
        for (std::size_t i = 0; i < exact.size(); ++i)
            std::printf("  agent %zu: exact %.4f   mc %.4f +- %.4f\n", i, exact[i].value,
                        mc[i].mean, mc[i].std_error);
    }

    // Interim: conditioning on agent 0 loving alternative 0, what does a flipped
    // report cost?
    const Mechanism util = WeightedUtilitarianRule(WeightVector::equal(2));
    const InterimQuery truthful{0, TypeVector{1.0, 0.0}, TypeVector{1.0, 0.0}};
    const InterimQuery flipped{0, TypeVector{1.0, 0.0}, TypeVector{0.0, 1.0}};
    std::printf("interim truthful: exact %.4f, flipped report: exact %.4f\n",
                exact_interim(util, fm, truthful).value, exact_interim(util, fm, flipped).value);
    return 0;
}
