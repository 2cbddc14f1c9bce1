#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mechlab/mechanisms.hpp"
#include "mechlab/oracle.hpp"

using namespace mechlab;

namespace {

// Four equally likely corner profiles: both agents love alt 0, disagree both
// ways, both love alt 1.
FiniteModel four_corner_model() {
    std::vector<WeightedProfile> atoms{
        {TypeProfile::from_rows({TypeVector{1.0, 0.0}, TypeVector{1.0, 0.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{1.0, 0.0}, TypeVector{0.0, 1.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{0.0, 1.0}, TypeVector{1.0, 0.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{0.0, 1.0}, TypeVector{0.0, 1.0}}), 0.25},
    };
    return FiniteModel(std::move(atoms));
}

}  // namespace

TEST_CASE("finite model construction and round trips") {
    auto fm = four_corner_model();
    REQUIRE(fm.dims() == ModelDims(2, 2));
    REQUIRE(fm.atoms().size() == 4);

    auto dist = fm.to_distribution();
    REQUIRE(dist.kind() == DistributionKind::finite_support);
    REQUIRE_FALSE(dist.assumption1_satisfied());
    auto back = FiniteModel::from_distribution(dist);
    REQUIRE(back.atoms().size() == 4);
    REQUIRE(back.atoms()[2].profile == fm.atoms()[2].profile);

    REQUIRE_THROWS_AS(FiniteModel(std::vector<WeightedProfile>{}), ParameterError);
    auto continuous = DistributionModel::independent(ModelDims(2, 2), MarginalSpec::uniform());
    REQUIRE_THROWS_AS(FiniteModel::from_distribution(continuous), UnsupportedOperation);
}

TEST_CASE("exact ex ante values on the corner model") {
    auto fm = four_corner_model();

    auto util = exact_ex_ante(WeightedUtilitarianRule(WeightVector::equal(2)), fm);
    REQUIRE(util.size() == 2);
    REQUIRE(util[0].value == 0.75);
    REQUIRE(util[1].value == 0.75);
    REQUIRE(util[0].atom_count == 4);
    REQUIRE(util[0].conditioning_set == 4);

    auto dict = exact_ex_ante(DictatorialRule(0), fm);
    REQUIRE(dict[0].value == 1.0);
    REQUIRE(dict[1].value == 0.5);

    auto unif = exact_ex_ante(UniformRandomRule{}, fm);
    REQUIRE(unif[0].value == 0.5);
    REQUIRE(unif[1].value == 0.5);
}

TEST_CASE("exact interim conditions on the true type and substitutes the report") {
    auto fm = four_corner_model();
    const Mechanism util = WeightedUtilitarianRule(WeightVector::equal(2));

    auto truthful = exact_interim(util, fm, InterimQuery{0, TypeVector{1.0, 0.0},
                                                         TypeVector{1.0, 0.0}});
    REQUIRE(truthful.value == 1.0);
    REQUIRE(truthful.conditioning_set == 2);

    auto flipped = exact_interim(util, fm, InterimQuery{0, TypeVector{1.0, 0.0},
                                                        TypeVector{0.0, 1.0}});
    REQUIRE(flipped.value == 0.5);  // misreporting loses the tie-broken profile

    REQUIRE_THROWS_AS(exact_interim(util, fm, InterimQuery{0, TypeVector{0.5, 0.5},
                                                           TypeVector{0.5, 0.5}}),
                      DomainError);
}

TEST_CASE("interim value only depends on the conditional law of the others") {
    // Same conditional for agent 1 given agent 0 = (1,0); different masses on
    // the conditioned-away branch.
    const TypeVector t{1.0, 0.0};
    const TypeVector s{0.0, 1.0};
    const TypeVector r1{0.8, 0.1};
    const TypeVector r2{0.2, 0.9};
    FiniteModel a(std::vector<WeightedProfile>{
        {TypeProfile::from_rows({t, r1}), 0.25},
        {TypeProfile::from_rows({t, r2}), 0.75},
    });
    FiniteModel b(std::vector<WeightedProfile>{
        {TypeProfile::from_rows({t, r1}), 0.1},
        {TypeProfile::from_rows({t, r2}), 0.3},
        {TypeProfile::from_rows({s, r1}), 0.6},
    });
    const Mechanism util = WeightedUtilitarianRule(WeightVector::equal(2));
    for (const TypeVector& report : {t, s, TypeVector{0.4, 0.3}}) {
        InterimQuery q{0, t, report};
        REQUIRE(exact_interim(util, a, q).value ==
                Catch::Approx(exact_interim(util, b, q).value).margin(1e-15));
    }
}

TEST_CASE("exact best response finds the profitable deviation") {
    const Mechanism util = WeightedUtilitarianRule(WeightVector::equal(2));
    const TypeVector truth{0.6, 0.7};
    const std::vector<TypeVector> candidates{truth, TypeVector{0.0, 1.0},
                                             TypeVector{1.0, 0.0}};

    // Agent 1's type swings the utilitarian choice; overstating alt 1 locks it in.
    FiniteModel fm(std::vector<WeightedProfile>{
        {TypeProfile::from_rows({truth, TypeVector{0.9, 0.0}}), 0.5},
        {TypeProfile::from_rows({truth, TypeVector{0.0, 0.9}}), 0.5},
    });
    auto [report, gain] = exact_best_response(util, fm, 0, truth, candidates);
    REQUIRE(report == TypeVector{0.0, 1.0});
    REQUIRE(gain == Catch::Approx(0.05).margin(1e-15));

    // Under a dictatorship the dictator never gains.
    auto [dreport, dgain] = exact_best_response(DictatorialRule(0), fm, 0, truth, candidates);
    REQUIRE(dreport == truth);
    REQUIRE(dgain == 0.0);

    // A constant rule never rewards deviation either.
    auto [ureport, ugain] = exact_best_response(UniformRandomRule{}, fm, 0, truth, candidates);
    REQUIRE(ureport == truth);
    REQUIRE(ugain == 0.0);

    REQUIRE_THROWS_AS(exact_best_response(util, fm, 0, truth, {}), ParameterError);
    REQUIRE_THROWS_AS(
        exact_best_response(util, fm, 0, truth, {TypeVector{0.0, 1.0}}),
        ParameterError);
}

TEST_CASE("monte carlo estimates agree with enumeration on finite models") {
    auto fm = four_corner_model();
    auto dist = fm.to_distribution();
    const Mechanism util = WeightedUtilitarianRule(WeightVector::equal(2));

    auto exact = exact_ex_ante(util, fm);
    auto mc = ex_ante_payoffs(util, dist, SeedSpec{520, 0}, 200000, EnginePolicy{2});
    for (std::size_t i = 0; i < mc.size(); ++i) {
        REQUIRE(mc[i].std_error > 0.0);
        REQUIRE(std::abs(mc[i].mean - exact[i].value) <= 4.0 * mc[i].std_error);
    }

    InterimQuery q{0, TypeVector{1.0, 0.0}, TypeVector{0.0, 1.0}};
    auto exact_q = exact_interim(util, fm, q);
    auto mc_q = interim_payoff(util, dist, q, SeedSpec{521, 0}, 200000, EnginePolicy{2});
    REQUIRE(std::abs(mc_q.mean - exact_q.value) <= 4.0 * mc_q.std_error);
}

TEST_CASE("relabeling alternatives permutes choices but not exact payoffs") {
    const ModelDims dims(3, 4);
    RngStream rng(SeedSpec{522, 0});
    const std::size_t n_atoms = 32;
    std::vector<WeightedProfile> atoms;
    std::vector<WeightedProfile> relabeled;
    const int perm[4] = {2, 0, 3, 1};
    for (std::size_t k = 0; k < n_atoms; ++k) {
        TypeProfile p(dims);
        TypeProfile pp(dims);
        for (int i = 0; i < dims.n_agents; ++i) {
            std::vector<double> row(4), prow(4);
            for (int x = 0; x < 4; ++x) row[static_cast<std::size_t>(x)] = rng.next_open01();
            for (int x = 0; x < 4; ++x)
                prow[static_cast<std::size_t>(perm[x])] = row[static_cast<std::size_t>(x)];
            p.set_agent(i, row);
            pp.set_agent(i, prow);
        }
        atoms.push_back({p, 1.0 / 32});
        relabeled.push_back({pp, 1.0 / 32});
    }
    FiniteModel fm(atoms), fmp(relabeled);
    const Mechanism rule = WeightedUtilitarianRule(WeightVector{0.5, 0.3, 0.2});
    auto base = exact_ex_ante(rule, fm);
    auto permuted = exact_ex_ante(rule, fmp);
    for (std::size_t i = 0; i < base.size(); ++i)
        REQUIRE(base[i].value == Catch::Approx(permuted[i].value).margin(1e-15));
}
