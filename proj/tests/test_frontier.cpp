#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mechlab/frontier.hpp"
#include "oracle_utils.hpp"

using namespace mechlab;

namespace {

const ModelDims kDims22(2, 2);

DistributionModel uniform_model(ModelDims dims = kDims22) {
    return DistributionModel::independent(dims, MarginalSpec::uniform());
}

void require_within(const EstimateWithCI& e, double target, double se_mult) {
    INFO("mean=" << e.mean << " se=" << e.std_error << " target=" << target);
    REQUIRE(std::abs(e.mean - target) <= se_mult * e.std_error);
}

const Frontier& shared_frontier() {
    static const Frontier f =
        sweep_simplex(uniform_model(), 10, SeedSpec{300, 0}, 100000, EnginePolicy{2});
    return f;
}

}  // namespace

TEST_CASE("simplex grid enumerates all compositions") {
    auto g2 = simplex_grid(2, 10);
    REQUIRE(g2.size() == 11);
    for (std::size_t j = 0; j + 1 < g2.size(); ++j) REQUIRE(g2[j][0] < g2[j + 1][0]);
    REQUIRE(g2.front() == WeightVector{0.0, 1.0});
    REQUIRE(g2.back() == WeightVector{1.0, 0.0});

    auto g3 = simplex_grid(3, 4);
    REQUIRE(g3.size() == 15);  // C(6,2)
    for (std::size_t a = 0; a < g3.size(); ++a)
        for (std::size_t b = a + 1; b < g3.size(); ++b) REQUIRE(!(g3[a] == g3[b]));

    REQUIRE_THROWS_AS(simplex_grid(3, 200), ParameterError);
    REQUIRE_THROWS_AS(simplex_grid(2, 0), ParameterError);
}

TEST_CASE("sweep hits the dictatorship endpoints and the symmetric interior") {
    const auto& f = shared_frontier();
    REQUIRE(f.points.size() == 11);
    REQUIRE(f.samples_per_point == 100000);

    const auto& left = f.points.front();  // lambda = (0,1): agent 1 dictates
    require_within(left.payoffs[0], 0.5, 3.0);
    require_within(left.payoffs[1], 2.0 / 3.0, 3.0);

    const auto& right = f.points.back();  // lambda = (1,0): agent 0 dictates
    require_within(right.payoffs[0], 2.0 / 3.0, 3.0);
    require_within(right.payoffs[1], 0.5, 3.0);

    const auto& mid = f.points[5];  // lambda = (0.5, 0.5)
    REQUIRE(mid.weights == WeightVector{0.5, 0.5});
    require_within(mid.payoffs[0], oracle::utilitarian_ex_ante_n2(), 3.0);
    require_within(mid.payoffs[1], oracle::utilitarian_ex_ante_n2(), 3.0);
    // Symmetric model, symmetric weights: agents agree within noise.
    const double se = std::hypot(mid.payoffs[0].std_error, mid.payoffs[1].std_error);
    REQUIRE(std::abs(mid.payoffs[0].mean - mid.payoffs[1].mean) <= 3.0 * se);
}

TEST_CASE("frontier payoffs are monotone along the weight sweep") {
    const auto& f = shared_frontier();
    for (std::size_t j = 0; j + 1 < f.points.size(); ++j) {
        const auto& lo = f.points[j];
        const auto& hi = f.points[j + 1];
        const double se0 = std::hypot(lo.payoffs[0].std_error, hi.payoffs[0].std_error);
        const double se1 = std::hypot(lo.payoffs[1].std_error, hi.payoffs[1].std_error);
        REQUIRE(hi.payoffs[0].mean >= lo.payoffs[0].mean - 3.0 * se0);
        REQUIRE(hi.payoffs[1].mean <= lo.payoffs[1].mean + 3.0 * se1);
    }
    for (const auto& pt : f.points)
        for (const auto& e : pt.payoffs) REQUIRE((e.mean >= 0.0 && e.mean <= 1.0));
}

TEST_CASE("every grid weight scalarizes best at its own rule") {
    const auto& f = shared_frontier();
    for (const auto& at : f.points) {
        const auto value = [&](const FrontierPoint& pt) {
            double acc = 0.0;
            for (int i = 0; i < at.weights.size(); ++i)
                acc += at.weights[i] * pt.payoffs[static_cast<std::size_t>(i)].mean;
            return acc;
        };
        const double self = value(at);
        for (const auto& other : f.points) {
            double se = 0.0;
            for (int i = 0; i < at.weights.size(); ++i)
                se += at.weights[i] * (at.payoffs[static_cast<std::size_t>(i)].std_error +
                                       other.payoffs[static_cast<std::size_t>(i)].std_error);
            REQUIRE(self >= value(other) - 3.0 * se);
        }
    }
}

TEST_CASE("scalarization check passes the frontier against itself and dominated rules") {
    const auto& f = shared_frontier();
    auto model = uniform_model();

    auto self = scalarization_check(f, WeightedUtilitarianRule(WeightVector{0.5, 0.5}), model,
                                    SeedSpec{301, 0}, 100000);
    REQUIRE(self.size() == f.points.size());
    for (const auto& v : self) REQUIRE(v.passed);
    // At the matching weights the margin is zero within noise.
    REQUIRE(std::abs(self[5].margin) <= 3.0 * self[5].combined_se);

    auto uni = scalarization_check(f, UniformRandomRule{}, model, SeedSpec{302, 0}, 100000);
    for (const auto& v : uni) REQUIRE(v.passed);
    REQUIRE(uni[5].margin ==
            Catch::Approx(oracle::utilitarian_ex_ante_n2() - 0.5).margin(0.003));
}

TEST_CASE("dominance test flags interior profiles and spares the frontier") {
    const auto& f = shared_frontier();
    std::vector<EstimateWithCI> uniform_payoffs{{0.5, 1e-4, 100000}, {0.5, 1e-4, 100000}};
    REQUIRE(dominance_test(uniform_payoffs, f) == DominanceVerdict::dominated);

    REQUIRE(dominance_test(f.points[5].payoffs, f) ==
            DominanceVerdict::not_dominated_by_frontier);

    // (0.7, 0.1): no frontier point reaches 0.7 for agent 0.
    std::vector<EstimateWithCI> outside{{0.7, 1e-6, 100000}, {0.1, 1e-6, 100000}};
    REQUIRE(dominance_test(outside, f) == DominanceVerdict::not_dominated_by_frontier);
}

TEST_CASE("plurality is strictly dominated at three agents") {
    auto model3 = DistributionModel::independent(ModelDims(3, 2), MarginalSpec::uniform());
    auto f3 = sweep_simplex(model3, 3, SeedSpec{303, 0}, 200000, EnginePolicy{2});
    REQUIRE(f3.points.size() == 10);
    auto verdicts = scalarization_check(f3, PluralityRule{}, model3, SeedSpec{304, 0}, 200000);
    bool found_equal_weights = false;
    for (std::size_t j = 0; j < f3.points.size(); ++j) {
        REQUIRE(verdicts[j].passed);
        const auto& w = f3.points[j].weights;
        if (w[0] == w[1] && w[1] == w[2]) {
            found_equal_weights = true;
            REQUIRE(verdicts[j].candidate_value ==
                    Catch::Approx(oracle::plurality_ex_ante_n3_m2()).margin(0.003));
            REQUIRE(verdicts[j].frontier_value ==
                    Catch::Approx(oracle::utilitarian_ex_ante_n3()).margin(0.003));
            REQUIRE(verdicts[j].margin > 0.005);
        }
    }
    REQUIRE(found_equal_weights);
}

TEST_CASE("sweeps validate their inputs") {
    auto model = uniform_model();
    REQUIRE_THROWS_AS(sweep_simplex(model, 0, SeedSpec{1, 0}, 100), ParameterError);
    REQUIRE_THROWS_AS(sweep_simplex(model, 5, SeedSpec{1, 0}, 0), ParameterError);
    REQUIRE_THROWS_AS(dominance_test({{0.5, 0.0, 1}}, Frontier{}), ParameterError);
}
