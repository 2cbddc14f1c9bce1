// Acceptance gate: exercises the full pipeline and prints one PASS/FAIL line
// per criterion. Exit code is the number of failed criteria.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mechlab/mechlab.hpp"
#include "oracle_utils.hpp"

using namespace mechlab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", idx, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5g", v);
    return buf;
}

SquareMatrix cross_agent_correlation(int m, double rho) {
    SquareMatrix c = SquareMatrix::identity(2 * m);
    for (int x = 0; x < m; ++x) {
        c.at(x, m + x) = rho;
        c.at(m + x, x) = rho;
    }
    return c;
}

FiniteModel four_corner_model() {
    std::vector<WeightedProfile> atoms{
        {TypeProfile::from_rows({TypeVector{1.0, 0.0}, TypeVector{1.0, 0.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{1.0, 0.0}, TypeVector{0.0, 1.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{0.0, 1.0}, TypeVector{1.0, 0.0}}), 0.25},
        {TypeProfile::from_rows({TypeVector{0.0, 1.0}, TypeVector{0.0, 1.0}}), 0.25},
    };
    return FiniteModel(std::move(atoms));
}

FiniteModel random_finite_model(RngStream& rng, int n, int m) {
    const int n_atoms = 3 + static_cast<int>(rng.next_index(6));
    std::vector<double> raw(static_cast<std::size_t>(n_atoms));
    double total = 0.0;
    for (auto& w : raw) {
        w = 1.0 + static_cast<double>(rng.next_index(10));
        total += w;
    }
    std::vector<WeightedProfile> atoms;
    for (int k = 0; k < n_atoms; ++k) {
        TypeProfile p(ModelDims(n, m));
        for (double& v : p.flat()) v = rng.next_open01();
        atoms.push_back({std::move(p), raw[static_cast<std::size_t>(k)] / total});
    }
    return FiniteModel(std::move(atoms));
}

std::vector<TypeVector> level_grid(int m) {
    const double levels[] = {0.0, 0.5, 1.0};
    std::vector<TypeVector> out;
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    for (;;) {
        std::vector<double> v;
        for (int i : idx) v.push_back(levels[i]);
        out.push_back(TypeVector(std::move(v)));
        int pos = m - 1;
        for (; pos >= 0; --pos) {
            if (++idx[static_cast<std::size_t>(pos)] < 3) break;
            idx[static_cast<std::size_t>(pos)] = 0;
        }
        if (pos < 0) break;
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- criteria -------------------------------------------------------------

void criterion_1_and_2() {
    const auto model =
        DistributionModel::independent(ModelDims(2, 2), MarginalSpec::uniform());
    const WeightVector lambda{0.5, 0.5};
    const TypeVector u{0.6, 0.7};
    const auto c = check_condition_u(lambda, 0, u);

    const auto t0 = std::chrono::steady_clock::now();
    const auto audit = audit_extremization(lambda, model, *c, SeedSpec{1001, 0}, 1000000);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto& r = audit.report;
    const bool pass1 = std::abs(r.truthful_payoff.mean - 0.6595) <= 0.002 &&
                       std::abs(r.deviant_payoff.mean - 0.682) <= 0.002 &&
                       std::abs(r.paired_gain.mean - 0.0225) <= 0.002 &&
                       r.p_value < 0.01 &&
                       r.verdict == AuditVerdict::violation_certified && elapsed < 30.0;
    report(1, "extremization deviation is profitable and certified", pass1,
           "truthful " + fmt(r.truthful_payoff.mean) + " (0.6595), deviant " +
               fmt(r.deviant_payoff.mean) + " (0.682), gain " + fmt(r.paired_gain.mean) +
               " (0.0225), p " + fmt(r.p_value) + ", " + fmt(elapsed) + "s single-threaded");

    const bool pass2 = std::abs(audit.prob_runner_up_truthful.mean - 0.405) <= 0.002 &&
                       std::abs(audit.prob_runner_up_deviant.mean - 0.18) <= 0.002;
    report(2, "runner-up probability drops strictly under extremization", pass2,
           "P(a) truthful " + fmt(audit.prob_runner_up_truthful.mean) + " (0.405) -> deviant " +
               fmt(audit.prob_runner_up_deviant.mean) + " (0.18)");
}

void criterion_3() {
    const auto model = DistributionModel::gaussian_copula(
        ModelDims(2, 2), MarginalSpec::uniform(), cross_agent_correlation(2, 0.5));
    const WeightVector lambda{0.5, 0.5};
    const TypeVector u{0.6, 0.7};
    const auto c = check_condition_u(lambda, 0, u);

    AuditPolicy policy;
    policy.engine = EnginePolicy{4};
    const auto audit =
        audit_extremization(lambda, model, *c, SeedSpec{1003, 0}, 1000000, policy);

    const double p_t = oracle::prob_b_wins_copula(0.6, 0.7, 0.6, 0.7, 0.5);
    const double p_d = oracle::prob_b_wins_copula(0.6, 0.7, 0.6, 1.0, 0.5);
    const double exact_gain = 0.1 * (p_d - p_t);  // payoffs differ only via P(b wins)

    const auto& r = audit.report;
    const bool pass = r.verdict == AuditVerdict::violation_certified && r.p_value < 0.01 &&
                      std::abs(r.paired_gain.mean - exact_gain) <= 0.003;
    report(3, "correlated types still admit a certified violation", pass,
           "gain " + fmt(r.paired_gain.mean) + " vs quadrature " + fmt(exact_gain) + ", p " +
               fmt(r.p_value) + ", rho 0.5");
}

void criterion_4() {
    RngStream rng(SeedSpec{1004, 0});
    AuditPolicy policy;
    policy.engine = EnginePolicy{4};
    int certifications = 0;
    int finite_checked = 0;
    bool exact_all_zero = true;
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + static_cast<int>(rng.next_index(2));
        const int m = 2 + static_cast<int>(rng.next_index(2));
        const ModelDims dims(n, m);
        const int variant = k % 4;

        std::optional<DistributionModel> model;
        std::optional<FiniteModel> fm;
        if (variant == 0) {
            model = DistributionModel::independent(dims, MarginalSpec::uniform());
        } else if (variant == 1) {
            model = DistributionModel::independent(dims, MarginalSpec::make_beta(2.0, 2.0));
        } else if (variant == 2) {
            const ModelDims d2(2, m);
            model = DistributionModel::gaussian_copula(d2, MarginalSpec::uniform(),
                                                       cross_agent_correlation(m, 0.3));
        } else {
            fm = random_finite_model(rng, n, m);
            model = fm->to_distribution();
        }
        const ModelDims used = model->dims();
        const int agent = static_cast<int>(rng.next_index(used.n_agents));
        const int dictator = static_cast<int>(rng.next_index(used.n_agents));

        TypeVector truth;
        if (fm) {
            const int pick = rng.next_index(static_cast<int>(fm->atoms().size()));
            truth = fm->atoms()[static_cast<std::size_t>(pick)].profile.agent_vector(agent);
        } else {
            std::vector<double> v;
            for (int x = 0; x < used.n_alternatives; ++x) v.push_back(rng.next_open01());
            truth = TypeVector(std::move(v));
        }

        const Mechanism mech = DictatorialRule(dictator);
        const SeedSpec seed{1004, static_cast<std::uint64_t>(k + 1) << 24};
        const auto found =
            search_deviation(mech, *model, agent, truth, DeviationGridSpec{}, seed, 20000, policy);
        if (found.verdict == AuditVerdict::violation_certified) ++certifications;

        if (fm) {
            auto candidates = level_grid(used.n_alternatives);
            candidates.push_back(truth);
            auto [best, gain] = exact_best_response(mech, *fm, agent, truth, candidates);
            exact_all_zero = exact_all_zero && gain == 0.0 && best == truth;
            ++finite_checked;
        }
    }
    const bool pass = certifications <= 5 && exact_all_zero;
    report(4, "dictatorships survive 100 randomized audits", pass,
           std::to_string(certifications) + "/100 false certifications (<=5 allowed); exact "
           "best-response gain 0 in " +
               std::to_string(finite_checked) + "/" + std::to_string(finite_checked) +
               " finite cases");
}

const Frontier& acceptance_frontier() {
    static const Frontier f = sweep_simplex(
        DistributionModel::independent(ModelDims(2, 2), MarginalSpec::uniform()), 10,
        SeedSpec{1005, 0}, 1000000, EnginePolicy{4});
    return f;
}

void criterion_5() {
    const auto& f = acceptance_frontier();
    const auto& dict0 = f.points.back();   // lambda = (1,0)
    const auto& mid = f.points[5];         // lambda = (0.5,0.5)
    const double u0 = 2.0 / 3.0;
    const double mid_target = oracle::utilitarian_ex_ante_n2();
    const bool pass =
        std::abs(dict0.payoffs[0].mean - u0) <= 3.0 * dict0.payoffs[0].std_error &&
        std::abs(dict0.payoffs[1].mean - 0.5) <= 3.0 * dict0.payoffs[1].std_error &&
        std::abs(mid.payoffs[0].mean - mid_target) <= 3.0 * mid.payoffs[0].std_error &&
        std::abs(mid.payoffs[1].mean - mid_target) <= 3.0 * mid.payoffs[1].std_error;
    report(5, "frontier endpoints and interior match closed forms", pass,
           "pi(f_(1,0)) = (" + fmt(dict0.payoffs[0].mean) + ", " + fmt(dict0.payoffs[1].mean) +
               ") vs (2/3, 1/2); pi(f_mid) = (" + fmt(mid.payoffs[0].mean) + ", " +
               fmt(mid.payoffs[1].mean) + ") vs 37/60 = " + fmt(mid_target));
}

void criterion_6() {
    const auto& f = acceptance_frontier();
    const auto model =
        DistributionModel::independent(ModelDims(2, 2), MarginalSpec::uniform());
    struct Named {
        const char* name;
        Mechanism mech;
    };
    const Named comparators[] = {
        {"uniform-random", UniformRandomRule{}},
        {"random-dictatorship", RandomDictatorshipRule(WeightVector::equal(2))},
        {"plurality", PluralityRule{}},
        {"borda", BordaRule{}},
    };
    bool all_passed = true;
    std::uint64_t stream = 1;
    for (const auto& cand : comparators) {
        const auto verdicts = scalarization_check(
            f, cand.mech, model, SeedSpec{1006, stream++ << 24}, 1000000, EnginePolicy{4});
        for (const auto& v : verdicts) all_passed = all_passed && v.passed;
    }

    // Three agents: plurality strictly inside the frontier at equal weights.
    const auto model3 =
        DistributionModel::independent(ModelDims(3, 2), MarginalSpec::uniform());
    const auto f3 =
        sweep_simplex(model3, 3, SeedSpec{1007, 0}, 1000000, EnginePolicy{4});
    const auto verdicts3 = scalarization_check(f3, PluralityRule{}, model3, SeedSpec{1008, 0},
                                               1000000, EnginePolicy{4});
    double margin = 0.0;
    double cand_val = 0.0;
    double front_val = 0.0;
    bool found = false;
    for (std::size_t j = 0; j < f3.points.size(); ++j) {
        const auto& w = f3.points[j].weights;
        all_passed = all_passed && verdicts3[j].passed;
        if (w[0] == w[1] && w[1] == w[2]) {
            found = true;
            margin = verdicts3[j].margin;
            cand_val = verdicts3[j].candidate_value;
            front_val = verdicts3[j].frontier_value;
        }
    }
    const bool pass = all_passed && found && margin > 0.005 &&
                      std::abs(cand_val - oracle::plurality_ex_ante_n3_m2()) <= 0.003 &&
                      std::abs(front_val - oracle::utilitarian_ex_ante_n3()) <= 0.003;
    report(6, "no comparator beats its scalarized frontier point", pass,
           "4 comparators x 11 weights all dominated; n=3 plurality " + fmt(cand_val) +
               " (7/12) vs utilitarian " + fmt(front_val) + " (1499/2520), margin " +
               fmt(margin) + " > 0.005");
}

void criterion_7() {
    std::vector<FiniteModel> corpus;
    corpus.push_back(four_corner_model());
    RngStream rng(SeedSpec{1009, 0});
    while (corpus.size() < 11) {
        const int n = 2 + static_cast<int>(rng.next_index(2));
        const int m = 2 + static_cast<int>(rng.next_index(2));
        corpus.push_back(random_finite_model(rng, n, m));
    }

    const auto corner_util = exact_ex_ante(
        WeightedUtilitarianRule(WeightVector::equal(2)), corpus.front());
    bool pass = corner_util[0].value == 0.75 && corner_util[1].value == 0.75;

    int checked = 0;
    int misses = 0;
    std::uint64_t stream = 0;
    const EnginePolicy engine{4};
    // Deterministic conditioning sets give SE = 0; allow an ulp-scale slack so
    // the comparison still demands bitwise-level agreement there.
    const auto check = [&](double exact, const EstimateWithCI& mc) {
        ++checked;
        const double tol = 4.0 * mc.std_error + 1e-12 * std::max(1.0, std::abs(exact));
        if (std::abs(mc.mean - exact) > tol) {
            ++misses;
            std::fprintf(stderr, "  estimand %d: exact %.17g mc %.17g se %.3g n %llu\n",
                         checked, exact, mc.mean, mc.std_error,
                         static_cast<unsigned long long>(mc.n_samples));
        }
    };
    for (const auto& fm : corpus) {
        const auto dist = fm.to_distribution();
        const int n = fm.dims().n_agents;
        const Mechanism rules[] = {
            WeightedUtilitarianRule(WeightVector::equal(n)),
            DictatorialRule(0),
        };
        for (const auto& mech : rules) {
            const SeedSpec seed{1010, (stream++) << 24};
            const auto exact = exact_ex_ante(mech, fm);
            const auto mc = ex_ante_payoffs(mech, dist, seed, 100000, engine);
            for (int i = 0; i < n; ++i)
                check(exact[static_cast<std::size_t>(i)].value,
                      mc[static_cast<std::size_t>(i)]);

            for (int i = 0; i < n; ++i) {
                const TypeVector truth = fm.atoms().front().profile.agent_vector(i);
                const TypeVector alt = fm.atoms().back().profile.agent_vector(i);
                const SeedSpec iseed{1010, (stream++) << 24};
                const InterimQuery q{i, truth, truth};
                check(exact_interim(mech, fm, q).value,
                      interim_payoff(mech, dist, q, iseed, 100000, engine));
                const double exact_gain =
                    exact_interim(mech, fm, InterimQuery{i, truth, alt}).value -
                    exact_interim(mech, fm, q).value;
                check(exact_gain, paired_deviation_gain(mech, dist, i, truth, alt, iseed,
                                                        100000, engine));
            }
        }
    }
    pass = pass && misses == 0;
    report(7, "monte carlo agrees with exact enumeration on 11 finite models", pass,
           std::to_string(checked - misses) + "/" + std::to_string(checked) +
               " estimands within 4 SE (ex ante, interim, deviation gain); corner model "
               "exactly (0.75, 0.75)");
}

void criterion_8() {
    RngStream rng(SeedSpec{1011, 0});
    long long draws = 0;
    long long exceptions = 0;
    for (int t = 0; t < 10000; ++t) {
        const int variant = t % 3;
        const int m = 2 + static_cast<int>(rng.next_index(2));
        const int n = variant == 2 ? 2 : 2 + static_cast<int>(rng.next_index(2));
        const ModelDims dims(n, m);
        DistributionModel model =
            variant == 0 ? DistributionModel::independent(dims, MarginalSpec::uniform())
            : variant == 1
                ? DistributionModel::independent(dims, MarginalSpec::make_beta(2.0, 2.0))
                : DistributionModel::gaussian_copula(dims, MarginalSpec::uniform(),
                                                     cross_agent_correlation(m, 0.5));

        std::vector<double> w;
        for (int i = 0; i < n; ++i) w.push_back(0.1 + rng.next_open01());
        const WeightedUtilitarianRule rule{WeightVector(std::move(w))};

        const int agent = static_cast<int>(rng.next_index(n));
        std::vector<double> uv;
        for (int x = 0; x < m; ++x) uv.push_back(rng.next_open01());
        const TypeVector u(std::move(uv));
        const int b = argmax_with_tiebreak(u.span());

        TypeVector low = u;
        TypeVector high = u;
        high[b] = (t % 4 == 0) ? 1.0 : u[b] + (1.0 - u[b]) * rng.next_open01();

        auto sampler = model.conditional_others(agent, u);
        TypeProfile profile(dims);
        std::vector<double> lot(static_cast<std::size_t>(m));
        for (int d = 0; d < 20; ++d) {
            sampler.sample_into(rng, profile);
            profile.set_agent(agent, low.span());
            rule.choose_into(profile, lot);
            const auto x_low = std::max_element(lot.begin(), lot.end()) - lot.begin();
            profile.set_agent(agent, high.span());
            rule.choose_into(profile, lot);
            const auto x_high = std::max_element(lot.begin(), lot.end()) - lot.begin();
            ++draws;
            if (x_low == b && x_high != b) ++exceptions;
        }
    }
    report(8, "raising the top report never dislodges the top alternative", exceptions == 0,
           std::to_string(exceptions) + " exceptions in " + std::to_string(draws) +
               " CRN draw pairs across 10000 cases");
}

void criterion_9() {
    struct Case {
        DistributionModel model;
        WeightVector lambda;
        TypeVector u;
    };
    const std::vector<Case> cases = {
        {DistributionModel::independent(ModelDims(2, 3), MarginalSpec::uniform()),
         WeightVector{0.5, 0.5}, TypeVector{0.55, 0.7, 0.2}},
        {DistributionModel::independent(ModelDims(2, 3), MarginalSpec::make_beta(2.0, 2.0)),
         WeightVector{0.6, 0.4}, TypeVector{0.6, 0.75, 0.3}},
        {DistributionModel::independent(ModelDims(3, 3), MarginalSpec::uniform()),
         WeightVector{0.4, 0.3, 0.3}, TypeVector{0.5, 0.65, 0.1}},
    };
    bool pass = true;
    std::string detail;
    std::uint64_t stream = 0;
    for (const auto& cs : cases) {
        const auto c = check_condition_u(cs.lambda, 0, cs.u);
        if (!c) {
            pass = false;
            break;
        }
        const Mechanism mech = WeightedUtilitarianRule(cs.lambda);
        const SeedSpec seed{1012, (stream++) << 28};
        double first_pe = -1.0;
        for (const double vb : {cs.u[c->best_alternative], 0.9, 1.0}) {
            const auto d =
                event_E_decomposition(cs.lambda, cs.model, *c, vb, seed, 200000,
                                      EnginePolicy{4});
            if (first_pe < 0.0)
                first_pe = d.prob_event.mean;
            else if (d.prob_event.mean != first_pe)  // CRN: bit-identical P(E)
                pass = false;
            if (!d.conditional_defined) {
                pass = false;
                continue;
            }
            TypeVector rep = cs.u;
            rep[c->best_alternative] = vb;
            const auto probs = interim_choice_probabilities(
                mech, cs.model, InterimQuery{0, cs.u, rep},
                seed.with_stream_offset(1 << 20), 200000, EnginePolicy{4});
            const auto& direct = probs[static_cast<std::size_t>(c->runner_up)];
            const double prod_a = d.prob_event.mean * d.prob_a_beats_b_given_event.mean;
            const double se_prod = d.prob_event.mean * d.prob_a_beats_b_given_event.std_error +
                                   d.prob_a_beats_b_given_event.mean * d.prob_event.std_error;
            if (std::abs(prod_a - direct.mean) > 3.0 * (se_prod + direct.std_error))
                pass = false;
        }
        detail += (detail.empty() ? "P(E)=" : ", ") + fmt(first_pe);
    }
    report(9, "event factorization matches the direct estimate", pass,
           "3 cases at m=3: product vs direct within 3 SE; " + detail +
               " bit-identical across reports");
}

void criterion_10() {
    const std::string cli = MECHLAB_CLI_PATH;
    const std::string configs = MECHLAB_CONFIG_DIR;
    const fs::path base = fs::temp_directory_path() / "mechlab-acceptance";
    fs::remove_all(base);
    bool pass = true;
    int files_compared = 0;
    for (const auto& [config, samples] :
         {std::pair<const char*, const char*>{"running-example.json", "150000"},
          std::pair<const char*, const char*>{"frontier-sweep.json", "50000"}}) {
        const fs::path d1 = base / (std::string(config) + "-t1");
        const fs::path d4 = base / (std::string(config) + "-t4");
        for (const auto& [dir, threads] : {std::pair<fs::path, const char*>{d1, "1"},
                                           std::pair<fs::path, const char*>{d4, "4"}}) {
            const std::string cmd = cli + " run --config " + configs + "/" + config +
                                    " --out " + dir.string() + " --samples " + samples +
                                    " --threads " + threads + " > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) pass = false;
        }
        for (const auto& entry : fs::directory_iterator(d1)) {
            if (entry.path().extension() != ".csv") continue;
            ++files_compared;
            if (slurp(entry.path()) != slurp(d4 / entry.path().filename())) pass = false;
        }
    }
    report(10, "thread count never changes a byte of output", pass,
           std::to_string(files_compared) + " CSV files byte-identical between --threads 1 and "
           "--threads 4 (2 configs)");
}

}  // namespace

int main() {
    std::printf("acceptance: %s\n", kVersion);
    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
