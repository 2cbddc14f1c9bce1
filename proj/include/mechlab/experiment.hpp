#pragma once

#include <charconv>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mechlab/audit.hpp"
#include "mechlab/config.hpp"
#include "mechlab/frontier.hpp"
#include "mechlab/oracle.hpp"
#include "mechlab/payoff.hpp"

namespace mechlab {

/// Shortest decimal that round-trips, capped at 17 significant digits; '.'
/// separator regardless of locale. Used for every float written to CSV so
/// outputs compare byte-for-byte.
inline std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

inline std::string format_type_vector(const TypeVector& v) {
    std::string out;
    for (int x = 0; x < v.size(); ++x) {
        if (x) out += ';';
        out += format_double(v[x]);
    }
    return out;
}

/// CSV with LF line endings and a manifest-hash reference on the first line.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& manifest_hash)
        : out_(path, std::ios::binary) {
        if (!out_) throw ParameterError("cannot open output file " + path.string());
        out_ << "# manifest=" << manifest_hash << "\n";
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

struct JobOutcome {
    std::string label;
    std::string file;
    std::uint64_t stream = 0;
    std::size_t samples = 0;
    std::string summary;
    bool violation_certified = false;
};

struct RunResult {
    std::vector<JobOutcome> outcomes;
    std::string manifest_path;
    bool any_violation = false;
};

namespace detail {

inline std::string iso8601_utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[24];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Jobs are spaced 2^32 streams apart; chunk and frontier-point offsets stay
// far below that.
inline constexpr std::uint64_t kJobStreamStride = std::uint64_t{1} << 32;

struct JobContext {
    const ExperimentConfig& cfg;
    EnginePolicy engine;
    std::string hash_hex;
    std::filesystem::path out_dir;
};

inline std::string flag(bool b) { return b ? "true" : "false"; }

inline JobOutcome run_ex_ante(const JobContext& ctx, const JobSpec& spec, const ExAnteJob& job,
                              SeedSpec seed) {
    const auto& mech = ctx.cfg.mechanisms.at(job.mechanism);
    auto payoffs = ex_ante_payoffs(mech, ctx.cfg.distribution, seed, job.samples, ctx.engine);
    CsvWriter csv(ctx.out_dir / (spec.label + ".csv"), ctx.hash_hex);
    csv.row({"agent", "mean", "se", "n"});
    std::string summary = "means";
    for (std::size_t i = 0; i < payoffs.size(); ++i) {
        csv.row({std::to_string(i), format_double(payoffs[i].mean),
                 format_double(payoffs[i].std_error), std::to_string(payoffs[i].n_samples)});
        summary += (i ? "," : "=[") + format_double(payoffs[i].mean);
    }
    return {spec.label, spec.label + ".csv", seed.stream_id, job.samples, summary + "]", false};
}

inline JobOutcome run_interim(const JobContext& ctx, const JobSpec& spec, const InterimJob& job,
                              SeedSpec seed) {
    const auto& mech = ctx.cfg.mechanisms.at(job.mechanism);
    const InterimQuery query{job.agent, job.true_type, job.report};
    auto probs =
        interim_choice_probabilities(mech, ctx.cfg.distribution, query, seed, job.samples,
                                     ctx.engine);
    auto payoff = interim_payoff(mech, ctx.cfg.distribution, query, seed, job.samples,
                                 ctx.engine);
    CsvWriter csv(ctx.out_dir / (spec.label + ".csv"), ctx.hash_hex);
    csv.row({"agent", "alternative", "prob", "prob_se", "payoff", "payoff_se", "n"});
    for (std::size_t x = 0; x < probs.size(); ++x)
        csv.row({std::to_string(job.agent), std::to_string(x), format_double(probs[x].mean),
                 format_double(probs[x].std_error), format_double(payoff.mean),
                 format_double(payoff.std_error), std::to_string(payoff.n_samples)});
    return {spec.label, spec.label + ".csv", seed.stream_id, job.samples,
            "payoff=" + format_double(payoff.mean), false};
}

inline JobOutcome run_audit(const JobContext& ctx, const JobSpec& spec, const AuditJob& job,
                            SeedSpec seed) {
    const auto& mech = ctx.cfg.mechanisms.at(job.mechanism);
    const bool a1_violated = !ctx.cfg.distribution.assumption1_satisfied();
    AuditPolicy policy;
    policy.engine = ctx.engine;

    const auto weights_it = ctx.cfg.utilitarian_weights.find(job.mechanism);
    std::optional<DeviationReport> report;
    if (job.mode == AuditMode::extremization) {
        if (weights_it != ctx.cfg.utilitarian_weights.end()) {
            try {
                if (auto c = check_condition_u(weights_it->second, job.agent, job.true_type))
                    report = audit_extremization(weights_it->second, ctx.cfg.distribution, *c,
                                                 seed, job.samples, policy)
                                 .report;
            } catch (const PreconditionError&) {
                // zero-weight agent: no extremization case exists
            }
        }
    } else {
        DeviationGridSpec grid;
        if (weights_it != ctx.cfg.utilitarian_weights.end())
            grid.utilitarian_weights = weights_it->second;
        report = search_deviation(mech, ctx.cfg.distribution, job.agent, job.true_type, grid,
                                  seed, job.samples, policy);
    }

    CsvWriter csv(ctx.out_dir / (spec.label + ".csv"), ctx.hash_hex);
    csv.row({"agent", "gain", "se", "p_value", "verdict", "deviation", "assumption1_violated"});
    std::string verdict = "not-applicable";
    bool certified = false;
    if (report) {
        verdict = verdict_name(report->verdict);
        certified = report->verdict == AuditVerdict::violation_certified;
        csv.row({std::to_string(job.agent), format_double(report->paired_gain.mean),
                 format_double(report->paired_gain.std_error), format_double(report->p_value),
                 verdict, format_type_vector(report->deviation_used), flag(a1_violated)});
    } else {
        csv.row({std::to_string(job.agent), "0", "0", "1", verdict, "", flag(a1_violated)});
    }
    return {spec.label, spec.label + ".csv", seed.stream_id, job.samples, "verdict=" + verdict,
            certified};
}

inline JobOutcome run_sweep(const JobContext& ctx, const JobSpec& spec, const SweepJob& job,
                            SeedSpec seed) {
    auto frontier =
        sweep_simplex(ctx.cfg.distribution, job.resolution, seed, job.samples, ctx.engine);
    const int n = ctx.cfg.dims.n_agents;
    CsvWriter csv(ctx.out_dir / (spec.label + ".csv"), ctx.hash_hex);
    std::vector<std::string> header;
    for (int i = 0; i < n; ++i) header.push_back("lambda_" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) header.push_back("payoff_" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) header.push_back("se_" + std::to_string(i + 1));
    csv.row(header);
    for (const auto& pt : frontier.points) {
        std::vector<std::string> row;
        for (int i = 0; i < n; ++i) row.push_back(format_double(pt.weights[i]));
        for (int i = 0; i < n; ++i)
            row.push_back(format_double(pt.payoffs[static_cast<std::size_t>(i)].mean));
        for (int i = 0; i < n; ++i)
            row.push_back(format_double(pt.payoffs[static_cast<std::size_t>(i)].std_error));
        csv.row(row);
    }
    return {spec.label, spec.label + ".csv", seed.stream_id, job.samples,
            std::to_string(frontier.points.size()) + " frontier points", false};
}

inline JobOutcome run_oracle(const JobContext& ctx, const JobSpec& spec, const OracleJob& job,
                             SeedSpec seed) {
    const auto& mech = ctx.cfg.mechanisms.at(job.mechanism);
    const auto fm = FiniteModel::from_distribution(ctx.cfg.distribution);
    const int n = ctx.cfg.dims.n_agents;
    CsvWriter csv(ctx.out_dir / (spec.label + ".csv"), ctx.hash_hex);
    csv.row({"estimand", "agent", "exact", "mc_mean", "mc_se", "n", "within_4se"});
    bool all_within = true;
    const auto emit = [&](const std::string& estimand, int agent, double exact,
                          const EstimateWithCI& mc) {
        const bool within = std::abs(mc.mean - exact) <= 4.0 * mc.std_error;
        all_within = all_within && within;
        csv.row({estimand, std::to_string(agent), format_double(exact), format_double(mc.mean),
                 format_double(mc.std_error), std::to_string(mc.n_samples), flag(within)});
    };

    auto exact_ea = exact_ex_ante(mech, fm);
    auto mc_ea = ex_ante_payoffs(mech, ctx.cfg.distribution, seed, job.samples, ctx.engine);
    for (int i = 0; i < n; ++i)
        emit("ex-ante", i, exact_ea[static_cast<std::size_t>(i)].value,
             mc_ea[static_cast<std::size_t>(i)]);

    // Interim and paired-gain spot checks: condition on the first atom's type,
    // deviate to the last atom's.
    for (int i = 0; i < n; ++i) {
        const TypeVector truth{fm.atoms().front().profile.agent_vector(i)};
        const TypeVector alt{fm.atoms().back().profile.agent_vector(i)};
        const SeedSpec agent_seed = seed.with_stream_offset(
            static_cast<std::uint64_t>(i + 1) * kFrontierStreamStride);
        const InterimQuery q{i, truth, truth};
        emit("interim", i, exact_interim(mech, fm, q).value,
             interim_payoff(mech, ctx.cfg.distribution, q, agent_seed, job.samples,
                            ctx.engine));
        const double exact_gain = exact_interim(mech, fm, InterimQuery{i, truth, alt}).value -
                                  exact_interim(mech, fm, q).value;
        emit("deviation-gain", i, exact_gain,
             paired_deviation_gain(mech, ctx.cfg.distribution, i, truth, alt, agent_seed,
                                   job.samples, ctx.engine));
    }
    return {spec.label, spec.label + ".csv", seed.stream_id, job.samples,
            "all-within-4se=" + flag(all_within), false};
}

}  // namespace detail

/// Executes every job in declaration order, writes one CSV per job plus a
/// manifest, and reports per-job outcomes. A filter restricts which jobs run
/// without disturbing the seed each job would get in a full run.
inline RunResult run_experiment(const ExperimentConfig& cfg, EnginePolicy engine = {},
                                const std::function<bool(const JobSpec&)>& filter = {}) {
    detail::JobContext ctx{cfg, engine, config_hash_hex(cfg.source),
                           std::filesystem::path(cfg.output_dir)};
    std::filesystem::create_directories(ctx.out_dir);
    const std::string started = detail::iso8601_utc_now();

    RunResult result;
    for (std::size_t j = 0; j < cfg.jobs.size(); ++j) {
        const auto& spec = cfg.jobs[j];
        if (filter && !filter(spec)) continue;
        const SeedSpec seed = cfg.seed.with_stream_offset(j * detail::kJobStreamStride);
        JobOutcome outcome = std::visit(
            [&](const auto& job) -> JobOutcome {
                using T = std::decay_t<decltype(job)>;
                if constexpr (std::is_same_v<T, ExAnteJob>)
                    return detail::run_ex_ante(ctx, spec, job, seed);
                else if constexpr (std::is_same_v<T, InterimJob>)
                    return detail::run_interim(ctx, spec, job, seed);
                else if constexpr (std::is_same_v<T, AuditJob>)
                    return detail::run_audit(ctx, spec, job, seed);
                else if constexpr (std::is_same_v<T, SweepJob>)
                    return detail::run_sweep(ctx, spec, job, seed);
                else
                    return detail::run_oracle(ctx, spec, job, seed);
            },
            spec.spec);
        result.any_violation = result.any_violation || outcome.violation_certified;
        result.outcomes.push_back(std::move(outcome));
    }

    nlohmann::json manifest;
    manifest["config_hash"] = ctx.hash_hex;
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed.master_seed;
    manifest["started"] = started;
    manifest["finished"] = detail::iso8601_utc_now();
    manifest["jobs"] = nlohmann::json::array();
    for (const auto& o : result.outcomes)
        manifest["jobs"].push_back({{"label", o.label},
                                    {"file", o.file},
                                    {"stream", o.stream},
                                    {"samples", o.samples},
                                    {"summary", o.summary}});
    manifest["outcome"] = {{"jobs_run", result.outcomes.size()},
                           {"violations_certified", result.any_violation}};
    const auto manifest_path = ctx.out_dir / "manifest.json";
    std::ofstream mout(manifest_path, std::ios::binary);
    if (!mout) throw ParameterError("cannot open output file " + manifest_path.string());
    mout << manifest.dump(2) << "\n";
    result.manifest_path = manifest_path.string();
    return result;
}

}  // namespace mechlab
