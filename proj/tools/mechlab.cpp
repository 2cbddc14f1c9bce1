// Batch experiment driver: config in, CSVs + manifest out.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mechlab/mechlab.hpp"

namespace {

struct CommonOpts {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<int> threads;
    std::optional<std::string> out;
    bool fail_on_violation = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "override master seed");
    cmd->add_option("--samples", o.samples, "override sample count for every job");
    cmd->add_option("--threads", o.threads, "worker threads (default: MECHLAB_THREADS or 1)");
    cmd->add_option("--out", o.out, "output directory (overrides config)");
    cmd->add_flag("--fail-on-violation", o.fail_on_violation,
                  "exit 2 when any audit certifies a violation");
}

int resolve_threads(const CommonOpts& o) {
    if (o.threads) return *o.threads > 0 ? *o.threads : 1;
    if (const char* env = std::getenv("MECHLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

template <typename Job>
bool is_job_kind(const mechlab::JobSpec& spec) {
    return std::holds_alternative<Job>(spec.spec);
}

int execute(const CommonOpts& opts, const std::function<bool(const mechlab::JobSpec&)>& filter,
            const char* kind_label) {
    mechlab::ConfigOverrides overrides{opts.seed, opts.samples, opts.out};
    try {
        const auto cfg = mechlab::load_experiment_file(opts.config, overrides);
        if (filter) {
            bool any = false;
            for (const auto& job : cfg.jobs) any = any || filter(job);
            if (!any) {
                std::cerr << "error: config defines no " << kind_label << " jobs\n";
                return 1;
            }
        }
        const auto result =
            mechlab::run_experiment(cfg, mechlab::EnginePolicy{resolve_threads(opts)}, filter);
        for (const auto& o : result.outcomes)
            std::cout << o.label << ": " << o.summary << " -> " << o.file << "\n";
        std::cout << "manifest: " << result.manifest_path << "\n";
        if (result.any_violation && opts.fail_on_violation) return 2;
        return 0;
    } catch (const mechlab::ConfigError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << "error: " << d << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int validate(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read config file '" << path << "'\n";
        return 1;
    }
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "error: JSON parse error: " << e.what() << "\n";
        return 1;
    }
    const auto diags = mechlab::validate_experiment_config(root);
    if (diags.empty()) {
        std::cout << "ok\n";
        return 0;
    }
    for (const auto& d : diags) std::cerr << "error: " << d << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mechlab: social-choice mechanism experiments"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, audit_opts, oracle_opts;
    std::string validate_path;

    auto* run_cmd = app.add_subcommand("run", "execute every job in the config");
    add_common(run_cmd, run_opts);
    auto* validate_cmd = app.add_subcommand("validate", "check a config without running it");
    validate_cmd->add_option("--config", validate_path, "experiment config (JSON)")->required();
    auto* sweep_cmd = app.add_subcommand("sweep", "execute only the sweep jobs");
    add_common(sweep_cmd, sweep_opts);
    auto* audit_cmd = app.add_subcommand("audit", "execute only the audit jobs");
    add_common(audit_cmd, audit_opts);
    auto* oracle_cmd = app.add_subcommand("oracle", "execute only the oracle-crosscheck jobs");
    add_common(oracle_cmd, oracle_opts);

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return execute(run_opts, {}, "");
    if (validate_cmd->parsed()) return validate(validate_path);
    if (sweep_cmd->parsed())
        return execute(sweep_opts, is_job_kind<mechlab::SweepJob>, "sweep");
    if (audit_cmd->parsed())
        return execute(audit_opts, is_job_kind<mechlab::AuditJob>, "audit");
    return execute(oracle_opts, is_job_kind<mechlab::OracleJob>, "oracle-crosscheck");
}
