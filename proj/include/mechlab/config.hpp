#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mechlab/core.hpp"
#include "mechlab/distributions.hpp"
#include "mechlab/linalg.hpp"
#include "mechlab/mechanisms.hpp"
#include "mechlab/rng.hpp"

namespace mechlab {

/// Thrown when a config fails validation; carries every diagnostic found, not
/// just the first.
class ConfigError : public ParameterError {
public:
    explicit ConfigError(std::vector<std::string> diagnostics)
        : ParameterError(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    static std::string join(const std::vector<std::string>& ds) {
        std::string out = "config invalid:";
        for (const auto& d : ds) out += "\n  - " + d;
        return out;
    }

    std::vector<std::string> diagnostics_;
};

/// FNV-1a over the canonical dump (nlohmann objects are key-sorted, so the
/// hash is stable under key reordering in the source file).
inline std::uint64_t config_hash(const nlohmann::json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string config_hash_hex(const nlohmann::json& j) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(j)));
    return std::string(buf);
}

enum class AuditMode { extremization, grid };

struct ExAnteJob {
    std::string mechanism;
    std::size_t samples = 0;
};

struct InterimJob {
    std::string mechanism;
    int agent = 0;
    TypeVector true_type;
    TypeVector report;
    std::size_t samples = 0;
};

struct AuditJob {
    std::string mechanism;
    int agent = 0;
    TypeVector true_type;
    AuditMode mode = AuditMode::extremization;
    std::size_t samples = 0;
};

struct SweepJob {
    int resolution = 10;
    std::size_t samples = 0;
};

struct OracleJob {
    std::string mechanism;
    std::size_t samples = 0;
};

struct JobSpec {
    std::string label;  // "<kind>-<index>", doubles as the CSV stem
    std::variant<ExAnteJob, InterimJob, AuditJob, SweepJob, OracleJob> spec;
};

/// Command-line overrides applied after the file parses. They change the run,
/// not the config hash.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;  // replaces every job's sample count
    std::optional<std::string> output_dir;
};

struct ExperimentConfig {
    ModelDims dims;
    DistributionModel distribution;
    std::map<std::string, Mechanism> mechanisms;
    // Weight vectors for the weighted-utilitarian entries; audits use these to
    // build extremization cases.
    std::map<std::string, WeightVector> utilitarian_weights;
    std::vector<JobSpec> jobs;
    SeedSpec seed;
    std::size_t default_samples = 100000;
    std::string output_dir;
    nlohmann::json source;
    std::uint64_t hash = 0;
};

namespace detail {

// Collects diagnostics while building the strongly-typed config; nothing is
// thrown until the whole file has been inspected.
class ConfigReader {
public:
    explicit ConfigReader(const nlohmann::json& root) : root_(root) {}

    ExperimentConfig read(const ConfigOverrides& overrides) {
        if (!root_.is_object()) {
            fail("top level must be a JSON object");
            throw ConfigError(std::move(diags_));
        }
        check_known_keys(root_, "",
                         {"agents", "alternatives", "distribution", "mechanism", "mechanisms",
                          "jobs", "seed", "samples", "output_dir"});
        read_dims();
        read_scalars();
        read_distribution();
        read_mechanisms();
        read_jobs();
        if (!diags_.empty()) throw ConfigError(std::move(diags_));

        ExperimentConfig cfg{ModelDims(n_, m_),
                             std::move(*distribution_),
                             std::move(mechanisms_),
                             std::move(utilitarian_weights_),
                             std::move(jobs_),
                             SeedSpec{overrides.seed.value_or(seed_), 0},
                             overrides.samples.value_or(default_samples_),
                             overrides.output_dir.value_or(output_dir_),
                             root_,
                             config_hash(root_)};
        if (overrides.samples)
            for (auto& job : cfg.jobs)
                std::visit([&](auto& j) { j.samples = *overrides.samples; }, job.spec);
        return cfg;
    }

private:
    void fail(std::string msg) { diags_.push_back(std::move(msg)); }

    // Keys starting with '_' are comments and always allowed.
    void check_known_keys(const nlohmann::json& obj, const std::string& where,
                          std::initializer_list<const char*> known) {
        for (const auto& [key, _] : obj.items()) {
            if (!key.empty() && key[0] == '_') continue;
            bool ok = false;
            for (const char* k : known)
                if (key == k) ok = true;
            if (!ok) fail(where.empty() ? "unknown key '" + key + "'"
                                        : where + ": unknown key '" + key + "'");
        }
    }

    std::optional<std::int64_t> read_int(const nlohmann::json& obj, const std::string& key,
                                         const std::string& where, bool required) {
        if (!obj.contains(key)) {
            if (required) fail(where + ": missing required key '" + key + "'");
            return std::nullopt;
        }
        if (!obj[key].is_number_integer() && !obj[key].is_number_unsigned()) {
            fail(where + ": '" + key + "' must be an integer");
            return std::nullopt;
        }
        return obj[key].get<std::int64_t>();
    }

    std::optional<std::size_t> read_samples(const nlohmann::json& obj, const std::string& where) {
        auto v = read_int(obj, "samples", where, false);
        if (!v) return std::nullopt;
        if (*v <= 0) {
            fail(where + ": samples must be positive");
            return std::nullopt;
        }
        return static_cast<std::size_t>(*v);
    }

    void read_dims() {
        auto n = read_int(root_, "agents", "config", true);
        auto m = read_int(root_, "alternatives", "config", true);
        if (n && *n < 2) fail("agents must be at least 2");
        if (m && *m < 2) fail("alternatives must be at least 2");
        dims_ok_ = n && m && *n >= 2 && *m >= 2;
        if (dims_ok_) {
            n_ = static_cast<int>(*n);
            m_ = static_cast<int>(*m);
        }
    }

    void read_scalars() {
        if (root_.contains("seed")) {
            const auto& s = root_["seed"];
            if (s.is_number_unsigned())
                seed_ = s.get<std::uint64_t>();
            else if (s.is_number_integer() && s.get<std::int64_t>() >= 0)
                seed_ = static_cast<std::uint64_t>(s.get<std::int64_t>());
            else
                fail("seed must be a nonnegative integer");
        }
        if (auto v = read_samples(root_, "config")) default_samples_ = *v;
        if (root_.contains("output_dir")) {
            if (root_["output_dir"].is_string())
                output_dir_ = root_["output_dir"].get<std::string>();
            else
                fail("output_dir must be a string");
        }
    }

    std::optional<MarginalSpec> read_marginal(const nlohmann::json& j, const std::string& where) {
        if (j.is_string()) {
            if (j.get<std::string>() == "uniform") return MarginalSpec::uniform();
            fail(where + ": unknown marginal '" + j.get<std::string>() + "'");
            return std::nullopt;
        }
        if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
            fail(where + ": marginal must be \"uniform\" or an object with a 'family'");
            return std::nullopt;
        }
        const std::string family = j["family"].get<std::string>();
        if (family == "uniform") {
            check_known_keys(j, where, {"family"});
            return MarginalSpec::uniform();
        }
        if (family == "beta") {
            check_known_keys(j, where, {"family", "alpha", "beta"});
            if (!j.contains("alpha") || !j.contains("beta") || !j["alpha"].is_number() ||
                !j["beta"].is_number()) {
                fail(where + ": beta marginal needs numeric 'alpha' and 'beta'");
                return std::nullopt;
            }
            const double a = j["alpha"].get<double>();
            const double b = j["beta"].get<double>();
            if (!(a > 0.0) || !(b > 0.0)) {
                fail(where + ": beta parameters must be positive");
                return std::nullopt;
            }
            return MarginalSpec::make_beta(a, b);
        }
        fail(where + ": unknown marginal family '" + family + "'");
        return std::nullopt;
    }

    // Single spec or per-coordinate list of total_coords specs.
    std::optional<std::vector<MarginalSpec>> read_marginals(const nlohmann::json& obj,
                                                            const std::string& where) {
        if (!obj.contains("marginals")) {
            fail(where + ": missing required key 'marginals'");
            return std::nullopt;
        }
        const auto& j = obj["marginals"];
        const auto coords = static_cast<std::size_t>(n_ * m_);
        if (j.is_array()) {
            if (dims_ok_ && j.size() != coords) {
                fail(where + ": marginals list needs " + std::to_string(coords) +
                     " entries (got " + std::to_string(j.size()) + ")");
                return std::nullopt;
            }
            std::vector<MarginalSpec> out;
            bool ok = true;
            for (std::size_t k = 0; k < j.size(); ++k) {
                auto ms = read_marginal(j[k], where + ": marginals[" + std::to_string(k) + "]");
                if (ms)
                    out.push_back(*ms);
                else
                    ok = false;
            }
            if (!ok || !dims_ok_) return std::nullopt;
            return out;
        }
        auto ms = read_marginal(j, where + ": marginals");
        if (!ms || !dims_ok_) return std::nullopt;
        return std::vector<MarginalSpec>(coords, *ms);
    }

    std::optional<SquareMatrix> read_correlation(const nlohmann::json& obj,
                                                 const std::string& where, bool required) {
        if (!obj.contains("correlation")) {
            if (required) fail(where + ": missing required key 'correlation'");
            return std::nullopt;
        }
        const auto& j = obj["correlation"];
        const auto coords = static_cast<std::size_t>(n_ * m_);
        if (!j.is_array() || j.empty()) {
            fail(where + ": correlation must be a row-major matrix");
            return std::nullopt;
        }
        if (dims_ok_ && j.size() != coords) {
            fail(where + ": correlation matrix must be " + std::to_string(coords) + "x" +
                 std::to_string(coords));
            return std::nullopt;
        }
        std::vector<std::vector<double>> rows;
        for (std::size_t r = 0; r < j.size(); ++r) {
            if (!j[r].is_array() || j[r].size() != j.size()) {
                fail(where + ": correlation row " + std::to_string(r) + " must have " +
                     std::to_string(j.size()) + " entries");
                return std::nullopt;
            }
            std::vector<double> row;
            for (const auto& v : j[r]) {
                if (!v.is_number()) {
                    fail(where + ": correlation entries must be numeric");
                    return std::nullopt;
                }
                row.push_back(v.get<double>());
            }
            rows.push_back(std::move(row));
        }
        auto mat = SquareMatrix::from_rows(rows);
        bool ok = true;
        if (!mat.symmetric_within(1e-12)) {
            fail(where + ": correlation matrix must be symmetric");
            ok = false;
        }
        for (std::size_t d = 0; d < rows.size(); ++d) {
            if (std::abs(rows[d][d] - 1.0) > 1e-12) {
                fail(where + ": correlation matrix needs unit diagonal");
                ok = false;
                break;
            }
        }
        if (ok) {
            const double min_eig = min_eigenvalue_symmetric(mat);
            if (min_eig < -1e-10) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.6g", min_eig);
                fail(where + ": correlation matrix is not positive semidefinite (min eigenvalue " +
                     buf + ")");
                ok = false;
            }
        }
        if (!ok) return std::nullopt;
        return mat;
    }

    std::optional<std::vector<WeightedProfile>> read_atoms(const nlohmann::json& obj,
                                                           const std::string& where) {
        if (!obj.contains("atoms") || !obj["atoms"].is_array() || obj["atoms"].empty()) {
            fail(where + ": finite-support needs a nonempty 'atoms' array");
            return std::nullopt;
        }
        std::vector<WeightedProfile> atoms;
        bool ok = true;
        for (std::size_t k = 0; k < obj["atoms"].size(); ++k) {
            const std::string at = where + ": atoms[" + std::to_string(k) + "]";
            const auto& a = obj["atoms"][k];
            if (!a.is_object() || !a.contains("profile") || !a.contains("prob")) {
                fail(at + " needs 'profile' and 'prob'");
                ok = false;
                continue;
            }
            check_known_keys(a, at, {"profile", "prob"});
            if (!a["prob"].is_number() || !(a["prob"].get<double>() > 0.0)) {
                fail(at + ": prob must be positive");
                ok = false;
            }
            const auto& rows = a["profile"];
            if (!rows.is_array() || (dims_ok_ && rows.size() != static_cast<std::size_t>(n_))) {
                fail(at + ": profile needs one row per agent");
                ok = false;
                continue;
            }
            std::vector<TypeVector> tv;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                auto row = read_type_vector(rows[r], at + " row " + std::to_string(r));
                if (row)
                    tv.push_back(std::move(*row));
                else
                    ok = false;
            }
            if (tv.size() == rows.size() && ok && dims_ok_)
                atoms.push_back({TypeProfile::from_rows(tv), a["prob"].get<double>()});
        }
        if (!ok || !dims_ok_) return std::nullopt;
        return atoms;
    }

    std::optional<TypeVector> read_type_vector(const nlohmann::json& j, const std::string& where) {
        if (!j.is_array() || (dims_ok_ && j.size() != static_cast<std::size_t>(m_))) {
            fail(where + ": needs " + std::to_string(m_) + " payoff entries");
            return std::nullopt;
        }
        std::vector<double> vals;
        for (const auto& v : j) {
            if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0) {
                fail(where + ": payoffs must be numbers in [0,1]");
                return std::nullopt;
            }
            vals.push_back(v.get<double>());
        }
        return TypeVector(std::move(vals));
    }

    void read_distribution() {
        if (!root_.contains("distribution") || !root_["distribution"].is_object()) {
            fail("missing required 'distribution' block");
            return;
        }
        const auto& d = root_["distribution"];
        const std::string where = "distribution";
        if (!d.contains("kind") || !d["kind"].is_string()) {
            fail(where + ": missing 'kind'");
            return;
        }
        const std::string kind = d["kind"].get<std::string>();
        try {
            if (kind == "independent") {
                check_known_keys(d, where, {"kind", "marginals"});
                auto ms = read_marginals(d, where);
                if (ms && dims_ok_)
                    distribution_ = DistributionModel::independent(ModelDims(n_, m_),
                                                                   std::move(*ms));
            } else if (kind == "gaussian-copula") {
                check_known_keys(d, where, {"kind", "marginals", "correlation"});
                auto ms = read_marginals(d, where);
                auto corr = read_correlation(d, where, true);
                if (ms && corr && dims_ok_)
                    distribution_ = DistributionModel::gaussian_copula(
                        ModelDims(n_, m_), std::move(*ms), std::move(*corr));
            } else if (kind == "finite-mixture") {
                check_known_keys(d, where, {"kind", "components"});
                if (!d.contains("components") || !d["components"].is_array() ||
                    d["components"].empty()) {
                    fail(where + ": finite-mixture needs a nonempty 'components' array");
                    return;
                }
                std::vector<DistributionModel::Component> comps;
                bool ok = true;
                for (std::size_t k = 0; k < d["components"].size(); ++k) {
                    const std::string at = where + ": components[" + std::to_string(k) + "]";
                    const auto& c = d["components"][k];
                    if (!c.is_object()) {
                        fail(at + " must be an object");
                        ok = false;
                        continue;
                    }
                    check_known_keys(c, at, {"weight", "marginals", "correlation"});
                    DistributionModel::Component comp;
                    if (!c.contains("weight") || !c["weight"].is_number() ||
                        !(c["weight"].get<double>() > 0.0)) {
                        fail(at + ": weight must be positive");
                        ok = false;
                    } else {
                        comp.weight = c["weight"].get<double>();
                    }
                    auto ms = read_marginals(c, at);
                    if (!ms) ok = false;
                    auto corr = read_correlation(c, at, false);
                    if (c.contains("correlation") && !corr) ok = false;
                    if (ok && ms) {
                        comp.marginals = std::move(*ms);
                        if (corr) comp.correlation = std::move(*corr);
                        comps.push_back(std::move(comp));
                    }
                }
                if (ok && dims_ok_ && comps.size() == d["components"].size())
                    distribution_ = DistributionModel::finite_mixture(ModelDims(n_, m_), comps);
            } else if (kind == "finite-support") {
                check_known_keys(d, where, {"kind", "atoms"});
                auto atoms = read_atoms(d, where);
                if (atoms && dims_ok_)
                    distribution_ = DistributionModel::finite_support(ModelDims(n_, m_),
                                                                      std::move(*atoms));
            } else if (kind == "vnm-restricted") {
                check_known_keys(d, where, {"kind"});
                if (dims_ok_) distribution_ = DistributionModel::vnm_restricted(ModelDims(n_, m_));
            } else {
                fail(where + ": unknown kind '" + kind + "'");
            }
        } catch (const std::exception& e) {
            fail(where + ": " + e.what());
        }
    }

    void read_one_mechanism(const std::string& name, const nlohmann::json& block) {
        const std::string where = "mechanism '" + name + "'";
        if (!block.is_object() || !block.contains("kind") || !block["kind"].is_string()) {
            fail(where + ": missing 'kind'");
            return;
        }
        mechanism_names_.push_back(name);
        const std::string kind = block["kind"].get<std::string>();
        try {
            if (kind == "weighted-utilitarian") {
                check_known_keys(block, where, {"kind", "weights"});
                if (!block.contains("weights") || !block["weights"].is_array()) {
                    fail(where + ": needs a 'weights' array");
                    return;
                }
                const auto& wj = block["weights"];
                if (dims_ok_ && wj.size() != static_cast<std::size_t>(n_)) {
                    fail(where + ": needs one weight per agent");
                    return;
                }
                std::vector<double> w;
                double sum = 0.0;
                for (const auto& v : wj) {
                    if (!v.is_number() || v.get<double>() < 0.0) {
                        fail(where + ": weights must be nonnegative numbers");
                        return;
                    }
                    w.push_back(v.get<double>());
                    sum += v.get<double>();
                }
                if (std::abs(sum - 1.0) > 1e-9) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.6g", sum);
                    fail(where + ": weights must sum to 1 (got " + buf + ")");
                    return;
                }
                WeightVector wv(std::move(w));
                mechanisms_.emplace(name, WeightedUtilitarianRule(wv));
                utilitarian_weights_.emplace(name, std::move(wv));
            } else if (kind == "dictatorial") {
                check_known_keys(block, where, {"kind", "dictator"});
                auto k = read_int(block, "dictator", where, true);
                if (!k) return;
                if (dims_ok_ && (*k < 0 || *k >= n_)) {
                    fail(where + ": dictator index out of range");
                    return;
                }
                if (dims_ok_) mechanisms_.emplace(name, DictatorialRule(static_cast<int>(*k)));
            } else if (kind == "random-dictatorship") {
                check_known_keys(block, where, {"kind", "weights"});
                if (block.contains("weights")) {
                    // optional weighting over dictators; same sum rule
                    const auto& wj = block["weights"];
                    std::vector<double> w;
                    double sum = 0.0;
                    bool ok = wj.is_array() && (!dims_ok_ || wj.size() ==
                                                                 static_cast<std::size_t>(n_));
                    for (const auto& v : wj)
                        if (v.is_number() && v.get<double>() >= 0.0) {
                            w.push_back(v.get<double>());
                            sum += v.get<double>();
                        } else {
                            ok = false;
                        }
                    if (!ok) {
                        fail(where + ": weights must be one nonnegative number per agent");
                        return;
                    }
                    if (std::abs(sum - 1.0) > 1e-9) {
                        fail(where + ": weights must sum to 1");
                        return;
                    }
                    mechanisms_.emplace(name, RandomDictatorshipRule(WeightVector(std::move(w))));
                } else if (dims_ok_) {
                    mechanisms_.emplace(name, RandomDictatorshipRule(WeightVector::equal(n_)));
                }
            } else if (kind == "uniform-random") {
                check_known_keys(block, where, {"kind"});
                mechanisms_.emplace(name, UniformRandomRule{});
            } else if (kind == "plurality") {
                check_known_keys(block, where, {"kind"});
                mechanisms_.emplace(name, PluralityRule{});
            } else if (kind == "borda") {
                check_known_keys(block, where, {"kind"});
                mechanisms_.emplace(name, BordaRule{});
            } else {
                fail(where + ": unknown kind '" + kind + "'");
            }
        } catch (const std::exception& e) {
            fail(where + ": " + e.what());
        }
    }

    void read_mechanisms() {
        if (root_.contains("mechanism")) read_one_mechanism("default", root_["mechanism"]);
        if (root_.contains("mechanisms")) {
            if (!root_["mechanisms"].is_object()) {
                fail("'mechanisms' must be an object mapping names to blocks");
                return;
            }
            for (const auto& [name, block] : root_["mechanisms"].items())
                read_one_mechanism(name, block);
        }
    }

    // Resolves a job's mechanism reference against the declared names (even
    // ones whose construction failed, to avoid cascading noise).
    std::string resolve_mechanism(const nlohmann::json& job, const std::string& where) {
        if (job.contains("mechanism")) {
            if (!job["mechanism"].is_string()) {
                fail(where + ": 'mechanism' must be a string");
                return {};
            }
            const std::string name = job["mechanism"].get<std::string>();
            bool declared = false;
            for (const auto& d : mechanism_names_)
                if (d == name) declared = true;
            if (!declared) fail(where + ": references undefined mechanism '" + name + "'");
            return name;
        }
        if (mechanism_names_.size() == 1) return mechanism_names_.front();
        fail(where + ": no 'mechanism' named and " + std::to_string(mechanism_names_.size()) +
             " defined");
        return {};
    }

    void read_jobs() {
        if (!root_.contains("jobs") || !root_["jobs"].is_array() || root_["jobs"].empty()) {
            fail("config needs at least one job");
            return;
        }
        const auto& jobs = root_["jobs"];
        for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
            const auto& entry = jobs[idx];
            const std::string base = "job " + std::to_string(idx);
            if (!entry.is_object() || entry.size() != 1) {
                fail(base + ": must be an object with exactly one job-type key");
                continue;
            }
            const std::string key = entry.items().begin().key();
            const auto& job = entry.items().begin().value();
            const std::string where = base + " (" + key + ")";
            if (!job.is_object()) {
                fail(where + ": block must be an object");
                continue;
            }
            const std::size_t samples = read_samples(job, where).value_or(default_samples_);
            const std::string label = key + "-" + std::to_string(idx);
            if (key == "ex-ante") {
                check_known_keys(job, where, {"mechanism", "samples"});
                jobs_.push_back({label, ExAnteJob{resolve_mechanism(job, where), samples}});
            } else if (key == "interim") {
                check_known_keys(job, where, {"mechanism", "agent", "true_type", "report",
                                              "samples"});
                InterimJob ij;
                ij.mechanism = resolve_mechanism(job, where);
                ij.samples = samples;
                auto agent = read_int(job, "agent", where, true);
                if (agent && dims_ok_ && (*agent < 0 || *agent >= n_))
                    fail(where + ": agent index out of range");
                else if (agent)
                    ij.agent = static_cast<int>(*agent);
                bool ok = agent.has_value();
                for (const char* field : {"true_type", "report"}) {
                    if (!job.contains(field)) {
                        fail(where + ": missing required key '" + std::string(field) + "'");
                        ok = false;
                        continue;
                    }
                    auto tv = read_type_vector(job[field], where + ": " + field);
                    if (!tv) {
                        ok = false;
                        continue;
                    }
                    (std::string(field) == "true_type" ? ij.true_type : ij.report) =
                        std::move(*tv);
                }
                if (ok) jobs_.push_back({label, std::move(ij)});
            } else if (key == "audit") {
                check_known_keys(job, where, {"mechanism", "agent", "true_type", "mode",
                                              "samples"});
                AuditJob aj;
                aj.mechanism = resolve_mechanism(job, where);
                aj.samples = samples;
                auto agent = read_int(job, "agent", where, true);
                bool ok = agent.has_value();
                if (agent && dims_ok_ && (*agent < 0 || *agent >= n_)) {
                    fail(where + ": agent index out of range");
                    ok = false;
                } else if (agent) {
                    aj.agent = static_cast<int>(*agent);
                }
                if (!job.contains("true_type")) {
                    fail(where + ": missing required key 'true_type'");
                    ok = false;
                } else if (auto tv = read_type_vector(job["true_type"], where + ": true_type")) {
                    aj.true_type = std::move(*tv);
                } else {
                    ok = false;
                }
                if (job.contains("mode")) {
                    const std::string mode =
                        job["mode"].is_string() ? job["mode"].get<std::string>() : "";
                    if (mode == "extremization")
                        aj.mode = AuditMode::extremization;
                    else if (mode == "grid")
                        aj.mode = AuditMode::grid;
                    else {
                        fail(where + ": mode must be \"extremization\" or \"grid\"");
                        ok = false;
                    }
                }
                if (ok) jobs_.push_back({label, std::move(aj)});
            } else if (key == "sweep") {
                check_known_keys(job, where, {"resolution", "samples"});
                SweepJob sj;
                sj.samples = samples;
                if (auto r = read_int(job, "resolution", where, false)) {
                    if (*r < 1) {
                        fail(where + ": resolution must be at least 1");
                        continue;
                    }
                    sj.resolution = static_cast<int>(*r);
                }
                if (dims_ok_) {
                    double count = 1.0;
                    for (int i = 1; i < n_; ++i)
                        count *= static_cast<double>(sj.resolution + i) / i;
                    if (count > 10000.5) {
                        fail(where + ": simplex grid would exceed the 10000-point cap");
                        continue;
                    }
                }
                jobs_.push_back({label, sj});
            } else if (key == "oracle-crosscheck") {
                check_known_keys(job, where, {"mechanism", "samples"});
                if (root_.contains("distribution") && root_["distribution"].is_object() &&
                    root_["distribution"].value("kind", "") != "finite-support")
                    fail(where + ": requires a finite-support distribution");
                jobs_.push_back({label, OracleJob{resolve_mechanism(job, where), samples}});
            } else {
                fail(base + ": unknown job type '" + key + "'");
            }
        }
    }

    const nlohmann::json& root_;
    std::vector<std::string> diags_;
    bool dims_ok_ = false;
    int n_ = 2;
    int m_ = 2;
    std::uint64_t seed_ = 0;
    std::size_t default_samples_ = 100000;
    std::string output_dir_ = "results";
    std::optional<DistributionModel> distribution_;
    std::map<std::string, Mechanism> mechanisms_;
    std::map<std::string, WeightVector> utilitarian_weights_;
    std::vector<std::string> mechanism_names_;
    std::vector<JobSpec> jobs_;
};

}  // namespace detail

/// Parses and fully validates a config document. Throws ConfigError listing
/// every violation found.
inline ExperimentConfig load_experiment_config(const nlohmann::json& root,
                                               const ConfigOverrides& overrides = {}) {
    return detail::ConfigReader(root).read(overrides);
}

inline ExperimentConfig load_experiment_file(const std::string& path,
                                             const ConfigOverrides& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError({std::string("JSON parse error: ") + e.what()});
    }
    return load_experiment_config(root, overrides);
}

/// Validation-only entry point: returns all diagnostics instead of throwing.
inline std::vector<std::string> validate_experiment_config(const nlohmann::json& root) {
    try {
        load_experiment_config(root);
        return {};
    } catch (const ConfigError& e) {
        return e.diagnostics();
    }
}

}  // namespace mechlab
