#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mechlab/core.hpp"
#include "mechlab/linalg.hpp"
#include "mechlab/math.hpp"
#include "mechlab/rng.hpp"

namespace mechlab {

/// Fixed chunk size for sample partitioning. Chunk c of any sampling job uses
/// stream_id + c, so output is a function of (model, seed, count) only.
inline constexpr std::size_t kSampleChunkSize = std::size_t{1} << 16;

enum class DistributionKind {
    independent_marginals,
    gaussian_copula,
    finite_mixture,
    finite_support,
    vnm_restricted,
};

inline const char* kind_name(DistributionKind k) {
    switch (k) {
        case DistributionKind::independent_marginals: return "independent-marginals";
        case DistributionKind::gaussian_copula: return "gaussian-copula";
        case DistributionKind::finite_mixture: return "finite-mixture";
        case DistributionKind::finite_support: return "finite-support";
        case DistributionKind::vnm_restricted: return "vnm-restricted";
    }
    return "unknown";
}

/// One coordinate's marginal law on [0,1].
struct MarginalSpec {
    enum class Family { uniform, beta };

    Family family = Family::uniform;
    double alpha = 1.0;
    double beta = 1.0;

    static MarginalSpec uniform() { return MarginalSpec{}; }
    static MarginalSpec make_beta(double alpha, double beta) {
        MarginalSpec s{Family::beta, alpha, beta};
        s.validate();
        return s;
    }

    void validate() const {
        if (family == Family::beta && !(alpha > 0.0 && beta > 0.0))
            throw ParameterError("MarginalSpec: beta shape parameters must be positive");
    }

    double pdf(double x) const {
        if (x < 0.0 || x > 1.0) return 0.0;
        return family == Family::uniform ? 1.0 : beta_pdf(alpha, beta, x);
    }
    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return family == Family::uniform ? x : beta_cdf(alpha, beta, x);
    }
    double quantile(double p) const {
        return family == Family::uniform ? p : beta_quantile(alpha, beta, p);
    }

    std::string describe() const {
        if (family == Family::uniform) return "uniform";
        return "beta(" + std::to_string(alpha) + "," + std::to_string(beta) + ")";
    }

    friend bool operator==(const MarginalSpec&, const MarginalSpec&) = default;
};

/// A type profile with an associated probability mass (finite-support atom).
struct WeightedProfile {
    TypeProfile profile;
    double prob = 0.0;
};

namespace detail {

struct IndependentParams {
    std::vector<MarginalSpec> marginals;  // one per flat coordinate
};

struct CopulaParams {
    std::vector<MarginalSpec> marginals;
    SquareMatrix correlation;
    PsdFactor factor;  // of correlation
};

struct MixtureComponent {
    double weight = 0.0;
    std::variant<IndependentParams, CopulaParams> base;
};

struct MixtureParams {
    std::vector<MixtureComponent> components;
    std::vector<double> cumulative;
};

struct FiniteSupportParams {
    std::vector<WeightedProfile> atoms;
    std::vector<double> cumulative;
};

struct VnmParams {};

inline int pick_cumulative(const std::vector<double>& cumulative, double u) {
    int k = 0;
    const int last = static_cast<int>(cumulative.size()) - 1;
    while (k < last && u > cumulative[static_cast<std::size_t>(k)]) ++k;
    return k;
}

inline void sample_vnm_vector(RngStream& rng, int m, std::span<double> out) {
    const int pair_index = rng.next_index(m * (m - 1));
    const int best = pair_index / (m - 1);
    const int r = pair_index % (m - 1);
    const int worst = r + (r >= best ? 1 : 0);
    for (int x = 0; x < m; ++x) {
        if (x == best)
            out[static_cast<std::size_t>(x)] = 1.0;
        else if (x == worst)
            out[static_cast<std::size_t>(x)] = 0.0;
        else
            out[static_cast<std::size_t>(x)] = rng.next_open01();
    }
}

}  // namespace detail

class DistributionModel;

/// Sampler for the conditional law of U_{-i} given U_i = u_i. Conditioning is
/// analytic per kind; the sampler owns all precomputed state and can be used
/// from many threads at once (each with its own RngStream).
class ConditionalSampler {
public:
    int agent() const { return agent_; }
    const TypeVector& own_type() const { return own_; }
    const ModelDims& dims() const { return dims_; }

    /// Fills a full profile: row `agent` is the conditioning type, all other
    /// rows are drawn from the exact conditional law.
    void sample_into(RngStream& rng, TypeProfile& out) const {
        std::visit([&](const auto& st) { sample_kind(st, rng, out); }, state_);
        if (!std::holds_alternative<FiniteState>(state_)) out.set_agent(agent_, own_.span());
    }

    TypeProfile sample(RngStream& rng) const {
        TypeProfile p(dims_);
        sample_into(rng, p);
        return p;
    }

private:
    friend class DistributionModel;

    struct IndependentState {
        std::vector<MarginalSpec> marginals;  // per flat coordinate
    };
    struct CopulaState {
        std::vector<int> other_coords;        // ascending flat indices
        std::vector<double> mean;             // conditional latent mean
        SquareMatrix factor;                  // of the conditional covariance
        std::vector<MarginalSpec> marginals;  // aligned with other_coords
    };
    struct MixtureState {
        std::vector<double> posterior_cum;
        std::vector<ConditionalSampler> components;
    };
    struct FiniteState {
        std::vector<WeightedProfile> atoms;  // conditioning-consistent, renormalized
        std::vector<double> cumulative;
    };
    struct VnmState {};

    using State =
        std::variant<IndependentState, CopulaState, MixtureState, FiniteState, VnmState>;

    ConditionalSampler(ModelDims dims, int agent, TypeVector own, State state)
        : dims_(dims), agent_(agent), own_(std::move(own)), state_(std::move(state)) {}

    void sample_kind(const IndependentState& st, RngStream& rng, TypeProfile& out) const {
        const int m = dims_.n_alternatives;
        for (int j = 0; j < dims_.n_agents; ++j) {
            if (j == agent_) continue;
            auto row = out.agent(j);
            for (int x = 0; x < m; ++x) {
                const auto k = static_cast<std::size_t>(dims_.coord(j, x));
                row[static_cast<std::size_t>(x)] = st.marginals[k].quantile(rng.next_open01());
            }
        }
    }

    void sample_kind(const CopulaState& st, RngStream& rng, TypeProfile& out) const {
        const int na = static_cast<int>(st.other_coords.size());
        std::vector<double> xi(static_cast<std::size_t>(na));
        for (int k = 0; k < na; ++k) xi[static_cast<std::size_t>(k)] = rng.next_normal();
        for (int r = 0; r < na; ++r) {
            double w = st.mean[static_cast<std::size_t>(r)];
            for (int k = 0; k <= r; ++k) w += st.factor.at(r, k) * xi[static_cast<std::size_t>(k)];
            const int coord = st.other_coords[static_cast<std::size_t>(r)];
            const double u = st.marginals[static_cast<std::size_t>(r)].quantile(norm_cdf(w));
            out.flat()[static_cast<std::size_t>(coord)] = u;
        }
    }

    void sample_kind(const MixtureState& st, RngStream& rng, TypeProfile& out) const {
        const int c = detail::pick_cumulative(st.posterior_cum, rng.next_open01());
        st.components[static_cast<std::size_t>(c)].sample_into(rng, out);
    }

    void sample_kind(const FiniteState& st, RngStream& rng, TypeProfile& out) const {
        const int k = detail::pick_cumulative(st.cumulative, rng.next_open01());
        out = st.atoms[static_cast<std::size_t>(k)].profile;
    }

    void sample_kind(const VnmState&, RngStream& rng, TypeProfile& out) const {
        for (int j = 0; j < dims_.n_agents; ++j) {
            if (j == agent_) continue;
            detail::sample_vnm_vector(rng, dims_.n_alternatives, out.agent(j));
        }
    }

    ModelDims dims_;
    int agent_ = 0;
    TypeVector own_;
    State state_;
};

/// Joint law of the type profile. Immutable after construction; all sampling
/// is pure given an RngStream, so models are freely shared across threads.
class DistributionModel {
public:
    static DistributionModel independent(ModelDims dims, const MarginalSpec& shared) {
        return independent(dims,
                           std::vector<MarginalSpec>(
                               static_cast<std::size_t>(dims.total_coords()), shared));
    }

    static DistributionModel independent(ModelDims dims, std::vector<MarginalSpec> marginals) {
        check_marginals(dims, marginals);
        DistributionModel m(dims, DistributionKind::independent_marginals);
        m.params_ = detail::IndependentParams{std::move(marginals)};
        return m;
    }

    static DistributionModel gaussian_copula(ModelDims dims, const MarginalSpec& shared,
                                             SquareMatrix correlation) {
        return gaussian_copula(dims,
                               std::vector<MarginalSpec>(
                                   static_cast<std::size_t>(dims.total_coords()), shared),
                               std::move(correlation));
    }

    static DistributionModel gaussian_copula(ModelDims dims, std::vector<MarginalSpec> marginals,
                                             SquareMatrix correlation) {
        check_marginals(dims, marginals);
        DistributionModel m(dims, DistributionKind::gaussian_copula);
        m.params_ = make_copula_params(dims, std::move(marginals), std::move(correlation));
        return m;
    }

    /// Components are (weight, independent or copula) blocks; weights are
    /// normalized on construction.
    struct Component {
        double weight = 0.0;
        std::vector<MarginalSpec> marginals;
        std::optional<SquareMatrix> correlation;
    };

    static DistributionModel finite_mixture(ModelDims dims, const std::vector<Component>& comps) {
        if (comps.empty()) throw ParameterError("finite_mixture: no components");
        detail::MixtureParams params;
        double total = 0.0;
        for (const auto& c : comps) {
            if (!(c.weight > 0.0)) throw ParameterError("finite_mixture: weights must be positive");
            total += c.weight;
            detail::MixtureComponent mc;
            mc.weight = c.weight;
            check_marginals(dims, c.marginals);
            if (c.correlation)
                mc.base = make_copula_params(dims, c.marginals, *c.correlation);
            else
                mc.base = detail::IndependentParams{c.marginals};
            params.components.push_back(std::move(mc));
        }
        double acc = 0.0;
        for (auto& c : params.components) {
            c.weight /= total;
            acc += c.weight;
            params.cumulative.push_back(acc);
        }
        DistributionModel m(dims, DistributionKind::finite_mixture);
        m.params_ = std::move(params);
        return m;
    }

    static DistributionModel finite_support(ModelDims dims, std::vector<WeightedProfile> atoms) {
        if (atoms.empty()) throw ParameterError("finite_support: no atoms");
        double total = 0.0;
        for (const auto& a : atoms) {
            if (a.profile.dims() != dims)
                throw DimensionError("finite_support: atom dimensions mismatch");
            for (double v : a.profile.flat())
                if (!(v >= 0.0 && v <= 1.0))
                    throw ParameterError("finite_support: atom entries must lie in [0,1]");
            if (!(a.prob > 0.0)) throw ParameterError("finite_support: atom probabilities must be positive");
            total += a.prob;
        }
        if (std::abs(total - 1.0) > kProbTolerance)
            throw ParameterError("finite_support: atom probabilities sum to " + std::to_string(total));
        for (std::size_t i = 0; i < atoms.size(); ++i)
            for (std::size_t j = i + 1; j < atoms.size(); ++j)
                if (atoms[i].profile == atoms[j].profile)
                    throw ParameterError("finite_support: duplicate atoms");
        detail::FiniteSupportParams params;
        double acc = 0.0;
        for (auto& a : atoms) {
            acc += a.prob;
            params.cumulative.push_back(acc);
        }
        params.atoms = std::move(atoms);
        DistributionModel m(dims, DistributionKind::finite_support);
        m.params_ = std::move(params);
        return m;
    }

    static DistributionModel vnm_restricted(ModelDims dims) {
        DistributionModel m(dims, DistributionKind::vnm_restricted);
        m.params_ = detail::VnmParams{};
        return m;
    }

    const ModelDims& dims() const { return dims_; }
    DistributionKind kind() const { return kind_; }

    /// True when the joint law has a strictly positive Lebesgue density on the
    /// whole cube. Finite-support, vNM (two pinned coordinates) and singular
    /// copulas do not qualify; reports carry this flag.
    bool assumption1_satisfied() const {
        switch (kind_) {
            case DistributionKind::independent_marginals: return true;
            case DistributionKind::gaussian_copula:
                return std::get<detail::CopulaParams>(params_).factor.full_rank();
            case DistributionKind::finite_mixture: {
                const auto& mix = std::get<detail::MixtureParams>(params_);
                for (const auto& c : mix.components)
                    if (const auto* cp = std::get_if<detail::CopulaParams>(&c.base))
                        if (!cp->factor.full_rank()) return false;
                return true;
            }
            case DistributionKind::finite_support:
            case DistributionKind::vnm_restricted: return false;
        }
        return false;
    }

    std::string descriptor() const {
        std::string out = kind_name(kind_);
        switch (kind_) {
            case DistributionKind::independent_marginals: {
                const auto& p = std::get<detail::IndependentParams>(params_);
                out += "[" + p.marginals.front().describe() + "]";
                break;
            }
            case DistributionKind::gaussian_copula: {
                const auto& p = std::get<detail::CopulaParams>(params_);
                out += "[" + p.marginals.front().describe() + "]";
                break;
            }
            case DistributionKind::finite_mixture: {
                const auto& p = std::get<detail::MixtureParams>(params_);
                out += "[" + std::to_string(p.components.size()) + " components]";
                break;
            }
            case DistributionKind::finite_support: {
                const auto& p = std::get<detail::FiniteSupportParams>(params_);
                out += "[" + std::to_string(p.atoms.size()) + " atoms]";
                break;
            }
            case DistributionKind::vnm_restricted: break;
        }
        return out;
    }

    const std::vector<WeightedProfile>& atoms() const {
        if (kind_ != DistributionKind::finite_support)
            throw UnsupportedOperation("atoms(): model is not finite-support");
        return std::get<detail::FiniteSupportParams>(params_).atoms;
    }

    void sample_into(RngStream& rng, TypeProfile& out) const {
        switch (kind_) {
            case DistributionKind::independent_marginals: {
                const auto& p = std::get<detail::IndependentParams>(params_);
                sample_independent(p, rng, out);
                return;
            }
            case DistributionKind::gaussian_copula: {
                const auto& p = std::get<detail::CopulaParams>(params_);
                sample_copula(p, rng, out);
                return;
            }
            case DistributionKind::finite_mixture: {
                const auto& p = std::get<detail::MixtureParams>(params_);
                const int c = detail::pick_cumulative(p.cumulative, rng.next_open01());
                const auto& base = p.components[static_cast<std::size_t>(c)].base;
                if (const auto* ip = std::get_if<detail::IndependentParams>(&base))
                    sample_independent(*ip, rng, out);
                else
                    sample_copula(std::get<detail::CopulaParams>(base), rng, out);
                return;
            }
            case DistributionKind::finite_support: {
                const auto& p = std::get<detail::FiniteSupportParams>(params_);
                const int k = detail::pick_cumulative(p.cumulative, rng.next_open01());
                out = p.atoms[static_cast<std::size_t>(k)].profile;
                return;
            }
            case DistributionKind::vnm_restricted: {
                for (int j = 0; j < dims_.n_agents; ++j)
                    detail::sample_vnm_vector(rng, dims_.n_alternatives, out.agent(j));
                return;
            }
        }
    }

    TypeProfile sample(RngStream& rng) const {
        TypeProfile p(dims_);
        sample_into(rng, p);
        return p;
    }

    /// Joint density with respect to Lebesgue measure on the cube. Only kinds
    /// that are absolutely continuous support this.
    double density(const TypeProfile& u) const {
        if (u.dims() != dims_) throw DimensionError("density: profile dimensions mismatch");
        switch (kind_) {
            case DistributionKind::independent_marginals:
                return density_independent(std::get<detail::IndependentParams>(params_), u);
            case DistributionKind::gaussian_copula:
                return density_copula(std::get<detail::CopulaParams>(params_), u);
            case DistributionKind::finite_mixture: {
                const auto& p = std::get<detail::MixtureParams>(params_);
                double acc = 0.0;
                for (const auto& c : p.components) {
                    if (const auto* ip = std::get_if<detail::IndependentParams>(&c.base))
                        acc += c.weight * density_independent(*ip, u);
                    else
                        acc += c.weight * density_copula(std::get<detail::CopulaParams>(c.base), u);
                }
                return acc;
            }
            case DistributionKind::finite_support:
                throw UnsupportedOperation("density: finite-support law has no density");
            case DistributionKind::vnm_restricted:
                throw UnsupportedOperation("density: vnm-restricted law has no density on the cube");
        }
        return 0.0;
    }

    /// Conditional law of U_{-i} given U_i = u_i, computed analytically.
    ConditionalSampler conditional_others(int agent, const TypeVector& own) const {
        if (agent < 0 || agent >= dims_.n_agents)
            throw DimensionError("conditional_others: agent index out of range");
        validate_type_vector(own, dims_.n_alternatives);
        switch (kind_) {
            case DistributionKind::independent_marginals: {
                const auto& p = std::get<detail::IndependentParams>(params_);
                return ConditionalSampler(dims_, agent, own,
                                          ConditionalSampler::IndependentState{p.marginals});
            }
            case DistributionKind::gaussian_copula:
                return ConditionalSampler(
                    dims_, agent, own,
                    make_copula_conditional(std::get<detail::CopulaParams>(params_), agent, own));
            case DistributionKind::finite_mixture:
                return make_mixture_conditional(agent, own);
            case DistributionKind::finite_support: {
                const auto& p = std::get<detail::FiniteSupportParams>(params_);
                ConditionalSampler::FiniteState st;
                double total = 0.0;
                for (const auto& a : p.atoms) {
                    const auto row = a.profile.agent(agent);
                    if (std::equal(row.begin(), row.end(), own.payoffs.begin(),
                                   own.payoffs.end())) {
                        st.atoms.push_back(a);
                        total += a.prob;
                    }
                }
                if (st.atoms.empty())
                    throw DomainError("conditional_others: no atom matches the conditioning type");
                double acc = 0.0;
                for (auto& a : st.atoms) {
                    a.prob /= total;
                    acc += a.prob;
                    st.cumulative.push_back(acc);
                }
                return ConditionalSampler(dims_, agent, own, std::move(st));
            }
            case DistributionKind::vnm_restricted:
                return ConditionalSampler(dims_, agent, own, ConditionalSampler::VnmState{});
        }
        throw UnsupportedOperation("conditional_others: unknown kind");
    }

private:
    DistributionModel(ModelDims dims, DistributionKind kind) : dims_(dims), kind_(kind) {}

    static void check_marginals(ModelDims dims, const std::vector<MarginalSpec>& m) {
        if (static_cast<int>(m.size()) != dims.total_coords())
            throw DimensionError("marginals: expected one spec per coordinate");
        for (const auto& s : m) s.validate();
    }

    static detail::CopulaParams make_copula_params(ModelDims dims,
                                                   std::vector<MarginalSpec> marginals,
                                                   SquareMatrix correlation) {
        if (correlation.size() != dims.total_coords())
            throw DimensionError("correlation: expected an mn x mn matrix");
        if (!correlation.symmetric_within(1e-10))
            throw ParameterError("correlation: matrix is not symmetric");
        for (int i = 0; i < correlation.size(); ++i)
            if (std::abs(correlation.at(i, i) - 1.0) > 1e-10)
                throw ParameterError("correlation: diagonal entries must equal 1");
        detail::CopulaParams p;
        p.factor = psd_cholesky(correlation);  // throws ParameterError if indefinite
        p.marginals = std::move(marginals);
        p.correlation = std::move(correlation);
        return p;
    }

    void sample_independent(const detail::IndependentParams& p, RngStream& rng,
                            TypeProfile& out) const {
        auto flat = out.flat();
        for (int k = 0; k < dims_.total_coords(); ++k)
            flat[static_cast<std::size_t>(k)] =
                p.marginals[static_cast<std::size_t>(k)].quantile(rng.next_open01());
    }

    void sample_copula(const detail::CopulaParams& p, RngStream& rng, TypeProfile& out) const {
        const int mn = dims_.total_coords();
        std::vector<double> xi(static_cast<std::size_t>(mn));
        for (int k = 0; k < mn; ++k) xi[static_cast<std::size_t>(k)] = rng.next_normal();
        auto flat = out.flat();
        for (int r = 0; r < mn; ++r) {
            double z = 0.0;
            for (int k = 0; k <= r; ++k) z += p.factor.lower.at(r, k) * xi[static_cast<std::size_t>(k)];
            flat[static_cast<std::size_t>(r)] =
                p.marginals[static_cast<std::size_t>(r)].quantile(norm_cdf(z));
        }
    }

    double density_independent(const detail::IndependentParams& p, const TypeProfile& u) const {
        double acc = 1.0;
        auto flat = u.flat();
        for (int k = 0; k < dims_.total_coords(); ++k)
            acc *= p.marginals[static_cast<std::size_t>(k)].pdf(flat[static_cast<std::size_t>(k)]);
        return acc;
    }

    double density_copula(const detail::CopulaParams& p, const TypeProfile& u) const {
        if (!p.factor.full_rank())
            throw UnsupportedOperation("density: singular copula correlation has no density");
        const int mn = dims_.total_coords();
        auto flat = u.flat();
        std::vector<double> z(static_cast<std::size_t>(mn));
        double marginal_part = 1.0;
        for (int k = 0; k < mn; ++k) {
            const double x = flat[static_cast<std::size_t>(k)];
            if (x <= 0.0 || x >= 1.0) return 0.0;
            const auto& spec = p.marginals[static_cast<std::size_t>(k)];
            marginal_part *= spec.pdf(x);
            z[static_cast<std::size_t>(k)] = norm_quantile(spec.cdf(x));
        }
        // Copula density: exp(-z' (Sigma^{-1} - I) z / 2) / sqrt(det Sigma).
        std::vector<double> w = z;
        solve_lower(p.factor.lower, w);
        double quad_inv = 0.0;  // z' Sigma^{-1} z
        for (double v : w) quad_inv += v * v;
        double quad_id = 0.0;  // z' z
        for (double v : z) quad_id += v * v;
        double logdet = 0.0;
        for (int i = 0; i < mn; ++i) logdet += std::log(p.factor.lower.at(i, i));
        const double copula = std::exp(-0.5 * (quad_inv - quad_id) - logdet);
        return copula * marginal_part;
    }

    ConditionalSampler::State make_copula_conditional(const detail::CopulaParams& p, int agent,
                                                      const TypeVector& own) const {
        const int m = dims_.n_alternatives;
        const int mn = dims_.total_coords();
        const int b0 = dims_.coord(agent, 0);

        // Latent values for the conditioning block; boundary types have no
        // finite latent image.
        std::vector<double> zb(static_cast<std::size_t>(m));
        for (int x = 0; x < m; ++x) {
            const auto& spec = p.marginals[static_cast<std::size_t>(b0 + x)];
            const double f = spec.cdf(own[x]);
            if (f <= 0.0 || f >= 1.0)
                throw DomainError("conditional_others: boundary type under gaussian copula");
            zb[static_cast<std::size_t>(x)] = norm_quantile(f);
        }

        SquareMatrix sigma_bb(m);
        for (int x = 0; x < m; ++x)
            for (int y = 0; y < m; ++y) sigma_bb.at(x, y) = p.correlation.at(b0 + x, b0 + y);
        PsdFactor bb = psd_cholesky(sigma_bb);
        if (!bb.full_rank())
            throw ParameterError("conditional_others: conditioning block is singular");

        ConditionalSampler::CopulaState st;
        st.other_coords.reserve(static_cast<std::size_t>(mn - m));
        for (int k = 0; k < mn; ++k)
            if (k < b0 || k >= b0 + m) st.other_coords.push_back(k);
        const int na = static_cast<int>(st.other_coords.size());

        // K = Sigma_AB Sigma_BB^{-1}, row by row via the block factor.
        std::vector<std::vector<double>> K(static_cast<std::size_t>(na));
        for (int r = 0; r < na; ++r) {
            const int a = st.other_coords[static_cast<std::size_t>(r)];
            std::vector<double> row(static_cast<std::size_t>(m));
            for (int x = 0; x < m; ++x) row[static_cast<std::size_t>(x)] = p.correlation.at(a, b0 + x);
            solve_lower(bb.lower, row);
            solve_lower_transposed(bb.lower, row);
            K[static_cast<std::size_t>(r)] = std::move(row);
        }

        st.mean.resize(static_cast<std::size_t>(na));
        for (int r = 0; r < na; ++r) {
            double mu = 0.0;
            for (int x = 0; x < m; ++x) mu += K[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] * zb[static_cast<std::size_t>(x)];
            st.mean[static_cast<std::size_t>(r)] = mu;
        }

        SquareMatrix schur(na);
        for (int r = 0; r < na; ++r) {
            const int a = st.other_coords[static_cast<std::size_t>(r)];
            for (int c = 0; c < na; ++c) {
                const int b = st.other_coords[static_cast<std::size_t>(c)];
                double v = p.correlation.at(a, b);
                for (int x = 0; x < m; ++x)
                    v -= K[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] * p.correlation.at(b0 + x, b);
                schur.at(r, c) = v;
            }
        }
        // Symmetrize before factoring; the Schur complement is symmetric up to
        // rounding.
        for (int r = 0; r < na; ++r)
            for (int c = r + 1; c < na; ++c) {
                const double v = 0.5 * (schur.at(r, c) + schur.at(c, r));
                schur.at(r, c) = v;
                schur.at(c, r) = v;
            }
        st.factor = psd_cholesky(schur, 1e-9).lower;

        st.marginals.resize(static_cast<std::size_t>(na));
        for (int r = 0; r < na; ++r)
            st.marginals[static_cast<std::size_t>(r)] =
                p.marginals[static_cast<std::size_t>(st.other_coords[static_cast<std::size_t>(r)])];
        return st;
    }

    /// Block density of agent `agent`'s coordinates under one mixture
    /// component (the marginal of a gaussian copula over a coordinate block is
    /// the gaussian copula of the corresponding correlation sub-block).
    double component_block_density(const std::variant<detail::IndependentParams,
                                                      detail::CopulaParams>& base,
                                   int agent, const TypeVector& own) const {
        const int m = dims_.n_alternatives;
        const int b0 = dims_.coord(agent, 0);
        if (const auto* ip = std::get_if<detail::IndependentParams>(&base)) {
            double acc = 1.0;
            for (int x = 0; x < m; ++x)
                acc *= ip->marginals[static_cast<std::size_t>(b0 + x)].pdf(own[x]);
            return acc;
        }
        const auto& cp = std::get<detail::CopulaParams>(base);
        double marginal_part = 1.0;
        std::vector<double> z(static_cast<std::size_t>(m));
        for (int x = 0; x < m; ++x) {
            const auto& spec = cp.marginals[static_cast<std::size_t>(b0 + x)];
            const double f = spec.cdf(own[x]);
            if (f <= 0.0 || f >= 1.0)
                throw DomainError("conditional_others: boundary type in mixture component");
            marginal_part *= spec.pdf(own[x]);
            z[static_cast<std::size_t>(x)] = norm_quantile(f);
        }
        SquareMatrix sigma_bb(m);
        for (int x = 0; x < m; ++x)
            for (int y = 0; y < m; ++y) sigma_bb.at(x, y) = cp.correlation.at(b0 + x, b0 + y);
        PsdFactor bb = psd_cholesky(sigma_bb);
        if (!bb.full_rank())
            throw ParameterError("conditional_others: component block is singular");
        std::vector<double> w = z;
        solve_lower(bb.lower, w);
        double quad_inv = 0.0, quad_id = 0.0, logdet = 0.0;
        for (double v : w) quad_inv += v * v;
        for (double v : z) quad_id += v * v;
        for (int i = 0; i < m; ++i) logdet += std::log(bb.lower.at(i, i));
        return std::exp(-0.5 * (quad_inv - quad_id) - logdet) * marginal_part;
    }

    ConditionalSampler make_mixture_conditional(int agent, const TypeVector& own) const {
        const auto& p = std::get<detail::MixtureParams>(params_);
        ConditionalSampler::MixtureState st;
        std::vector<double> post;
        double total = 0.0;
        for (const auto& c : p.components) {
            const double d = c.weight * component_block_density(c.base, agent, own);
            if (!std::isfinite(d)) throw DomainError("conditional_others: non-finite component density");
            post.push_back(d);
            total += d;
        }
        if (!(total > 0.0))
            throw DomainError("conditional_others: conditioning type has zero mixture density");
        double acc = 0.0;
        for (std::size_t c = 0; c < post.size(); ++c) {
            acc += post[c] / total;
            st.posterior_cum.push_back(acc);
            const auto& base = p.components[c].base;
            if (const auto* ip = std::get_if<detail::IndependentParams>(&base)) {
                st.components.push_back(ConditionalSampler(
                    dims_, agent, own, ConditionalSampler::IndependentState{ip->marginals}));
            } else {
                st.components.push_back(ConditionalSampler(
                    dims_, agent, own,
                    make_copula_conditional(std::get<detail::CopulaParams>(base), agent, own)));
            }
        }
        return ConditionalSampler(dims_, agent, own, std::move(st));
    }

    ModelDims dims_;
    DistributionKind kind_;
    std::variant<detail::IndependentParams, detail::CopulaParams, detail::MixtureParams,
                 detail::FiniteSupportParams, detail::VnmParams>
        params_;
};

/// count i.i.d. draws, chunked exactly like the estimation engine so results
/// are a pure function of (model, seed, count).
inline std::vector<TypeProfile> sample_profile(const DistributionModel& model, SeedSpec seed,
                                               std::size_t count) {
    if (count == 0) throw ParameterError("sample_profile: count must be positive");
    std::vector<TypeProfile> out;
    out.reserve(count);
    const std::size_t n_chunks = (count + kSampleChunkSize - 1) / kSampleChunkSize;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        RngStream rng(seed.with_stream_offset(c));
        const std::size_t lo = c * kSampleChunkSize;
        const std::size_t hi = std::min(count, lo + kSampleChunkSize);
        for (std::size_t s = lo; s < hi; ++s) out.push_back(model.sample(rng));
    }
    return out;
}

inline std::vector<TypeProfile> sample_conditional_others(const DistributionModel& model,
                                                          int agent, const TypeVector& own,
                                                          SeedSpec seed, std::size_t count) {
    if (count == 0) throw ParameterError("sample_conditional_others: count must be positive");
    const ConditionalSampler sampler = model.conditional_others(agent, own);
    std::vector<TypeProfile> out;
    out.reserve(count);
    const std::size_t n_chunks = (count + kSampleChunkSize - 1) / kSampleChunkSize;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        RngStream rng(seed.with_stream_offset(c));
        const std::size_t lo = c * kSampleChunkSize;
        const std::size_t hi = std::min(count, lo + kSampleChunkSize);
        for (std::size_t s = lo; s < hi; ++s) out.push_back(sampler.sample(rng));
    }
    return out;
}

inline double density(const DistributionModel& model, const TypeProfile& u) {
    return model.density(u);
}

/// Draws from the vNM domain: per agent one alternative pinned to payoff 1,
/// one to 0, remaining coordinates uniform on (0,1).
inline std::vector<TypeProfile> sample_vnm_profile(ModelDims dims, SeedSpec seed,
                                                   std::size_t count) {
    return sample_profile(DistributionModel::vnm_restricted(dims), seed, count);
}

}  // namespace mechlab
