#pragma once

#include <algorithm>
#include <concepts>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mechlab {

/// Absolute tolerance for probability-vector normalization checks.
inline constexpr double kProbTolerance = 1e-12;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct UnsupportedOperation : std::logic_error {
    using std::logic_error::logic_error;
};
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Problem size: number of agents and number of alternatives, both at least 2.
struct ModelDims {
    int n_agents = 2;
    int n_alternatives = 2;

    ModelDims() = default;
    ModelDims(int agents, int alternatives) : n_agents(agents), n_alternatives(alternatives) {
        if (n_agents < 2) throw ParameterError("ModelDims: need at least 2 agents");
        if (n_alternatives < 2) throw ParameterError("ModelDims: need at least 2 alternatives");
    }

    int total_coords() const { return n_agents * n_alternatives; }
    // Flat coordinate index, agent-major.
    int coord(int agent, int alt) const { return agent * n_alternatives + alt; }

    friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

inline constexpr const char* kVersion = "0.1.0";

/// One agent's payoff vector over the alternatives, each entry in [0,1].
struct TypeVector {
    std::vector<double> payoffs;

    TypeVector() = default;
    explicit TypeVector(std::vector<double> values) : payoffs(std::move(values)) {}
    TypeVector(std::initializer_list<double> values) : payoffs(values) {}

    int size() const { return static_cast<int>(payoffs.size()); }
    double operator[](int x) const { return payoffs[static_cast<std::size_t>(x)]; }
    double& operator[](int x) { return payoffs[static_cast<std::size_t>(x)]; }
    std::span<const double> span() const { return payoffs; }

    friend bool operator==(const TypeVector&, const TypeVector&) = default;
};

inline void validate_type_vector(const TypeVector& u, int n_alternatives) {
    if (u.size() != n_alternatives)
        throw DimensionError("TypeVector: expected " + std::to_string(n_alternatives) +
                             " entries, got " + std::to_string(u.size()));
    for (double v : u.payoffs)
        if (!(v >= 0.0 && v <= 1.0))
            throw ParameterError("TypeVector: entries must lie in [0,1]");
}

/// A profile of all agents' types, stored as a flat agent-major matrix.
class TypeProfile {
public:
    TypeProfile() = default;
    explicit TypeProfile(ModelDims dims)
        : dims_(dims), data_(static_cast<std::size_t>(dims.total_coords()), 0.0) {}

    static TypeProfile from_rows(const std::vector<TypeVector>& rows) {
        if (rows.size() < 2) throw DimensionError("TypeProfile: need at least 2 agents");
        const int m = rows.front().size();
        ModelDims dims(static_cast<int>(rows.size()), m);
        TypeProfile p(dims);
        for (int i = 0; i < dims.n_agents; ++i) {
            validate_type_vector(rows[static_cast<std::size_t>(i)], m);
            p.set_agent(i, rows[static_cast<std::size_t>(i)].span());
        }
        return p;
    }

    const ModelDims& dims() const { return dims_; }

    std::span<const double> agent(int i) const {
        return {data_.data() + static_cast<std::size_t>(i) * dims_.n_alternatives,
                static_cast<std::size_t>(dims_.n_alternatives)};
    }
    std::span<double> agent(int i) {
        return {data_.data() + static_cast<std::size_t>(i) * dims_.n_alternatives,
                static_cast<std::size_t>(dims_.n_alternatives)};
    }
    void set_agent(int i, std::span<const double> values) {
        std::copy(values.begin(), values.end(), agent(i).begin());
    }

    double operator()(int agent_index, int alt) const {
        return data_[static_cast<std::size_t>(dims_.coord(agent_index, alt))];
    }
    double& operator()(int agent_index, int alt) {
        return data_[static_cast<std::size_t>(dims_.coord(agent_index, alt))];
    }

    std::span<const double> flat() const { return data_; }
    std::span<double> flat() { return data_; }

    TypeVector agent_vector(int i) const {
        auto s = agent(i);
        return TypeVector(std::vector<double>(s.begin(), s.end()));
    }

    friend bool operator==(const TypeProfile&, const TypeProfile&) = default;

private:
    ModelDims dims_;
    std::vector<double> data_;
};

/// Probability distribution over alternatives. Entries are nonnegative and
/// sum to 1 within kProbTolerance; construction rejects anything else.
class Lottery {
public:
    explicit Lottery(std::vector<double> probabilities) : p_(std::move(probabilities)) {
        if (p_.empty()) throw DimensionError("Lottery: empty probability vector");
        double sum = 0.0;
        for (double v : p_) {
            if (!(v >= 0.0)) throw ParameterError("Lottery: negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            throw ParameterError("Lottery: probabilities sum to " + std::to_string(sum));
    }

    static Lottery degenerate(int m, int alt) {
        std::vector<double> p(static_cast<std::size_t>(m), 0.0);
        p.at(static_cast<std::size_t>(alt)) = 1.0;
        return Lottery(std::move(p));
    }
    static Lottery uniform(int m) {
        return Lottery(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
    }

    int size() const { return static_cast<int>(p_.size()); }
    double operator[](int x) const { return p_[static_cast<std::size_t>(x)]; }
    std::span<const double> span() const { return p_; }

    friend bool operator==(const Lottery&, const Lottery&) = default;

private:
    std::vector<double> p_;
};

/// Nonnegative agent weights, normalized to sum 1 on construction.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> weights) : w_(std::move(weights)) {
        if (w_.size() < 2) throw DimensionError("WeightVector: need at least 2 agents");
        double sum = 0.0;
        for (double v : w_) {
            if (!(v >= 0.0)) throw ParameterError("WeightVector: negative weight");
            sum += v;
        }
        if (!(sum > 0.0)) throw ParameterError("WeightVector: weights sum to zero");
        for (double& v : w_) v /= sum;
    }
    WeightVector(std::initializer_list<double> weights)
        : WeightVector(std::vector<double>(weights)) {}

    static WeightVector unit(int n, int agent) {
        std::vector<double> w(static_cast<std::size_t>(n), 0.0);
        w.at(static_cast<std::size_t>(agent)) = 1.0;
        return WeightVector(std::move(w));
    }
    static WeightVector equal(int n) {
        return WeightVector(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    }

    int size() const { return static_cast<int>(w_.size()); }
    double operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
    std::span<const double> span() const { return w_; }
    bool is_dictatorial() const {
        return std::any_of(w_.begin(), w_.end(), [](double v) { return v == 1.0; });
    }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    std::vector<double> w_;
};

/// Smallest index attaining the maximum, exact float comparison.
inline int argmax_with_tiebreak(std::span<const double> values) {
    if (values.empty()) throw DimensionError("argmax_with_tiebreak: empty sequence");
    int best = 0;
    for (int x = 1; x < static_cast<int>(values.size()); ++x)
        if (values[static_cast<std::size_t>(x)] > values[static_cast<std::size_t>(best)]) best = x;
    return best;
}

inline double expected_payoff_under_lottery(std::span<const double> payoffs,
                                            std::span<const double> probabilities) {
    if (payoffs.size() != probabilities.size())
        throw DimensionError("expected_payoff_under_lottery: dimension mismatch");
    double acc = 0.0;
    for (std::size_t x = 0; x < payoffs.size(); ++x) acc += payoffs[x] * probabilities[x];
    return acc;
}

inline double expected_payoff_under_lottery(const TypeVector& u, const Lottery& p) {
    return expected_payoff_under_lottery(u.span(), p.span());
}

/// A social choice rule: deterministic map from a type profile to a lottery,
/// written into a caller-provided buffer of length n_alternatives.
template <class M>
concept MechanismRule = requires(const M& rule, const TypeProfile& u, std::span<double> out) {
    rule.choose_into(u, out);
    { rule.descriptor() } -> std::convertible_to<std::string>;
};

template <MechanismRule M>
Lottery choose(const M& rule, const TypeProfile& u) {
    std::vector<double> p(static_cast<std::size_t>(u.dims().n_alternatives), 0.0);
    rule.choose_into(u, p);
    return Lottery(std::move(p));
}

/// Type-erased mechanism, for config-driven dispatch.
class Mechanism {
public:
    template <MechanismRule M>
    Mechanism(M rule)  // NOLINT: implicit wrap is the point
        : descriptor_(rule.descriptor()),
          fn_([r = std::move(rule)](const TypeProfile& u, std::span<double> out) {
              r.choose_into(u, out);
          }) {}

    void choose_into(const TypeProfile& u, std::span<double> out) const { fn_(u, out); }
    Lottery evaluate(const TypeProfile& u) const { return choose(*this, u); }
    std::string descriptor() const { return descriptor_; }

private:
    std::string descriptor_;
    std::function<void(const TypeProfile&, std::span<double>)> fn_;
};

}  // namespace mechlab
