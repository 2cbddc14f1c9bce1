#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "mechlab/core.hpp"

namespace mechlab {

/// Alternatives ordered best-to-worst by payoff, equal payoffs broken by
/// smaller index first.
inline std::vector<int> ranking_from_payoffs(std::span<const double> payoffs) {
    std::vector<int> order(payoffs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return payoffs[static_cast<std::size_t>(a)] > payoffs[static_cast<std::size_t>(b)];
    });
    return order;
}

/// argmax_x sum_i lambda_i u_i(x), ties to the smallest index.
class WeightedUtilitarianRule {
public:
    explicit WeightedUtilitarianRule(WeightVector weights) : weights_(std::move(weights)) {}

    const WeightVector& weights() const { return weights_; }

    void choose_into(const TypeProfile& u, std::span<double> out) const {
        const auto& d = u.dims();
        if (weights_.size() != d.n_agents)
            throw DimensionError("WeightedUtilitarianRule: weights/profile agent mismatch");
        if (static_cast<int>(out.size()) != d.n_alternatives)
            throw DimensionError("WeightedUtilitarianRule: output buffer size mismatch");
        std::vector<double> score(static_cast<std::size_t>(d.n_alternatives), 0.0);
        for (int i = 0; i < d.n_agents; ++i) {
            const double w = weights_[i];
            if (w == 0.0) continue;
            const auto row = u.agent(i);
            for (int x = 0; x < d.n_alternatives; ++x)
                score[static_cast<std::size_t>(x)] += w * row[static_cast<std::size_t>(x)];
        }
        std::fill(out.begin(), out.end(), 0.0);
        out[static_cast<std::size_t>(argmax_with_tiebreak(score))] = 1.0;
    }

    std::string descriptor() const {
        std::string s = "weighted-utilitarian[";
        for (int i = 0; i < weights_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(weights_[i]);
        }
        return s + "]";
    }

private:
    WeightVector weights_;
};

inline Lottery weighted_utilitarian_choose(const WeightVector& weights, const TypeProfile& u) {
    return choose(WeightedUtilitarianRule(weights), u);
}

/// Agent i's argmax decides, everyone else is ignored.
class DictatorialRule {
public:
    explicit DictatorialRule(int dictator) : dictator_(dictator) {
        if (dictator_ < 0) throw ParameterError("DictatorialRule: negative agent index");
    }

    int dictator() const { return dictator_; }

    void choose_into(const TypeProfile& u, std::span<double> out) const {
        const auto& d = u.dims();
        if (dictator_ >= d.n_agents)
            throw DimensionError("DictatorialRule: dictator index out of range");
        if (static_cast<int>(out.size()) != d.n_alternatives)
            throw DimensionError("DictatorialRule: output buffer size mismatch");
        std::fill(out.begin(), out.end(), 0.0);
        out[static_cast<std::size_t>(argmax_with_tiebreak(u.agent(dictator_)))] = 1.0;
    }

    std::string descriptor() const { return "dictatorial[" + std::to_string(dictator_) + "]"; }

private:
    int dictator_;
};

inline Lottery dictatorial_choose(int dictator, const TypeProfile& u) {
    return choose(DictatorialRule(dictator), u);
}

/// Mixture of dictatorships: alternative x gets the total weight of agents
/// whose argmax is x.
class RandomDictatorshipRule {
public:
    explicit RandomDictatorshipRule(WeightVector weights) : weights_(std::move(weights)) {}

    void choose_into(const TypeProfile& u, std::span<double> out) const {
        const auto& d = u.dims();
        if (weights_.size() != d.n_agents)
            throw DimensionError("RandomDictatorshipRule: weights/profile agent mismatch");
        if (static_cast<int>(out.size()) != d.n_alternatives)
            throw DimensionError("RandomDictatorshipRule: output buffer size mismatch");
        std::fill(out.begin(), out.end(), 0.0);
        for (int i = 0; i < d.n_agents; ++i)
            out[static_cast<std::size_t>(argmax_with_tiebreak(u.agent(i)))] += weights_[i];
    }

    std::string descriptor() const {
        std::string s = "random-dictatorship[";
        for (int i = 0; i < weights_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(weights_[i]);
        }
        return s + "]";
    }

private:
    WeightVector weights_;
};

/// Ignores reports entirely.
class UniformRandomRule {
public:
    void choose_into(const TypeProfile& u, std::span<double> out) const {
        const auto& d = u.dims();
        if (static_cast<int>(out.size()) != d.n_alternatives)
            throw DimensionError("UniformRandomRule: output buffer size mismatch");
        std::fill(out.begin(), out.end(), 1.0 / d.n_alternatives);
    }

    std::string descriptor() const { return "uniform-random"; }
};

/// One vote per agent for their top alternative; most votes wins, ties to the
/// smallest index.
class PluralityRule {
public:
    void choose_into(const TypeProfile& u, std::span<double> out) const {
        const auto& d = u.dims();
        if (static_cast<int>(out.size()) != d.n_alternatives)
            throw DimensionError("PluralityRule: output buffer size mismatch");
        std::vector<double> votes(static_cast<std::size_t>(d.n_alternatives), 0.0);
        for (int i = 0; i < d.n_agents; ++i)
            votes[static_cast<std::size_t>(argmax_with_tiebreak(u.agent(i)))] += 1.0;
        std::fill(out.begin(), out.end(), 0.0);
        out[static_cast<std::size_t>(argmax_with_tiebreak(votes))] = 1.0;
    }

    std::string descriptor() const { return "plurality"; }
};

/// Positional scoring on each agent's ranking: best gets m-1 points, worst 0.
class BordaRule {
public:
    void choose_into(const TypeProfile& u, std::span<double> out) const {
        const auto& d = u.dims();
        if (static_cast<int>(out.size()) != d.n_alternatives)
            throw DimensionError("BordaRule: output buffer size mismatch");
        std::vector<double> score(static_cast<std::size_t>(d.n_alternatives), 0.0);
        for (int i = 0; i < d.n_agents; ++i) {
            const auto order = ranking_from_payoffs(u.agent(i));
            for (int pos = 0; pos < d.n_alternatives; ++pos)
                score[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] +=
                    static_cast<double>(d.n_alternatives - 1 - pos);
        }
        std::fill(out.begin(), out.end(), 0.0);
        out[static_cast<std::size_t>(argmax_with_tiebreak(score))] = 1.0;
    }

    std::string descriptor() const { return "borda"; }
};

}  // namespace mechlab
