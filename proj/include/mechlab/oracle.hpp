#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "mechlab/core.hpp"
#include "mechlab/distributions.hpp"
#include "mechlab/payoff.hpp"

namespace mechlab {

/// Finite-support joint law used for exact enumeration. Deliberately violates
/// the full-support assumption of the continuous theory; downstream reports
/// flag that.
class FiniteModel {
public:
    explicit FiniteModel(std::vector<WeightedProfile> atoms) {
        if (atoms.empty()) throw ParameterError("FiniteModel: no atoms");
        dims_ = atoms.front().profile.dims();
        // Route validation through the distribution factory so both views of
        // a finite law enforce identical invariants.
        DistributionModel::finite_support(dims_, atoms);
        atoms_ = std::move(atoms);
    }

    static FiniteModel from_distribution(const DistributionModel& model) {
        return FiniteModel(model.atoms());  // throws unless finite-support
    }

    DistributionModel to_distribution() const {
        return DistributionModel::finite_support(dims_, atoms_);
    }

    const ModelDims& dims() const { return dims_; }
    const std::vector<WeightedProfile>& atoms() const { return atoms_; }

private:
    ModelDims dims_;
    std::vector<WeightedProfile> atoms_;
};

/// An exactly-enumerated value plus a trace of how much was enumerated.
struct ExactResult {
    double value = 0.0;
    std::size_t atom_count = 0;         // atoms inspected
    std::size_t conditioning_set = 0;   // atoms consistent with the conditioning event
};

/// Exact pi_i(f) per agent: sum over atoms of prob times the lottery-expected
/// payoff.
inline std::vector<ExactResult> exact_ex_ante(const Mechanism& mechanism,
                                              const FiniteModel& fm) {
    const ModelDims dims = fm.dims();
    std::vector<double> lot(static_cast<std::size_t>(dims.n_alternatives));
    std::vector<double> acc(static_cast<std::size_t>(dims.n_agents), 0.0);
    for (const auto& atom : fm.atoms()) {
        mechanism.choose_into(atom.profile, lot);
        for (int i = 0; i < dims.n_agents; ++i)
            acc[static_cast<std::size_t>(i)] +=
                atom.prob * expected_payoff_under_lottery(atom.profile.agent(i), lot);
    }
    std::vector<ExactResult> out;
    out.reserve(acc.size());
    for (double v : acc) out.push_back({v, fm.atoms().size(), fm.atoms().size()});
    return out;
}

/// Exact pi_i(f, v_i | u_i): condition on atoms whose agent-i block equals the
/// true type exactly (finite models are artifact-built, so float equality is
/// the intended match), substitute the report, and average.
inline ExactResult exact_interim(const Mechanism& mechanism, const FiniteModel& fm,
                                 const InterimQuery& query) {
    const ModelDims dims = fm.dims();
    query.validate(dims);
    std::vector<double> lot(static_cast<std::size_t>(dims.n_alternatives));
    double mass = 0.0;
    double acc = 0.0;
    std::size_t matched = 0;
    TypeProfile scratch(dims);
    for (const auto& atom : fm.atoms()) {
        const auto row = atom.profile.agent(query.agent);
        if (!std::equal(row.begin(), row.end(), query.true_type.payoffs.begin(),
                        query.true_type.payoffs.end()))
            continue;
        ++matched;
        mass += atom.prob;
        scratch = atom.profile;
        scratch.set_agent(query.agent, query.reported_type.span());
        mechanism.choose_into(scratch, lot);
        acc += atom.prob * expected_payoff_under_lottery(query.true_type.span(), lot);
    }
    if (matched == 0)
        throw DomainError("exact_interim: no atom matches the conditioning type");
    return {acc / mass, fm.atoms().size(), matched};
}

/// Exhaustive best response over a finite candidate set, truthful preferred on
/// exact ties. Gain is the exact interim improvement over truth-telling.
inline std::pair<TypeVector, double> exact_best_response(
    const Mechanism& mechanism, const FiniteModel& fm, int agent, const TypeVector& true_type,
    const std::vector<TypeVector>& candidates) {
    if (candidates.empty()) throw ParameterError("exact_best_response: empty candidate set");
    if (std::find(candidates.begin(), candidates.end(), true_type) == candidates.end())
        throw ParameterError("exact_best_response: candidate set must include the truthful report");
    const double truthful =
        exact_interim(mechanism, fm, InterimQuery{agent, true_type, true_type}).value;
    TypeVector best_report = true_type;
    double best_value = truthful;
    for (const auto& v : candidates) {
        if (v == true_type) continue;
        const double val = exact_interim(mechanism, fm, InterimQuery{agent, true_type, v}).value;
        if (val > best_value) {
            best_value = val;
            best_report = v;
        }
    }
    return {best_report, best_value - truthful};
}

}  // namespace mechlab
