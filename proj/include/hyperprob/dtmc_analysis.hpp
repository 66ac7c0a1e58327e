#pragma once

#include "hyperprob/model.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace hyperprob {

using StatePredicate = std::vector<bool>;
using ProbVector = std::vector<Rational>;

/// Rows of a chain given by successor distributions; targets index into the
/// same span. Every function below accepts a Dtmc or raw rows.
using Rows = std::span<const Distribution>;

struct QualitativeSets {
    /// States from which no phi1-path reaches a phi2 state.
    StatePredicate zero;
    /// States satisfying phi2.
    StatePredicate yes;
};

QualitativeSets qualitative_sets(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2);

/// Exact probabilities of phi1 U phi2. The maybe-states are split into
/// strongly connected components and each component is solved by rational
/// Gaussian elimination in reverse topological order.
ProbVector until_probs(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2);

/// phi1 U[k1,k2] phi2 by the three-case step recursion. Throws Bound if k1 > k2.
ProbVector bounded_until_probs(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2,
                               unsigned k1, unsigned k2);

ProbVector next_probs(Rows rows, const StatePredicate& phi);

enum class IterationSeed {
    /// 1 on phi2 states, 0 elsewhere.
    Target,
    /// 1 on every state whose until probability is 1, 0 elsewhere.
    ProbabilityOne,
};

/// The n-th value-iteration iterate: phi2 states stay 1, states violating
/// both operands stay 0, all others take the one-step expectation.
ProbVector until_probs_vi(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2,
                          unsigned iterations, IterationSeed seed = IterationSeed::Target);

/// States with until probability exactly 1 (graph analysis only).
StatePredicate probability_one_states(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2);

/// Shortest number of steps from each state to a phi2 state along positive
/// edges, or rows.size() when no phi2 state is reachable.
std::vector<std::size_t> distance_to(Rows rows, const StatePredicate& phi2);

inline ProbVector until_probs(const Dtmc& d, const StatePredicate& phi1, const StatePredicate& phi2) {
    return until_probs(d.rows(), phi1, phi2);
}

inline ProbVector bounded_until_probs(const Dtmc& d, const StatePredicate& phi1, const StatePredicate& phi2,
                                      unsigned k1, unsigned k2) {
    return bounded_until_probs(d.rows(), phi1, phi2, k1, k2);
}

inline ProbVector next_probs(const Dtmc& d, const StatePredicate& phi) { return next_probs(d.rows(), phi); }

inline QualitativeSets qualitative_sets(const Dtmc& d, const StatePredicate& phi1, const StatePredicate& phi2) {
    return qualitative_sets(d.rows(), phi1, phi2);
}

inline ProbVector until_probs_vi(const Dtmc& d, const StatePredicate& phi1, const StatePredicate& phi2,
                                 unsigned iterations, IterationSeed seed = IterationSeed::Target) {
    return until_probs_vi(d.rows(), phi1, phi2, iterations, seed);
}

/// Characteristic vector of a proposition; all-false if d does not know it.
StatePredicate label_predicate(const Dtmc& d, std::string_view prop);

/// Solves A x = b exactly. A is square and dense. Throws SingularSystem when
/// no nonzero pivot exists.
std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b);

}  // namespace hyperprob
