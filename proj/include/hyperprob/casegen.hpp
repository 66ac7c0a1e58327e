#pragma once

#include "hyperprob/formula.hpp"
#include "hyperprob/model.hpp"

#include <optional>
#include <string>

namespace hyperprob {

struct TableReference {
    std::size_t states;
    std::size_t transitions;
};

/// A generated case study: model and property, both as canonical text and
/// parsed.
struct CaseSpec {
    std::string family;
    /// File stem, e.g. `ta_m2`.
    std::string name;
    std::string model_text;
    std::string formula_text;
    Mdp mdp;
    Formula formula;
    /// Published state and transition counts for this instance, if any.
    std::optional<TableReference> reference;
};

/// Modular exponentiation over m key bits raced by a counting attacker.
CaseSpec gen_timing_attack(unsigned m);

/// Character-wise password comparison with early exit, raced by the same
/// attacker.
CaseSpec gen_password(unsigned m);

/// Two threads: one counts a secret h down then writes l=1, the other writes
/// l=2. Both secret values live in one model. Requires h1 != h2.
CaseSpec gen_thread_sched(unsigned h1, unsigned h2);

enum class ConformanceTier { Plain, S0, S01, S012 };

/// Knuth-Yao die built from fair coin tosses next to a reference die.
/// Source states of the tier get a half/half action to every pair of other
/// coin/die states.
CaseSpec gen_conformance(ConformanceTier tier);

ConformanceTier parse_tier(const std::string& text);
std::string to_string(ConformanceTier tier);

}  // namespace hyperprob
