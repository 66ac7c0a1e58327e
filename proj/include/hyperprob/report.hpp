#pragma once

#include "hyperprob/enum_checker.hpp"
#include "hyperprob/formula.hpp"
#include "hyperprob/model.hpp"

#include <optional>
#include <string>

namespace hyperprob {

enum class Engine { Enum, SmtEager, SmtExternal };

std::string_view to_string(Engine engine);
Engine parse_engine(std::string_view text);

struct ModelStats {
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t choices = 0;
    std::string scheduler_space;
    /// |S|^n for n state variables, as a decimal string.
    std::string composed_states;
};

ModelStats model_stats(const Mdp& mdp, std::size_t state_vars);

struct RunReport {
    Engine engine = Engine::Enum;
    Verdict verdict;
    ModelStats model;
    QuantifierCounts quantifiers;
    std::size_t subformulas = 0;
    /// Set by the SMT engines.
    std::optional<std::size_t> smt_variables;
    std::optional<std::size_t> smt_constraints;
    std::optional<std::size_t> composed_kept;
    double encode_ms = 0;
    double solve_ms = 0;
    std::optional<std::string> notice;
};

/// Versioned JSON; timings are omitted when `timings` is false so the output
/// is reproducible.
std::string report_json(const Mdp& mdp, const RunReport& report, bool timings = true);

/// Human-readable report with `state: action` tables for witness schedulers.
std::string report_text(const Mdp& mdp, const RunReport& report);

}  // namespace hyperprob
