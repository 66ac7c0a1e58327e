#pragma once

#include "hyperprob/dtmc_analysis.hpp"
#include "hyperprob/formula.hpp"
#include "hyperprob/model.hpp"

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hyperprob {

enum class VerdictMode { Witness, Counterexample, None };

std::string_view to_string(VerdictMode mode);

/// Values for the leading block of same-kind quantifiers that decided the
/// verdict, in prefix order.
struct Witness {
    std::vector<std::pair<std::string, SchedulerAssignment>> schedulers;
    std::vector<std::pair<std::string, StateId>> states;

    friend bool operator==(const Witness&, const Witness&) = default;
};

struct Verdict {
    bool truth = false;
    VerdictMode mode = VerdictMode::None;
    Witness witness;
};

struct CheckOptions {
    std::size_t max_scheduler_vars = 3;
    std::size_t max_state_vars = 3;
    /// Worker threads for the outermost scheduler quantifier; 0 picks the
    /// hardware concurrency.
    unsigned jobs = 0;
};

/// Throws CapExceeded, UnknownProposition and the well-formedness errors.
void validate_for_model(const Mdp& mdp, const Formula& f, const CheckOptions& options);

/// Evaluates f on mdp by instantiating every quantifier.
Verdict check(const Mdp& mdp, const Formula& f, const CheckOptions& options = {});

/// Re-evaluates f with the witness variables fixed to the given values; all
/// other quantifiers are still instantiated in full.
bool replay(const Mdp& mdp, const Formula& f, const Witness& fixed);

/// Truth values and probabilities of body subformulas over a self-composed
/// chain. Proposition a(x) is looked up as `a@i` where x is the i-th state
/// variable (1-based). Results are cached per AST node, so the AST must
/// outlive the evaluator.
class CompositionEvaluator {
public:
    CompositionEvaluator(Dtmc composed, std::vector<std::string> state_vars);

    const Dtmc& chain() const { return chain_; }
    const StatePredicate& truth(const StateFormula& f);
    const ProbVector& values(const ProbExpr& p);
    const ProbVector& path_values(const PathFormula& p);

private:
    Dtmc chain_;
    std::vector<std::string> vars_;
    std::unordered_map<const void*, StatePredicate> truth_memo_;
    std::unordered_map<const void*, ProbVector> value_memo_;
};

bool eval_body(const Dtmc& composed, const std::vector<std::string>& state_vars, const StateFormula& body,
               std::size_t at);
Rational eval_prob(const Dtmc& composed, const std::vector<std::string>& state_vars, const ProbExpr& expr,
                   std::size_t at);

/// The one-state chain with a self-loop, used as the composition of zero
/// components.
Dtmc unit_chain();

}  // namespace hyperprob
