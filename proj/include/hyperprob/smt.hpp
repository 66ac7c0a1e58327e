#pragma once

#include "hyperprob/enum_checker.hpp"
#include "hyperprob/formula.hpp"
#include "hyperprob/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyperprob {

enum class Sort { Bool, Real };
enum class VarRole { Choice, Holds, Prob, ToInt, Distance };

using VarId = std::uint32_t;
using TermId = std::uint32_t;

struct Variable {
    std::string name;
    Sort sort;
    VarRole role;
};

enum class Op { True, False, Var, Const, Not, And, Or, Implies, Xor, Eq, Less, GreaterEq, Greater, Add, Sub, Mul };

/// Var: `a` is the variable. Const: `a` indexes the constant table.
/// Otherwise the children are child_pool[a, a + count).
struct Term {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t count = 0;
};

/// Which encoding rule produced a constraint.
enum class Origin {
    SchedulerChoice,
    ChoiceExclusion,
    TrueFact,
    PropFact,
    Conjunction,
    Negation,
    Comparison,
    NextLink,
    NextSum,
    Constant,
    Arith,
    UntilPin,
    UntilStep,
    BoundedPin,
    BoundedStep,
    ProbDomain,
    Truth,
};

std::string_view to_string(Origin origin);

struct Constraint {
    TermId term;
    Origin origin;
};

/// Variables plus Boolean / linear-real constraints over them.
class ConstraintSystem {
public:
    VarId add_variable(std::string name, Sort sort, VarRole role);
    TermId var(VarId v);
    TermId constant(const Rational& value);
    TermId boolean(bool value);
    TermId make(Op op, std::span<const TermId> children);
    TermId make(Op op, std::initializer_list<TermId> children) {
        return make(op, std::span<const TermId>(children.begin(), children.size()));
    }
    void add(TermId term, Origin origin);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const Term& term(TermId t) const { return terms_[t]; }
    std::span<const TermId> children(TermId t) const;
    const Rational& constant_value(TermId t) const { return constants_[terms_[t].a]; }
    std::size_t count(VarRole role) const;
    /// True when some product has two non-constant factors.
    bool nonlinear() const { return nonlinear_; }

private:
    bool is_constant(TermId t) const;

    std::vector<Variable> variables_;
    std::vector<Term> terms_;
    std::vector<TermId> child_pool_;
    std::vector<Rational> constants_;
    std::vector<Constraint> constraints_;
    std::vector<TermId> var_terms_;
    bool nonlinear_ = false;
};

enum class Polarity { Direct, Negated };

std::string_view to_string(Polarity p);

/// One distinct subformula of the encoded body. Children always have smaller
/// indices. Per-state variable vectors are indexed by kept composed state.
struct Subformula {
    enum class Kind { True, Prop, And, Not, Less, Const, Add, Sub, Mul, Next, Until, BoundedUntil };

    static constexpr std::size_t none = static_cast<std::size_t>(-1);

    Kind kind;
    std::string text;
    std::size_t lhs = none;
    std::size_t rhs = none;
    /// Bounded until: the member with both bounds reduced by the recursion.
    std::size_t inner = none;
    std::string prop;
    /// Prop: 0-based position of the state variable in the state prefix.
    std::size_t component = 0;
    Rational value;
    unsigned k1 = 0;
    unsigned k2 = 0;

    std::vector<VarId> vars;
    std::vector<VarId> toint;
    std::vector<VarId> distance;
    /// Prop: label membership per kept state.
    std::vector<bool> labels;

    bool is_boolean() const {
        return kind == Kind::True || kind == Kind::Prop || kind == Kind::And || kind == Kind::Not ||
               kind == Kind::Less;
    }
};

/// A guarded one-step distribution of a composed state: active iff every
/// choice literal in `guard` is true.
struct ComposedRow {
    std::vector<VarId> guard;
    /// (kept composed state, probability) in product order.
    std::vector<std::pair<std::uint32_t, Rational>> successors;
};

struct EncodeOptions {
    bool prune = false;
    std::size_t max_scheduler_vars = 3;
    std::size_t max_state_vars = 3;
};

/// The constraint system for a formula plus everything needed to solve it
/// eagerly and to read witnesses back.
struct Encoding {
    ConstraintSystem system;
    Polarity polarity = Polarity::Direct;

    std::vector<std::string> model_states;
    std::vector<std::string> model_actions;

    std::vector<Quantifier> schedulers;
    /// State quantifiers of the encoded formula (flipped for Negated).
    std::vector<StateVariable> state_prefix;
    /// Scheduler index bound by each state variable.
    std::vector<std::size_t> binding;

    std::size_t arity = 0;
    std::size_t total_composed = 1;
    /// Kept composed-state indices (ascending) and the reverse map.
    std::vector<std::size_t> kept;
    std::vector<std::int64_t> kept_index;
    std::vector<std::vector<ComposedRow>> rows;
    /// Static truth of the root for composed states left out by pruning:
    /// 1 true, 0 false, -1 not determined (kept).
    std::vector<signed char> static_truth;
    bool pruned = false;

    /// choices[j][s] = enabled (action, Boolean variable) pairs.
    std::vector<std::vector<std::vector<std::pair<ActionId, VarId>>>> choices;

    std::vector<Subformula> subformulas;
    std::size_t root = 0;
    TermId truth = 0;

    std::string tuple_name(std::size_t composed) const;
};

/// Builds the full encoding. For an existential scheduler block the body is
/// encoded directly; for a universal block the negated body with flipped
/// state quantifiers is encoded and the polarity is Negated. Throws
/// MixedSchedulerBlock for mixed blocks.
Encoding encode_main(const Mdp& mdp, const Formula& f, const EncodeOptions& options = {});

/// SMT-LIB2 script for a system without header comments.
std::string emit_smtlib2(const ConstraintSystem& system);
/// SMT-LIB2 script with a header describing the encoding.
std::string emit_smtlib2(const Encoding& encoding);

/// A value per variable; Booleans are 0 or 1.
struct SmtModel {
    std::vector<std::optional<Rational>> values;
};

struct SmtVerdict {
    bool sat = false;
    std::optional<SmtModel> model;
    std::optional<Verdict> decoded;
};

struct EagerOptions {
    unsigned jobs = 0;
    /// Check every non-Truth constraint against the derived model.
    bool verify = true;
};

/// Decides the encoding by enumerating choice-variable assignments; the
/// lexicographically least satisfying one is reported.
SmtVerdict solve_eager(const Mdp& mdp, const Encoding& encoding, const EagerOptions& options = {});
SmtVerdict solve_eager(const Mdp& mdp, const Formula& f, const EncodeOptions& encode = {},
                       const EagerOptions& options = {});

/// Full model for the given scheduler tuple; every constraint except Truth
/// holds in it (verified when `verify`).
SmtModel derive_model(const Encoding& encoding, std::span<const SchedulerAssignment> tuple, bool verify);

/// Evaluates a Boolean term under a complete model.
bool evaluate(const ConstraintSystem& system, TermId term, const SmtModel& model);

/// Overall verdict from a satisfying model (or none for unsat). Throws
/// IncompleteModel when a needed variable has no value.
Verdict decode_witness(const Encoding& encoding, const std::optional<SmtModel>& model);

/// Parses solver output (`sat`/`unsat` followed by a get-model response).
std::pair<bool, std::optional<SmtModel>> parse_solver_output(const Encoding& encoding, std::string_view text);

/// Writes the script to a temporary file and runs `solver <file>`.
SmtVerdict solve_external(const Encoding& encoding, const std::string& solver);

}  // namespace hyperprob
