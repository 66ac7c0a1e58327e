#pragma once

#include "hyperprob/rational.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hyperprob {

struct StateFormula;
struct ProbExpr;
struct PathFormula;

using StatePtr = std::shared_ptr<const StateFormula>;
using ProbPtr = std::shared_ptr<const ProbExpr>;
using PathPtr = std::shared_ptr<const PathFormula>;

/// Quantifier-free state formula: true | a(x) | f & g | !f | p < q.
struct StateFormula {
    enum class Kind { True, Prop, And, Not, Less };

    Kind kind = Kind::True;
    std::string prop;
    std::string var;
    StatePtr lhs;
    StatePtr rhs;
    ProbPtr left;
    ProbPtr right;
};

/// Probability expression: P(path) | constant | p + q | p - q | p * q.
struct ProbExpr {
    enum class Kind { Prob, Const, Add, Sub, Mul };

    Kind kind = Kind::Const;
    PathPtr path;
    Rational value;
    ProbPtr lhs;
    ProbPtr rhs;
};

/// Path formula: X f | f U g | f U[k1,k2] g. Next keeps its operand in rhs.
struct PathFormula {
    enum class Kind { Next, Until, BoundedUntil };

    Kind kind = Kind::Next;
    StatePtr lhs;
    StatePtr rhs;
    unsigned k1 = 0;
    unsigned k2 = 0;
};

enum class QuantifierKind { Forall, Exists };

struct Quantifier {
    QuantifierKind kind = QuantifierKind::Forall;
    bool over_scheduler = false;
    std::string var;
    /// Scheduler variable a state quantifier is bound to.
    std::string scheduler;
};

/// A HyperPCTL formula in written order: quantifier prefix then body.
struct Formula {
    std::vector<Quantifier> prefix;
    StatePtr body;
};

// Node constructors.
StatePtr make_true();
StatePtr make_prop(std::string prop, std::string var);
StatePtr make_and(StatePtr lhs, StatePtr rhs);
StatePtr make_not(StatePtr operand);
StatePtr make_less(ProbPtr left, ProbPtr right);
ProbPtr make_prob(PathPtr path);
ProbPtr make_const(Rational value);
ProbPtr make_arith(ProbExpr::Kind kind, ProbPtr lhs, ProbPtr rhs);
PathPtr make_next(StatePtr operand);
PathPtr make_until(StatePtr lhs, StatePtr rhs);
PathPtr make_bounded_until(StatePtr lhs, StatePtr rhs, unsigned k1, unsigned k2);

/// Parses the ASCII syntax and removes all sugar. Throws Error(Syntax) with
/// line and column on malformed input.
Formula parse_formula(std::string_view text);
Formula load_formula(const std::string& path);

/// Parses a quantifier-free body (no prefix).
StatePtr parse_body(std::string_view text);

/// Core-syntax printers; the output re-parses to the same tree.
std::string to_string(const StateFormula& f);
std::string to_string(const ProbExpr& p);
std::string to_string(const PathFormula& p);
std::string to_string(const Quantifier& q);
std::string to_string(const Formula& f);

bool structurally_equal(const StateFormula& a, const StateFormula& b);
bool structurally_equal(const ProbExpr& a, const ProbExpr& b);
bool structurally_equal(const PathFormula& a, const PathFormula& b);
bool structurally_equal(const Formula& a, const Formula& b);

/// Throws UnboundStateVariable, UnboundSchedulerVariable,
/// QuantifierOrderViolation or DuplicateVariable.
void check_well_formed(const Formula& f);

struct QuantifierCounts {
    std::size_t schedulers = 0;
    std::size_t states = 0;

    friend bool operator==(const QuantifierCounts&, const QuantifierCounts&) = default;
};

QuantifierCounts count_quantifiers(const Formula& f);

/// A state variable and the scheduler variable it is bound to, in prefix order.
struct StateVariable {
    std::string name;
    std::string scheduler;
    QuantifierKind kind;
};

std::vector<StateVariable> state_variables(const Formula& f);
std::vector<Quantifier> scheduler_quantifiers(const Formula& f);

/// Every proposition name used in the body, in first-occurrence order.
std::vector<std::string> propositions_used(const StateFormula& body);

/// Number of distinct (structurally different) subformulas of the body,
/// counting state formulas and probability expressions.
std::size_t count_subformulas(const StateFormula& body);

/// All quantifiers flipped and the body negated: the formula whose truth is
/// the negation of f.
Formula dual(const Formula& f);

/// Evaluates a body that contains no propositions and no probability
/// operators. Throws IllFormed otherwise.
bool evaluate_closed(const StateFormula& body);
Rational evaluate_closed(const ProbExpr& expr);

}  // namespace hyperprob
