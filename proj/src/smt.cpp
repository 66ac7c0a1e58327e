#include "hyperprob/smt.hpp"

#include "hyperprob/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace hyperprob {

std::string_view to_string(Origin origin) {
    switch (origin) {
        case Origin::SchedulerChoice: return "scheduler choice";
        case Origin::ChoiceExclusion: return "choice exclusion";
        case Origin::TrueFact: return "true";
        case Origin::PropFact: return "proposition";
        case Origin::Conjunction: return "conjunction";
        case Origin::Negation: return "negation";
        case Origin::Comparison: return "comparison";
        case Origin::NextLink: return "pseudo-Boolean link";
        case Origin::NextSum: return "next";
        case Origin::Constant: return "constant";
        case Origin::Arith: return "arithmetic";
        case Origin::UntilPin: return "until base";
        case Origin::UntilStep: return "until step";
        case Origin::BoundedPin: return "bounded until base";
        case Origin::BoundedStep: return "bounded until step";
        case Origin::ProbDomain: return "probability domain";
        case Origin::Truth: return "truth";
    }
    return "";
}

std::string_view to_string(Polarity p) { return p == Polarity::Direct ? "direct" : "negated"; }

VarId ConstraintSystem::add_variable(std::string name, Sort sort, VarRole role) {
    VarId id = static_cast<VarId>(variables_.size());
    variables_.push_back(Variable{std::move(name), sort, role});
    terms_.push_back(Term{Op::Var, id, 0});
    var_terms_.push_back(static_cast<TermId>(terms_.size() - 1));
    return id;
}

TermId ConstraintSystem::var(VarId v) { return var_terms_.at(v); }

TermId ConstraintSystem::constant(const Rational& value) {
    constants_.push_back(value);
    terms_.push_back(Term{Op::Const, static_cast<std::uint32_t>(constants_.size() - 1), 0});
    return static_cast<TermId>(terms_.size() - 1);
}

TermId ConstraintSystem::boolean(bool value) {
    terms_.push_back(Term{value ? Op::True : Op::False, 0, 0});
    return static_cast<TermId>(terms_.size() - 1);
}

bool ConstraintSystem::is_constant(TermId t) const { return terms_[t].op == Op::Const; }

TermId ConstraintSystem::make(Op op, std::span<const TermId> children) {
    if (op == Op::Mul) {
        std::size_t variable_factors = 0;
        for (TermId c : children) variable_factors += is_constant(c) ? 0 : 1;
        if (variable_factors > 1) nonlinear_ = true;
    }
    Term t{op, static_cast<std::uint32_t>(child_pool_.size()), static_cast<std::uint32_t>(children.size())};
    child_pool_.insert(child_pool_.end(), children.begin(), children.end());
    terms_.push_back(t);
    return static_cast<TermId>(terms_.size() - 1);
}

std::span<const TermId> ConstraintSystem::children(TermId t) const {
    const Term& term = terms_[t];
    if (term.op == Op::Var || term.op == Op::Const) return {};
    return std::span<const TermId>(child_pool_.data() + term.a, term.count);
}

void ConstraintSystem::add(TermId term, Origin origin) { constraints_.push_back(Constraint{term, origin}); }

std::size_t ConstraintSystem::count(VarRole role) const {
    return static_cast<std::size_t>(
        std::count_if(variables_.begin(), variables_.end(), [&](const Variable& v) { return v.role == role; }));
}

std::string Encoding::tuple_name(std::size_t composed) const {
    std::string name;
    ComposedIndexer indexer(model_states.size(), arity);
    for (std::size_t i = 0; i < arity; ++i) {
        if (i) name += '.';
        name += model_states[indexer.component(composed, i)];
    }
    return name;
}

namespace {

// Three-valued truth of a body at a composed state; -1 when it depends on a
// probability.
signed char static_value(const StateFormula& f, const Mdp& mdp, const std::vector<StateId>& tuple,
                         const std::vector<std::string>& vars) {
    switch (f.kind) {
        case StateFormula::Kind::True: return 1;
        case StateFormula::Kind::Prop: {
            auto pos = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), f.var) - vars.begin());
            auto prop = mdp.find_proposition(f.prop);
            return prop && mdp.has_label(tuple.at(pos), *prop) ? 1 : 0;
        }
        case StateFormula::Kind::And: {
            auto l = static_value(*f.lhs, mdp, tuple, vars);
            if (l == 0) return 0;
            auto r = static_value(*f.rhs, mdp, tuple, vars);
            if (r == 0) return 0;
            return l == 1 && r == 1 ? 1 : -1;
        }
        case StateFormula::Kind::Not: {
            auto x = static_value(*f.lhs, mdp, tuple, vars);
            return x == -1 ? -1 : static_cast<signed char>(1 - x);
        }
        case StateFormula::Kind::Less: {
            try {
                return evaluate_closed(*f.left) < evaluate_closed(*f.right) ? 1 : 0;
            } catch (const Error&) {
                return -1;
            }
        }
    }
    return -1;
}

class Encoder {
public:
    Encoder(const Mdp& mdp, Encoding& e) : mdp_(mdp), e_(e), cs_(e.system) {}

    void choices() {
        e_.choices.resize(e_.schedulers.size());
        for (std::size_t j = 0; j < e_.schedulers.size(); ++j) {
            e_.choices[j].resize(mdp_.num_states());
            for (StateId s = 0; s < mdp_.num_states(); ++s) {
                for (ActionId a : mdp_.enabled(s)) {
                    VarId v = cs_.add_variable("ch_" + std::to_string(j) + "_" + mdp_.state_name(s) + "_" +
                                                   mdp_.action_name(a),
                                               Sort::Bool, VarRole::Choice);
                    e_.choices[j][s].emplace_back(a, v);
                }
            }
        }
        for (std::size_t j = 0; j < e_.schedulers.size(); ++j) {
            for (StateId s = 0; s < mdp_.num_states(); ++s) {
                const auto& opts = e_.choices[j][s];
                if (opts.size() == 1) {
                    cs_.add(cs_.var(opts[0].second), Origin::SchedulerChoice);
                    continue;
                }
                std::vector<TermId> any;
                for (const auto& [a, v] : opts) any.push_back(cs_.var(v));
                cs_.add(cs_.make(Op::Or, any), Origin::SchedulerChoice);
                for (std::size_t x = 0; x < opts.size(); ++x) {
                    for (std::size_t y = x + 1; y < opts.size(); ++y) {
                        cs_.add(cs_.make(Op::Or, {cs_.make(Op::Not, {cs_.var(opts[x].second)}),
                                                  cs_.make(Op::Not, {cs_.var(opts[y].second)})}),
                                Origin::ChoiceExclusion);
                    }
                }
            }
        }
    }

    // Composed states and their guarded rows. With pruning only states
    // reachable from composed states where the root is not statically
    // decided are kept.
    void composition(const StateFormula& root, bool prune, const std::vector<std::string>& vars) {
        const std::size_t n = e_.arity;
        ComposedIndexer indexer(mdp_.num_states(), n);
        e_.total_composed = indexer.size();
        e_.kept_index.assign(e_.total_composed, -1);
        e_.static_truth.assign(e_.total_composed, -1);
        e_.pruned = prune;

        std::vector<bool> keep(e_.total_composed, !prune);
        if (prune) {
            std::vector<std::size_t> stack;
            for (std::size_t c = 0; c < e_.total_composed; ++c) {
                e_.static_truth[c] = static_value(root, mdp_, indexer.tuple(c), vars);
                if (e_.static_truth[c] == -1) {
                    keep[c] = true;
                    stack.push_back(c);
                }
            }
            while (!stack.empty()) {
                std::size_t c = stack.back();
                stack.pop_back();
                for_each_row(indexer, c, [&](const std::vector<ActionId>&, const std::vector<std::size_t>& succ,
                                             const std::vector<Rational>&) {
                    for (std::size_t t : succ) {
                        if (!keep[t]) {
                            keep[t] = true;
                            e_.static_truth[t] = -1;
                            stack.push_back(t);
                        }
                    }
                });
            }
        }
        for (std::size_t c = 0; c < e_.total_composed; ++c) {
            if (!keep[c]) continue;
            e_.kept_index[c] = static_cast<std::int64_t>(e_.kept.size());
            e_.kept.push_back(c);
        }
        e_.rows.resize(e_.kept.size());
        for (std::size_t k = 0; k < e_.kept.size(); ++k) {
            auto tuple = indexer.tuple(e_.kept[k]);
            for_each_row(indexer, e_.kept[k], [&](const std::vector<ActionId>& actions,
                                                  const std::vector<std::size_t>& succ,
                                                  const std::vector<Rational>& prob) {
                ComposedRow row;
                for (std::size_t i = 0; i < n; ++i) {
                    VarId v = choice_var(e_.binding[i], tuple[i], actions[i]);
                    if (std::find(row.guard.begin(), row.guard.end(), v) == row.guard.end()) row.guard.push_back(v);
                }
                for (std::size_t x = 0; x < succ.size(); ++x) {
                    row.successors.emplace_back(static_cast<std::uint32_t>(e_.kept_index[succ[x]]), prob[x]);
                }
                e_.rows[k].push_back(std::move(row));
            });
        }
    }

    std::size_t state(const StateFormula& f) {
        std::string text = to_string(f);
        if (auto it = index_.find("s:" + text); it != index_.end()) return it->second;
        Subformula node;
        node.text = text;
        switch (f.kind) {
            case StateFormula::Kind::True:
                node.kind = Subformula::Kind::True;
                break;
            case StateFormula::Kind::Prop:
                node.kind = Subformula::Kind::Prop;
                node.prop = f.prop;
                node.component = static_cast<std::size_t>(
                    std::find_if(e_.state_prefix.begin(), e_.state_prefix.end(),
                                 [&](const StateVariable& v) { return v.name == f.var; }) -
                    e_.state_prefix.begin());
                break;
            case StateFormula::Kind::And:
                node.kind = Subformula::Kind::And;
                node.lhs = state(*f.lhs);
                node.rhs = state(*f.rhs);
                break;
            case StateFormula::Kind::Not:
                node.kind = Subformula::Kind::Not;
                node.lhs = state(*f.lhs);
                break;
            case StateFormula::Kind::Less:
                node.kind = Subformula::Kind::Less;
                node.lhs = prob(*f.left);
                node.rhs = prob(*f.right);
                break;
        }
        std::size_t id = add_node(std::move(node), "s:" + text);
        constrain(id);
        return id;
    }

    std::size_t prob(const ProbExpr& p) {
        std::string text = to_string(p);
        if (auto it = index_.find("p:" + text); it != index_.end()) return it->second;
        if (p.kind == ProbExpr::Kind::Prob && p.path->kind == PathFormula::Kind::BoundedUntil) {
            std::size_t l = state(*p.path->lhs);
            std::size_t r = state(*p.path->rhs);
            return bounded(l, r, p.path->k1, p.path->k2);
        }
        Subformula node;
        node.text = text;
        switch (p.kind) {
            case ProbExpr::Kind::Prob:
                if (p.path->kind == PathFormula::Kind::Next) {
                    node.kind = Subformula::Kind::Next;
                    node.rhs = state(*p.path->rhs);
                } else {
                    node.kind = Subformula::Kind::Until;
                    node.lhs = state(*p.path->lhs);
                    node.rhs = state(*p.path->rhs);
                }
                break;
            case ProbExpr::Kind::Const:
                node.kind = Subformula::Kind::Const;
                node.value = p.value;
                break;
            case ProbExpr::Kind::Add:
            case ProbExpr::Kind::Sub:
            case ProbExpr::Kind::Mul:
                node.kind = p.kind == ProbExpr::Kind::Add   ? Subformula::Kind::Add
                            : p.kind == ProbExpr::Kind::Sub ? Subformula::Kind::Sub
                                                            : Subformula::Kind::Mul;
                node.lhs = prob(*p.lhs);
                node.rhs = prob(*p.rhs);
                break;
        }
        std::size_t id = add_node(std::move(node), "p:" + text);
        constrain(id);
        return id;
    }

    TermId truth() {
        std::vector<StateId> tuple(e_.arity);
        return truth_level(0, tuple);
    }

private:
    template <class F>
    void for_each_row(const ComposedIndexer& indexer, std::size_t composed, F&& visit) {
        const std::size_t n = e_.arity;
        if (n == 0) {
            visit(std::vector<ActionId>{}, std::vector<std::size_t>{0}, std::vector<Rational>{Rational(1)});
            return;
        }
        auto tuple = indexer.tuple(composed);
        std::vector<std::vector<ActionId>> options(n);
        for (std::size_t i = 0; i < n; ++i) options[i] = mdp_.enabled(tuple[i]);
        std::vector<std::size_t> digit(n, 0);
        std::vector<ActionId> actions(n);
        for (;;) {
            bool consistent = true;
            for (std::size_t i = 0; i < n && consistent; ++i) {
                actions[i] = options[i][digit[i]];
                for (std::size_t k = 0; k < i; ++k) {
                    if (e_.binding[k] == e_.binding[i] && tuple[k] == tuple[i] && actions[k] != actions[i]) {
                        consistent = false;
                        break;
                    }
                }
            }
            if (consistent) {
                std::vector<std::size_t> succ{0};
                std::vector<Rational> prob{Rational(1)};
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& dist = mdp_.distribution(tuple[i], actions[i]);
                    std::vector<std::size_t> next_succ;
                    std::vector<Rational> next_prob;
                    for (std::size_t x = 0; x < succ.size(); ++x) {
                        for (const auto& t : dist) {
                            next_succ.push_back(succ[x] * mdp_.num_states() + t.target);
                            next_prob.push_back(prob[x] * t.probability);
                        }
                    }
                    succ = std::move(next_succ);
                    prob = std::move(next_prob);
                }
                visit(actions, succ, prob);
            }
            std::size_t i = n;
            while (i > 0) {
                --i;
                if (++digit[i] < options[i].size()) break;
                digit[i] = 0;
                if (i == 0) return;
            }
        }
    }

    VarId choice_var(std::size_t j, StateId s, ActionId a) const {
        for (const auto& [action, v] : e_.choices[j][s]) {
            if (action == a) return v;
        }
        raise(ErrorKind::IncompatibleScheduler, "action not enabled");
    }

    std::string suffix(std::size_t k, std::size_t id) const {
        return "_" + e_.tuple_name(e_.kept[k]) + "_" + std::to_string(id);
    }

    std::size_t add_node(Subformula node, const std::string& key) {
        std::size_t id = e_.subformulas.size();
        const bool boolean = node.is_boolean();
        for (std::size_t k = 0; k < e_.kept.size(); ++k) {
            node.vars.push_back(boolean ? cs_.add_variable("h" + suffix(k, id), Sort::Bool, VarRole::Holds)
                                        : cs_.add_variable("pr" + suffix(k, id), Sort::Real, VarRole::Prob));
        }
        e_.subformulas.push_back(std::move(node));
        index_.emplace(key, id);
        return id;
    }

    TermId v(std::size_t node, std::size_t k) { return cs_.var(e_.subformulas[node].vars[k]); }
    TermId lit(std::size_t node, std::size_t k, bool positive) {
        TermId t = v(node, k);
        return positive ? t : cs_.make(Op::Not, {t});
    }
    TermId real(long x) { return cs_.constant(Rational(x)); }

    // Operand value of an arithmetic node: constants are inlined so products
    // with a constant stay linear.
    TermId operand(std::size_t node, std::size_t k) {
        const auto& n = e_.subformulas[node];
        if (n.kind == Subformula::Kind::Const) return cs_.constant(n.value);
        return v(node, k);
    }

    TermId implies(std::vector<TermId> premise, TermId conclusion) {
        if (premise.empty()) return conclusion;
        TermId p = premise.size() == 1 ? premise[0] : cs_.make(Op::And, premise);
        return cs_.make(Op::Implies, {p, conclusion});
    }

    std::vector<TermId> guard(const ComposedRow& row) {
        std::vector<TermId> g;
        for (VarId c : row.guard) g.push_back(cs_.var(c));
        return g;
    }

    // sum over successors of probability * value(successor)
    TermId expectation(const ComposedRow& row, const std::vector<VarId>& values) {
        std::vector<TermId> terms;
        for (const auto& [succ, p] : row.successors) {
            TermId x = cs_.var(values[succ]);
            terms.push_back(p == 1 ? x : cs_.make(Op::Mul, {cs_.constant(p), x}));
        }
        return terms.size() == 1 ? terms[0] : cs_.make(Op::Add, terms);
    }

    void ensure_toint(std::size_t node) {
        auto& n = e_.subformulas[node];
        if (!n.toint.empty() || e_.kept.empty()) return;
        for (std::size_t k = 0; k < e_.kept.size(); ++k) {
            e_.subformulas[node].toint.push_back(cs_.add_variable("ti" + suffix(k, node), Sort::Real, VarRole::ToInt));
        }
        for (std::size_t k = 0; k < e_.kept.size(); ++k) {
            TermId ti = cs_.var(e_.subformulas[node].toint[k]);
            TermId one = cs_.make(Op::And, {cs_.make(Op::Eq, {ti, real(1)}), lit(node, k, true)});
            TermId zero = cs_.make(Op::And, {cs_.make(Op::Eq, {ti, real(0)}), lit(node, k, false)});
            cs_.add(cs_.make(Op::Or, {one, zero}), Origin::NextLink);
        }
    }

    void ensure_distance(std::size_t node) {
        if (!e_.subformulas[node].distance.empty() || e_.kept.empty()) return;
        for (std::size_t k = 0; k < e_.kept.size(); ++k) {
            e_.subformulas[node].distance.push_back(
                cs_.add_variable("d" + suffix(k, node), Sort::Real, VarRole::Distance));
        }
    }

    // Alg. 4 family: members for the reduced bounds first, then this one.
    std::size_t bounded(std::size_t l, std::size_t r, unsigned k1, unsigned k2) {
        std::string text = "P(" + e_.subformulas[l].text + " U[" + std::to_string(k1) + "," + std::to_string(k2) +
                           "] " + e_.subformulas[r].text + ")";
        if (auto it = index_.find("p:" + text); it != index_.end()) return it->second;
        std::size_t inner = Subformula::none;
        if (k2 > 0) inner = k1 == 0 ? bounded(l, r, 0, k2 - 1) : bounded(l, r, k1 - 1, k2 - 1);
        Subformula node;
        node.kind = Subformula::Kind::BoundedUntil;
        node.text = text;
        node.lhs = l;
        node.rhs = r;
        node.inner = inner;
        node.k1 = k1;
        node.k2 = k2;
        std::size_t id = add_node(std::move(node), "p:" + text);
        constrain(id);
        return id;
    }

    void constrain(std::size_t id) {
        const Subformula n = e_.subformulas[id];
        const std::size_t kept = e_.kept.size();
        ComposedIndexer indexer(mdp_.num_states(), e_.arity);
        if (n.kind == Subformula::Kind::Next || n.kind == Subformula::Kind::Until ||
            n.kind == Subformula::Kind::BoundedUntil) {
            for (std::size_t k = 0; k < kept; ++k) {
                cs_.add(cs_.make(Op::And, {cs_.make(Op::GreaterEq, {v(id, k), real(0)}),
                                           cs_.make(Op::GreaterEq, {real(1), v(id, k)})}),
                        Origin::ProbDomain);
            }
        }
        switch (n.kind) {
            case Subformula::Kind::True:
                for (std::size_t k = 0; k < kept; ++k) cs_.add(v(id, k), Origin::TrueFact);
                break;
            case Subformula::Kind::Prop: {
                auto prop = mdp_.find_proposition(n.prop);
                auto& labels = e_.subformulas[id].labels;
                for (std::size_t k = 0; k < kept; ++k) {
                    StateId s = indexer.component(e_.kept[k], n.component);
                    labels.push_back(prop && mdp_.has_label(s, *prop));
                    cs_.add(lit(id, k, labels.back()), Origin::PropFact);
                }
                break;
            }
            case Subformula::Kind::And:
                for (std::size_t k = 0; k < kept; ++k) {
                    TermId yes = cs_.make(Op::And, {lit(id, k, true), lit(n.lhs, k, true), lit(n.rhs, k, true)});
                    TermId no = cs_.make(Op::And, {lit(id, k, false),
                                                   cs_.make(Op::Or, {lit(n.lhs, k, false), lit(n.rhs, k, false)})});
                    cs_.add(cs_.make(Op::Or, {yes, no}), Origin::Conjunction);
                }
                break;
            case Subformula::Kind::Not:
                for (std::size_t k = 0; k < kept; ++k) {
                    cs_.add(cs_.make(Op::Xor, {v(id, k), v(n.lhs, k)}), Origin::Negation);
                }
                break;
            case Subformula::Kind::Less:
                for (std::size_t k = 0; k < kept; ++k) {
                    TermId a = operand(n.lhs, k);
                    TermId b = operand(n.rhs, k);
                    TermId yes = cs_.make(Op::And, {lit(id, k, true), cs_.make(Op::Less, {a, b})});
                    TermId no = cs_.make(Op::And, {lit(id, k, false), cs_.make(Op::GreaterEq, {a, b})});
                    cs_.add(cs_.make(Op::Or, {yes, no}), Origin::Comparison);
                }
                break;
            case Subformula::Kind::Const:
                for (std::size_t k = 0; k < kept; ++k) {
                    cs_.add(cs_.make(Op::Eq, {v(id, k), cs_.constant(n.value)}), Origin::Constant);
                }
                break;
            case Subformula::Kind::Add:
            case Subformula::Kind::Sub:
            case Subformula::Kind::Mul: {
                Op op = n.kind == Subformula::Kind::Add ? Op::Add : n.kind == Subformula::Kind::Sub ? Op::Sub : Op::Mul;
                for (std::size_t k = 0; k < kept; ++k) {
                    TermId rhs = cs_.make(op, {operand(n.lhs, k), operand(n.rhs, k)});
                    cs_.add(cs_.make(Op::Eq, {v(id, k), rhs}), Origin::Arith);
                }
                break;
            }
            case Subformula::Kind::Next:
                ensure_toint(n.rhs);
                for (std::size_t k = 0; k < kept; ++k) {
                    for (const auto& row : e_.rows[k]) {
                        TermId eq = cs_.make(Op::Eq, {v(id, k), expectation(row, e_.subformulas[n.rhs].toint)});
                        cs_.add(implies(guard(row), eq), Origin::NextSum);
                    }
                }
                break;
            case Subformula::Kind::Until:
                ensure_distance(n.rhs);
                for (std::size_t k = 0; k < kept; ++k) {
                    cs_.add(implies({v(n.rhs, k)}, cs_.make(Op::Eq, {v(id, k), real(1)})), Origin::UntilPin);
                    cs_.add(implies({lit(n.lhs, k, false), lit(n.rhs, k, false)},
                                    cs_.make(Op::Eq, {v(id, k), real(0)})),
                            Origin::UntilPin);
                }
                for (std::size_t k = 0; k < kept; ++k) {
                    const auto& dist = e_.subformulas[n.rhs].distance;
                    for (const auto& row : e_.rows[k]) {
                        std::vector<TermId> premise{lit(n.lhs, k, true), lit(n.rhs, k, false)};
                        auto g = guard(row);
                        premise.insert(premise.end(), g.begin(), g.end());
                        TermId eq = cs_.make(Op::Eq, {v(id, k), expectation(row, e_.subformulas[id].vars)});
                        std::vector<TermId> progress;
                        for (const auto& [succ, p] : row.successors) {
                            progress.push_back(v(n.rhs, succ));
                            progress.push_back(cs_.make(Op::Greater, {cs_.var(dist[k]), cs_.var(dist[succ])}));
                        }
                        TermId positive = cs_.make(Op::Greater, {v(id, k), real(0)});
                        TermId fix = cs_.make(Op::Implies, {positive, cs_.make(Op::Or, progress)});
                        cs_.add(implies(std::move(premise), cs_.make(Op::And, {eq, fix})), Origin::UntilStep);
                    }
                }
                break;
            case Subformula::Kind::BoundedUntil:
                for (std::size_t k = 0; k < kept; ++k) {
                    TermId one = cs_.make(Op::Eq, {v(id, k), real(1)});
                    TermId zero = cs_.make(Op::Eq, {v(id, k), real(0)});
                    if (n.k2 == 0) {
                        cs_.add(implies({lit(n.rhs, k, true)}, one), Origin::BoundedPin);
                        cs_.add(implies({lit(n.rhs, k, false)}, zero), Origin::BoundedPin);
                        continue;
                    }
                    const auto& inner = e_.subformulas[n.inner].vars;
                    if (n.k1 == 0) {
                        cs_.add(implies({lit(n.rhs, k, true)}, one), Origin::BoundedPin);
                        cs_.add(implies({lit(n.lhs, k, false), lit(n.rhs, k, false)}, zero), Origin::BoundedPin);
                        for (const auto& row : e_.rows[k]) {
                            std::vector<TermId> premise{lit(n.lhs, k, true), lit(n.rhs, k, false)};
                            auto g = guard(row);
                            premise.insert(premise.end(), g.begin(), g.end());
                            TermId eq = cs_.make(Op::Eq, {v(id, k), expectation(row, inner)});
                            cs_.add(implies(std::move(premise), eq), Origin::BoundedStep);
                        }
                    } else {
                        cs_.add(implies({lit(n.lhs, k, false)}, zero), Origin::BoundedPin);
                        for (const auto& row : e_.rows[k]) {
                            std::vector<TermId> premise{lit(n.lhs, k, true)};
                            auto g = guard(row);
                            premise.insert(premise.end(), g.begin(), g.end());
                            TermId eq = cs_.make(Op::Eq, {v(id, k), expectation(row, inner)});
                            cs_.add(implies(std::move(premise), eq), Origin::BoundedStep);
                        }
                    }
                }
                break;
        }
    }

    TermId truth_level(std::size_t i, std::vector<StateId>& tuple) {
        if (i == e_.arity) {
            ComposedIndexer indexer(mdp_.num_states(), e_.arity);
            std::size_t c = indexer.index(tuple);
            if (e_.kept_index[c] >= 0) return v(e_.root, static_cast<std::size_t>(e_.kept_index[c]));
            return cs_.boolean(e_.static_truth[c] == 1);
        }
        const bool all = e_.state_prefix[i].kind == QuantifierKind::Forall;
        std::vector<TermId> parts;
        for (StateId s = 0; s < mdp_.num_states(); ++s) {
            tuple[i] = s;
            TermId t = truth_level(i + 1, tuple);
            Op op = cs_.term(t).op;
            if (op == (all ? Op::True : Op::False)) continue;
            if (op == (all ? Op::False : Op::True)) return t;
            parts.push_back(t);
        }
        if (parts.empty()) return cs_.boolean(all);
        if (parts.size() == 1) return parts[0];
        return cs_.make(all ? Op::And : Op::Or, parts);
    }

    const Mdp& mdp_;
    Encoding& e_;
    ConstraintSystem& cs_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace

Encoding encode_main(const Mdp& mdp, const Formula& f, const EncodeOptions& options) {
    CheckOptions caps;
    caps.max_scheduler_vars = options.max_scheduler_vars;
    caps.max_state_vars = options.max_state_vars;
    validate_for_model(mdp, f, caps);

    Encoding e;
    e.model_states.reserve(mdp.num_states());
    for (StateId s = 0; s < mdp.num_states(); ++s) e.model_states.push_back(mdp.state_name(s));
    e.model_actions = mdp.actions();
    e.schedulers = scheduler_quantifiers(f);
    for (const auto& q : e.schedulers) {
        if (q.kind != e.schedulers.front().kind) {
            raise(ErrorKind::MixedSchedulerBlock, "scheduler quantifiers mix exists and forall");
        }
    }
    e.polarity = !e.schedulers.empty() && e.schedulers.front().kind == QuantifierKind::Forall ? Polarity::Negated
                                                                                               : Polarity::Direct;
    e.state_prefix = state_variables(f);
    std::vector<std::string> names;
    for (auto& v : e.state_prefix) {
        if (e.polarity == Polarity::Negated) {
            v.kind = v.kind == QuantifierKind::Forall ? QuantifierKind::Exists : QuantifierKind::Forall;
        }
        names.push_back(v.name);
        auto it = std::find_if(e.schedulers.begin(), e.schedulers.end(),
                               [&](const Quantifier& q) { return q.var == v.scheduler; });
        e.binding.push_back(static_cast<std::size_t>(it - e.schedulers.begin()));
    }
    for (auto& q : e.schedulers) q.kind = QuantifierKind::Exists;
    e.arity = e.state_prefix.size();

    StatePtr root = e.polarity == Polarity::Negated ? make_not(f.body) : f.body;
    Encoder enc(mdp, e);
    enc.choices();
    enc.composition(*root, options.prune, names);
    e.root = enc.state(*root);
    e.truth = enc.truth();
    e.system.add(e.truth, Origin::Truth);
    return e;
}

}  // namespace hyperprob
