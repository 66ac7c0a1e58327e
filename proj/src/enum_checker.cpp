#include "hyperprob/enum_checker.hpp"

#include "hyperprob/error.hpp"
#include "hyperprob/parallel.hpp"

#include <algorithm>

namespace hyperprob {

std::string_view to_string(VerdictMode mode) {
    switch (mode) {
        case VerdictMode::Witness: return "witness";
        case VerdictMode::Counterexample: return "counterexample";
        case VerdictMode::None: return "none";
    }
    return "none";
}

Dtmc unit_chain() {
    return Dtmc({"()"}, {Distribution{Transition{0, Rational(1)}}}, {}, {{}});
}

CompositionEvaluator::CompositionEvaluator(Dtmc composed, std::vector<std::string> state_vars)
    : chain_(std::move(composed)), vars_(std::move(state_vars)) {}

const StatePredicate& CompositionEvaluator::truth(const StateFormula& f) {
    if (auto it = truth_memo_.find(&f); it != truth_memo_.end()) return it->second;
    const std::size_t n = chain_.num_states();
    StatePredicate out(n, false);
    switch (f.kind) {
        case StateFormula::Kind::True:
            out.assign(n, true);
            break;
        case StateFormula::Kind::Prop: {
            auto pos = std::find(vars_.begin(), vars_.end(), f.var);
            if (pos == vars_.end()) raise(ErrorKind::UnboundStateVariable, "state variable '" + f.var + "' is not bound");
            std::string label = f.prop + "@" + std::to_string(pos - vars_.begin() + 1);
            out = label_predicate(chain_, label);
            break;
        }
        case StateFormula::Kind::And: {
            const auto& l = truth(*f.lhs);
            const auto& r = truth(*f.rhs);
            for (std::size_t s = 0; s < n; ++s) out[s] = l[s] && r[s];
            break;
        }
        case StateFormula::Kind::Not: {
            const auto& x = truth(*f.lhs);
            for (std::size_t s = 0; s < n; ++s) out[s] = !x[s];
            break;
        }
        case StateFormula::Kind::Less: {
            const auto& l = values(*f.left);
            const auto& r = values(*f.right);
            for (std::size_t s = 0; s < n; ++s) out[s] = l[s] < r[s];
            break;
        }
    }
    return truth_memo_.emplace(&f, std::move(out)).first->second;
}

const ProbVector& CompositionEvaluator::values(const ProbExpr& p) {
    if (auto it = value_memo_.find(&p); it != value_memo_.end()) return it->second;
    const std::size_t n = chain_.num_states();
    ProbVector out;
    switch (p.kind) {
        case ProbExpr::Kind::Prob:
            out = path_values(*p.path);
            break;
        case ProbExpr::Kind::Const:
            out.assign(n, p.value);
            break;
        case ProbExpr::Kind::Add:
        case ProbExpr::Kind::Sub:
        case ProbExpr::Kind::Mul: {
            const auto& l = values(*p.lhs);
            const auto& r = values(*p.rhs);
            out.resize(n);
            for (std::size_t s = 0; s < n; ++s) {
                if (p.kind == ProbExpr::Kind::Add) {
                    out[s] = l[s] + r[s];
                } else if (p.kind == ProbExpr::Kind::Sub) {
                    out[s] = l[s] - r[s];
                } else {
                    out[s] = l[s] * r[s];
                }
            }
            break;
        }
    }
    return value_memo_.emplace(&p, std::move(out)).first->second;
}

const ProbVector& CompositionEvaluator::path_values(const PathFormula& p) {
    if (auto it = value_memo_.find(&p); it != value_memo_.end()) return it->second;
    ProbVector out;
    switch (p.kind) {
        case PathFormula::Kind::Next:
            out = next_probs(chain_, truth(*p.rhs));
            break;
        case PathFormula::Kind::Until: {
            StatePredicate phi1 = truth(*p.lhs);
            out = until_probs(chain_, phi1, truth(*p.rhs));
            break;
        }
        case PathFormula::Kind::BoundedUntil: {
            StatePredicate phi1 = truth(*p.lhs);
            out = bounded_until_probs(chain_, phi1, truth(*p.rhs), p.k1, p.k2);
            break;
        }
    }
    return value_memo_.emplace(&p, std::move(out)).first->second;
}

bool eval_body(const Dtmc& composed, const std::vector<std::string>& state_vars, const StateFormula& body,
               std::size_t at) {
    CompositionEvaluator ev(composed, state_vars);
    return ev.truth(body).at(at);
}

Rational eval_prob(const Dtmc& composed, const std::vector<std::string>& state_vars, const ProbExpr& expr,
                   std::size_t at) {
    CompositionEvaluator ev(composed, state_vars);
    return ev.values(expr).at(at);
}

void validate_for_model(const Mdp& mdp, const Formula& f, const CheckOptions& options) {
    check_well_formed(f);
    auto counts = count_quantifiers(f);
    if (counts.schedulers > options.max_scheduler_vars) {
        raise(ErrorKind::CapExceeded, std::to_string(counts.schedulers) + " scheduler quantifiers exceed the cap of " +
                                          std::to_string(options.max_scheduler_vars));
    }
    if (counts.states > options.max_state_vars) {
        raise(ErrorKind::CapExceeded, std::to_string(counts.states) + " state quantifiers exceed the cap of " +
                                          std::to_string(options.max_state_vars));
    }
    for (const auto& prop : propositions_used(*f.body)) {
        if (!mdp.find_proposition(prop)) raise(ErrorKind::UnknownProposition, "proposition '" + prop + "' is not declared by the model");
    }
}

namespace {

struct Plan {
    std::vector<Quantifier> schedulers;
    std::vector<StateVariable> states;
    std::vector<std::string> state_names;
    /// Index into `schedulers` for each state variable.
    std::vector<std::size_t> binding;
};

Plan make_plan(const Formula& f) {
    Plan plan;
    plan.schedulers = scheduler_quantifiers(f);
    plan.states = state_variables(f);
    for (const auto& v : plan.states) {
        plan.state_names.push_back(v.name);
        auto it = std::find_if(plan.schedulers.begin(), plan.schedulers.end(),
                               [&](const Quantifier& q) { return q.var == v.scheduler; });
        plan.binding.push_back(static_cast<std::size_t>(it - plan.schedulers.begin()));
    }
    return plan;
}

const SchedulerAssignment* fixed_scheduler(const Witness* fixed, const std::string& name) {
    if (!fixed) return nullptr;
    for (const auto& [n, a] : fixed->schedulers) {
        if (n == name) return &a;
    }
    return nullptr;
}

const StateId* fixed_state(const Witness* fixed, const std::string& name) {
    if (!fixed) return nullptr;
    for (const auto& [n, s] : fixed->states) {
        if (n == name) return &s;
    }
    return nullptr;
}

// One depth-first instantiation of the prefix. Not shared between threads.
class Instantiation {
public:
    Instantiation(const Mdp& mdp, const Formula& f, const Plan& plan, const Witness* fixed)
        : mdp_(mdp), f_(f), plan_(plan), fixed_(fixed), space_(mdp),
          chosen_(plan.schedulers.size()), sched_trail_(plan.schedulers.size()), state_trail_(plan.states.size()),
          tuple_(plan.states.size()) {}

    /// Truth of the formula with the outermost scheduler fixed to `first`
    /// (ignored when there are no scheduler quantifiers).
    bool run(const SchedulerAssignment& first) {
        if (plan_.schedulers.empty()) return leaf();
        chosen_[0] = first;
        sched_trail_[0] = first;
        return scheduler_level(1);
    }

    const std::vector<SchedulerAssignment>& scheduler_trail() const { return sched_trail_; }
    const std::vector<StateId>& state_trail() const { return state_trail_; }

private:
    bool scheduler_level(std::size_t j) {
        if (j == plan_.schedulers.size()) return leaf();
        const auto& q = plan_.schedulers[j];
        const bool exists = q.kind == QuantifierKind::Exists;
        auto try_one = [&](const SchedulerAssignment& a) {
            chosen_[j] = a;
            bool r = scheduler_level(j + 1);
            if (r == exists) sched_trail_[j] = a;
            return r;
        };
        if (const auto* a = fixed_scheduler(fixed_, q.var)) return try_one(*a);
        for (const auto& a : space_) {
            if (try_one(a) == exists) return exists;
        }
        return !exists;
    }

    bool leaf() {
        Dtmc composed;
        if (plan_.states.empty()) {
            composed = unit_chain();
        } else {
            std::vector<Dtmc> induced;
            induced.reserve(chosen_.size());
            for (const auto& a : chosen_) induced.push_back(induce_dtmc(mdp_, a));
            std::vector<Dtmc> parts;
            parts.reserve(plan_.states.size());
            for (std::size_t b : plan_.binding) parts.push_back(induced[b]);
            composed = self_compose(parts);
        }
        CompositionEvaluator ev(std::move(composed), plan_.state_names);
        const auto& body = ev.truth(*f_.body);
        if (plan_.states.empty()) return body[0];
        ComposedIndexer indexer(mdp_.num_states(), plan_.states.size());
        return state_level(0, body, indexer);
    }

    bool state_level(std::size_t i, const StatePredicate& body, const ComposedIndexer& indexer) {
        if (i == plan_.states.size()) return body[indexer.index(tuple_)];
        const bool exists = plan_.states[i].kind == QuantifierKind::Exists;
        auto try_one = [&](StateId s) {
            tuple_[i] = s;
            bool r = state_level(i + 1, body, indexer);
            if (r == exists) state_trail_[i] = s;
            return r;
        };
        if (const auto* s = fixed_state(fixed_, plan_.states[i].name)) return try_one(*s);
        for (StateId s = 0; s < mdp_.num_states(); ++s) {
            if (try_one(s) == exists) return exists;
        }
        return !exists;
    }

    const Mdp& mdp_;
    const Formula& f_;
    const Plan& plan_;
    const Witness* fixed_;
    SchedulerSpace space_;
    std::vector<SchedulerAssignment> chosen_;
    std::vector<SchedulerAssignment> sched_trail_;
    std::vector<StateId> state_trail_;
    std::vector<StateId> tuple_;
};

struct Outcome {
    bool truth;
    std::optional<SchedulerAssignment> decisive;
};

Outcome evaluate(const Mdp& mdp, const Formula& f, const Plan& plan, const Witness* fixed, unsigned jobs) {
    if (plan.schedulers.empty()) {
        Instantiation inst(mdp, f, plan, fixed);
        return {inst.run(SchedulerAssignment{}), std::nullopt};
    }
    const auto& q = plan.schedulers[0];
    const bool exists = q.kind == QuantifierKind::Exists;
    SchedulerSpace space(mdp);
    if (const auto* a = fixed_scheduler(fixed, q.var)) {
        Instantiation inst(mdp, f, plan, fixed);
        bool r = inst.run(*a);
        return {r, r == exists ? std::optional(*a) : std::nullopt};
    }
    std::uint64_t count = space.size();
    auto hit = find_first(count, jobs, [&](std::uint64_t index) {
        Instantiation inst(mdp, f, plan, fixed);
        return inst.run(space.at(index)) == exists;
    });
    if (!hit) return {!exists, std::nullopt};
    return {exists, space.at(*hit)};
}

}  // namespace

Verdict check(const Mdp& mdp, const Formula& f, const CheckOptions& options) {
    validate_for_model(mdp, f, options);
    Plan plan = make_plan(f);
    Outcome outcome = evaluate(mdp, f, plan, nullptr, options.jobs);

    Verdict v;
    v.truth = outcome.truth;
    if (f.prefix.empty()) return v;
    const QuantifierKind lead = f.prefix.front().kind;
    const bool decisive = (lead == QuantifierKind::Exists) == v.truth;
    if (!decisive) return v;
    v.mode = v.truth ? VerdictMode::Witness : VerdictMode::Counterexample;

    // Replay the decisive branch sequentially to collect the inner values.
    Instantiation inst(mdp, f, plan, nullptr);
    inst.run(outcome.decisive.value_or(SchedulerAssignment{}));
    std::size_t sched_index = 0, state_index = 0;
    for (const auto& q : f.prefix) {
        if (q.kind != lead) break;
        if (q.over_scheduler) {
            v.witness.schedulers.emplace_back(q.var, inst.scheduler_trail()[sched_index++]);
        } else {
            v.witness.states.emplace_back(q.var, inst.state_trail()[state_index++]);
        }
    }
    return v;
}

bool replay(const Mdp& mdp, const Formula& f, const Witness& fixed) {
    CheckOptions options;
    options.max_scheduler_vars = options.max_state_vars = static_cast<std::size_t>(-1);
    validate_for_model(mdp, f, options);
    for (const auto& [name, a] : fixed.schedulers) check_scheduler(mdp, a);
    Plan plan = make_plan(f);
    return evaluate(mdp, f, plan, &fixed, 1).truth;
}

}  // namespace hyperprob
