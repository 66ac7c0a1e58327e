#pragma once

#include "hyperprob/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperprob {

using StateId = std::size_t;
using ActionId = std::size_t;
using PropId = std::size_t;

struct Transition {
    StateId target;
    Rational probability;
};

using Distribution = std::vector<Transition>;

/// One `action` line of a model file before validation.
struct RawAction {
    std::string state;
    std::string action;
    std::vector<std::pair<std::string, Rational>> entries;
    std::size_t line = 0;
};

/// Syntactic content of a `.mdpx` file. Nothing here is checked beyond the
/// line grammar; validate_mdp turns it into an Mdp.
struct RawModel {
    std::vector<std::string> states;
    std::size_t states_line = 0;
    std::optional<std::vector<std::string>> propositions;
    std::size_t propositions_line = 0;
    std::vector<std::pair<std::string, std::vector<std::string>>> labels;
    std::vector<std::size_t> label_lines;
    std::vector<RawAction> actions;
};

RawModel parse_mdpx(std::string_view text);

struct Choice {
    ActionId action;
    Distribution distribution;
};

/// Explicit-state MDP over exact rationals. Immutable once built by
/// validate_mdp; states, actions and propositions keep their declared order.
class Mdp {
public:
    std::size_t num_states() const { return state_names_.size(); }
    const std::string& state_name(StateId s) const { return state_names_.at(s); }
    std::optional<StateId> find_state(std::string_view name) const;

    const std::vector<std::string>& actions() const { return action_names_; }
    const std::string& action_name(ActionId a) const { return action_names_.at(a); }
    std::optional<ActionId> find_action(std::string_view name) const;

    /// Enabled choices of s, ordered by the global action order.
    const std::vector<Choice>& choices(StateId s) const { return choices_.at(s); }
    std::vector<ActionId> enabled(StateId s) const;
    bool is_enabled(StateId s, ActionId a) const;
    const Distribution& distribution(StateId s, ActionId a) const;

    const std::vector<std::string>& propositions() const { return prop_names_; }
    std::optional<PropId> find_proposition(std::string_view name) const;
    const std::vector<PropId>& labels(StateId s) const { return labels_.at(s); }
    bool has_label(StateId s, PropId p) const;

    std::size_t num_transitions() const;
    std::size_t num_choices() const;

private:
    friend Mdp validate_mdp(const RawModel& raw);

    std::vector<std::string> state_names_;
    std::vector<std::string> action_names_;
    std::vector<std::string> prop_names_;
    std::vector<std::vector<Choice>> choices_;
    std::vector<std::vector<PropId>> labels_;
};

Mdp validate_mdp(const RawModel& raw);

/// parse_mdpx followed by validate_mdp.
Mdp parse_mdp(std::string_view text);
Mdp load_mdp(const std::string& path);

/// Canonical `.mdpx` text; parse_mdp(write_mdpx(m)) reproduces m.
std::string write_mdpx(const Mdp& mdp);

/// Discrete-time Markov chain with named states and propositions. Every row
/// sums to exactly one.
class Dtmc {
public:
    Dtmc() = default;
    Dtmc(std::vector<std::string> state_names, std::vector<Distribution> rows,
         std::vector<std::string> propositions, std::vector<std::vector<PropId>> labels);

    std::size_t num_states() const { return rows_.size(); }
    const std::string& state_name(StateId s) const { return state_names_.at(s); }
    const Distribution& row(StateId s) const { return rows_.at(s); }
    std::span<const Distribution> rows() const { return rows_; }

    const std::vector<std::string>& propositions() const { return prop_names_; }
    std::optional<PropId> find_proposition(std::string_view name) const;
    const std::vector<PropId>& labels(StateId s) const { return labels_.at(s); }
    bool has_label(StateId s, PropId p) const;

    std::size_t num_transitions() const;

private:
    std::vector<std::string> state_names_;
    std::vector<Distribution> rows_;
    std::vector<std::string> prop_names_;
    std::vector<std::vector<PropId>> labels_;
};

/// Non-probabilistic memoryless scheduler: one enabled action per state.
struct SchedulerAssignment {
    std::vector<ActionId> choice;

    friend bool operator==(const SchedulerAssignment&, const SchedulerAssignment&) = default;
    friend auto operator<=>(const SchedulerAssignment&, const SchedulerAssignment&) = default;
};

/// Builds an assignment from `state -> action` names; states not mentioned
/// take their first enabled action.
SchedulerAssignment make_scheduler(const Mdp& mdp, const std::map<std::string, std::string>& choices);

/// Throws IncompatibleScheduler unless sched is total and picks enabled actions.
void check_scheduler(const Mdp& mdp, const SchedulerAssignment& sched);

Dtmc induce_dtmc(const Mdp& mdp, const SchedulerAssignment& sched);

/// Every state of an n-ary self-composition is identified by the tuple of its
/// component states; the tuple is ranked lexicographically with the first
/// component most significant.
class ComposedIndexer {
public:
    ComposedIndexer(std::size_t base, std::size_t arity);

    std::size_t arity() const { return arity_; }
    std::size_t size() const { return size_; }
    std::size_t index(std::span<const StateId> tuple) const;
    std::vector<StateId> tuple(std::size_t index) const;
    StateId component(std::size_t index, std::size_t position) const;

private:
    std::size_t base_;
    std::size_t arity_;
    std::size_t size_;
    std::vector<std::size_t> strides_;
};

/// Product of the given chains over a shared state space. Proposition `a` of
/// component i (1-based) is named `a@i`. Throws ArityZero for an empty list.
Dtmc self_compose(std::span<const Dtmc> components);

/// The lexicographic space of all scheduler assignments of an MDP. The last
/// state varies fastest; per state the actions follow the enabled order.
class SchedulerSpace {
public:
    explicit SchedulerSpace(const Mdp& mdp);

    /// Number of assignments; throws CapExceeded when it does not fit 64 bits.
    std::uint64_t size() const;
    /// Exact count as a decimal string.
    std::string size_string() const;
    SchedulerAssignment at(std::uint64_t index) const;

    class iterator {
    public:
        using value_type = SchedulerAssignment;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        const SchedulerAssignment& operator*() const { return current_; }
        const SchedulerAssignment* operator->() const { return &current_; }
        iterator& operator++();
        iterator operator++(int) {
            iterator copy = *this;
            ++*this;
            return copy;
        }
        friend bool operator==(const iterator& a, const iterator& b) {
            return a.done_ == b.done_ && (a.done_ || a.digits_ == b.digits_);
        }

    private:
        friend class SchedulerSpace;
        const SchedulerSpace* space_ = nullptr;
        std::vector<std::size_t> digits_;
        SchedulerAssignment current_;
        bool done_ = true;
    };

    iterator begin() const;
    iterator end() const { return iterator{}; }

private:
    std::vector<std::vector<ActionId>> options_;
};

}  // namespace hyperprob
