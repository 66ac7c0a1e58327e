#include "hyperprob/model.hpp"

#include "hyperprob/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hyperprob {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ',') ++i;
        if (i > start) words.emplace_back(s.substr(start, i - start));
    }
    return words;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

[[noreturn]] void fail_at(ErrorKind kind, std::size_t line, const std::string& message) {
    if (line == 0) raise(kind, message);
    raise(kind, "line " + std::to_string(line) + ": " + message);
}

void require_identifier(std::string_view word, std::size_t line, const char* what) {
    if (!is_identifier(word)) {
        fail_at(ErrorKind::Parse, line, std::string("invalid ") + what + " name '" + std::string(word) + "'");
    }
}

template <typename Names>
std::optional<std::size_t> index_of(const Names& names, std::string_view name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

struct ActionsDirective {
    std::vector<std::string> names;
};

}  // namespace

RawModel parse_mdpx(std::string_view text) {
    RawModel raw;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }

        auto colon = line.find(':');
        if (colon == std::string_view::npos) fail_at(ErrorKind::Parse, line_no, "expected a directive");
        std::string_view head = trim(line.substr(0, colon));
        std::string_view rest = line.substr(colon + 1);

        if (head == "states") {
            if (!raw.states.empty()) fail_at(ErrorKind::Parse, line_no, "duplicate states line");
            raw.states = split_words(rest);
            raw.states_line = line_no;
            for (const auto& s : raw.states) require_identifier(s, line_no, "state");
        } else if (head == "ap" || head == "propositions") {
            raw.propositions = split_words(rest);
            raw.propositions_line = line_no;
            for (const auto& p : *raw.propositions) require_identifier(p, line_no, "proposition");
        } else if (head == "actions") {
            // Optional alphabet declaration; recorded as zero-entry rows of a
            // pseudo state so validate_mdp can keep the declared order.
            for (const auto& a : split_words(rest)) {
                require_identifier(a, line_no, "action");
                raw.actions.push_back(RawAction{"", a, {}, line_no});
            }
        } else if (head == "labels") {
            // `labels: s0: init a; s1: b;` -- the first colon split off the
            // directive, the remaining entries keep their own colons.
            for (std::string_view entry : split(rest, ';')) {
                entry = trim(entry);
                if (entry.empty()) continue;
                auto c = entry.find(':');
                if (c == std::string_view::npos) fail_at(ErrorKind::Parse, line_no, "label entry without ':'");
                std::string state(trim(entry.substr(0, c)));
                require_identifier(state, line_no, "state");
                auto props = split_words(entry.substr(c + 1));
                for (const auto& p : props) require_identifier(p, line_no, "proposition");
                raw.labels.emplace_back(std::move(state), std::move(props));
                raw.label_lines.push_back(line_no);
            }
        } else if (head.substr(0, 7) == "action " || head.substr(0, 7) == "action\t") {
            auto words = split_words(head.substr(7));
            if (words.size() != 2) fail_at(ErrorKind::Parse, line_no, "expected `action <state> <name>:`");
            require_identifier(words[0], line_no, "state");
            require_identifier(words[1], line_no, "action");
            RawAction action{words[0], words[1], {}, line_no};
            for (std::string_view entry : split(rest, ',')) {
                entry = trim(entry);
                if (entry.empty()) continue;
                auto parts = split_words(entry);
                if (parts.size() != 2) fail_at(ErrorKind::Parse, line_no, "expected `<state> <probability>`");
                require_identifier(parts[0], line_no, "state");
                Rational p;
                try {
                    p = parse_rational(parts[1]);
                } catch (const Error& e) {
                    fail_at(ErrorKind::Parse, line_no, e.what());
                }
                action.entries.emplace_back(parts[0], p);
            }
            raw.actions.push_back(std::move(action));
        } else {
            fail_at(ErrorKind::Parse, line_no, "unknown directive '" + std::string(head) + "'");
        }
        if (end == text.size()) break;
    }
    return raw;
}

Mdp validate_mdp(const RawModel& raw) {
    Mdp mdp;
    if (raw.states.empty()) raise(ErrorKind::Parse, "model declares no states");

    std::unordered_map<std::string, StateId> state_index;
    for (const auto& name : raw.states) {
        if (!state_index.emplace(name, mdp.state_names_.size()).second) {
            fail_at(ErrorKind::Parse, raw.states_line, "duplicate state '" + name + "'");
        }
        mdp.state_names_.push_back(name);
    }
    const std::size_t n = mdp.state_names_.size();

    // Proposition alphabet: declared, or collected from the labels in order.
    std::unordered_map<std::string, PropId> prop_index;
    if (raw.propositions) {
        for (const auto& p : *raw.propositions) {
            if (prop_index.emplace(p, mdp.prop_names_.size()).second) mdp.prop_names_.push_back(p);
        }
    }
    mdp.labels_.assign(n, {});
    for (std::size_t i = 0; i < raw.labels.size(); ++i) {
        const auto& [state, props] = raw.labels[i];
        std::size_t line = raw.label_lines.at(i);
        auto it = state_index.find(state);
        if (it == state_index.end()) fail_at(ErrorKind::DanglingReference, line, "label on undeclared state '" + state + "'");
        for (const auto& p : props) {
            auto pit = prop_index.find(p);
            if (pit == prop_index.end()) {
                if (raw.propositions) {
                    fail_at(ErrorKind::DanglingReference, line, "undeclared proposition '" + p + "'");
                }
                pit = prop_index.emplace(p, mdp.prop_names_.size()).first;
                mdp.prop_names_.push_back(p);
            }
            mdp.labels_[it->second].push_back(pit->second);
        }
    }
    for (auto& l : mdp.labels_) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }

    std::unordered_map<std::string, ActionId> action_index;
    for (const auto& a : raw.actions) {
        if (action_index.emplace(a.action, mdp.action_names_.size()).second) {
            mdp.action_names_.push_back(a.action);
        }
    }

    mdp.choices_.assign(n, {});
    std::set<std::pair<StateId, ActionId>> seen;
    for (const auto& a : raw.actions) {
        if (a.state.empty()) continue;  // alphabet declaration
        auto sit = state_index.find(a.state);
        if (sit == state_index.end()) fail_at(ErrorKind::DanglingReference, a.line, "action on undeclared state '" + a.state + "'");
        ActionId act = action_index.at(a.action);
        if (!seen.emplace(sit->second, act).second) {
            fail_at(ErrorKind::Parse, a.line, "duplicate action '" + a.action + "' for state '" + a.state + "'");
        }
        Distribution dist;
        Rational sum = 0;
        std::set<StateId> targets;
        for (const auto& [target, p] : a.entries) {
            auto tit = state_index.find(target);
            if (tit == state_index.end()) fail_at(ErrorKind::DanglingReference, a.line, "transition to undeclared state '" + target + "'");
            if (p < 0) fail_at(ErrorKind::Parse, a.line, "negative probability");
            if (!targets.insert(tit->second).second) {
                fail_at(ErrorKind::Parse, a.line, "target '" + target + "' listed twice");
            }
            sum += p;
            if (p != 0) dist.push_back(Transition{tit->second, p});
        }
        if (sum == 0) continue;  // not enabled
        if (sum != 1) {
            fail_at(ErrorKind::RowSum, a.line,
                    "row of state '" + a.state + "' action '" + a.action + "' sums to " + format_rational(sum));
        }
        mdp.choices_[sit->second].push_back(Choice{act, std::move(dist)});
    }
    for (StateId s = 0; s < n; ++s) {
        auto& cs = mdp.choices_[s];
        if (cs.empty()) raise(ErrorKind::NoEnabledAction, "state '" + mdp.state_names_[s] + "' has no enabled action");
        std::sort(cs.begin(), cs.end(), [](const Choice& x, const Choice& y) { return x.action < y.action; });
    }
    return mdp;
}

Mdp parse_mdp(std::string_view text) { return validate_mdp(parse_mdpx(text)); }

Mdp load_mdp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::Io, "cannot open model file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_mdp(buffer.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

std::string write_mdpx(const Mdp& mdp) {
    std::ostringstream out;
    out << "states:";
    for (StateId s = 0; s < mdp.num_states(); ++s) out << ' ' << mdp.state_name(s);
    out << '\n';
    out << "actions:";
    for (const auto& a : mdp.actions()) out << ' ' << a;
    out << '\n';
    if (!mdp.propositions().empty()) {
        out << "ap:";
        for (const auto& p : mdp.propositions()) out << ' ' << p;
        out << '\n';
    }
    bool any_label = false;
    for (StateId s = 0; s < mdp.num_states(); ++s) any_label = any_label || !mdp.labels(s).empty();
    if (any_label) {
        out << "labels:";
        for (StateId s = 0; s < mdp.num_states(); ++s) {
            if (mdp.labels(s).empty()) continue;
            out << ' ' << mdp.state_name(s) << ':';
            for (PropId p : mdp.labels(s)) out << ' ' << mdp.propositions()[p];
            out << ';';
        }
        out << '\n';
    }
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        for (const auto& c : mdp.choices(s)) {
            out << "action " << mdp.state_name(s) << ' ' << mdp.action_name(c.action) << ':';
            bool first = true;
            for (const auto& t : c.distribution) {
                out << (first ? " " : ", ") << mdp.state_name(t.target) << ' ' << format_rational(t.probability);
                first = false;
            }
            out << '\n';
        }
    }
    return out.str();
}

std::optional<StateId> Mdp::find_state(std::string_view name) const { return index_of(state_names_, name); }

std::optional<ActionId> Mdp::find_action(std::string_view name) const { return index_of(action_names_, name); }

std::optional<PropId> Mdp::find_proposition(std::string_view name) const { return index_of(prop_names_, name); }

std::vector<ActionId> Mdp::enabled(StateId s) const {
    std::vector<ActionId> result;
    for (const auto& c : choices_.at(s)) result.push_back(c.action);
    return result;
}

bool Mdp::is_enabled(StateId s, ActionId a) const {
    const auto& cs = choices_.at(s);
    return std::any_of(cs.begin(), cs.end(), [a](const Choice& c) { return c.action == a; });
}

const Distribution& Mdp::distribution(StateId s, ActionId a) const {
    for (const auto& c : choices_.at(s)) {
        if (c.action == a) return c.distribution;
    }
    raise(ErrorKind::IncompatibleScheduler, "action not enabled in state '" + state_names_.at(s) + "'");
}

bool Mdp::has_label(StateId s, PropId p) const {
    const auto& l = labels_.at(s);
    return std::binary_search(l.begin(), l.end(), p);
}

std::size_t Mdp::num_transitions() const {
    std::size_t total = 0;
    for (const auto& cs : choices_) {
        for (const auto& c : cs) total += c.distribution.size();
    }
    return total;
}

std::size_t Mdp::num_choices() const {
    std::size_t total = 0;
    for (const auto& cs : choices_) total += cs.size();
    return total;
}

Dtmc::Dtmc(std::vector<std::string> state_names, std::vector<Distribution> rows,
           std::vector<std::string> propositions, std::vector<std::vector<PropId>> labels)
    : state_names_(std::move(state_names)),
      rows_(std::move(rows)),
      prop_names_(std::move(propositions)),
      labels_(std::move(labels)) {
    if (state_names_.size() != rows_.size() || labels_.size() != rows_.size()) {
        raise(ErrorKind::InvalidParameter, "DTMC state, row and label counts differ");
    }
    for (StateId s = 0; s < rows_.size(); ++s) {
        Rational sum = 0;
        for (const auto& t : rows_[s]) {
            if (t.target >= rows_.size()) raise(ErrorKind::DanglingReference, "DTMC transition to unknown state");
            sum += t.probability;
        }
        if (sum != 1) {
            raise(ErrorKind::RowSum, "DTMC row of state '" + state_names_[s] + "' sums to " + format_rational(sum));
        }
    }
    for (auto& l : labels_) std::sort(l.begin(), l.end());
}

std::optional<PropId> Dtmc::find_proposition(std::string_view name) const { return index_of(prop_names_, name); }

bool Dtmc::has_label(StateId s, PropId p) const {
    const auto& l = labels_.at(s);
    return std::binary_search(l.begin(), l.end(), p);
}

std::size_t Dtmc::num_transitions() const {
    std::size_t total = 0;
    for (const auto& r : rows_) total += r.size();
    return total;
}

SchedulerAssignment make_scheduler(const Mdp& mdp, const std::map<std::string, std::string>& choices) {
    SchedulerAssignment sched;
    sched.choice.resize(mdp.num_states());
    for (StateId s = 0; s < mdp.num_states(); ++s) sched.choice[s] = mdp.choices(s).front().action;
    for (const auto& [state, action] : choices) {
        auto s = mdp.find_state(state);
        if (!s) raise(ErrorKind::IncompatibleScheduler, "scheduler names unknown state '" + state + "'");
        auto a = mdp.find_action(action);
        if (!a || !mdp.is_enabled(*s, *a)) {
            raise(ErrorKind::IncompatibleScheduler, "action '" + action + "' is not enabled in state '" + state + "'");
        }
        sched.choice[*s] = *a;
    }
    return sched;
}

void check_scheduler(const Mdp& mdp, const SchedulerAssignment& sched) {
    if (sched.choice.size() != mdp.num_states()) {
        raise(ErrorKind::IncompatibleScheduler, "scheduler is not total over the model states");
    }
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        if (sched.choice[s] >= mdp.actions().size() || !mdp.is_enabled(s, sched.choice[s])) {
            raise(ErrorKind::IncompatibleScheduler, "scheduler picks a disabled action in state '" + mdp.state_name(s) + "'");
        }
    }
}

Dtmc induce_dtmc(const Mdp& mdp, const SchedulerAssignment& sched) {
    check_scheduler(mdp, sched);
    std::vector<std::string> names;
    std::vector<Distribution> rows;
    std::vector<std::vector<PropId>> labels;
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        names.push_back(mdp.state_name(s));
        rows.push_back(mdp.distribution(s, sched.choice[s]));
        labels.push_back(mdp.labels(s));
    }
    return Dtmc(std::move(names), std::move(rows), mdp.propositions(), std::move(labels));
}

ComposedIndexer::ComposedIndexer(std::size_t base, std::size_t arity)
    : base_(base), arity_(arity), size_(1), strides_(arity, 1) {
    for (std::size_t i = arity; i-- > 0;) {
        strides_[i] = size_;
        if (base != 0 && size_ > std::numeric_limits<std::size_t>::max() / base) {
            raise(ErrorKind::CapExceeded, "composed state space too large");
        }
        size_ *= base;
    }
}

std::size_t ComposedIndexer::index(std::span<const StateId> tuple) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < arity_; ++i) idx += tuple[i] * strides_[i];
    return idx;
}

std::vector<StateId> ComposedIndexer::tuple(std::size_t index) const {
    std::vector<StateId> t(arity_);
    for (std::size_t i = 0; i < arity_; ++i) t[i] = (index / strides_[i]) % base_;
    return t;
}

StateId ComposedIndexer::component(std::size_t index, std::size_t position) const {
    return (index / strides_[position]) % base_;
}

Dtmc self_compose(std::span<const Dtmc> components) {
    if (components.empty()) raise(ErrorKind::ArityZero, "self-composition needs at least one component");
    const std::size_t base = components.front().num_states();
    for (const auto& c : components) {
        if (c.num_states() != base) raise(ErrorKind::InvalidParameter, "components do not share a state space");
    }
    const std::size_t arity = components.size();
    ComposedIndexer indexer(base, arity);

    std::vector<std::string> props;
    std::vector<std::vector<PropId>> prop_ids(arity);
    for (std::size_t i = 0; i < arity; ++i) {
        for (const auto& p : components[i].propositions()) {
            prop_ids[i].push_back(props.size());
            props.push_back(p + "@" + std::to_string(i + 1));
        }
    }

    std::vector<std::string> names(indexer.size());
    std::vector<Distribution> rows(indexer.size());
    std::vector<std::vector<PropId>> labels(indexer.size());
    for (std::size_t r = 0; r < indexer.size(); ++r) {
        auto tuple = indexer.tuple(r);
        std::string name;
        for (std::size_t i = 0; i < arity; ++i) {
            if (i) name += ',';
            name += components[i].state_name(tuple[i]);
            for (PropId p : components[i].labels(tuple[i])) labels[r].push_back(prop_ids[i][p]);
        }
        names[r] = std::move(name);

        // Product row: first component outermost, entries in stored order.
        Distribution row{Transition{0, Rational(1)}};
        for (std::size_t i = 0; i < arity; ++i) {
            Distribution next;
            const auto& comp_row = components[i].row(tuple[i]);
            for (const auto& partial : row) {
                for (const auto& t : comp_row) {
                    next.push_back(Transition{partial.target * base + t.target, partial.probability * t.probability});
                }
            }
            row = std::move(next);
        }
        rows[r] = std::move(row);
    }
    return Dtmc(std::move(names), std::move(rows), std::move(props), std::move(labels));
}

SchedulerSpace::SchedulerSpace(const Mdp& mdp) {
    for (StateId s = 0; s < mdp.num_states(); ++s) options_.push_back(mdp.enabled(s));
}

std::uint64_t SchedulerSpace::size() const {
    std::uint64_t total = 1;
    for (const auto& o : options_) {
        if (__builtin_mul_overflow(total, static_cast<std::uint64_t>(o.size()), &total)) {
            raise(ErrorKind::CapExceeded, "scheduler space exceeds 2^64 assignments");
        }
    }
    return total;
}

std::string SchedulerSpace::size_string() const {
    mpz_class total = 1;
    for (const auto& o : options_) total *= static_cast<unsigned long>(o.size());
    return total.get_str();
}

SchedulerAssignment SchedulerSpace::at(std::uint64_t index) const {
    SchedulerAssignment sched;
    sched.choice.resize(options_.size());
    for (std::size_t s = options_.size(); s-- > 0;) {
        const auto radix = options_[s].size();
        sched.choice[s] = options_[s][index % radix];
        index /= radix;
    }
    return sched;
}

SchedulerSpace::iterator SchedulerSpace::begin() const {
    iterator it;
    it.space_ = this;
    it.digits_.assign(options_.size(), 0);
    it.current_.choice.resize(options_.size());
    for (std::size_t s = 0; s < options_.size(); ++s) it.current_.choice[s] = options_[s].front();
    it.done_ = false;
    return it;
}

SchedulerSpace::iterator& SchedulerSpace::iterator::operator++() {
    const auto& options = space_->options_;
    for (std::size_t s = options.size(); s-- > 0;) {
        if (++digits_[s] < options[s].size()) {
            current_.choice[s] = options[s][digits_[s]];
            return *this;
        }
        digits_[s] = 0;
        current_.choice[s] = options[s].front();
    }
    done_ = true;
    return *this;
}

}  // namespace hyperprob
