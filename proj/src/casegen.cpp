#include "hyperprob/casegen.hpp"

#include "hyperprob/error.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <sstream>

namespace hyperprob {

namespace {

/// Collects states in discovery order and emits a validated model.
class Builder {
public:
    explicit Builder(std::vector<std::string> props) { raw_.propositions = std::move(props); }

    bool has(const std::string& state) const { return ids_.count(state) != 0; }

    void add_state(const std::string& state) {
        if (has(state)) return;
        ids_.emplace(state, raw_.states.size());
        raw_.states.push_back(state);
        labels_.emplace_back();
    }

    void label(const std::string& state, const std::string& prop) {
        add_state(state);
        labels_[ids_.at(state)].push_back(prop);
    }

    void action(const std::string& state, const std::string& name,
                std::vector<std::pair<std::string, Rational>> entries) {
        add_state(state);
        RawAction a;
        a.state = state;
        a.action = name;
        a.entries = std::move(entries);
        raw_.actions.push_back(std::move(a));
    }

    Mdp build() {
        raw_.labels.clear();
        raw_.label_lines.clear();
        for (std::size_t s = 0; s < raw_.states.size(); ++s) {
            if (labels_[s].empty()) continue;
            raw_.labels.emplace_back(raw_.states[s], labels_[s]);
            raw_.label_lines.push_back(0);
        }
        return validate_mdp(raw_);
    }

private:
    RawModel raw_;
    std::map<std::string, std::size_t> ids_;
    std::vector<std::vector<std::string>> labels_;
};

const Rational half{1, 2};

CaseSpec finish(std::string family, std::string name, Builder& b, std::string formula,
                std::optional<TableReference> reference) {
    CaseSpec c;
    c.family = std::move(family);
    c.name = std::move(name);
    c.mdp = b.build();
    c.model_text = write_mdpx(c.mdp);
    c.formula = parse_formula(formula);
    c.formula_text = formula + "\n";
    c.reference = reference;
    return c;
}

std::string counter_props_formula(unsigned m) {
    std::ostringstream f;
    f << "forall sched s1. forall sched s2. forall st x(s1). forall st y(s2). (init(x) & init(y)) -> (";
    for (unsigned l = 0; l <= m; ++l) {
        if (l) f << " & ";
        f << "P(F j_" << l << "(x)) = P(F j_" << l << "(y))";
    }
    f << ")";
    return f.str();
}

std::vector<std::string> counter_props(unsigned m) {
    std::vector<std::string> props{"init"};
    for (unsigned l = 0; l <= m; ++l) props.push_back("j_" + std::to_string(l));
    return props;
}

/// Victim program locations: decision points pick a branch without taking
/// time; every other location takes one step, raced 1/2 against the attacker
/// bumping j (saturating at m).
struct Location {
    std::string name;
    bool decision = false;
    std::vector<std::pair<std::string, std::string>> branches;  // (action, location)
    std::string next;  // empty = done
};

CaseSpec race(const std::string& family, const std::string& name, unsigned m,
              const std::vector<Location>& program, std::optional<TableReference> reference) {
    std::map<std::string, const Location*> by_name;
    for (const auto& l : program) by_name.emplace(l.name, &l);
    auto state = [](const std::string& loc, unsigned j) {
        return (loc.empty() ? std::string("done") : loc) + "_j" + std::to_string(j);
    };

    Builder b(counter_props(m));
    std::deque<std::pair<std::string, unsigned>> queue;
    auto visit = [&](const std::string& loc, unsigned j) {
        std::string s = state(loc, j);
        if (b.has(s)) return s;
        b.add_state(s);
        queue.emplace_back(loc, j);
        return s;
    };
    std::string start = visit(program.front().name, 0);
    b.label(start, "init");
    while (!queue.empty()) {
        auto [loc, j] = queue.front();
        queue.pop_front();
        std::string s = state(loc, j);
        if (loc.empty()) {
            b.label(s, "j_" + std::to_string(j));
            b.action(s, "stay", {{s, Rational(1)}});
            continue;
        }
        const Location& l = *by_name.at(loc);
        if (l.decision) {
            for (const auto& [act, target] : l.branches) b.action(s, act, {{visit(target, j), Rational(1)}});
            continue;
        }
        std::string victim = visit(l.next, j);
        std::string attacker = visit(loc, std::min(j + 1, m));
        if (victim == attacker) {
            b.action(s, "step", {{victim, Rational(1)}});
        } else {
            b.action(s, "step", {{victim, half}, {attacker, half}});
        }
    }
    return finish(family, name, b, counter_props_formula(m), reference);
}

std::optional<TableReference> lookup(const std::map<unsigned, TableReference>& table, unsigned key) {
    auto it = table.find(key);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

}  // namespace

CaseSpec gen_timing_attack(unsigned m) {
    if (m == 0) raise(ErrorKind::InvalidParameter, "timing attack needs m >= 1");
    std::vector<Location> program;
    for (unsigned i = 0; i < m; ++i) {
        std::string k = std::to_string(i);
        std::string after = i + 1 < m ? "dec" + std::to_string(i + 1) : "";
        program.push_back({"dec" + k, true, {{"long", "mul" + k}, {"short", "sq" + k}}, ""});
        program.push_back({"mul" + k, false, {}, "sq" + k});
        program.push_back({"sq" + k, false, {}, after});
    }
    static const std::map<unsigned, TableReference> table{{2, {24, 46}}, {4, {60, 136}}, {6, {112, 274}}};
    return race("ta", "ta_m" + std::to_string(m), m, program, lookup(table, m));
}

CaseSpec gen_password(unsigned m) {
    if (m == 0) raise(ErrorKind::InvalidParameter, "password check needs m >= 1");
    std::vector<Location> program;
    for (unsigned i = 0; i < m; ++i) {
        std::string k = std::to_string(i);
        std::string after = i + 1 < m ? "cmp" + std::to_string(i + 1) : "";
        program.push_back({"cmp" + k, true, {{"match", "eq" + k}, {"mismatch", "ne" + k}}, ""});
        program.push_back({"eq" + k, false, {}, "inc" + k});
        program.push_back({"inc" + k, false, {}, after});
        program.push_back({"ne" + k, false, {}, ""});
    }
    static const std::map<unsigned, TableReference> table{{2, {24, 46}}, {4, {70, 146}}, {6, {140, 302}}};
    return race("pw", "pw_m" + std::to_string(m), m, program, lookup(table, m));
}

CaseSpec gen_thread_sched(unsigned h1, unsigned h2) {
    if (h1 == h2) raise(ErrorKind::InvalidParameter, "thread scheduling needs h1 != h2");
    // (r1, r2, l): r1 steps left in the counting thread (h decrements plus
    // the write of l=1), r2 = 1 while the other thread has not written l=2.
    auto name = [](unsigned r1, unsigned r2, unsigned l) {
        return "t" + std::to_string(r1) + "_" + std::to_string(r2) + "_" + std::to_string(l);
    };
    Builder b({"init", "h", "l_1", "l_2"});
    std::deque<std::array<unsigned, 3>> queue;
    auto visit = [&](unsigned r1, unsigned r2, unsigned l) {
        std::string s = name(r1, r2, l);
        if (!b.has(s)) {
            b.add_state(s);
            queue.push_back({r1, r2, l});
        }
        return s;
    };
    for (unsigned h : {h1, h2}) {
        std::string s = visit(h + 1, 1, 0);
        b.label(s, "init");
        if (h == h2) b.label(s, "h");
    }
    while (!queue.empty()) {
        auto [r1, r2, l] = queue.front();
        queue.pop_front();
        std::string s = name(r1, r2, l);
        if (r1 == 0 && r2 == 0) {
            b.label(s, "l_" + std::to_string(l));
            b.action(s, "stay", {{s, Rational(1)}});
            continue;
        }
        std::string first, second;
        if (r1 > 0) first = visit(r1 - 1, r2, r1 == 1 ? 1 : l);
        if (r2 > 0) second = visit(r1, 0, 2);
        if (r1 > 0 && r2 > 0) {
            b.action(s, "fair", {{first, half}, {second, half}});
            b.action(s, "run1", {{first, Rational(1)}});
            b.action(s, "run2", {{second, Rational(1)}});
        } else {
            b.action(s, r1 > 0 ? "run1" : "run2", {{r1 > 0 ? first : second, Rational(1)}});
        }
    }
    std::string formula =
        "forall sched s. forall st x(s). forall st y(s). (init(x) & init(y) & (h(x) ^ h(y))) -> "
        "(P(F l_1(x)) = P(F l_1(y)) & P(F l_2(x)) = P(F l_2(y)))";
    static const std::map<std::pair<unsigned, unsigned>, TableReference> table{
        {{0, 1}, {7, 13}}, {{0, 15}, {35, 83}}, {{4, 8}, {21, 48}}, {{8, 15}, {35, 83}}};
    std::optional<TableReference> ref;
    if (auto it = table.find({h1, h2}); it != table.end()) ref = it->second;
    return finish("ts", "ts_h" + std::to_string(h1) + "_" + std::to_string(h2), b, formula, ref);
}

ConformanceTier parse_tier(const std::string& text) {
    if (text == "plain") return ConformanceTier::Plain;
    if (text == "s0") return ConformanceTier::S0;
    if (text == "s01") return ConformanceTier::S01;
    if (text == "s012") return ConformanceTier::S012;
    raise(ErrorKind::InvalidParameter, "unknown conformance tier '" + text + "' (plain, s0, s01, s012)");
}

std::string to_string(ConformanceTier tier) {
    switch (tier) {
        case ConformanceTier::Plain: return "plain";
        case ConformanceTier::S0: return "s0";
        case ConformanceTier::S01: return "s01";
        case ConformanceTier::S012: return "s012";
    }
    return "";
}

CaseSpec gen_conformance(ConformanceTier tier) {
    std::vector<std::string> props{"init", "ref"};
    for (int l = 1; l <= 6; ++l) props.push_back("die_" + std::to_string(l));
    Builder b(props);

    std::vector<std::string> coin;
    for (int i = 0; i <= 6; ++i) coin.push_back("c" + std::to_string(i));
    std::vector<std::string> die;
    for (int l = 1; l <= 6; ++l) die.push_back("d" + std::to_string(l));
    std::vector<std::string> ky = coin;
    ky.insert(ky.end(), die.begin(), die.end());
    for (const auto& s : ky) b.add_state(s);
    b.label("c0", "init");

    const std::map<std::string, std::pair<std::string, std::string>> toss{
        {"c0", {"c1", "c2"}}, {"c1", {"c3", "c4"}}, {"c2", {"c5", "c6"}}, {"c3", {"c1", "d1"}},
        {"c4", {"d2", "d3"}}, {"c5", {"d4", "d5"}}, {"c6", {"d6", "c2"}}};
    std::size_t sources = tier == ConformanceTier::S0 ? 1 : tier == ConformanceTier::S01 ? 2
                                                     : tier == ConformanceTier::S012 ? 3 : 0;
    for (std::size_t i = 0; i < coin.size(); ++i) {
        const std::string& s = coin[i];
        if (i < sources) {
            std::vector<std::string> others;
            for (const auto& t : ky) if (t != s) others.push_back(t);
            for (std::size_t a = 0; a < others.size(); ++a) {
                for (std::size_t c = a + 1; c < others.size(); ++c) {
                    b.action(s, "h_" + others[a] + "_" + others[c], {{others[a], half}, {others[c], half}});
                }
            }
        } else {
            const auto& [x, y] = toss.at(s);
            b.action(s, "toss", {{x, half}, {y, half}});
        }
    }
    for (int l = 1; l <= 6; ++l) {
        std::string d = "d" + std::to_string(l);
        b.label(d, "die_" + std::to_string(l));
        b.action(d, "stay", {{d, Rational(1)}});
    }
    b.label("r0", "ref");
    std::vector<std::pair<std::string, Rational>> roll;
    for (int l = 1; l <= 6; ++l) roll.emplace_back("e" + std::to_string(l), Rational(1, 6));
    b.action("r0", "roll", roll);
    for (int l = 1; l <= 6; ++l) {
        std::string e = "e" + std::to_string(l);
        b.label(e, "die_" + std::to_string(l));
        b.action(e, "stay", {{e, Rational(1)}});
    }

    std::ostringstream f;
    f << "exists sched s. forall st x(s). exists st y(s). init(x) -> (ref(y)";
    for (int l = 1; l <= 6; ++l) f << " & P(F die_" << l << "(x)) = P(F die_" << l << "(y))";
    f << ")";
    static const std::map<ConformanceTier, TableReference> table{
        {ConformanceTier::S0, {20, 158}}, {ConformanceTier::S01, {20, 280}}, {ConformanceTier::S012, {20, 404}}};
    std::optional<TableReference> ref;
    if (auto it = table.find(tier); it != table.end()) ref = it->second;
    return finish("pc", "pc_" + to_string(tier), b, f.str(), ref);
}

}  // namespace hyperprob
