#include "hyperprob/smt.hpp"

#include "hyperprob/dtmc_analysis.hpp"
#include "hyperprob/error.hpp"
#include "hyperprob/parallel.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>
#include <unordered_map>

namespace hyperprob {

namespace {

class TermEvaluator {
public:
    TermEvaluator(const ConstraintSystem& cs, const SmtModel& m) : cs_(cs), m_(m) {}

    bool truth(TermId t) {
        const Term& term = cs_.term(t);
        auto kids = cs_.children(t);
        switch (term.op) {
            case Op::True: return true;
            case Op::False: return false;
            case Op::Var: return value_of(term.a) != 0;
            case Op::Not: return !truth(kids[0]);
            case Op::And:
                for (TermId c : kids) {
                    if (!truth(c)) return false;
                }
                return true;
            case Op::Or:
                for (TermId c : kids) {
                    if (truth(c)) return true;
                }
                return false;
            case Op::Implies: return !truth(kids[0]) || truth(kids[1]);
            case Op::Xor: return truth(kids[0]) != truth(kids[1]);
            case Op::Eq: return number(kids[0]) == number(kids[1]);
            case Op::Less: return number(kids[0]) < number(kids[1]);
            case Op::GreaterEq: return number(kids[0]) >= number(kids[1]);
            case Op::Greater: return number(kids[0]) > number(kids[1]);
            default: break;
        }
        throw std::logic_error("numeric term in Boolean position");
    }

    Rational number(TermId t) {
        const Term& term = cs_.term(t);
        auto kids = cs_.children(t);
        switch (term.op) {
            case Op::Var: return value_of(term.a);
            case Op::Const: return cs_.constant_value(t);
            case Op::Add: {
                Rational acc = 0;
                for (TermId c : kids) acc += number(c);
                return acc;
            }
            case Op::Sub: {
                if (kids.size() == 1) return -number(kids[0]);
                Rational acc = number(kids[0]);
                for (std::size_t i = 1; i < kids.size(); ++i) acc -= number(kids[i]);
                return acc;
            }
            case Op::Mul: {
                Rational acc = 1;
                for (TermId c : kids) acc *= number(c);
                return acc;
            }
            default: break;
        }
        throw std::logic_error("Boolean term in numeric position");
    }

private:
    const Rational& value_of(VarId v) {
        const auto& value = m_.values.at(v);
        if (!value) raise(ErrorKind::IncompleteModel, "no value for '" + cs_.variables()[v].name + "'");
        return *value;
    }

    const ConstraintSystem& cs_;
    const SmtModel& m_;
};

std::vector<SchedulerAssignment> tuple_at(const std::vector<SchedulerSpace>& spaces,
                                          const std::vector<std::uint64_t>& sizes, std::uint64_t index) {
    std::vector<SchedulerAssignment> tuple(spaces.size());
    for (std::size_t j = spaces.size(); j-- > 0;) {
        tuple[j] = spaces[j].at(index % sizes[j]);
        index /= sizes[j];
    }
    return tuple;
}

}  // namespace

bool evaluate(const ConstraintSystem& system, TermId term, const SmtModel& model) {
    TermEvaluator ev(system, model);
    return ev.truth(term);
}

SmtModel derive_model(const Encoding& e, std::span<const SchedulerAssignment> tuple, bool verify) {
    const auto& cs = e.system;
    SmtModel m;
    m.values.assign(cs.variables().size(), std::nullopt);
    for (std::size_t j = 0; j < e.choices.size(); ++j) {
        for (StateId s = 0; s < e.choices[j].size(); ++s) {
            for (const auto& [a, v] : e.choices[j][s]) m.values[v] = Rational(tuple[j].choice.at(s) == a ? 1 : 0);
        }
    }

    const std::size_t kept = e.kept.size();
    std::vector<Distribution> active(kept);
    for (std::size_t k = 0; k < kept; ++k) {
        const ComposedRow* chosen = nullptr;
        for (const auto& row : e.rows[k]) {
            bool on = true;
            for (VarId g : row.guard) on = on && *m.values[g] != 0;
            if (!on) continue;
            if (chosen) throw std::logic_error("two guards active at composed state " + e.tuple_name(e.kept[k]));
            chosen = &row;
            if (!verify) break;
        }
        if (!chosen) throw std::logic_error("no guard active at composed state " + e.tuple_name(e.kept[k]));
        for (const auto& [succ, p] : chosen->successors) active[k].push_back(Transition{succ, p});
    }

    std::vector<StatePredicate> truth(e.subformulas.size());
    std::vector<ProbVector> value(e.subformulas.size());
    auto expect = [&](std::size_t k, const ProbVector& x) {
        Rational acc = 0;
        for (const auto& t : active[k]) acc += t.probability * x[t.target];
        return acc;
    };
    for (std::size_t id = 0; id < e.subformulas.size(); ++id) {
        const auto& n = e.subformulas[id];
        auto& b = truth[id];
        auto& x = value[id];
        switch (n.kind) {
            case Subformula::Kind::True: b.assign(kept, true); break;
            case Subformula::Kind::Prop: b = n.labels; break;
            case Subformula::Kind::And:
                b.resize(kept);
                for (std::size_t k = 0; k < kept; ++k) b[k] = truth[n.lhs][k] && truth[n.rhs][k];
                break;
            case Subformula::Kind::Not:
                b.resize(kept);
                for (std::size_t k = 0; k < kept; ++k) b[k] = !truth[n.lhs][k];
                break;
            case Subformula::Kind::Less:
                b.resize(kept);
                for (std::size_t k = 0; k < kept; ++k) b[k] = value[n.lhs][k] < value[n.rhs][k];
                break;
            case Subformula::Kind::Const: x.assign(kept, n.value); break;
            case Subformula::Kind::Add:
            case Subformula::Kind::Sub:
            case Subformula::Kind::Mul:
                x.resize(kept);
                for (std::size_t k = 0; k < kept; ++k) {
                    const auto& l = value[n.lhs][k];
                    const auto& r = value[n.rhs][k];
                    x[k] = n.kind == Subformula::Kind::Add ? Rational(l + r)
                           : n.kind == Subformula::Kind::Sub ? Rational(l - r) : Rational(l * r);
                }
                break;
            case Subformula::Kind::Next:
                x = next_probs(active, truth[n.rhs]);
                break;
            case Subformula::Kind::Until:
                x = until_probs(active, truth[n.lhs], truth[n.rhs]);
                break;
            case Subformula::Kind::BoundedUntil: {
                const auto& phi1 = truth[n.lhs];
                const auto& phi2 = truth[n.rhs];
                x.resize(kept);
                for (std::size_t k = 0; k < kept; ++k) {
                    if (n.k2 == 0) {
                        x[k] = phi2[k] ? 1 : 0;
                    } else if (n.k1 == 0) {
                        x[k] = phi2[k] ? Rational(1) : !phi1[k] ? Rational(0) : expect(k, value[n.inner]);
                    } else {
                        x[k] = phi1[k] ? expect(k, value[n.inner]) : Rational(0);
                    }
                }
                break;
            }
        }
        for (std::size_t k = 0; k < n.vars.size(); ++k) m.values[n.vars[k]] = n.is_boolean() ? Rational(b[k] ? 1 : 0) : x[k];
        for (std::size_t k = 0; k < n.toint.size(); ++k) m.values[n.toint[k]] = Rational(b[k] ? 1 : 0);
        if (!n.distance.empty()) {
            auto d = distance_to(active, b);
            for (std::size_t k = 0; k < kept; ++k) m.values[n.distance[k]] = Rational(static_cast<long>(d[k]));
        }
    }

    if (verify) {
        TermEvaluator ev(cs, m);
        for (const auto& c : cs.constraints()) {
            if (c.origin == Origin::Truth) continue;
            if (!ev.truth(c.term)) {
                throw std::logic_error("derived model violates a " + std::string(to_string(c.origin)) + " constraint");
            }
        }
    }
    return m;
}

SmtVerdict solve_eager(const Mdp& mdp, const Encoding& e, const EagerOptions& options) {
    std::vector<SchedulerSpace> spaces;
    std::vector<std::uint64_t> sizes;
    std::uint64_t count = 1;
    for (std::size_t j = 0; j < e.schedulers.size(); ++j) {
        spaces.emplace_back(mdp);
        sizes.push_back(spaces.back().size());
        if (sizes.back() != 0 && count > std::numeric_limits<std::uint64_t>::max() / sizes.back()) {
            raise(ErrorKind::CapExceeded, "scheduler tuple space exceeds 64 bits");
        }
        count *= sizes.back();
    }
    auto hit = find_first(count, options.jobs, [&](std::uint64_t index) {
        auto tuple = tuple_at(spaces, sizes, index);
        SmtModel m = derive_model(e, tuple, options.verify);
        return evaluate(e.system, e.truth, m);
    });
    SmtVerdict v;
    v.sat = hit.has_value();
    if (hit) v.model = derive_model(e, tuple_at(spaces, sizes, *hit), false);
    v.decoded = decode_witness(e, v.model);
    return v;
}

SmtVerdict solve_eager(const Mdp& mdp, const Formula& f, const EncodeOptions& encode, const EagerOptions& options) {
    return solve_eager(mdp, encode_main(mdp, f, encode), options);
}

Verdict decode_witness(const Encoding& e, const std::optional<SmtModel>& model) {
    Verdict v;
    const bool direct = e.polarity == Polarity::Direct;
    if (!model) {
        v.truth = !direct;
        return v;
    }
    v.truth = direct;
    auto value = [&](VarId id) -> const Rational& {
        const auto& x = model->values.at(id);
        if (!x) raise(ErrorKind::IncompleteModel, "no value for '" + e.system.variables()[id].name + "'");
        return *x;
    };
    if (e.schedulers.empty()) return v;
    v.mode = direct ? VerdictMode::Witness : VerdictMode::Counterexample;
    for (std::size_t j = 0; j < e.schedulers.size(); ++j) {
        SchedulerAssignment a;
        for (StateId s = 0; s < e.choices[j].size(); ++s) {
            std::optional<ActionId> pick;
            for (const auto& [action, var] : e.choices[j][s]) {
                if (value(var) != 0 && !pick) pick = action;
            }
            if (!pick) raise(ErrorKind::IncompleteModel, "no action chosen for state '" + e.model_states[s] + "'");
            a.choice.push_back(*pick);
        }
        v.witness.schedulers.emplace_back(e.schedulers[j].var, std::move(a));
    }

    const std::size_t n = e.arity;
    const std::size_t base = e.model_states.size();
    ComposedIndexer indexer(base, n);
    std::vector<StateId> tuple(n, 0);
    auto holds_at = [&](const std::vector<StateId>& t) {
        std::size_t c = indexer.index(t);
        if (e.kept_index[c] >= 0) return value(e.subformulas[e.root].vars[e.kept_index[c]]) != 0;
        return e.static_truth[c] == 1;
    };
    std::function<bool(std::size_t)> level = [&](std::size_t i) -> bool {
        if (i == n) return holds_at(tuple);
        const bool all = e.state_prefix[i].kind == QuantifierKind::Forall;
        for (StateId s = 0; s < base; ++s) {
            tuple[i] = s;
            if (level(i + 1) != all) return !all;
        }
        return all;
    };
    for (std::size_t i = 0; i < n && e.state_prefix[i].kind == QuantifierKind::Exists; ++i) {
        bool found = false;
        for (StateId s = 0; s < base && !found; ++s) {
            tuple[i] = s;
            if (level(i + 1)) {
                found = true;
                v.witness.states.emplace_back(e.state_prefix[i].name, s);
            }
        }
        if (!found) raise(ErrorKind::IncompleteModel, "model does not satisfy the truth constraint");
    }
    return v;
}

namespace {

struct SExpr {
    std::string atom;
    std::vector<SExpr> list;
    bool is_list = false;
};

class SExprReader {
public:
    explicit SExprReader(std::string_view text) : text_(text) {}

    std::optional<SExpr> next() {
        skip();
        if (pos_ >= text_.size()) return std::nullopt;
        return read();
    }

private:
    void skip() {
        while (pos_ < text_.size()) {
            if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            } else if (text_[pos_] == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    SExpr read() {
        SExpr e;
        if (text_[pos_] == '(') {
            ++pos_;
            e.is_list = true;
            for (;;) {
                skip();
                if (pos_ >= text_.size()) raise(ErrorKind::Solver, "unbalanced parentheses in solver output");
                if (text_[pos_] == ')') {
                    ++pos_;
                    break;
                }
                e.list.push_back(read());
            }
            return e;
        }
        if (text_[pos_] == ')') raise(ErrorKind::Solver, "unexpected ')' in solver output");
        if (text_[pos_] == '"') {
            std::size_t end = text_.find('"', pos_ + 1);
            if (end == std::string_view::npos) end = text_.size() - 1;
            e.atom = std::string(text_.substr(pos_, end + 1 - pos_));
            pos_ = end + 1;
            return e;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')') {
            ++pos_;
        }
        e.atom = std::string(text_.substr(start, pos_ - start));
        return e;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

Rational value_of(const SExpr& e) {
    if (!e.is_list) {
        if (e.atom == "true") return 1;
        if (e.atom == "false") return 0;
        return parse_rational(e.atom);
    }
    if (e.list.empty() || e.list[0].is_list) raise(ErrorKind::Solver, "unsupported value in solver model");
    const std::string& op = e.list[0].atom;
    if (op == "-" && e.list.size() == 2) return -value_of(e.list[1]);
    if (op == "-" && e.list.size() == 3) return value_of(e.list[1]) - value_of(e.list[2]);
    if (op == "/" && e.list.size() == 3) return value_of(e.list[1]) / value_of(e.list[2]);
    if (op == "+") {
        Rational acc = 0;
        for (std::size_t i = 1; i < e.list.size(); ++i) acc += value_of(e.list[i]);
        return acc;
    }
    raise(ErrorKind::Solver, "unsupported value operator '" + op + "' in solver model");
}

void collect_definitions(const SExpr& e, const std::unordered_map<std::string, VarId>& ids, SmtModel& m) {
    if (!e.is_list) return;
    if (e.list.size() == 5 && !e.list[0].is_list && e.list[0].atom == "define-fun" && !e.list[1].is_list) {
        auto it = ids.find(e.list[1].atom);
        if (it != ids.end()) m.values[it->second] = value_of(e.list[4]);
        return;
    }
    for (const auto& child : e.list) collect_definitions(child, ids, m);
}

}  // namespace

std::pair<bool, std::optional<SmtModel>> parse_solver_output(const Encoding& e, std::string_view text) {
    SExprReader reader(text);
    auto first = reader.next();
    if (!first || first->is_list) raise(ErrorKind::Solver, "solver printed no sat/unsat answer");
    if (first->atom == "unsat") return {false, std::nullopt};
    if (first->atom != "sat") raise(ErrorKind::Solver, "solver answered '" + first->atom + "'");
    std::unordered_map<std::string, VarId> ids;
    for (VarId v = 0; v < e.system.variables().size(); ++v) ids.emplace(e.system.variables()[v].name, v);
    SmtModel m;
    m.values.assign(e.system.variables().size(), std::nullopt);
    while (auto expr = reader.next()) collect_definitions(*expr, ids, m);
    return {true, std::move(m)};
}

SmtVerdict solve_external(const Encoding& e, const std::string& solver) {
    if (solver.empty()) raise(ErrorKind::Solver, "no solver configured (use --solver or HYPERPROB_SOLVER)");
    std::string pattern = (std::filesystem::temp_directory_path() / "hyperprob-XXXXXX.smt2").string();
    std::vector<char> path(pattern.begin(), pattern.end());
    path.push_back('\0');
    int fd = mkstemps(path.data(), 5);
    if (fd < 0) raise(ErrorKind::Io, "cannot create a temporary file");
    close(fd);
    std::string file(path.data());
    {
        std::ofstream out(file, std::ios::binary);
        out << emit_smtlib2(e);
        if (!out) raise(ErrorKind::Io, "cannot write '" + file + "'");
    }
    std::string command = "'" + solver + "' '" + file + "' 2>&1";
    std::string output;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) {
        std::filesystem::remove(file);
        raise(ErrorKind::Solver, "cannot run solver '" + solver + "'");
    }
    std::array<char, 4096> buffer;
    std::size_t got;
    while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) output.append(buffer.data(), got);
    pclose(pipe);
    std::filesystem::remove(file);

    auto [sat, model] = parse_solver_output(e, output);
    SmtVerdict v;
    v.sat = sat;
    v.model = std::move(model);
    v.decoded = decode_witness(e, v.model);
    return v;
}

}  // namespace hyperprob
