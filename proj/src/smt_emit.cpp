#include "hyperprob/smt.hpp"

#include <sstream>

namespace hyperprob {

namespace {

std::string decimal(const mpz_class& z) { return z.get_str() + ".0"; }

std::string real_literal(const Rational& r) {
    Rational mag = abs(r);
    std::string body = mag.get_den() == 1 ? decimal(mag.get_num())
                                          : "(/ " + decimal(mag.get_num()) + " " + decimal(mag.get_den()) + ")";
    return r < 0 ? "(- " + body + ")" : body;
}

const char* op_name(Op op) {
    switch (op) {
        case Op::Not: return "not";
        case Op::And: return "and";
        case Op::Or: return "or";
        case Op::Implies: return "=>";
        case Op::Xor: return "xor";
        case Op::Eq: return "=";
        case Op::Less: return "<";
        case Op::GreaterEq: return ">=";
        case Op::Greater: return ">";
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        default: return "";
    }
}

void write_term(std::ostream& out, const ConstraintSystem& cs, TermId t) {
    const Term& term = cs.term(t);
    switch (term.op) {
        case Op::True: out << "true"; return;
        case Op::False: out << "false"; return;
        case Op::Var: out << cs.variables()[term.a].name; return;
        case Op::Const: out << real_literal(cs.constant_value(t)); return;
        default: break;
    }
    out << '(' << op_name(term.op);
    for (TermId c : cs.children(t)) {
        out << ' ';
        write_term(out, cs, c);
    }
    out << ')';
}

void write_body(std::ostream& out, const ConstraintSystem& cs) {
    out << "(set-logic " << (cs.nonlinear() ? "QF_NRA" : "QF_LRA") << ")\n";
    for (const auto& v : cs.variables()) {
        out << "(declare-const " << v.name << ' ' << (v.sort == Sort::Bool ? "Bool" : "Real") << ")\n";
    }
    bool first = true;
    Origin last = Origin::Truth;
    for (const auto& c : cs.constraints()) {
        if (first || c.origin != last) out << "; " << to_string(c.origin) << '\n';
        first = false;
        last = c.origin;
        out << "(assert ";
        write_term(out, cs, c.term);
        out << ")\n";
    }
    out << "(check-sat)\n";
    if (!cs.variables().empty()) out << "(get-model)\n";
}

}  // namespace

std::string emit_smtlib2(const ConstraintSystem& system) {
    std::ostringstream out;
    write_body(out, system);
    return out.str();
}

std::string emit_smtlib2(const Encoding& e) {
    std::ostringstream out;
    out << "; polarity: " << to_string(e.polarity) << '\n';
    out << "; schedulers:";
    for (std::size_t j = 0; j < e.schedulers.size(); ++j) out << ' ' << j << '=' << e.schedulers[j].var;
    out << '\n';
    out << "; state prefix:";
    for (const auto& v : e.state_prefix) {
        out << (v.kind == QuantifierKind::Forall ? " forall " : " exists ") << v.name << '(' << v.scheduler << ").";
    }
    out << '\n';
    out << "; composed states: " << e.kept.size() << " of " << e.total_composed << (e.pruned ? " (pruned)" : "") << '\n';
    out << "; subformulas: " << e.subformulas.size() << '\n';
    for (std::size_t i = 0; i < e.subformulas.size(); ++i) {
        out << ";   " << i << ": " << e.subformulas[i].text << (i == e.root ? "  [root]" : "") << '\n';
    }
    write_body(out, e.system);
    return out.str();
}

}  // namespace hyperprob
