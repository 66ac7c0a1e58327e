#include "hyperprob/formula.hpp"

#include "hyperprob/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace hyperprob {

StatePtr make_true() {
    static const StatePtr t = std::make_shared<StateFormula>();
    return t;
}

StatePtr make_prop(std::string prop, std::string var) {
    auto f = std::make_shared<StateFormula>();
    f->kind = StateFormula::Kind::Prop;
    f->prop = std::move(prop);
    f->var = std::move(var);
    return f;
}

StatePtr make_and(StatePtr lhs, StatePtr rhs) {
    auto f = std::make_shared<StateFormula>();
    f->kind = StateFormula::Kind::And;
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    return f;
}

StatePtr make_not(StatePtr operand) {
    auto f = std::make_shared<StateFormula>();
    f->kind = StateFormula::Kind::Not;
    f->lhs = std::move(operand);
    return f;
}

StatePtr make_less(ProbPtr left, ProbPtr right) {
    auto f = std::make_shared<StateFormula>();
    f->kind = StateFormula::Kind::Less;
    f->left = std::move(left);
    f->right = std::move(right);
    return f;
}

ProbPtr make_prob(PathPtr path) {
    auto p = std::make_shared<ProbExpr>();
    p->kind = ProbExpr::Kind::Prob;
    p->path = std::move(path);
    return p;
}

ProbPtr make_const(Rational value) {
    auto p = std::make_shared<ProbExpr>();
    p->kind = ProbExpr::Kind::Const;
    p->value = std::move(value);
    return p;
}

ProbPtr make_arith(ProbExpr::Kind kind, ProbPtr lhs, ProbPtr rhs) {
    auto p = std::make_shared<ProbExpr>();
    p->kind = kind;
    p->lhs = std::move(lhs);
    p->rhs = std::move(rhs);
    return p;
}

PathPtr make_next(StatePtr operand) {
    auto p = std::make_shared<PathFormula>();
    p->kind = PathFormula::Kind::Next;
    p->rhs = std::move(operand);
    return p;
}

PathPtr make_until(StatePtr lhs, StatePtr rhs) {
    auto p = std::make_shared<PathFormula>();
    p->kind = PathFormula::Kind::Until;
    p->lhs = std::move(lhs);
    p->rhs = std::move(rhs);
    return p;
}

PathPtr make_bounded_until(StatePtr lhs, StatePtr rhs, unsigned k1, unsigned k2) {
    if (k1 > k2) raise(ErrorKind::Bound, "bounded until needs k1 <= k2");
    auto p = std::make_shared<PathFormula>();
    p->kind = PathFormula::Kind::BoundedUntil;
    p->lhs = std::move(lhs);
    p->rhs = std::move(rhs);
    p->k1 = k1;
    p->k2 = k2;
    return p;
}

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok {
    End, Ident, Number,
    LParen, RParen, LBracket, RBracket, Comma, Dot,
    And, Or, Not, Xor, Implies, Iff,
    Less, LessEq, Greater, GreaterEq, Equal, NotEqual,
    Plus, Minus, Star,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> tokens;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto error = [&](const std::string& msg) {
        raise(ErrorKind::Syntax, std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            tok.kind = Tok::Ident;
            tok.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j + 1 < src.size() && (src[j] == '/' || src[j] == '.') &&
                std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            tok.kind = Tok::Number;
            tok.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            auto two = src.substr(i, 2);
            auto three = src.substr(i, 3);
            std::size_t len = 1;
            if (three == "<->") {
                tok.kind = Tok::Iff;
                len = 3;
            } else if (two == "->") {
                tok.kind = Tok::Implies;
                len = 2;
            } else if (two == "<=") {
                tok.kind = Tok::LessEq;
                len = 2;
            } else if (two == ">=") {
                tok.kind = Tok::GreaterEq;
                len = 2;
            } else if (two == "!=") {
                tok.kind = Tok::NotEqual;
                len = 2;
            } else {
                switch (c) {
                    case '(': tok.kind = Tok::LParen; break;
                    case ')': tok.kind = Tok::RParen; break;
                    case '[': tok.kind = Tok::LBracket; break;
                    case ']': tok.kind = Tok::RBracket; break;
                    case ',': tok.kind = Tok::Comma; break;
                    case '.': tok.kind = Tok::Dot; break;
                    case '&': tok.kind = Tok::And; break;
                    case '|': tok.kind = Tok::Or; break;
                    case '!': tok.kind = Tok::Not; break;
                    case '^': tok.kind = Tok::Xor; break;
                    case '<': tok.kind = Tok::Less; break;
                    case '>': tok.kind = Tok::Greater; break;
                    case '=': tok.kind = Tok::Equal; break;
                    case '+': tok.kind = Tok::Plus; break;
                    case '-': tok.kind = Tok::Minus; break;
                    case '*': tok.kind = Tok::Star; break;
                    default: error(std::string("unexpected character '") + c + "'");
                }
            }
            tok.text = std::string(src.substr(i, len));
            advance(len);
        }
        tokens.push_back(std::move(tok));
    }
    Token end;
    end.line = line;
    end.column = col;
    tokens.push_back(end);
    return tokens;
}

const std::set<std::string, std::less<>> kKeywords = {"forall", "exists", "sched", "st", "true", "false",
                                                      "P", "X", "U", "F", "G"};

// ---------------------------------------------------------------- parser

class SyntaxFailure : public std::exception {
public:
    SyntaxFailure(std::size_t pos, std::string msg) : pos(pos), msg(std::move(msg)) {}
    const char* what() const noexcept override { return msg.c_str(); }
    std::size_t pos;
    std::string msg;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Formula formula() {
        Formula f;
        while (is_ident("forall") || is_ident("exists")) f.prefix.push_back(quantifier());
        f.body = body();
        expect(Tok::End, "end of formula");
        return f;
    }

    StatePtr body_only() {
        auto b = body();
        expect(Tok::End, "end of formula");
        return b;
    }

    [[noreturn]] void rethrow(const SyntaxFailure& e) const {
        const Token& t = toks_.at(std::min(e.pos, toks_.size() - 1));
        raise(ErrorKind::Syntax, std::to_string(t.line) + ":" + std::to_string(t.column) + ": " + e.msg);
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_.at(std::min(pos_ + ahead, toks_.size() - 1)); }
    bool is(Tok k) const { return peek().kind == k; }
    bool is_ident(std::string_view word) const { return is(Tok::Ident) && peek().text == word; }

    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxFailure(pos_, "expected " + what + ", found " + found);
    }

    Token expect(Tok k, const std::string& what) {
        if (!is(k)) fail(what);
        return toks_[pos_++];
    }

    void expect_ident(std::string_view word) {
        if (!is_ident(word)) fail("'" + std::string(word) + "'");
        ++pos_;
    }

    std::string name(const std::string& what) {
        if (!is(Tok::Ident) || kKeywords.count(peek().text)) fail(what);
        return toks_[pos_++].text;
    }

    unsigned bound() {
        Token t = expect(Tok::Number, "step bound");
        if (t.text.find_first_of("./") != std::string::npos) {
            throw SyntaxFailure(pos_ - 1, "step bounds must be nonnegative integers");
        }
        return static_cast<unsigned>(std::stoul(t.text));
    }

    Quantifier quantifier() {
        Quantifier q;
        q.kind = peek().text == "forall" ? QuantifierKind::Forall : QuantifierKind::Exists;
        ++pos_;
        if (is_ident("sched")) {
            ++pos_;
            q.over_scheduler = true;
            q.var = name("scheduler variable");
        } else if (is_ident("st")) {
            ++pos_;
            q.var = name("state variable");
            expect(Tok::LParen, "'(' before the scheduler variable");
            q.scheduler = name("scheduler variable");
            expect(Tok::RParen, "')'");
        } else {
            fail("'sched' or 'st'");
        }
        expect(Tok::Dot, "'.' after quantifier");
        return q;
    }

    // body := iff
    StatePtr body() { return iff(); }

    static StatePtr disj(StatePtr a, StatePtr b) { return make_not(make_and(make_not(std::move(a)), make_not(std::move(b)))); }
    static StatePtr implies(StatePtr a, StatePtr b) { return make_not(make_and(std::move(a), make_not(std::move(b)))); }

    StatePtr iff() {
        auto lhs = impl();
        while (is(Tok::Iff)) {
            ++pos_;
            auto rhs = impl();
            lhs = make_and(implies(lhs, rhs), implies(rhs, lhs));
        }
        return lhs;
    }

    StatePtr impl() {
        auto lhs = disjunction();
        if (is(Tok::Implies)) {
            ++pos_;
            auto rhs = impl();
            return implies(lhs, rhs);
        }
        return lhs;
    }

    StatePtr disjunction() {
        auto lhs = exclusive();
        while (is(Tok::Or)) {
            ++pos_;
            lhs = disj(lhs, exclusive());
        }
        return lhs;
    }

    StatePtr exclusive() {
        auto lhs = conjunction();
        while (is(Tok::Xor)) {
            ++pos_;
            auto rhs = conjunction();
            lhs = make_and(disj(lhs, rhs), make_not(make_and(lhs, rhs)));
        }
        return lhs;
    }

    StatePtr conjunction() {
        auto lhs = unary();
        while (is(Tok::And)) {
            ++pos_;
            lhs = make_and(lhs, unary());
        }
        return lhs;
    }

    StatePtr unary() {
        if (is(Tok::Not)) {
            ++pos_;
            return make_not(unary());
        }
        return atom();
    }

    StatePtr atom() {
        if (is_ident("true")) {
            ++pos_;
            return make_true();
        }
        if (is_ident("false")) {
            ++pos_;
            return make_not(make_true());
        }
        if (is(Tok::Ident) && !kKeywords.count(peek().text)) {
            std::string prop = toks_[pos_++].text;
            expect(Tok::LParen, "'(' after proposition '" + prop + "'");
            std::string var = name("state variable");
            expect(Tok::RParen, "')'");
            return make_prop(std::move(prop), std::move(var));
        }
        // A '(' opens either a probability expression of a comparison or a
        // parenthesised state formula; try the comparison first.
        std::size_t start = pos_;
        try {
            return comparison();
        } catch (const SyntaxFailure& first) {
            if (toks_[start].kind != Tok::LParen) throw;
            pos_ = start + 1;
            try {
                auto inner = body();
                expect(Tok::RParen, "')'");
                return inner;
            } catch (const SyntaxFailure& second) {
                throw second.pos >= first.pos ? second : first;
            }
        }
    }

    StatePtr comparison() {
        auto lhs = sum();
        Tok op = peek().kind;
        switch (op) {
            case Tok::Less: case Tok::LessEq: case Tok::Greater:
            case Tok::GreaterEq: case Tok::Equal: case Tok::NotEqual:
                ++pos_;
                break;
            default:
                fail("comparison operator");
        }
        auto rhs = sum();
        switch (op) {
            case Tok::Less: return make_less(lhs, rhs);
            case Tok::Greater: return make_less(rhs, lhs);
            case Tok::LessEq: return make_not(make_less(rhs, lhs));
            case Tok::GreaterEq: return make_not(make_less(lhs, rhs));
            case Tok::Equal: return make_and(make_not(make_less(lhs, rhs)), make_not(make_less(rhs, lhs)));
            default: return make_not(make_and(make_not(make_less(lhs, rhs)), make_not(make_less(rhs, lhs))));
        }
    }

    ProbPtr sum() {
        auto lhs = product();
        while (is(Tok::Plus) || is(Tok::Minus)) {
            auto kind = is(Tok::Plus) ? ProbExpr::Kind::Add : ProbExpr::Kind::Sub;
            ++pos_;
            lhs = make_arith(kind, lhs, product());
        }
        return lhs;
    }

    ProbPtr product() {
        auto lhs = negation();
        while (is(Tok::Star)) {
            ++pos_;
            lhs = make_arith(ProbExpr::Kind::Mul, lhs, negation());
        }
        return lhs;
    }

    ProbPtr negation() {
        if (is(Tok::Minus)) {
            ++pos_;
            return make_arith(ProbExpr::Kind::Sub, make_const(0), negation());
        }
        return primary();
    }

    ProbPtr primary() {
        if (is(Tok::Number)) {
            return make_const(parse_rational(toks_[pos_++].text));
        }
        if (is_ident("P")) {
            ++pos_;
            expect(Tok::LParen, "'(' after P");
            ProbPtr result = path_probability();
            expect(Tok::RParen, "')' closing P(...)");
            return result;
        }
        if (is(Tok::LParen)) {
            ++pos_;
            auto inner = sum();
            expect(Tok::RParen, "')'");
            return inner;
        }
        fail("probability expression");
    }

    std::optional<std::pair<unsigned, unsigned>> interval() {
        if (!is(Tok::LBracket)) return std::nullopt;
        ++pos_;
        std::size_t at = pos_;
        unsigned k1 = bound();
        expect(Tok::Comma, "','");
        unsigned k2 = bound();
        expect(Tok::RBracket, "']'");
        if (k1 > k2) throw SyntaxFailure(at, "interval lower bound exceeds upper bound");
        return std::make_pair(k1, k2);
    }

    // The contents of P(...): a path formula, or G-sugar which is rewritten
    // at the probability level.
    ProbPtr path_probability() {
        if (is_ident("X")) {
            ++pos_;
            return make_prob(make_next(body()));
        }
        if (is_ident("F")) {
            ++pos_;
            auto iv = interval();
            auto target = body();
            if (iv) return make_prob(make_bounded_until(make_true(), target, iv->first, iv->second));
            return make_prob(make_until(make_true(), target));
        }
        if (is_ident("G")) {
            ++pos_;
            auto iv = interval();
            auto inv = make_not(body());
            PathPtr eventually = iv ? make_bounded_until(make_true(), inv, iv->first, iv->second)
                                    : make_until(make_true(), inv);
            return make_arith(ProbExpr::Kind::Sub, make_const(1), make_prob(eventually));
        }
        auto lhs = body();
        expect_ident("U");
        if (is(Tok::LessEq)) {
            ++pos_;
            unsigned k = bound();
            return make_prob(make_bounded_until(lhs, body(), 0, k));
        }
        if (auto iv = interval()) return make_prob(make_bounded_until(lhs, body(), iv->first, iv->second));
        return make_prob(make_until(lhs, body()));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printing

void print(std::ostream& out, const StateFormula& f);
void print(std::ostream& out, const ProbExpr& p);

void print(std::ostream& out, const PathFormula& p) {
    switch (p.kind) {
        case PathFormula::Kind::Next:
            out << "X ";
            print(out, *p.rhs);
            break;
        case PathFormula::Kind::Until:
            print(out, *p.lhs);
            out << " U ";
            print(out, *p.rhs);
            break;
        case PathFormula::Kind::BoundedUntil:
            print(out, *p.lhs);
            out << " U[" << p.k1 << ',' << p.k2 << "] ";
            print(out, *p.rhs);
            break;
    }
}

void print(std::ostream& out, const ProbExpr& p) {
    switch (p.kind) {
        case ProbExpr::Kind::Prob:
            out << "P(";
            print(out, *p.path);
            out << ')';
            break;
        case ProbExpr::Kind::Const:
            if (p.value < 0) {
                out << "(0 - " << format_rational(-p.value) << ')';
            } else {
                out << format_rational(p.value);
            }
            break;
        case ProbExpr::Kind::Add:
        case ProbExpr::Kind::Sub:
        case ProbExpr::Kind::Mul: {
            const char* op = p.kind == ProbExpr::Kind::Add ? " + " : p.kind == ProbExpr::Kind::Sub ? " - " : " * ";
            out << '(';
            print(out, *p.lhs);
            out << op;
            print(out, *p.rhs);
            out << ')';
            break;
        }
    }
}

void print(std::ostream& out, const StateFormula& f) {
    switch (f.kind) {
        case StateFormula::Kind::True:
            out << "true";
            break;
        case StateFormula::Kind::Prop:
            out << f.prop << '(' << f.var << ')';
            break;
        case StateFormula::Kind::And:
            out << '(';
            print(out, *f.lhs);
            out << " & ";
            print(out, *f.rhs);
            out << ')';
            break;
        case StateFormula::Kind::Not:
            out << '!';
            print(out, *f.lhs);
            break;
        case StateFormula::Kind::Less:
            out << '(';
            print(out, *f.left);
            out << " < ";
            print(out, *f.right);
            out << ')';
            break;
    }
}

// ---------------------------------------------------------------- traversal

void collect_props(const StateFormula& f, std::vector<const StateFormula*>& out);
void collect_props(const ProbExpr& p, std::vector<const StateFormula*>& out);

void collect_props(const PathFormula& p, std::vector<const StateFormula*>& out) {
    if (p.lhs) collect_props(*p.lhs, out);
    collect_props(*p.rhs, out);
}

void collect_props(const ProbExpr& p, std::vector<const StateFormula*>& out) {
    switch (p.kind) {
        case ProbExpr::Kind::Prob: collect_props(*p.path, out); break;
        case ProbExpr::Kind::Const: break;
        default:
            collect_props(*p.lhs, out);
            collect_props(*p.rhs, out);
    }
}

void collect_props(const StateFormula& f, std::vector<const StateFormula*>& out) {
    switch (f.kind) {
        case StateFormula::Kind::True: break;
        case StateFormula::Kind::Prop: out.push_back(&f); break;
        case StateFormula::Kind::And:
            collect_props(*f.lhs, out);
            collect_props(*f.rhs, out);
            break;
        case StateFormula::Kind::Not: collect_props(*f.lhs, out); break;
        case StateFormula::Kind::Less:
            collect_props(*f.left, out);
            collect_props(*f.right, out);
            break;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::Io, "cannot open formula file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

Formula parse_formula(std::string_view text) {
    Parser parser(tokenize(text));
    try {
        return parser.formula();
    } catch (const SyntaxFailure& e) {
        parser.rethrow(e);
    }
}

Formula load_formula(const std::string& path) {
    try {
        return parse_formula(read_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Io) throw;
        throw Error(e.kind(), path + ":" + e.what());
    }
}

StatePtr parse_body(std::string_view text) {
    Parser parser(tokenize(text));
    try {
        return parser.body_only();
    } catch (const SyntaxFailure& e) {
        parser.rethrow(e);
    }
}

std::string to_string(const StateFormula& f) {
    std::ostringstream out;
    print(out, f);
    return out.str();
}

std::string to_string(const ProbExpr& p) {
    std::ostringstream out;
    print(out, p);
    return out.str();
}

std::string to_string(const PathFormula& p) {
    std::ostringstream out;
    print(out, p);
    return out.str();
}

std::string to_string(const Quantifier& q) {
    std::string s = q.kind == QuantifierKind::Forall ? "forall " : "exists ";
    if (q.over_scheduler) return s + "sched " + q.var + ".";
    return s + "st " + q.var + "(" + q.scheduler + ").";
}

std::string to_string(const Formula& f) {
    std::string s;
    for (const auto& q : f.prefix) s += to_string(q) + " ";
    return s + to_string(*f.body);
}

bool structurally_equal(const PathFormula& a, const PathFormula& b) {
    if (a.kind != b.kind || a.k1 != b.k1 || a.k2 != b.k2) return false;
    if (a.kind != PathFormula::Kind::Next && !structurally_equal(*a.lhs, *b.lhs)) return false;
    return structurally_equal(*a.rhs, *b.rhs);
}

bool structurally_equal(const ProbExpr& a, const ProbExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ProbExpr::Kind::Prob: return structurally_equal(*a.path, *b.path);
        case ProbExpr::Kind::Const: return a.value == b.value;
        default: return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    }
}

bool structurally_equal(const StateFormula& a, const StateFormula& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case StateFormula::Kind::True: return true;
        case StateFormula::Kind::Prop: return a.prop == b.prop && a.var == b.var;
        case StateFormula::Kind::And: return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
        case StateFormula::Kind::Not: return structurally_equal(*a.lhs, *b.lhs);
        case StateFormula::Kind::Less:
            return structurally_equal(*a.left, *b.left) && structurally_equal(*a.right, *b.right);
    }
    return false;
}

bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.prefix.size() != b.prefix.size()) return false;
    for (std::size_t i = 0; i < a.prefix.size(); ++i) {
        const auto& x = a.prefix[i];
        const auto& y = b.prefix[i];
        if (x.kind != y.kind || x.over_scheduler != y.over_scheduler || x.var != y.var || x.scheduler != y.scheduler) {
            return false;
        }
    }
    return structurally_equal(*a.body, *b.body);
}

void check_well_formed(const Formula& f) {
    std::set<std::string> schedulers;
    std::set<std::string> states;
    std::set<std::string> declared_schedulers;
    for (const auto& q : f.prefix) {
        if (q.over_scheduler) declared_schedulers.insert(q.var);
    }
    bool seen_state = false;
    for (const auto& q : f.prefix) {
        if (schedulers.count(q.var) || states.count(q.var)) {
            raise(ErrorKind::DuplicateVariable, "variable '" + q.var + "' is quantified twice");
        }
        if (q.over_scheduler) {
            if (seen_state) {
                raise(ErrorKind::QuantifierOrderViolation,
                      "scheduler quantifier '" + q.var + "' appears after a state quantifier");
            }
            schedulers.insert(q.var);
        } else {
            if (!schedulers.count(q.scheduler)) {
                if (declared_schedulers.count(q.scheduler)) {
                    raise(ErrorKind::QuantifierOrderViolation, "state variable '" + q.var +
                                                                   "' is bound to scheduler '" + q.scheduler +
                                                                   "' before that scheduler is quantified");
                }
                raise(ErrorKind::UnboundSchedulerVariable, "scheduler variable '" + q.scheduler + "' is not quantified");
            }
            seen_state = true;
            states.insert(q.var);
        }
    }
    std::vector<const StateFormula*> props;
    collect_props(*f.body, props);
    for (const auto* p : props) {
        if (!states.count(p->var)) {
            raise(ErrorKind::UnboundStateVariable,
                  "proposition '" + p->prop + "(" + p->var + ")' uses an unquantified state variable");
        }
    }
}

QuantifierCounts count_quantifiers(const Formula& f) {
    QuantifierCounts counts;
    for (const auto& q : f.prefix) {
        if (q.over_scheduler) {
            ++counts.schedulers;
        } else {
            ++counts.states;
        }
    }
    return counts;
}

std::vector<StateVariable> state_variables(const Formula& f) {
    std::vector<StateVariable> vars;
    for (const auto& q : f.prefix) {
        if (!q.over_scheduler) vars.push_back(StateVariable{q.var, q.scheduler, q.kind});
    }
    return vars;
}

std::vector<Quantifier> scheduler_quantifiers(const Formula& f) {
    std::vector<Quantifier> qs;
    for (const auto& q : f.prefix) {
        if (q.over_scheduler) qs.push_back(q);
    }
    return qs;
}

std::vector<std::string> propositions_used(const StateFormula& body) {
    std::vector<const StateFormula*> props;
    collect_props(body, props);
    std::vector<std::string> names;
    for (const auto* p : props) {
        if (std::find(names.begin(), names.end(), p->prop) == names.end()) names.push_back(p->prop);
    }
    return names;
}

std::size_t count_subformulas(const StateFormula& body) {
    std::unordered_set<std::string> seen;
    std::function<void(const StateFormula&)> visit_state;
    std::function<void(const ProbExpr&)> visit_prob = [&](const ProbExpr& p) {
        if (!seen.insert("p:" + to_string(p)).second) return;
        switch (p.kind) {
            case ProbExpr::Kind::Prob:
                if (p.path->lhs) visit_state(*p.path->lhs);
                visit_state(*p.path->rhs);
                break;
            case ProbExpr::Kind::Const: break;
            default:
                visit_prob(*p.lhs);
                visit_prob(*p.rhs);
        }
    };
    visit_state = [&](const StateFormula& f) {
        if (!seen.insert("s:" + to_string(f)).second) return;
        switch (f.kind) {
            case StateFormula::Kind::And:
                visit_state(*f.lhs);
                visit_state(*f.rhs);
                break;
            case StateFormula::Kind::Not: visit_state(*f.lhs); break;
            case StateFormula::Kind::Less:
                visit_prob(*f.left);
                visit_prob(*f.right);
                break;
            default: break;
        }
    };
    visit_state(body);
    return seen.size();
}

Formula dual(const Formula& f) {
    Formula d;
    d.prefix = f.prefix;
    for (auto& q : d.prefix) q.kind = q.kind == QuantifierKind::Forall ? QuantifierKind::Exists : QuantifierKind::Forall;
    d.body = make_not(f.body);
    return d;
}

Rational evaluate_closed(const ProbExpr& expr) {
    switch (expr.kind) {
        case ProbExpr::Kind::Const: return expr.value;
        case ProbExpr::Kind::Add: return Rational(evaluate_closed(*expr.lhs) + evaluate_closed(*expr.rhs));
        case ProbExpr::Kind::Sub: return Rational(evaluate_closed(*expr.lhs) - evaluate_closed(*expr.rhs));
        case ProbExpr::Kind::Mul: return Rational(evaluate_closed(*expr.lhs) * evaluate_closed(*expr.rhs));
        case ProbExpr::Kind::Prob: break;
    }
    raise(ErrorKind::IllFormed, "probability operator in a closed arithmetic expression");
}

bool evaluate_closed(const StateFormula& body) {
    switch (body.kind) {
        case StateFormula::Kind::True: return true;
        case StateFormula::Kind::And: return evaluate_closed(*body.lhs) && evaluate_closed(*body.rhs);
        case StateFormula::Kind::Not: return !evaluate_closed(*body.lhs);
        case StateFormula::Kind::Less: return evaluate_closed(*body.left) < evaluate_closed(*body.right);
        case StateFormula::Kind::Prop: break;
    }
    raise(ErrorKind::IllFormed, "proposition in a closed formula");
}

}  // namespace hyperprob
