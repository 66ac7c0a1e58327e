#include "fixtures.hpp"

#include "hyperprob/enum_checker.hpp"
#include "hyperprob/error.hpp"

#include <doctest.h>

using namespace hyperprob;

namespace {

Verdict run(const Mdp& m, const std::string& text, unsigned jobs = 1) {
    CheckOptions o;
    o.jobs = jobs;
    return check(m, parse_formula(text), o);
}

Dtmc single(const Mdp& m) {
    std::vector<Dtmc> one{induce_dtmc(m, make_scheduler(m, {}))};
    return self_compose(one);
}

}  // namespace

TEST_CASE("reach-1 on M_coin has the alpha witness") {
    Mdp m = m_coin();
    Verdict v = run(m, "exists sched s. exists st x(s). init(x) & P(F a(x)) = 1");
    CHECK(v.truth);
    CHECK(v.mode == VerdictMode::Witness);
    REQUIRE(v.witness.schedulers.size() == 1);
    CHECK(m.action_name(v.witness.schedulers[0].second.choice[0]) == "alpha");
    REQUIRE(v.witness.states.size() == 1);
    CHECK(v.witness.states[0] == std::pair<std::string, StateId>{"x", 0});
    CHECK(replay(m, parse_formula("exists sched s. exists st x(s). init(x) & P(F a(x)) = 1"), v.witness));
}

TEST_CASE("no deterministic scheduler reaches with probability one half") {
    Mdp m = m_coin();
    Verdict v = run(m, "exists sched s. exists st x(s). init(x) & P(F a(x)) = 1/2");
    CHECK(!v.truth);
    CHECK(v.mode == VerdictMode::None);
}

TEST_CASE("universal formula yields a counterexample") {
    Mdp m = m_coin();
    Verdict v = run(m, "forall sched s. forall st x(s). init(x) -> P(F a(x)) = 1");
    CHECK(!v.truth);
    CHECK(v.mode == VerdictMode::Counterexample);
    REQUIRE(v.witness.schedulers.size() == 1);
    CHECK(m.action_name(v.witness.schedulers[0].second.choice[0]) == "beta");
    CHECK(v.witness.states[0].second == 0);
}

TEST_CASE("mixed scheduler blocks are evaluated in full") {
    Mdp m = m_coin();
    // Some scheduler dominates every other one on reaching a.
    CHECK(run(m, "exists sched s. forall sched t. forall st x(s). forall st y(t). "
                 "(init(x) & init(y)) -> P(F a(y)) <= P(F a(x))").truth);
    CHECK(!run(m, "forall sched s. exists sched t. forall st x(s). forall st y(t). "
                  "(init(x) & init(y)) -> P(F a(y)) < P(F a(x))").truth);
}

TEST_CASE("closed bodies") {
    Mdp m = m_coin();
    CHECK(run(m, "1/2 < 1").truth);
    CHECK(!run(m, "1/2 < 1/3").truth);
    CHECK(run(m, "true").truth);
}

TEST_CASE("body evaluation over compositions") {
    Mdp d = d_half();
    Dtmc dh = induce_dtmc(d, make_scheduler(d, {}));
    std::vector<Dtmc> two{dh, dh};
    Dtmc c = self_compose(two);
    std::vector<std::string> vars{"x", "y"};
    ComposedIndexer idx(3, 2);
    std::vector<StateId> u12{1, 2};
    CHECK(eval_body(c, vars, *parse_body("true"), idx.index(u12)));
    CHECK(eval_body(c, vars, *parse_body("a(x)"), idx.index(u12)));
    CHECK(!eval_body(c, vars, *parse_body("a(y)"), idx.index(u12)));

    Dtmc one = single(d);
    std::vector<std::string> x{"x"};
    Rational p = eval_prob(one, x, *make_prob(make_until(make_true(), make_prop("a", "x"))), 0);
    CHECK(p == Rational(1, 2));
    CHECK(eval_prob(one, x, *make_arith(ProbExpr::Kind::Mul, make_const(2),
                                        make_prob(make_until(make_true(), make_prop("a", "x")))), 0) == 1);
}

TEST_CASE("nested probability operators") {
    // t0 -> t1, t2 (1/2 each); t1 -> t1, t2 (1/2 each); t2 -> t0; a on t2.
    // P(X a) = (1/2, 1/2, 0), so the inner equality holds on t0 and t1 and
    // P(X (P(X a) = 1/2)) = (1/2, 1/2, 1).
    Mdp m = parse_mdp(
        "states: t0 t1 t2\nlabels: t2: a;\n"
        "action t0 go: t1 1/2, t2 1/2\naction t1 go: t1 1/2, t2 1/2\naction t2 go: t0 1\n");
    Dtmc c = single(m);
    std::vector<std::string> x{"x"};
    auto outer = parse_body("P(X (P(X a(x)) = 1/2)) < 2");
    CompositionEvaluator ev(c, x);
    const auto& values = ev.values(*outer->left);
    CHECK(values == ProbVector{Rational(1, 2), Rational(1, 2), 1});
}

TEST_CASE("unit chain") {
    Dtmc u = unit_chain();
    CHECK(u.num_states() == 1);
    CHECK(u.row(0).size() == 1);
}

TEST_CASE("validation and caps") {
    Mdp m = m_coin();
    auto kind = [&](const std::string& text, CheckOptions o = {}) {
        try {
            check(m, parse_formula(text), o);
        } catch (const Error& e) {
            return e.kind();
        }
        FAIL("no error");
        return ErrorKind::Parse;
    };
    CHECK(kind("exists sched s. exists st x(s). zzz(x)") == ErrorKind::UnknownProposition);
    CheckOptions tight;
    tight.max_state_vars = 1;
    CHECK(kind("exists sched s. exists st x(s). exists st y(s). a(x) & a(y)", tight) == ErrorKind::CapExceeded);
    CHECK(kind("P(X a(x)) < 1/2") == ErrorKind::UnboundStateVariable);
}

TEST_CASE("verdict does not depend on the number of jobs") {
    Mdp m = parse_mdp(
        "states: s0 s1 s2 s3\nlabels: s0: init; s3: a;\n"
        "action s0 p: s1 1/2, s2 1/2\naction s0 q: s3 1/4, s0 3/4\n"
        "action s1 p: s3 1\naction s1 q: s2 1\n"
        "action s2 p: s3 1/2, s2 1/2\naction s2 q: s0 1\n"
        "action s3 p: s3 1\n");
    std::string f = "exists sched s1. exists sched s2. forall st x(s1). forall st y(s2). "
                    "(init(x) & init(y)) -> P(F a(x)) < P(F a(y))";
    Verdict one = run(m, f, 1);
    Verdict four = run(m, f, 4);
    CHECK(one.truth == four.truth);
    CHECK(one.witness == four.witness);
}
