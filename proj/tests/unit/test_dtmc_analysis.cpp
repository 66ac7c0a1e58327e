#include "fixtures.hpp"

#include "hyperprob/dtmc_analysis.hpp"
#include "hyperprob/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace hyperprob;

namespace {

Dtmc alpha_chain() {
    Mdp m = m_coin();
    return induce_dtmc(m, make_scheduler(m, {{"s0", "alpha"}}));
}

Dtmc beta_chain() {
    Mdp m = m_coin();
    return induce_dtmc(m, make_scheduler(m, {{"s0", "beta"}}));
}

Dtmc half_chain() {
    Mdp d = d_half();
    return induce_dtmc(d, make_scheduler(d, {}));
}

StatePredicate all(std::size_t n, bool v) { return StatePredicate(n, v); }

}  // namespace

TEST_CASE("qualitative sets") {
    Dtmc d = half_chain();
    auto q = qualitative_sets(d, all(3, true), label_predicate(d, "a"));
    CHECK(q.zero == StatePredicate{false, false, true});
    CHECK(q.yes == StatePredicate{false, true, false});

    auto none = qualitative_sets(d, all(3, true), all(3, false));
    CHECK(none.zero == all(3, true));

    Dtmc a = alpha_chain();
    auto qa = qualitative_sets(a, all(3, true), label_predicate(a, "a"));
    CHECK(qa.zero == StatePredicate{false, false, true});
    CHECK(qa.yes == StatePredicate{false, true, false});
}

TEST_CASE("unbounded until") {
    Dtmc d = half_chain();
    CHECK(until_probs(d, all(3, true), label_predicate(d, "a"))[0] == Rational(1, 2));
    Dtmc a = alpha_chain();
    CHECK(until_probs(a, all(3, true), label_predicate(a, "a"))[0] == 1);
    Dtmc b = beta_chain();
    CHECK(until_probs(b, all(3, true), label_predicate(b, "a"))[0] == 0);
}

TEST_CASE("until on a chain with a non-trivial cycle") {
    // s0 -> s1 (1/2), s2 (1/2); s1 -> s0 (1/3), s3 (2/3); target s3, s2 absorbing.
    // x0 = 1/2 x1, x1 = 1/3 x0 + 2/3 gives x0 = 2/5, x1 = 4/5.
    Mdp m = parse_mdp(
        "states: s0 s1 s2 s3\nlabels: s3: t;\n"
        "action s0 a: s1 1/2, s2 1/2\naction s1 a: s0 1/3, s3 2/3\n"
        "action s2 a: s2 1\naction s3 a: s3 1\n");
    Dtmc d = induce_dtmc(m, make_scheduler(m, {}));
    auto p = until_probs(d, all(4, true), label_predicate(d, "t"));
    CHECK(p == ProbVector{Rational(2, 5), Rational(4, 5), 0, 1});
    StatePredicate phi1{true, false, true, true};
    auto q = until_probs(d, phi1, label_predicate(d, "t"));
    CHECK(q == ProbVector{0, 0, 0, 1});
}

TEST_CASE("bounded until") {
    Dtmc d = half_chain();
    auto t = label_predicate(d, "a");
    CHECK(bounded_until_probs(d, all(3, true), t, 0, 0) == ProbVector{0, 1, 0});
    CHECK(bounded_until_probs(d, all(3, true), t, 0, 1)[0] == Rational(1, 2));
    Dtmc a = alpha_chain();
    CHECK(bounded_until_probs(a, all(3, true), label_predicate(a, "a"), 1, 2)[0] == Rational(3, 4));
    CHECK(bounded_until_probs(d, all(3, true), t, 1, 1) == next_probs(d, t));
    CHECK_THROWS_AS(bounded_until_probs(d, all(3, true), t, 2, 1), Error);
}

TEST_CASE("next") {
    Dtmc d = half_chain();
    CHECK(next_probs(d, label_predicate(d, "a"))[0] == Rational(1, 2));
    CHECK(next_probs(d, all(3, true)) == ProbVector{1, 1, 1});
    CHECK(next_probs(d, all(3, false)) == ProbVector{0, 0, 0});
}

TEST_CASE("value iteration") {
    Dtmc d = half_chain();
    auto t = label_predicate(d, "a");
    CHECK(until_probs_vi(d, all(3, true), t, 0) == ProbVector{0, 1, 0});
    CHECK(until_probs_vi(d, all(3, true), t, 1)[0] == Rational(1, 2));
    Dtmc a = alpha_chain();
    auto v = until_probs_vi(a, all(3, true), label_predicate(a, "a"), 30);
    CHECK(v[0] == 1 - Rational(1, 1 << 30));
    CHECK(std::abs(v[0].get_d() - 1.0) < 1e-9);
    auto seeded = until_probs_vi(a, all(3, true), label_predicate(a, "a"), 0, IterationSeed::ProbabilityOne);
    CHECK(seeded[0] == 1);
}

TEST_CASE("probability-one states and distances") {
    Dtmc a = alpha_chain();
    auto t = label_predicate(a, "a");
    CHECK(probability_one_states(a.rows(), all(3, true), t) == StatePredicate{true, true, false});
    CHECK(distance_to(a.rows(), t) == std::vector<std::size_t>{1, 0, 3});
}

TEST_CASE("exact linear solve") {
    std::vector<std::vector<Rational>> a{{2, 1}, {1, 3}};
    auto x = solve_linear(a, {3, 5});
    CHECK(x == std::vector<Rational>{Rational(4, 5), Rational(7, 5)});
    std::vector<std::vector<Rational>> singular{{1, 2}, {2, 4}};
    try {
        solve_linear(singular, {1, 2});
        FAIL("expected SingularSystem");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularSystem);
    }
}
