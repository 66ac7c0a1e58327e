#include "fixtures.hpp"

#include "hyperprob/error.hpp"
#include "hyperprob/model.hpp"

#include <doctest.h>

using namespace hyperprob;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Parse;
}

Rational prob(const Dtmc& d, StateId from, StateId to) {
    for (const auto& t : d.row(from)) if (t.target == to) return t.probability;
    return 0;
}

}  // namespace

TEST_CASE("rational parsing") {
    CHECK(parse_rational("1/2") == Rational(1, 2));
    CHECK(parse_rational("2/4") == Rational(1, 2));
    CHECK(parse_rational("1") == 1);
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(format_rational(Rational(3, 4)) == "3/4");
    CHECK(format_rational(Rational(2)) == "2");
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("x"), Error);
}

TEST_CASE("M_coin read-back") {
    Mdp m = m_coin();
    REQUIRE(m.num_states() == 3);
    StateId s0 = *m.find_state("s0"), s1 = *m.find_state("s1"), s2 = *m.find_state("s2");
    ActionId alpha = *m.find_action("alpha"), beta = *m.find_action("beta"), tau = *m.find_action("tau");
    CHECK(m.enabled(s0) == std::vector<ActionId>{alpha, beta});
    CHECK(m.enabled(s1) == std::vector<ActionId>{tau});
    CHECK(m.enabled(s2) == std::vector<ActionId>{tau});
    CHECK(m.num_transitions() == 5);
    CHECK(m.has_label(s0, *m.find_proposition("init")));
    CHECK(m.has_label(s1, *m.find_proposition("a")));
    CHECK(parse_mdp(write_mdpx(m)).num_transitions() == 5);
    CHECK(write_mdpx(parse_mdp(write_mdpx(m))) == write_mdpx(m));
}

TEST_CASE("model validation errors") {
    CHECK(kind_of([] { parse_mdp("states: s0 s1\naction s0 a: s1 1/2\naction s1 b: s1 1\n"); }) == ErrorKind::RowSum);
    CHECK(kind_of([] { parse_mdp("states: s0 s1\naction s0 a: s0 1\n"); }) == ErrorKind::NoEnabledAction);
    CHECK(kind_of([] { parse_mdp("states: s0\naction s0 a: s9 1\n"); }) == ErrorKind::DanglingReference);
    CHECK(kind_of([] { parse_mdp("states: s0\nbogus line\n"); }) == ErrorKind::Parse);
    try {
        parse_mdp("states: s0 s1\naction s1 b: s1 1\naction s0 a: s1 1/3\n");
        FAIL("expected RowSum");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("zero-probability edges are dropped") {
    Mdp m = parse_mdp("states: s0 s1\naction s0 a: s0 0, s1 1\naction s1 b: s1 1\n");
    CHECK(m.num_transitions() == 2);
}

TEST_CASE("induced chains of M_coin") {
    Mdp m = m_coin();
    Dtmc beta = induce_dtmc(m, make_scheduler(m, {{"s0", "beta"}}));
    CHECK(prob(beta, 0, 2) == 1);
    Dtmc alpha = induce_dtmc(m, make_scheduler(m, {{"s0", "alpha"}}));
    CHECK(prob(alpha, 0, 0) == Rational(1, 2));
    CHECK(prob(alpha, 0, 1) == Rational(1, 2));
    CHECK(kind_of([&] { make_scheduler(m, {{"s0", "tau"}}); }) == ErrorKind::IncompatibleScheduler);
    SchedulerAssignment bad{{*m.find_action("tau"), 0, 0}};
    CHECK(kind_of([&] { check_scheduler(m, bad); }) == ErrorKind::IncompatibleScheduler);
}

TEST_CASE("self-composition") {
    Mdp m = m_coin();
    Dtmc alpha = induce_dtmc(m, make_scheduler(m, {{"s0", "alpha"}}));
    std::vector<Dtmc> one{alpha};
    Dtmc c1 = self_compose(one);
    CHECK(c1.num_states() == 3);
    CHECK(c1.find_proposition("a@1").has_value());
    CHECK(c1.find_proposition("init@1").has_value());
    CHECK(prob(c1, 0, 1) == Rational(1, 2));

    std::vector<Dtmc> two{alpha, alpha};
    Dtmc c2 = self_compose(two);
    ComposedIndexer idx(3, 2);
    std::vector<StateId> from{0, 0}, to{0, 1};
    CHECK(prob(c2, idx.index(from), idx.index(to)) == Rational(1, 4));
    CHECK(c2.state_name(idx.index(to)) == "s0,s1");

    Mdp d = d_half();
    Dtmc dh = induce_dtmc(d, SchedulerAssignment{{0, *d.find_action("stay"), *d.find_action("stay")}});
    std::vector<Dtmc> pair{dh, dh};
    Dtmc c3 = self_compose(pair);
    std::vector<StateId> u12{1, 2};
    StateId at = idx.index(u12);
    CHECK(c3.row(at).size() == 1);
    CHECK(prob(c3, at, at) == 1);

    CHECK(kind_of([] { self_compose(std::span<const Dtmc>{}); }) == ErrorKind::ArityZero);
}

TEST_CASE("composed indexer is lexicographic, first component most significant") {
    ComposedIndexer idx(3, 2);
    CHECK(idx.size() == 9);
    std::vector<StateId> t{1, 2};
    CHECK(idx.index(t) == 5);
    CHECK(idx.tuple(7) == std::vector<StateId>{2, 1});
    CHECK(idx.component(7, 0) == 2);
    CHECK(ComposedIndexer(3, 0).size() == 1);
}

TEST_CASE("scheduler space") {
    Mdp m = m_coin();
    SchedulerSpace space(m);
    CHECK(space.size() == 2);
    std::vector<SchedulerAssignment> all(space.begin(), space.end());
    REQUIRE(all.size() == 2);
    CHECK(m.action_name(all[0].choice[0]) == "alpha");
    CHECK(m.action_name(all[1].choice[0]) == "beta");

    CHECK(SchedulerSpace(d_half()).size() == 1);

    Mdp three = parse_mdp(
        "states: s0 s1 s2\n"
        "action s0 a: s0 1\naction s0 b: s0 1\n"
        "action s1 a: s1 1\naction s1 b: s1 1\naction s1 c: s1 1\n"
        "action s2 a: s2 1\n");
    SchedulerSpace sp(three);
    CHECK(sp.size() == 6);
    CHECK(sp.size_string() == "6");
    CHECK(sp.at(0).choice == std::vector<ActionId>{0, 0, 0});
    CHECK(sp.at(1).choice == std::vector<ActionId>{0, 1, 0});
    CHECK(sp.at(3).choice == std::vector<ActionId>{1, 0, 0});
    std::size_t n = 0;
    for (auto it = sp.begin(); it != sp.end(); ++it) {
        CHECK(*it == sp.at(n));
        ++n;
    }
    CHECK(n == 6);
}
