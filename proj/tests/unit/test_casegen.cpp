#include "hyperprob/casegen.hpp"
#include "hyperprob/dtmc_analysis.hpp"
#include "hyperprob/enum_checker.hpp"
#include "hyperprob/error.hpp"

#include <doctest.h>

using namespace hyperprob;

namespace {

StatePredicate all(std::size_t n) { return StatePredicate(n, true); }

}  // namespace

TEST_CASE("generated cases validate and are well-formed") {
    std::vector<CaseSpec> cases{gen_timing_attack(1), gen_timing_attack(2), gen_password(1), gen_password(2),
                                gen_thread_sched(0, 1), gen_thread_sched(4, 8),
                                gen_conformance(ConformanceTier::Plain), gen_conformance(ConformanceTier::S0)};
    for (const auto& c : cases) {
        CAPTURE(c.name);
        CHECK_NOTHROW(check_well_formed(c.formula));
        CHECK(write_mdpx(parse_mdp(c.model_text)) == c.model_text);
        CHECK(to_string(parse_formula(c.formula_text)) == to_string(c.formula));
    }
}

TEST_CASE("generators are deterministic") {
    CHECK(gen_timing_attack(3).model_text == gen_timing_attack(3).model_text);
    CHECK(gen_password(2).formula_text == gen_password(2).formula_text);
    CHECK(gen_conformance(ConformanceTier::S01).model_text == gen_conformance(ConformanceTier::S01).model_text);
}

TEST_CASE("quantifier shapes") {
    CHECK(count_quantifiers(gen_timing_attack(1).formula) == QuantifierCounts{2, 2});
    CHECK(count_quantifiers(gen_password(1).formula) == QuantifierCounts{2, 2});
    CHECK(count_quantifiers(gen_thread_sched(0, 1).formula) == QuantifierCounts{1, 2});
    CHECK(count_quantifiers(gen_conformance(ConformanceTier::S0).formula) == QuantifierCounts{1, 2});
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(gen_timing_attack(0), Error);
    CHECK_THROWS_AS(gen_password(0), Error);
    CHECK_THROWS_AS(gen_thread_sched(3, 3), Error);
    CHECK_THROWS_AS(parse_tier("s9"), Error);
}

TEST_CASE("reference sizes are attached where published") {
    CHECK(gen_timing_attack(2).reference->states == 24);
    CHECK(!gen_timing_attack(1).reference);
    CHECK(gen_thread_sched(0, 1).mdp.num_states() == 7);
    CHECK(gen_thread_sched(0, 1).mdp.num_transitions() == 13);
    CHECK(gen_conformance(ConformanceTier::S0).mdp.num_states() == 20);
}

TEST_CASE("the embedded Knuth-Yao die is fair") {
    CaseSpec c = gen_conformance(ConformanceTier::Plain);
    Dtmc d = induce_dtmc(c.mdp, make_scheduler(c.mdp, {}));
    StateId c0 = *c.mdp.find_state("c0");
    StateId r0 = *c.mdp.find_state("r0");
    for (int l = 1; l <= 6; ++l) {
        auto p = until_probs(d, all(d.num_states()), label_predicate(d, "die_" + std::to_string(l)));
        CHECK(p[c0] == Rational(1, 6));
        CHECK(p[r0] == Rational(1, 6));
    }
}

TEST_CASE("small instances leak under the enum engine") {
    CHECK(!check(gen_timing_attack(1).mdp, gen_timing_attack(1).formula).truth);
    CHECK(!check(gen_password(1).mdp, gen_password(1).formula).truth);
    CaseSpec ts = gen_thread_sched(0, 1);
    CHECK(!check(ts.mdp, ts.formula).truth);
}
