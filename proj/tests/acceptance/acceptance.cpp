#include "corpus.hpp"

#include "hyperprob/casegen.hpp"
#include "hyperprob/dtmc_analysis.hpp"
#include "hyperprob/enum_checker.hpp"
#include "hyperprob/smt.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace hyperprob;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

Verdict smt_verdict(const Mdp& m, const Formula& f) { return *solve_eager(m, f).decoded; }

bool replays(const Mdp& m, const Formula& f, const Verdict& v) {
    if (v.mode == VerdictMode::Witness) return replay(m, f, v.witness);
    if (v.mode == VerdictMode::Counterexample) return replay(m, dual(f), v.witness);
    return true;
}

std::vector<Dtmc> induced_chains(const Mdp& m) {
    std::vector<Dtmc> out;
    for (const auto& s : SchedulerSpace(m)) out.push_back(induce_dtmc(m, s));
    return out;
}

struct PredicatePair {
    const char* name;
    corpus::Pred phi1;
    corpus::Pred phi2;
};

std::vector<PredicatePair> predicate_pairs(const Mdp& m) {
    auto a = corpus::label(m, "a"), b = corpus::label(m, "b"), init = corpus::label(m, "init");
    corpus::Pred top(m.num_states(), true), not_b(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s) not_b[s] = !b[s];
    return {{"true U a", top, a}, {"true U b", top, b}, {"a U b", a, b}, {"!b U a", not_b, a}, {"init U a", init, a}};
}

Outcome ac1() {
    auto start = Clock::now();
    std::size_t cases = 0, mismatches = 0, replay_failures = 0;
    std::string first;
    for (std::size_t i = 0; i < corpus::models().size(); ++i) {
        const Mdp& m = corpus::models()[i].mdp;
        for (const auto& t : corpus::templates()) {
            Formula f = parse_formula(t);
            Verdict e = check(m, f);
            Verdict s = smt_verdict(m, f);
            ++cases;
            if (e.truth != s.truth || e.mode != s.mode) {
                ++mismatches;
                if (first.empty()) first = "model " + std::to_string(i) + ": " + t;
            }
            if (!replays(m, f, e) || !replays(m, f, s)) ++replay_failures;
        }
    }
    std::ostringstream d;
    d << cases << " cases, " << mismatches << " verdict mismatches, " << replay_failures << " replay failures";
    if (!first.empty()) d << " (first: " << first << ")";
    double secs = seconds_since(start);
    d << ", " << secs << " s";
    return {mismatches == 0 && replay_failures == 0 && secs < 120, d.str()};
}

Outcome ac2() {
    CaseSpec plain = gen_conformance(ConformanceTier::Plain);
    Dtmc d = induce_dtmc(plain.mdp, make_scheduler(plain.mdp, {}));
    StateId c0 = *plain.mdp.find_state("c0");
    StatePredicate top(d.num_states(), true);
    bool fair = true;
    for (int l = 1; l <= 6; ++l) {
        fair = fair && until_probs(d, top, label_predicate(d, "die_" + std::to_string(l)))[c0] == Rational(1, 6);
    }

    auto start = Clock::now();
    CaseSpec s0 = gen_conformance(ConformanceTier::S0);
    Verdict v = smt_verdict(s0.mdp, s0.formula);
    double secs = seconds_since(start);
    bool witness_fair = v.truth && v.mode == VerdictMode::Witness && v.witness.schedulers.size() == 1;
    std::string chosen;
    if (witness_fair) {
        const auto& sched = v.witness.schedulers[0].second;
        chosen = s0.mdp.action_name(sched.choice[c0]);
        Dtmc w = induce_dtmc(s0.mdp, sched);
        for (int l = 1; l <= 6; ++l) {
            witness_fair = witness_fair &&
                           until_probs(w, top, label_predicate(w, "die_" + std::to_string(l)))[c0] == Rational(1, 6);
        }
    }
    std::ostringstream out;
    out << "plain die exact 1/6: " << (fair ? "yes" : "no") << "; tier s0 verdict " << (v.truth ? "true" : "false")
        << " with c0 -> " << chosen << ", witness replay 1/6: " << (witness_fair ? "yes" : "no") << ", " << secs
        << " s";
    return {fair && witness_fair, out.str()};
}

Outcome ac3() {
    Mdp m = load_mdp(std::string(HYPERPROB_FIXTURE_DIR) + "/m_coin.mdpx");
    bool ok = true;
    std::ostringstream d;
    for (auto [target, expected] : {std::pair{"1", true}, {"0", true}, {"1/2", false}}) {
        Formula f = parse_formula(std::string("exists sched s. exists st x(s). init(x) & P(F a(x)) = ") + target);
        bool e = check(m, f).truth, s = smt_verdict(m, f).truth;
        ok = ok && e == expected && s == expected;
        d << "target " << target << ": enum " << e << " smt " << s << "; ";
    }
    return {ok, d.str()};
}

Outcome ac4() {
    std::size_t queries = 0, vi_bad = 0, lib_vi_bad = 0, acyclic = 0, path_bad = 0, bscc = 0, bscc_bad = 0;
    double worst = 0, lib_worst = 0;
    std::string worst_case;
    for (std::size_t i = 0; i < corpus::models().size(); ++i) {
        const auto& cm = corpus::models()[i];
        for (const Dtmc& d : induced_chains(cm.mdp)) {
            corpus::Rows rows = corpus::rows_of(d);
            bool dag = corpus::acyclic(rows);
            auto bottoms = corpus::bottom_sccs(rows);
            for (const auto& pp : predicate_pairs(cm.mdp)) {
                ++queries;
                ProbVector exact = until_probs(d, pp.phi1, pp.phi2);
                auto vi = corpus::vi_until(rows, pp.phi1, pp.phi2, 60);
                ProbVector lib = until_probs_vi(d, pp.phi1, pp.phi2, 60, IterationSeed::ProbabilityOne);
                bool bad = false, lib_bad = false;
                for (std::size_t s = 0; s < rows.size(); ++s) {
                    double err = std::abs(vi[s] - exact[s].get_d());
                    double lerr = std::abs(Rational(lib[s] - exact[s]).get_d());
                    if (err > worst) {
                        worst = err;
                        std::ostringstream w;
                        w << "model " << i << ", " << pp.name << " at s" << s << ", exact " << exact[s].get_str();
                        worst_case = w.str();
                    }
                    lib_worst = std::max(lib_worst, lerr);
                    bad = bad || err > 1e-9;
                    lib_bad = lib_bad || lerr > 1e-9;
                }
                vi_bad += bad;
                lib_vi_bad += lib_bad;
                if (dag) {
                    ++acyclic;
                    for (std::size_t s = 0; s < rows.size(); ++s) {
                        if (corpus::path_until(rows, pp.phi1, pp.phi2, s) != exact[s]) {
                            ++path_bad;
                            break;
                        }
                    }
                }
                for (const auto& scc : bottoms) {
                    bool has_target = false;
                    for (auto s : scc) has_target = has_target || pp.phi2[s];
                    if (has_target) continue;
                    ++bscc;
                    for (auto s : scc) {
                        if (exact[s] != 0) {
                            ++bscc_bad;
                            break;
                        }
                    }
                }
            }
        }
    }
    std::ostringstream d;
    d << queries << " until queries: value iteration (60 steps) off by > 1e-9 on " << vi_bad
      << " (max error " << worst << " on " << worst_case << "; library iterate " << lib_vi_bad << ", max " << lib_worst << "); path enumeration mismatches "
      << path_bad << " of " << acyclic << " acyclic; non-zero on target-free bottom SCCs " << bscc_bad << " of "
      << bscc;
    return {vi_bad == 0 && lib_vi_bad == 0 && path_bad == 0 && bscc_bad == 0 && acyclic > 0, d.str()};
}

Outcome ac5() {
    std::size_t zero_checks = 0, zero_bad = 0, bounded = 0, bounded_bad = 0;
    for (const auto& cm : corpus::models()) {
        for (const Dtmc& d : induced_chains(cm.mdp)) {
            corpus::Rows rows = corpus::rows_of(d);
            bool dag = corpus::acyclic(rows);
            for (const auto& pp : predicate_pairs(cm.mdp)) {
                ++zero_checks;
                ProbVector z = bounded_until_probs(d, pp.phi1, pp.phi2, 0, 0);
                for (std::size_t s = 0; s < rows.size(); ++s) {
                    if (z[s] != (pp.phi2[s] ? 1 : 0)) {
                        ++zero_bad;
                        break;
                    }
                }
                if (!dag) continue;
                for (unsigned k2 = 0; k2 <= 4; ++k2) {
                    for (unsigned k1 = 0; k1 <= k2; ++k1) {
                        ++bounded;
                        ProbVector p = bounded_until_probs(d, pp.phi1, pp.phi2, k1, k2);
                        for (std::size_t s = 0; s < rows.size(); ++s) {
                            if (p[s] != corpus::path_bounded_until(rows, pp.phi1, pp.phi2, k1, k2, s)) {
                                ++bounded_bad;
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
    std::ostringstream d;
    d << "U[0,0] vs indicator: " << zero_bad << " of " << zero_checks << " differ; U[k1,k2] (k2<=4) vs path enumeration on acyclic chains: "
      << bounded_bad << " of " << bounded << " differ";
    return {zero_bad == 0 && bounded_bad == 0 && bounded > 0, d.str()};
}

Outcome ac6() {
    bool ok = true;
    std::ostringstream d;
    double ts_secs = 0;
    for (const CaseSpec& c : {gen_timing_attack(1), gen_password(1), gen_thread_sched(0, 1)}) {
        auto start = Clock::now();
        bool e = check(c.mdp, c.formula).truth;
        bool s = smt_verdict(c.mdp, c.formula).truth;
        double secs = seconds_since(start);
        if (c.family == "ts") ts_secs = secs;
        ok = ok && !e && !s;
        d << c.name << ": enum " << (e ? "true" : "false") << ", smt " << (s ? "true" : "false") << "; ";
    }
    std::uint64_t space = SchedulerSpace(gen_thread_sched(0, 1).mdp).size();
    d << "ts_h0_1 schedulers " << space << ", " << ts_secs << " s";
    return {ok && space <= 128 && ts_secs < 10, d.str()};
}

Outcome ac7() {
    std::size_t pairs = 0, bad = 0;
    const auto& models = corpus::models();
    for (std::size_t i = 0; pairs < 100 && i < models.size(); ++i) {
        for (const auto& p : corpus::dual_pairs()) {
            if (pairs == 100) break;
            ++pairs;
            Formula u = parse_formula(p.universal);
            Formula e = parse_formula(p.existential_of_negation);
            const Mdp& m = models[i].mdp;
            bool ue = check(m, u).truth, ee = check(m, e).truth;
            bool us = smt_verdict(m, u).truth, es = smt_verdict(m, e).truth;
            if (ue != !ee || us != !es || ue != us) ++bad;
        }
    }
    std::ostringstream d;
    d << pairs << " paired cases, " << bad << " where the universal verdict is not the negated existential one";
    return {pairs == 100 && bad == 0, d.str()};
}

Outcome ac8() {
    std::vector<CaseSpec> cases;
    for (unsigned m : {2u, 4u, 6u}) cases.push_back(gen_timing_attack(m));
    for (unsigned m : {2u, 4u, 6u}) cases.push_back(gen_password(m));
    for (auto [a, b] : {std::pair{0u, 1u}, {0u, 15u}, {4u, 8u}, {8u, 15u}}) cases.push_back(gen_thread_sched(a, b));
    for (auto t : {ConformanceTier::S0, ConformanceTier::S01, ConformanceTier::S012}) cases.push_back(gen_conformance(t));
    bool ok = true;
    std::ostringstream d;
    auto within = [](double x, double ref) { return x <= 2 * ref && ref <= 2 * x; };
    for (const auto& c : cases) {
        if (!c.reference) {
            ok = false;
            continue;
        }
        double st = static_cast<double>(c.mdp.num_states()), tr = static_cast<double>(c.mdp.num_transitions());
        bool good = within(st, c.reference->states) && within(tr, c.reference->transitions);
        ok = ok && good;
        d << c.name << ' ' << c.mdp.num_states() << '/' << c.mdp.num_transitions() << " vs " << c.reference->states << '/'
          << c.reference->transitions << (good ? "" : " (off)") << "; ";
    }
    d << "runtimes and SMT variable counts excluded";
    return {ok, d.str()};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {"AC1", "oracle equivalence enum vs smt-eager", ac1},
        {"AC2", "Knuth-Yao conformance", ac2},
        {"AC3", "M_coin reach targets 1, 0, 1/2", ac3},
        {"AC4", "until correctness", ac4},
        {"AC5", "bounded until", ac5},
        {"AC6", "case-study leak detection", ac6},
        {"AC7", "quantifier duality", ac7},
        {"AC8", "case-study sizes within factor 2", ac8},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << c.id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << c.name << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
