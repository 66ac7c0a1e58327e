#include "corpus.hpp"

#include <map>
#include <sstream>

namespace corpus {

using hyperprob::Distribution;

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, unsigned num, unsigned den) { return uniform(rng, 1, den) <= num; }

std::string row_text(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    std::size_t den = uniform(rng, 1, 4);
    std::map<std::size_t, std::size_t> units;
    for (std::size_t u = 0; u < den; ++u) ++units[uniform(rng, lo, hi)];
    std::ostringstream out;
    bool first = true;
    for (auto [t, k] : units) {
        Rational p(k, den);
        p.canonicalize();
        out << (first ? " " : ", ") << 's' << t << ' ' << p.get_str();
        first = false;
    }
    return out.str();
}

}  // namespace

CorpusModel random_model(std::mt19937_64& rng) {
    std::size_t n = uniform(rng, 1, 4);
    bool layered = coin(rng, 1, 3);
    std::ostringstream text;
    text << "states:";
    for (std::size_t s = 0; s < n; ++s) text << " s" << s;
    text << "\nlabels:";
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::string> props;
        if (coin(rng, 1, 2)) props.push_back("init");
        if (coin(rng, 1, 2)) props.push_back("a");
        if (coin(rng, 1, 3)) props.push_back("b");
        if (props.empty()) continue;
        text << " s" << s << ':';
        for (const auto& p : props) text << ' ' << p;
        text << ';';
    }
    text << '\n';
    for (std::size_t s = 0; s < n; ++s) {
        bool absorbing = layered && (s + 1 == n || coin(rng, 1, 4));
        if (absorbing) {
            text << "action s" << s << " p: s" << s << " 1\n";
            continue;
        }
        std::size_t actions = uniform(rng, 1, 2);
        for (std::size_t a = 0; a < actions; ++a) {
            text << "action s" << s << ' ' << (a == 0 ? "p" : "q") << ':'
                 << (layered ? row_text(rng, s + 1, n - 1) : row_text(rng, 0, n - 1)) << '\n';
        }
    }
    CorpusModel m;
    m.text = text.str();
    // Declare every proposition even when no state carries it.
    m.mdp = hyperprob::parse_mdp("ap: init a b\n" + m.text);
    m.layered = layered;
    return m;
}

const std::vector<CorpusModel>& models() {
    static const std::vector<CorpusModel> corpus = [] {
        std::mt19937_64 rng(20191);
        std::vector<CorpusModel> out;
        for (int i = 0; i < 200; ++i) out.push_back(random_model(rng));
        return out;
    }();
    return corpus;
}

const std::vector<std::string>& templates() {
    static const std::vector<std::string> t{
        "exists sched s. forall st x(s). init(x) -> P(F a(x)) >= 1/2",
        "exists sched s. exists st x(s). P(X a(x)) = 1/2",
        "forall sched s. forall st x(s). P(a(x) U b(x)) <= P(F b(x))",
        "exists sched s1. exists sched s2. forall st x(s1). forall st y(s2). "
        "(init(x) & init(y)) -> P(F a(x)) = P(F a(y))",
        "forall sched s1. forall sched s2. forall st x(s1). forall st y(s2). "
        "(init(x) & init(y)) -> P(F a(x)) = P(F a(y))",
        "exists sched s. forall st x(s). exists st y(s). P(F a(x)) + P(F b(y)) > 1",
        "exists sched s. exists st x(s). P(true U[1,3] a(x)) > 1/4",
        "forall sched s. exists st x(s). P(a(x) U[0,2] b(x)) >= P(X b(x)) * 1/2",
        "exists sched s1. exists sched s2. exists st x(s1). exists st y(s2). P(F a(x)) * P(F b(y)) = 1/4",
        "exists sched s. forall st x(s). forall st y(s). P(G !b(x)) - P(G !b(y)) < 1/2",
    };
    return t;
}

const std::vector<DualPair>& dual_pairs() {
    static const std::vector<DualPair> p{
        {"forall sched s. forall st x(s). init(x) -> P(F a(x)) >= 1/2",
         "exists sched s. exists st x(s). !(init(x) -> P(F a(x)) >= 1/2)"},
        {"forall sched s1. forall sched s2. forall st x(s1). forall st y(s2). "
         "(init(x) & init(y)) -> P(F a(x)) = P(F a(y))",
         "exists sched s1. exists sched s2. exists st x(s1). exists st y(s2). "
         "!((init(x) & init(y)) -> P(F a(x)) = P(F a(y)))"},
        {"forall sched s. forall st x(s). exists st y(s). P(X b(x)) <= P(a(y) U[0,2] b(y))",
         "exists sched s. exists st x(s). forall st y(s). !(P(X b(x)) <= P(a(y) U[0,2] b(y)))"},
        {"forall sched s. exists st x(s). P(true U[1,3] a(x)) > 1/4",
         "exists sched s. forall st x(s). !(P(true U[1,3] a(x)) > 1/4)"},
        {"forall sched s1. forall sched s2. forall st x(s1). forall st y(s2). P(F a(x)) + P(F b(y)) < 3/2",
         "exists sched s1. exists sched s2. exists st x(s1). exists st y(s2). !(P(F a(x)) + P(F b(y)) < 3/2)"},
    };
    return p;
}

bool is_absorbing(const Rows& rows, std::size_t s) {
    return rows[s].size() == 1 && rows[s][0].target == s;
}

bool acyclic(const Rows& rows) {
    // Kahn's algorithm on the graph without absorbing self-loops.
    std::size_t n = rows.size();
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        if (is_absorbing(rows, s)) continue;
        for (const auto& t : rows[s]) ++indeg[t.target];
    }
    std::vector<std::size_t> ready;
    for (std::size_t s = 0; s < n; ++s) if (indeg[s] == 0) ready.push_back(s);
    std::size_t seen = 0;
    while (!ready.empty()) {
        std::size_t s = ready.back();
        ready.pop_back();
        ++seen;
        if (is_absorbing(rows, s)) continue;
        for (const auto& t : rows[s]) if (--indeg[t.target] == 0) ready.push_back(t.target);
    }
    return seen == n;
}

Rational path_until(const Rows& rows, const Pred& phi1, const Pred& phi2, std::size_t s) {
    if (phi2[s]) return 1;
    if (!phi1[s] || is_absorbing(rows, s)) return 0;
    Rational sum = 0;
    for (const auto& t : rows[s]) sum += t.probability * path_until(rows, phi1, phi2, t.target);
    return sum;
}

Rational path_bounded_until(const Rows& rows, const Pred& phi1, const Pred& phi2, unsigned k1, unsigned k2,
                            std::size_t s) {
    struct Walk {
        const Rows& rows;
        const Pred& phi1;
        const Pred& phi2;
        unsigned k1, k2;
        Rational operator()(std::size_t s, unsigned step) const {
            if (step >= k1 && phi2[s]) return 1;
            if (step == k2 || !phi1[s]) return 0;
            Rational sum = 0;
            for (const auto& t : rows[s]) sum += t.probability * (*this)(t.target, step + 1);
            return sum;
        }
    };
    return Walk{rows, phi1, phi2, k1, k2}(s, 0);
}

std::vector<double> vi_until(const Rows& rows, const Pred& phi1, const Pred& phi2, unsigned iterations) {
    std::size_t n = rows.size();
    // Zero states: no phi1-path to phi2.
    std::vector<bool> reach(n, false);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (reach[s]) continue;
            bool r = phi2[s];
            if (!r && phi1[s]) {
                for (const auto& t : rows[s]) r = r || reach[t.target];
            }
            if (r) reach[s] = changed = true;
        }
    }
    // Not-one states: can reach a zero state through phi1 & !phi2 states.
    std::vector<bool> bad(n);
    for (std::size_t s = 0; s < n; ++s) bad[s] = !reach[s];
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (bad[s] || phi2[s] || !phi1[s]) continue;
            for (const auto& t : rows[s]) {
                if (bad[t.target]) {
                    bad[s] = changed = true;
                    break;
                }
            }
        }
    }
    std::vector<double> x(n);
    for (std::size_t s = 0; s < n; ++s) x[s] = bad[s] ? 0.0 : 1.0;
    for (unsigned i = 0; i < iterations; ++i) {
        std::vector<double> next(n);
        for (std::size_t s = 0; s < n; ++s) {
            if (phi2[s]) {
                next[s] = 1.0;
            } else if (!phi1[s]) {
                next[s] = 0.0;
            } else {
                for (const auto& t : rows[s]) next[s] += t.probability.get_d() * x[t.target];
            }
        }
        x = std::move(next);
    }
    return x;
}

std::vector<std::vector<std::size_t>> bottom_sccs(const Rows& rows) {
    std::size_t n = rows.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
        reach[s][s] = true;
        for (const auto& t : rows[s]) reach[s][t.target] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> done(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        if (done[s]) continue;
        std::vector<std::size_t> scc;
        for (std::size_t t = 0; t < n; ++t) {
            if (reach[s][t] && reach[t][s]) {
                scc.push_back(t);
                done[t] = true;
            }
        }
        bool bottom = true;
        for (std::size_t t = 0; t < n; ++t) bottom = bottom && (!reach[s][t] || reach[t][s]);
        if (bottom) out.push_back(scc);
    }
    return out;
}

Rows rows_of(const hyperprob::Dtmc& d) { return Rows(d.rows().begin(), d.rows().end()); }

Pred label(const Mdp& mdp, const std::string& prop) {
    Pred p(mdp.num_states(), false);
    auto id = mdp.find_proposition(prop);
    if (!id) return p;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) p[s] = mdp.has_label(s, *id);
    return p;
}

}  // namespace corpus
