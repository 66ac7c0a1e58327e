#include "hyperprob/dtmc_analysis.hpp"

#include "hyperprob/error.hpp"

#include <algorithm>
#include <deque>
#include <utility>

namespace hyperprob {

namespace {

void check_sizes(Rows rows, const StatePredicate& a, const StatePredicate& b) {
    if (a.size() != rows.size() || b.size() != rows.size()) {
        raise(ErrorKind::InvalidParameter, "state predicate size does not match the chain");
    }
}

std::vector<std::vector<StateId>> predecessors(Rows rows) {
    std::vector<std::vector<StateId>> pred(rows.size());
    for (StateId s = 0; s < rows.size(); ++s) {
        for (const auto& t : rows[s]) {
            if (t.probability > 0) pred[t.target].push_back(s);
        }
    }
    return pred;
}

// Backward closure of `from` through states satisfying `through`.
StatePredicate backward_reach(Rows rows, const StatePredicate& from, const StatePredicate& through) {
    auto pred = predecessors(rows);
    StatePredicate seen(rows.size(), false);
    std::vector<StateId> stack;
    for (StateId s = 0; s < rows.size(); ++s) {
        if (from[s]) {
            seen[s] = true;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        StateId s = stack.back();
        stack.pop_back();
        for (StateId p : pred[s]) {
            if (!seen[p] && through[p]) {
                seen[p] = true;
                stack.push_back(p);
            }
        }
    }
    return seen;
}

// Tarjan's algorithm restricted to `member` states, iterative. Components are
// produced in reverse topological order: every component comes after all
// components it can reach.
std::vector<std::vector<StateId>> components(Rows rows, const StatePredicate& member) {
    const std::size_t n = rows.size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<StateId> stack;
    std::vector<std::vector<StateId>> result;
    std::size_t counter = 0;

    struct Frame {
        StateId state;
        std::size_t next_edge;
    };

    for (StateId root = 0; root < n; ++root) {
        if (!member[root] || index[root] != unvisited) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& row = rows[f.state];
            if (f.next_edge < row.size()) {
                StateId t = row[f.next_edge++].target;
                if (!member[t]) continue;
                if (index[t] == unvisited) {
                    index[t] = low[t] = counter++;
                    stack.push_back(t);
                    on_stack[t] = true;
                    frames.push_back({t, 0});
                } else if (on_stack[t]) {
                    low[f.state] = std::min(low[f.state], index[t]);
                }
                continue;
            }
            StateId s = f.state;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().state] = std::min(low[frames.back().state], low[s]);
            if (low[s] == index[s]) {
                std::vector<StateId> comp;
                StateId t;
                do {
                    t = stack.back();
                    stack.pop_back();
                    on_stack[t] = false;
                    comp.push_back(t);
                } while (t != s);
                std::sort(comp.begin(), comp.end());
                result.push_back(std::move(comp));
            }
        }
    }
    return result;
}

}  // namespace

std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = n;
        Rational best = 0;
        for (std::size_t r = col; r < n; ++r) {
            Rational mag = abs(a[r][col]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (pivot == n) raise(ErrorKind::SingularSystem, "linear system has no pivot in column " + std::to_string(col));
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col] == 0) continue;
            Rational factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rational acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

QualitativeSets qualitative_sets(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2) {
    check_sizes(rows, phi1, phi2);
    auto reach = backward_reach(rows, phi2, phi1);
    QualitativeSets sets;
    sets.zero.resize(rows.size());
    for (StateId s = 0; s < rows.size(); ++s) sets.zero[s] = !reach[s];
    sets.yes = phi2;
    return sets;
}

ProbVector until_probs(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2) {
    auto sets = qualitative_sets(rows, phi1, phi2);
    const std::size_t n = rows.size();
    ProbVector p(n, Rational(0));
    StatePredicate maybe(n, false);
    for (StateId s = 0; s < n; ++s) {
        if (sets.yes[s]) {
            p[s] = 1;
        } else if (!sets.zero[s] && phi1[s]) {
            maybe[s] = true;
        }
    }
    std::vector<std::size_t> local(n);
    for (const auto& comp : components(rows, maybe)) {
        for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = i;
        const std::size_t m = comp.size();
        std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
        std::vector<Rational> b(m, Rational(0));
        for (std::size_t i = 0; i < m; ++i) {
            a[i][i] = 1;
            for (const auto& t : rows[comp[i]]) {
                if (maybe[t.target] && std::binary_search(comp.begin(), comp.end(), t.target)) {
                    a[i][local[t.target]] -= t.probability;
                } else {
                    b[i] += t.probability * p[t.target];
                }
            }
        }
        auto x = solve_linear(std::move(a), std::move(b));
        for (std::size_t i = 0; i < m; ++i) p[comp[i]] = x[i];
    }
    return p;
}

ProbVector bounded_until_probs(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2,
                               unsigned k1, unsigned k2) {
    check_sizes(rows, phi1, phi2);
    if (k1 > k2) raise(ErrorKind::Bound, "bounded until needs k1 <= k2");
    const std::size_t n = rows.size();
    auto step = [&](const ProbVector& prev, StateId s) {
        Rational acc = 0;
        for (const auto& t : rows[s]) acc += t.probability * prev[t.target];
        return acc;
    };
    // [0,0]
    ProbVector p(n);
    for (StateId s = 0; s < n; ++s) p[s] = phi2[s] ? 1 : 0;
    // [0,j] from [0,j-1] for j = 1 .. k2-k1
    for (unsigned j = 1; j <= k2 - k1; ++j) {
        ProbVector next(n);
        for (StateId s = 0; s < n; ++s) {
            if (phi2[s]) {
                next[s] = 1;
            } else if (!phi1[s]) {
                next[s] = 0;
            } else {
                next[s] = step(p, s);
            }
        }
        p = std::move(next);
    }
    // [i, k2-k1+i] from [i-1, k2-k1+i-1] for i = 1 .. k1
    for (unsigned i = 1; i <= k1; ++i) {
        ProbVector next(n);
        for (StateId s = 0; s < n; ++s) next[s] = phi1[s] ? step(p, s) : Rational(0);
        p = std::move(next);
    }
    return p;
}

ProbVector next_probs(Rows rows, const StatePredicate& phi) {
    if (phi.size() != rows.size()) raise(ErrorKind::InvalidParameter, "state predicate size does not match the chain");
    ProbVector p(rows.size(), Rational(0));
    for (StateId s = 0; s < rows.size(); ++s) {
        for (const auto& t : rows[s]) {
            if (phi[t.target]) p[s] += t.probability;
        }
    }
    return p;
}

StatePredicate probability_one_states(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2) {
    // A state has probability < 1 iff it can reach, via phi1 & !phi2 states,
    // a state of probability 0.
    auto sets = qualitative_sets(rows, phi1, phi2);
    StatePredicate through(rows.size());
    for (StateId s = 0; s < rows.size(); ++s) through[s] = phi1[s] && !phi2[s];
    auto below_one = backward_reach(rows, sets.zero, through);
    StatePredicate one(rows.size());
    for (StateId s = 0; s < rows.size(); ++s) one[s] = !below_one[s];
    return one;
}

ProbVector until_probs_vi(Rows rows, const StatePredicate& phi1, const StatePredicate& phi2, unsigned iterations,
                          IterationSeed seed) {
    check_sizes(rows, phi1, phi2);
    const std::size_t n = rows.size();
    StatePredicate init = seed == IterationSeed::Target ? phi2 : probability_one_states(rows, phi1, phi2);
    ProbVector p(n);
    for (StateId s = 0; s < n; ++s) p[s] = init[s] ? 1 : 0;
    for (unsigned it = 0; it < iterations; ++it) {
        ProbVector next(n);
        for (StateId s = 0; s < n; ++s) {
            if (phi2[s]) {
                next[s] = 1;
            } else if (!phi1[s]) {
                next[s] = 0;
            } else {
                Rational acc = 0;
                for (const auto& t : rows[s]) acc += t.probability * p[t.target];
                next[s] = acc;
            }
        }
        p = std::move(next);
    }
    return p;
}

std::vector<std::size_t> distance_to(Rows rows, const StatePredicate& phi2) {
    const std::size_t n = rows.size();
    auto pred = predecessors(rows);
    std::vector<std::size_t> dist(n, n);
    std::deque<StateId> queue;
    for (StateId s = 0; s < n; ++s) {
        if (phi2[s]) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (StateId p : pred[s]) {
            if (dist[p] == n) {
                dist[p] = dist[s] + 1;
                queue.push_back(p);
            }
        }
    }
    return dist;
}

StatePredicate label_predicate(const Dtmc& d, std::string_view prop) {
    StatePredicate out(d.num_states(), false);
    auto id = d.find_proposition(prop);
    if (!id) return out;
    for (StateId s = 0; s < d.num_states(); ++s) out[s] = d.has_label(s, *id);
    return out;
}

}  // namespace hyperprob
