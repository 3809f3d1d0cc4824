#pragma once

// Brute-force reference computations used to cross-check the engine.

#include "dzn/lts.hpp"
#include "dzn/semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Trace = std::vector<std::string>;
using States = std::set<std::size_t>;

inline States closure(const dzn::lts::Lts& l, States s) {
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& e : l.edges) {
            if (e.label == "tau" && s.count(e.from) && s.insert(e.to).second) grew = true;
        }
    }
    return s;
}

inline States after(const dzn::lts::Lts& l, const States& from, const std::string& label) {
    States next;
    for (const auto& e : l.edges) {
        if (e.label == label && from.count(e.from)) next.insert(e.to);
    }
    return closure(l, next);
}

inline bool stable(const dzn::lts::Lts& l, std::size_t s) {
    for (const auto& e : l.edges) {
        if (e.from == s && e.label == "tau") return false;
    }
    return true;
}

inline std::set<std::string> init(const dzn::lts::Lts& l, std::size_t s) {
    std::set<std::string> out;
    for (const auto& e : l.edges) {
        if (e.from == s && e.label != "tau") out.insert(e.label);
    }
    return out;
}

/// Every visible trace of length at most depth, with the states reached.
inline std::map<Trace, States> traces(const dzn::lts::Lts& l, std::size_t depth) {
    std::map<Trace, States> out;
    std::vector<std::pair<Trace, States>> level{{{}, closure(l, {l.initial})}};
    for (std::size_t d = 0; d <= depth; ++d) {
        std::vector<std::pair<Trace, States>> next;
        for (const auto& [t, s] : level) {
            out.emplace(t, s);
            if (d == depth) continue;
            for (const auto& a : l.alphabet) {
                States n = after(l, s, a);
                if (n.empty()) continue;
                Trace u = t;
                u.push_back(a);
                next.push_back({u, n});
            }
        }
        level = std::move(next);
    }
    return out;
}

struct Violation {
    bool failure = false;  // else a trace the reference cannot perform
    Trace trace;
    std::set<std::string> refusal;

    friend bool operator<(const Violation& a, const Violation& b) {
        return std::tie(a.failure, a.trace, a.refusal) < std::tie(b.failure, b.trace, b.refusal);
    }
    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Stable-failures refinement by enumeration: every violation up to the given trace length.
inline std::set<Violation> refinement_violations(const dzn::lts::Lts& impl, const dzn::lts::Lts& spec, std::size_t depth) {
    std::set<Violation> out;
    auto itr = traces(impl, depth);
    auto str = traces(spec, depth);
    for (const auto& [t, states] : itr) {
        auto sp = str.find(t);
        if (sp == str.end()) {
            out.insert({false, t, {}});
            continue;
        }
        for (std::size_t s : states) {
            if (!stable(impl, s)) continue;
            auto mine = init(impl, s);
            bool matched = false;
            std::set<std::string> offered;
            for (std::size_t x : sp->second) {
                if (!stable(spec, x)) continue;
                auto theirs = init(spec, x);
                offered.insert(theirs.begin(), theirs.end());
                if (std::includes(mine.begin(), mine.end(), theirs.begin(), theirs.end())) matched = true;
            }
            if (matched) continue;
            Violation v{true, t, {}};
            for (const auto& a : offered) {
                if (!mine.count(a)) v.refusal.insert(a);
            }
            out.insert(v);
        }
    }
    return out;
}

inline std::size_t shortest(const std::set<Violation>& vs) {
    std::size_t best = SIZE_MAX;
    for (const auto& v : vs) best = std::min(best, v.trace.size());
    return best;
}

/// Shortest label sequence, straight from the step function, after which a step fails
/// with the given failure label. Empty optional when none exists.
inline std::optional<Trace> shortest_failure(const dzn::semantics::Subject& subject, const std::string& failure) {
    using namespace dzn::semantics;
    struct Item {
        std::size_t cost;
        std::size_t order;
        Trace trace;
        State state;
        bool operator>(const Item& o) const { return std::tie(cost, order) > std::tie(o.cost, o.order); }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    std::set<std::string> done;
    std::size_t order = 0;
    queue.push({0, order++, {}, subject.initial()});
    std::optional<Trace> best;
    while (!queue.empty()) {
        Item it = queue.top();
        queue.pop();
        if (best && it.cost >= best->size()) break;
        if (!done.insert(subject.key(it.state)).second) continue;
        for (const auto& offer : subject.offers(it.state)) {
            Choices choices;
            do {
                FireResult r = subject.fire(it.state, offer, &choices);
                Trace t = it.trace;
                for (const auto& o : r.chain) t.push_back(o.label);
                if (r.status == FireStatus::Failed && r.failure_label == failure) {
                    if (!r.offending.empty()) t.push_back(r.offending);
                    if (!best || t.size() < best->size()) best = t;
                } else if (r.status == FireStatus::Ok) {
                    std::size_t cost = t.size();
                    queue.push({cost, order++, std::move(t), r.next});
                }
            } while (choices.advance());
        }
    }
    return best;
}

// Edges lying on some initial path that spells one of the traces. Replays every trace over
// the label graph without consulting the cover's own paths.
inline std::set<std::size_t> marked_edges(const dzn::lts::Lts& l, const std::vector<Trace>& traces) {
    std::set<std::size_t> marked;
    for (const auto& t : traces) {
        // alive[i]: states from which t[i..] can be completed
        std::vector<std::set<std::size_t>> alive(t.size() + 1);
        for (std::size_t s = 0; s < l.states; ++s) alive[t.size()].insert(s);
        for (std::size_t i = t.size(); i-- > 0;) {
            for (const auto& e : l.edges) {
                if (e.label == t[i] && alive[i + 1].count(e.to)) alive[i].insert(e.from);
            }
        }
        if (!alive[0].count(l.initial)) continue;  // not a trace of l
        std::set<std::size_t> here{l.initial};
        for (std::size_t i = 0; i < t.size(); ++i) {
            std::set<std::size_t> next;
            for (std::size_t id = 0; id < l.edges.size(); ++id) {
                const auto& e = l.edges[id];
                if (e.label == t[i] && here.count(e.from) && alive[i + 1].count(e.to)) {
                    marked.insert(id);
                    next.insert(e.to);
                }
            }
            here = std::move(next);
        }
    }
    return marked;
}

// Shortest path labels to every state, over the edges passing keep.
template <typename Keep>
inline std::vector<std::optional<Trace>> bfs(const dzn::lts::Lts& l, Keep keep) {
    std::vector<std::optional<Trace>> path(l.states);
    path[l.initial] = Trace{};
    std::deque<std::size_t> queue{l.initial};
    while (!queue.empty()) {
        std::size_t s = queue.front();
        queue.pop_front();
        for (const auto& e : l.edges) {
            if (e.from != s || !keep(e) || path[e.to]) continue;
            path[e.to] = *path[s];
            path[e.to]->push_back(e.label);
            queue.push_back(e.to);
        }
    }
    return path;
}

inline bool failure(const dzn::lts::Edge& e) { return e.label == "illegal" || e.label.starts_with("range_error("); }

// States without any non-failure successor, with their shortest traces.
inline std::vector<Trace> deadlocks(const dzn::lts::Lts& l) {
    auto path = bfs(l, [](const dzn::lts::Edge& e) { return !failure(e); });
    std::vector<Trace> out;
    for (std::size_t s = 0; s < l.states; ++s) {
        if (!path[s]) continue;
        bool stuck = std::none_of(l.edges.begin(), l.edges.end(), [&](const dzn::lts::Edge& e) { return e.from == s && !failure(e); });
        if (stuck) out.push_back(*path[s]);
    }
    return out;
}

// States on a cycle of hidden edges from which no visible edge is reachable.
template <typename Visible>
inline std::vector<Trace> livelocks(const dzn::lts::Lts& l, Visible visible) {
    auto path = bfs(l, [](const dzn::lts::Edge&) { return true; });
    std::vector<Trace> out;
    for (std::size_t s = 0; s < l.states; ++s) {
        if (!path[s]) continue;
        std::set<std::size_t> reach;
        std::deque<std::size_t> queue{s};
        bool exit = false, cycle = false;
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            for (const auto& e : l.edges) {
                if (e.from != u) continue;
                if (visible(e.label)) {
                    exit = true;
                    continue;
                }
                if (e.to == s) cycle = true;
                if (reach.insert(e.to).second) queue.push_back(e.to);
            }
        }
        if (cycle && !exit) out.push_back(*path[s]);
    }
    return out;
}

}  // namespace oracle
