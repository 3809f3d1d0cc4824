#include "dzn/lts.hpp"

#include <algorithm>
#include <deque>

namespace dzn::lts {

namespace {

std::vector<std::set<std::string>> minimal(std::vector<std::set<std::string>> sets) {
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    std::vector<std::set<std::string>> out;
    for (const auto& s : sets) {
        bool dominated = false;
        for (const auto& m : out) {
            if (std::includes(s.begin(), s.end(), m.begin(), m.end())) dominated = true;
        }
        if (!dominated) out.push_back(s);
    }
    return out;
}

bool stable(const Lts& l, const std::vector<std::vector<std::size_t>>& out, std::size_t s) {
    for (std::size_t e : out[s]) {
        if (is_tau(l.edges[e].label)) return false;
    }
    return true;
}

}  // namespace

NormalizedLts normalize(const Lts& spec) {
    auto div = divergences(spec);
    if (!div.empty()) throw Divergent(trace_to(spec, shortest_paths(spec), div.front().entry));

    auto out = spec.out_edges();
    NormalizedLts n;
    std::map<std::set<std::size_t>, std::size_t> ids;
    std::deque<std::size_t> queue;
    auto id = [&](std::set<std::size_t> states) {
        auto [it, fresh] = ids.try_emplace(states, n.nodes.size());
        if (fresh) {
            n.nodes.push_back(std::move(states));
            n.next.emplace_back();
            n.acceptances.emplace_back();
            queue.push_back(it->second);
        }
        return it->second;
    };
    n.initial = id(tau_closure(spec, out, {spec.initial}));
    while (!queue.empty()) {
        std::size_t node = queue.front();
        queue.pop_front();
        std::map<std::string, std::set<std::size_t>> succ;
        std::vector<std::set<std::string>> accept;
        for (std::size_t s : n.nodes[node]) {
            for (std::size_t e : out[s]) {
                if (!is_tau(spec.edges[e].label)) succ[spec.edges[e].label].insert(spec.edges[e].to);
            }
            if (stable(spec, out, s)) accept.push_back(initials(spec, out, s));
        }
        n.acceptances[node] = minimal(std::move(accept));
        for (auto& [label, targets] : succ) {
            std::size_t t = id(tau_closure(spec, out, std::move(targets)));
            n.next[node][label] = t;
        }
    }
    return n;
}

TraceVerdict trace_equivalent(const Lts& a, const Lts& b) {
    auto aout = a.out_edges();
    auto bout = b.out_edges();
    using Pair = std::pair<std::set<std::size_t>, std::set<std::size_t>>;
    std::map<Pair, std::size_t> seen;
    std::vector<Pair> nodes;
    std::vector<std::pair<long, std::string>> parent;
    std::deque<std::size_t> queue;
    auto visit = [&](Pair p, long from, const std::string& label) {
        auto [it, fresh] = seen.try_emplace(p, nodes.size());
        if (fresh) {
            nodes.push_back(std::move(p));
            parent.push_back({from, label});
            queue.push_back(it->second);
        }
        return it->second;
    };
    auto trace_of = [&](std::size_t node, const std::string& last) {
        std::vector<std::string> rev{last};
        for (long k = static_cast<long>(node); parent[k].first >= 0; k = parent[k].first) rev.push_back(parent[k].second);
        return std::vector<std::string>(rev.rbegin(), rev.rend());
    };
    visit({tau_closure(a, aout, {a.initial}), tau_closure(b, bout, {b.initial})}, -1, {});
    while (!queue.empty()) {
        std::size_t node = queue.front();
        queue.pop_front();
        std::map<std::string, std::pair<std::set<std::size_t>, std::set<std::size_t>>> succ;
        for (std::size_t s : nodes[node].first) {
            for (std::size_t e : aout[s]) {
                if (!is_tau(a.edges[e].label)) succ[a.edges[e].label].first.insert(a.edges[e].to);
            }
        }
        for (std::size_t s : nodes[node].second) {
            for (std::size_t e : bout[s]) {
                if (!is_tau(b.edges[e].label)) succ[b.edges[e].label].second.insert(b.edges[e].to);
            }
        }
        for (auto& [label, targets] : succ) {
            if (targets.first.empty() || targets.second.empty()) {
                return {false, trace_of(node, label), targets.first.empty() ? 2 : 1};
            }
            visit({tau_closure(a, aout, targets.first), tau_closure(b, bout, targets.second)}, static_cast<long>(node), label);
        }
    }
    return {};
}

}  // namespace dzn::lts
