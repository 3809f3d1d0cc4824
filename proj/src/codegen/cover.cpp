#include "dzn/codegen.hpp"

#include <deque>
#include <optional>

namespace dzn::codegen {

namespace {

// Shortest path (edge ids) from `from` to the nearest state satisfying goal.
template <typename Goal>
std::optional<std::vector<std::size_t>> path_to(const lts::Lts& l, const std::vector<std::vector<std::size_t>>& out, std::size_t from,
                                                Goal goal) {
    std::vector<long> parent(l.states, -1);
    std::vector<bool> seen(l.states, false);
    std::deque<std::size_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
        std::size_t s = queue.front();
        queue.pop_front();
        if (goal(s)) {
            std::vector<std::size_t> path;
            for (std::size_t t = s; t != from;) {
                auto e = static_cast<std::size_t>(parent[t]);
                path.push_back(e);
                t = l.edges[e].from;
            }
            return std::vector<std::size_t>(path.rbegin(), path.rend());
        }
        for (std::size_t e : out[s]) {
            std::size_t t = l.edges[e].to;
            if (!seen[t]) {
                seen[t] = true;
                parent[t] = static_cast<long>(e);
                queue.push_back(t);
            }
        }
    }
    return std::nullopt;
}

}  // namespace

TraceSuite trace_cover(const lts::Lts& l, const std::vector<bool>* at_rest) {
    TraceSuite suite;
    if (l.edges.empty()) return suite;
    auto out = l.out_edges();
    std::vector<bool> visited(l.edges.size(), false);
    std::size_t left = l.edges.size();

    auto has_unvisited = [&](std::size_t s) {
        for (std::size_t e : out[s]) {
            if (!visited[e]) return true;
        }
        return false;
    };

    while (left > 0) {
        std::vector<std::size_t> path;
        std::size_t cur = l.initial;
        auto take = [&](std::size_t e) {
            path.push_back(e);
            if (!visited[e]) {
                visited[e] = true;
                --left;
            }
            cur = l.edges[e].to;
        };
        while (left > 0) {
            std::optional<std::size_t> next;
            for (std::size_t e : out[cur]) {
                if (!visited[e]) {
                    next = e;
                    break;
                }
            }
            if (next) {
                take(*next);
                continue;
            }
            auto splice = path_to(l, out, cur, has_unvisited);
            if (!splice) break;
            for (std::size_t e : *splice) take(e);
        }
        if (at_rest && !(*at_rest)[cur]) {
            if (auto home = path_to(l, out, cur, [&](std::size_t s) { return static_cast<bool>((*at_rest)[s]); })) {
                for (std::size_t e : *home) take(e);
            }
        }
        if (path.empty()) break;  // unreachable edges remain
        std::vector<std::string> trace;
        for (std::size_t e : path) {
            if (!lts::is_tau(l.edges[e].label)) trace.push_back(l.edges[e].label);
            suite.covered_edges.insert(e);
        }
        suite.traces.push_back(std::move(trace));
        suite.paths.push_back(std::move(path));
    }
    return suite;
}

}  // namespace dzn::codegen
