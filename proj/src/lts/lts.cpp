#include "dzn/lts.hpp"

#include <algorithm>
#include <deque>

namespace dzn::lts {

bool is_tau(std::string_view label) { return label == semantics::tau_label; }

void Lts::add_edge(std::size_t from, std::string label, std::size_t to) {
    if (from >= states || to >= states) throw std::out_of_range("edge endpoint outside the state range");
    if (!is_tau(label)) alphabet.insert(label);
    edges.push_back({from, std::move(label), to});
}

std::vector<std::vector<std::size_t>> Lts::out_edges() const {
    std::vector<std::vector<std::size_t>> out(states);
    for (std::size_t i = 0; i < edges.size(); ++i) out[edges[i].from].push_back(i);
    return out;
}

Restriction restrict(const Lts& l, const std::vector<bool>& keep_edge) {
    auto out = l.out_edges();
    Restriction r;
    std::vector<long> id(l.states, -1);
    std::deque<std::size_t> queue{l.initial};
    id[l.initial] = 0;
    r.state_origin.push_back(l.initial);
    while (!queue.empty()) {
        std::size_t s = queue.front();
        queue.pop_front();
        for (std::size_t e : out[s]) {
            if (!keep_edge[e]) continue;
            std::size_t t = l.edges[e].to;
            if (id[t] < 0) {
                id[t] = static_cast<long>(r.state_origin.size());
                r.state_origin.push_back(t);
                queue.push_back(t);
            }
        }
    }
    r.lts.states = r.state_origin.size();
    r.lts.initial = 0;
    for (std::size_t e = 0; e < l.edges.size(); ++e) {
        const Edge& edge = l.edges[e];
        if (!keep_edge[e] || id[edge.from] < 0) continue;
        r.lts.add_edge(static_cast<std::size_t>(id[edge.from]), edge.label, static_cast<std::size_t>(id[edge.to]));
        r.edge_origin.push_back(e);
    }
    r.lts.alphabet.insert(l.alphabet.begin(), l.alphabet.end());
    return r;
}

Restriction strip(const Exploration& e, bool drop_violating) {
    std::vector<bool> keep(e.lts.edges.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        keep[i] = !e.info[i].failure && !(drop_violating && e.info[i].violating);
    }
    Restriction r = restrict(e.lts, keep);
    std::erase_if(r.lts.alphabet, [](const std::string& a) { return semantics::is_failure_label(a); });
    return r;
}

Lts compose(const Lts& a, const Lts& b, const std::set<std::string>& sync) {
    auto aout = a.out_edges();
    auto bout = b.out_edges();
    Lts r;
    r.states = 0;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
    std::deque<std::pair<std::size_t, std::size_t>> queue;
    auto id = [&](std::size_t x, std::size_t y) {
        auto [it, fresh] = ids.try_emplace({x, y}, r.states);
        if (fresh) {
            r.add_state();
            queue.push_back({x, y});
        }
        return it->second;
    };
    r.initial = id(a.initial, b.initial);
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        std::size_t from = ids.at({x, y});
        for (std::size_t e : aout[x]) {
            const Edge& ea = a.edges[e];
            if (!is_tau(ea.label) && sync.count(ea.label)) {
                for (std::size_t f : bout[y]) {
                    const Edge& eb = b.edges[f];
                    if (eb.label == ea.label) r.add_edge(from, ea.label, id(ea.to, eb.to));
                }
            } else {
                r.add_edge(from, ea.label, id(ea.to, y));
            }
        }
        for (std::size_t f : bout[y]) {
            const Edge& eb = b.edges[f];
            if (!is_tau(eb.label) && sync.count(eb.label)) continue;
            r.add_edge(from, eb.label, id(x, eb.to));
        }
    }
    r.alphabet.insert(a.alphabet.begin(), a.alphabet.end());
    r.alphabet.insert(b.alphabet.begin(), b.alphabet.end());
    return r;
}

Lts project(const Lts& l, const std::set<std::string>& keep) {
    Lts r;
    r.states = l.states;
    r.initial = l.initial;
    for (const auto& e : l.edges) {
        r.edges.push_back({e.from, keep.count(e.label) ? e.label : semantics::tau_label, e.to});
    }
    for (const auto& k : keep) {
        if (!is_tau(k)) r.alphabet.insert(k);
    }
    return r;
}

Lts rename(const Lts& l, const std::function<std::string(const std::string&)>& f) {
    Lts r;
    r.states = l.states;
    r.initial = l.initial;
    for (const auto& e : l.edges) r.add_edge(e.from, is_tau(e.label) ? e.label : f(e.label), e.to);
    for (const auto& a : l.alphabet) r.alphabet.insert(f(a));
    return r;
}

Lts rename_port(const Lts& l, std::string_view from, std::string_view to) {
    std::string prefix = from.empty() ? std::string() : std::string(from) + ".";
    std::string target = std::string(to) + ".";
    return rename(l, [&](const std::string& label) {
        if (semantics::is_failure_label(label)) return label;
        if (prefix.empty()) return target + label;
        if (label.starts_with(prefix)) return target + label.substr(prefix.size());
        return label;
    });
}

Paths shortest_paths(const Lts& l) {
    auto out = l.out_edges();
    Paths p;
    p.parent_edge.assign(l.states, -1);
    p.reached.assign(l.states, false);
    std::deque<std::size_t> queue{l.initial};
    p.reached[l.initial] = true;
    while (!queue.empty()) {
        std::size_t s = queue.front();
        queue.pop_front();
        for (std::size_t e : out[s]) {
            std::size_t t = l.edges[e].to;
            if (p.reached[t]) continue;
            p.reached[t] = true;
            p.parent_edge[t] = static_cast<long>(e);
            queue.push_back(t);
        }
    }
    return p;
}

std::vector<std::size_t> path_edges(const Lts& l, const Paths& p, std::size_t state) {
    std::vector<std::size_t> rev;
    std::size_t s = state;
    while (p.parent_edge.at(s) >= 0) {
        auto e = static_cast<std::size_t>(p.parent_edge[s]);
        rev.push_back(e);
        s = l.edges[e].from;
    }
    return {rev.rbegin(), rev.rend()};
}

std::vector<std::string> trace_to(const Lts& l, const Paths& p, std::size_t state, bool visible_only) {
    std::vector<std::string> rev;
    std::size_t s = state;
    while (p.parent_edge.at(s) >= 0) {
        const Edge& e = l.edges[static_cast<std::size_t>(p.parent_edge[s])];
        if (!visible_only || !is_tau(e.label)) rev.push_back(e.label);
        s = e.from;
    }
    return {rev.rbegin(), rev.rend()};
}

std::set<std::string> initials(const Lts& l, const std::vector<std::vector<std::size_t>>& out, std::size_t state) {
    std::set<std::string> s;
    for (std::size_t e : out[state]) {
        if (!is_tau(l.edges[e].label)) s.insert(l.edges[e].label);
    }
    return s;
}

std::set<std::size_t> tau_closure(const Lts& l, const std::vector<std::vector<std::size_t>>& out, std::set<std::size_t> states) {
    std::vector<std::size_t> stack(states.begin(), states.end());
    while (!stack.empty()) {
        std::size_t s = stack.back();
        stack.pop_back();
        for (std::size_t e : out[s]) {
            if (is_tau(l.edges[e].label) && states.insert(l.edges[e].to).second) stack.push_back(l.edges[e].to);
        }
    }
    return states;
}

std::vector<Divergence> divergences(const Lts& l) {
    auto out = l.out_edges();
    // iterative Tarjan over the tau subgraph
    std::vector<long> index(l.states, -1), low(l.states, 0), comp(l.states, -1);
    std::vector<bool> on_stack(l.states, false);
    std::vector<std::size_t> stack;
    long counter = 0, ncomp = 0;
    for (std::size_t root = 0; root < l.states; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i < out[v].size()) {
                const Edge& e = l.edges[out[v][i++]];
                if (!is_tau(e.label)) continue;
                std::size_t w = e.to;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::size_t done = v;
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                } while (w != done);
                ++ncomp;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }

    // states that can reach a visible edge through taus
    std::vector<bool> escapes(l.states, false);
    std::vector<std::vector<std::size_t>> tau_in(l.states);
    std::vector<std::size_t> work;
    for (const auto& e : l.edges) {
        if (is_tau(e.label)) {
            tau_in[e.to].push_back(e.from);
        } else if (!escapes[e.from]) {
            escapes[e.from] = true;
            work.push_back(e.from);
        }
    }
    while (!work.empty()) {
        std::size_t s = work.back();
        work.pop_back();
        for (std::size_t p : tau_in[s]) {
            if (!escapes[p]) {
                escapes[p] = true;
                work.push_back(p);
            }
        }
    }

    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(ncomp));
    for (std::size_t v = 0; v < l.states; ++v) members[static_cast<std::size_t>(comp[v])].push_back(v);
    std::vector<bool> cyclic(static_cast<std::size_t>(ncomp), false);
    for (const auto& e : l.edges) {
        if (is_tau(e.label) && comp[e.from] == comp[e.to]) cyclic[static_cast<std::size_t>(comp[e.from])] = true;
    }

    Paths paths = shortest_paths(l);
    std::vector<std::size_t> depth(l.states, 0);
    {
        // BFS depth for picking the entry state
        std::deque<std::size_t> q{l.initial};
        std::vector<bool> seen(l.states, false);
        seen[l.initial] = true;
        while (!q.empty()) {
            std::size_t s = q.front();
            q.pop_front();
            for (std::size_t e : out[s]) {
                std::size_t t = l.edges[e].to;
                if (!seen[t]) {
                    seen[t] = true;
                    depth[t] = depth[s] + 1;
                    q.push_back(t);
                }
            }
        }
    }

    std::vector<Divergence> result;
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (!cyclic[c] || escapes[members[c].front()]) continue;
        Divergence d;
        d.states = members[c];
        bool found = false;
        for (std::size_t s : d.states) {
            if (!paths.reached[s]) continue;
            if (!found || depth[s] < depth[d.entry]) {
                d.entry = s;
                found = true;
            }
        }
        if (found) result.push_back(std::move(d));
    }
    std::sort(result.begin(), result.end(), [&](const Divergence& a, const Divergence& b) {
        return depth[a.entry] != depth[b.entry] ? depth[a.entry] < depth[b.entry] : a.entry < b.entry;
    });
    return result;
}

}  // namespace dzn::lts
