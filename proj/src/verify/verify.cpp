#include "dzn/verify.hpp"

#include "dzn/semantics.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace dzn::verify {

namespace {

std::string join_set(const std::set<std::string>& s) {
    std::string out;
    for (const auto& x : s) out += (out.empty() ? "" : ", ") + x;
    return "{" + out + "}";
}

std::vector<std::string> labels_of(const lts::Lts& l, const std::vector<std::size_t>& path) {
    std::vector<std::string> out;
    for (std::size_t e : path) {
        if (!lts::is_tau(l.edges[e].label)) out.push_back(l.edges[e].label);
    }
    return out;
}

bool is_failure_edge(const lts::Edge& e) { return semantics::is_failure_label(e.label); }

std::vector<std::size_t> stuck_states(const lts::Lts& l, const lts::Paths& paths, const std::vector<bool>* at_rest) {
    auto out = l.out_edges();
    std::vector<std::size_t> result;
    for (std::size_t s = 0; s < l.states; ++s) {
        if (!paths.reached[s]) continue;
        if (at_rest && !(*at_rest)[s]) continue;
        bool moves = std::any_of(out[s].begin(), out[s].end(), [&](std::size_t e) { return !is_failure_edge(l.edges[e]); });
        if (!moves) result.push_back(s);
    }
    return result;
}

}  // namespace

void Verdict::add(Diagnostic d) {
    diagnostics.push_back(std::move(d));
    ok = false;
}

void Verdict::add(std::vector<Diagnostic> ds) {
    for (auto& d : ds) add(std::move(d));
}

void sort_diagnostics(std::vector<Diagnostic>& ds) {
    std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::forward_as_tuple(a.kind, a.subject, a.trace.size(), a.trace, a.detail, a.locs) <
               std::forward_as_tuple(b.kind, b.subject, b.trace.size(), b.trace, b.detail, b.locs);
    });
}

std::vector<Diagnostic> check_deadlock(const lts::Lts& l, const std::string& subject, const std::vector<bool>* at_rest) {
    auto paths = lts::shortest_paths(l);
    std::vector<Diagnostic> out;
    for (std::size_t s : stuck_states(l, paths, at_rest)) {
        out.push_back({DiagnosticKind::Deadlock, subject, lts::trace_to(l, paths, s), "no event possible", {}, {}});
    }
    return out;
}

std::vector<Diagnostic> check_livelock(const lts::Lts& l, const std::string& subject) {
    auto paths = lts::shortest_paths(l);
    std::vector<Diagnostic> out;
    for (const auto& d : lts::divergences(l)) {
        out.push_back({DiagnosticKind::Livelock, subject, lts::trace_to(l, paths, d.entry), "internal cycle without exit", {}, {}});
    }
    return out;
}

std::vector<Diagnostic> check_illegal_and_range(const lts::Lts& l, const std::string& subject) {
    auto paths = lts::shortest_paths(l);
    std::set<std::pair<std::size_t, std::string>> seen;
    std::vector<Diagnostic> out;
    for (const auto& e : l.edges) {
        if (!is_failure_edge(e) || !paths.reached[e.from]) continue;
        if (!seen.insert({e.from, e.label}).second) continue;
        bool illegal = e.label == semantics::illegal_label;
        out.push_back({illegal ? DiagnosticKind::Illegal : DiagnosticKind::RangeError, subject, lts::trace_to(l, paths, e.from),
                       illegal ? std::string() : e.label, {}, {}});
    }
    return out;
}

RefinementResult refine(const lts::Lts& impl, const lts::Lts& spec, const std::vector<bool>* measured) {
    lts::NormalizedLts norm = lts::normalize(spec);
    auto divs = lts::divergences(impl);
    if (!divs.empty()) {
        throw LivelockGateSkipped(lts::trace_to(impl, lts::shortest_paths(impl), divs.front().entry));
    }
    auto out = impl.out_edges();

    struct Node {
        std::size_t state, spec;
        long parent;
        long edge;
    };
    std::vector<Node> nodes;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
    std::deque<std::size_t> queue;
    auto visit = [&](std::size_t s, std::size_t n, long parent, long edge) {
        if (ids.try_emplace({s, n}, nodes.size()).second) {
            nodes.push_back({s, n, parent, edge});
            queue.push_back(nodes.size() - 1);
        }
    };
    auto path_to = [&](std::size_t node) {
        std::vector<std::size_t> rev;
        for (long i = static_cast<long>(node); nodes[static_cast<std::size_t>(i)].parent >= 0; i = nodes[static_cast<std::size_t>(i)].parent) {
            rev.push_back(static_cast<std::size_t>(nodes[static_cast<std::size_t>(i)].edge));
        }
        return std::vector<std::size_t>(rev.rbegin(), rev.rend());
    };

    visit(impl.initial, norm.initial, -1, -1);
    while (!queue.empty()) {
        std::size_t k = queue.front();
        queue.pop_front();
        std::size_t s = nodes[k].state, n = nodes[k].spec;
        bool stable = std::none_of(out[s].begin(), out[s].end(), [&](std::size_t e) { return lts::is_tau(impl.edges[e].label); });
        if (stable && (!measured || (*measured)[s])) {
            auto init = lts::initials(impl, out, s);
            const auto& acc = norm.acceptances[n];
            bool covered = std::any_of(acc.begin(), acc.end(), [&](const std::set<std::string>& a) {
                return std::includes(init.begin(), init.end(), a.begin(), a.end());
            });
            if (!covered) {
                RefinementResult r;
                r.ok = false;
                r.kind = DiagnosticKind::RefinementFailure;
                for (const auto& a : acc) {
                    for (const auto& x : a) {
                        if (!init.count(x)) r.refusal.insert(x);
                    }
                }
                r.impl_path = path_to(k);
                r.trace = labels_of(impl, r.impl_path);
                return r;
            }
        }
        for (std::size_t e : out[s]) {
            const lts::Edge& edge = impl.edges[e];
            if (lts::is_tau(edge.label)) {
                visit(edge.to, n, static_cast<long>(k), static_cast<long>(e));
                continue;
            }
            auto it = norm.next[n].find(edge.label);
            if (it == norm.next[n].end()) {
                RefinementResult r;
                r.ok = false;
                r.kind = DiagnosticKind::RefinementTrace;
                r.impl_path = path_to(k);
                r.impl_path.push_back(e);
                r.trace = labels_of(impl, r.impl_path);
                r.offending = edge.label;
                return r;
            }
            visit(edge.to, it->second, static_cast<long>(k), static_cast<long>(e));
        }
    }
    return {};
}

Verdict check_refinement(const lts::Lts& impl, const lts::Lts& spec, const std::string& subject) {
    Verdict v;
    RefinementResult r = refine(impl, spec);
    if (r.ok) return v;
    Diagnostic d{r.kind, subject, r.trace, {}, {}, r.refusal};
    d.detail = r.kind == DiagnosticKind::RefinementFailure ? "refuses " + join_set(r.refusal) : r.offending + " not allowed";
    v.add(std::move(d));
    return v;
}

// Orchestration

namespace {

SourceLoc last_loc(const lts::Exploration& e, const std::vector<std::size_t>& full_path, const SourceLoc& fallback) {
    for (auto it = full_path.rbegin(); it != full_path.rend(); ++it) {
        const SourceLoc& loc = e.info[*it].loc;
        if (!loc.file.empty()) return loc;
    }
    return fallback;
}

std::vector<std::size_t> to_origin(const lts::Restriction& r, const std::vector<std::size_t>& path) {
    std::vector<std::size_t> out;
    out.reserve(path.size());
    for (std::size_t e : path) out.push_back(r.edge_origin[e]);
    return out;
}

// Deadlock, illegal, range and unhandled from one exploration.
std::vector<Diagnostic> check_exploration(const lts::Exploration& e, bool interface, const SourceLoc& def_loc) {
    std::vector<Diagnostic> out;

    // a state whose own step failed is reported as that failure, not as a deadlock
    std::vector<bool> failed(e.lts.states, false);
    for (std::size_t i = 0; i < e.lts.edges.size(); ++i) {
        if (e.info[i].failure && !(interface && e.lts.edges[i].label == semantics::illegal_label)) failed[e.lts.edges[i].from] = true;
    }
    lts::Restriction stripped = lts::strip(e);
    std::vector<bool> rest(stripped.lts.states);
    for (std::size_t s = 0; s < rest.size(); ++s) {
        std::size_t o = stripped.state_origin[s];
        rest[s] = e.at_rest[o] && !failed[o];
    }
    auto spaths = lts::shortest_paths(stripped.lts);
    for (std::size_t s : stuck_states(stripped.lts, spaths, &rest)) {
        auto path = lts::path_edges(stripped.lts, spaths, s);
        out.push_back({DiagnosticKind::Deadlock, e.subject, labels_of(stripped.lts, path), "no event possible",
                       {last_loc(e, to_origin(stripped, path), def_loc)}, {}});
    }

    const lts::Lts& full = e.lts;
    auto paths = lts::shortest_paths(full);
    std::set<std::tuple<std::size_t, std::string, std::string>> seen;
    for (std::size_t i = 0; i < full.edges.size(); ++i) {
        const lts::EdgeInfo& info = e.info[i];
        const lts::Edge& edge = full.edges[i];
        if (!info.failure || !paths.reached[edge.from]) continue;
        bool illegal = edge.label == semantics::illegal_label;
        if (illegal && interface) continue;  // the contract's own illegal clauses
        if (!seen.insert({edge.from, edge.label, info.offending}).second) continue;
        Diagnostic d{illegal ? DiagnosticKind::Illegal : DiagnosticKind::RangeError, e.subject,
                     labels_of(full, lts::path_edges(full, paths, edge.from)), illegal ? std::string() : edge.label,
                     {info.loc.file.empty() ? def_loc : info.loc}, {}};
        if (!info.offending.empty()) d.trace.push_back(info.offending);
        out.push_back(std::move(d));
    }

    for (const auto& u : e.unhandled) {
        if (!paths.reached[u.state]) continue;
        Diagnostic d{DiagnosticKind::Unhandled, e.subject, labels_of(full, lts::path_edges(full, paths, u.state)),
                     "no handler for " + u.label, {u.loc.file.empty() ? def_loc : u.loc}, {}};
        d.trace.push_back(u.label);
        out.push_back(std::move(d));
    }
    return out;
}

lts::Lts interface_spec(const Model& model, const std::string& name, std::size_t bound) {
    lts::ExploreOptions o;
    o.bound = bound;
    auto e = lts::explore(model, name, o);
    return lts::strip(e).lts;
}

lts::Lts strip_prefix(const lts::Lts& l, const std::string& port) {
    std::string prefix = port + ".";
    return lts::rename(l, [&](const std::string& label) {
        return label.starts_with(prefix) ? label.substr(prefix.size()) : label;
    });
}

// Refinement of `impl` (full composite labels) restricted to one provides port.
std::vector<Diagnostic> port_refinement(const lts::Lts& impl, const std::vector<bool>* measured, const std::set<std::string>& alphabet,
                                        const std::string& port, const lts::Lts& spec, const std::string& subject,
                                        const std::string& interface, const SourceLoc& loc) {
    std::vector<Diagnostic> out;
    lts::Lts proj = lts::project(impl, alphabet);
    auto divs = lts::divergences(proj);
    if (!divs.empty()) {
        auto paths = lts::shortest_paths(proj);
        for (const auto& d : divs) {
            out.push_back({DiagnosticKind::Livelock, subject, labels_of(impl, lts::path_edges(proj, paths, d.entry)),
                           "internal cycle without exit on port " + port, {loc}, {}});
        }
        return out;
    }
    RefinementResult r;
    try {
        r = refine(strip_prefix(proj, port), spec, measured);
    } catch (const lts::Divergent& d) {
        out.push_back({DiagnosticKind::Livelock, interface, d.trace, "internal cycle without exit", {}, {}});
        return out;
    }
    if (r.ok) return out;
    // project and rename keep edge numbering, so the path indexes impl directly
    std::vector<std::string> trace;
    for (std::size_t e : r.impl_path) trace.push_back(impl.edges[e].label);
    std::string detail = r.kind == DiagnosticKind::RefinementFailure
                             ? "port " + port + " refuses " + join_set(r.refusal) + " against " + interface
                             : port + "." + r.offending + " not allowed by " + interface;
    out.push_back({r.kind, subject, std::move(trace), std::move(detail), {loc}, r.refusal});
    return out;
}

void finish(Verdict& v) {
    sort_diagnostics(v.diagnostics);
    v.ok = v.diagnostics.empty();
}

lts::ExploreOptions explore_options(const VerifyOptions& options) {
    lts::ExploreOptions o;
    o.bound = options.bound;
    return o;
}

void collect_components(const Model& model, const SystemDef& sys, std::vector<std::string>& out, std::set<std::string>& seen_systems) {
    if (!seen_systems.insert(sys.name).second) return;
    for (const auto& inst : sys.instances) {
        if (const SystemDef* nested = model.find_system(inst.component)) {
            collect_components(model, *nested, out, seen_systems);
        } else if (model.find_component(inst.component)) {
            if (std::find(out.begin(), out.end(), inst.component) == out.end()) out.push_back(inst.component);
        }
    }
}

}  // namespace

std::vector<Diagnostic> check_port_refinements(const lts::Exploration& e, const Model& model, const VerifyOptions& options) {
    const ComponentDef* c = model.find_component(e.subject);
    if (!c) throw std::invalid_argument("not a component: " + e.subject);
    semantics::Subject subject(model, e.subject);
    lts::Restriction stripped = lts::strip(e);
    std::vector<bool> rest(stripped.lts.states);
    for (std::size_t s = 0; s < rest.size(); ++s) rest[s] = e.at_rest[stripped.state_origin[s]];

    std::vector<Diagnostic> out;
    std::map<std::string, lts::Lts> specs;
    for (std::size_t i = 0; i < c->ports.size(); ++i) {
        const Port& p = c->ports[i];
        if (p.direction != PortDirection::Provides) continue;
        auto it = specs.find(p.interface);
        if (it == specs.end()) it = specs.emplace(p.interface, interface_spec(model, p.interface, options.bound)).first;
        auto ds = port_refinement(stripped.lts, &rest, subject.port_alphabet(static_cast<int>(i)), p.name, it->second, e.subject,
                                  p.interface, p.loc);
        out.insert(out.end(), ds.begin(), ds.end());
    }
    return out;
}

Verdict verify_interface(std::string_view name, const Model& model, const VerifyOptions& options) {
    const InterfaceDef* def = model.find_interface(name);
    if (!def) throw std::invalid_argument("unknown interface: " + std::string(name));
    auto e = lts::explore(model, name, explore_options(options));
    Verdict v;
    v.add(check_exploration(e, true, def->loc));
    v.add(check_livelock(lts::strip(e).lts, def->name));
    finish(v);
    return v;
}

Verdict verify_component(std::string_view name, const Model& model, const VerifyOptions& options) {
    const ComponentDef* def = model.find_component(name);
    if (!def) throw std::invalid_argument("unknown component: " + std::string(name));
    auto e = lts::explore(model, name, explore_options(options));
    Verdict v;
    v.add(check_exploration(e, false, def->loc));
    bool provides = std::any_of(def->ports.begin(), def->ports.end(), [](const Port& p) { return p.direction == PortDirection::Provides; });
    if (provides) {
        v.add(check_port_refinements(e, model, options));
    } else {
        for (auto d : check_livelock(lts::project(lts::strip(e).lts, {}), def->name)) {
            d.locs = {def->loc};
            v.add(std::move(d));
        }
    }
    finish(v);
    return v;
}

Verdict verify_system(std::string_view name, const Model& model, const VerifyOptions& options) {
    const SystemDef* def = model.find_system(name);
    if (!def) throw std::invalid_argument("unknown system: " + std::string(name));
    std::vector<std::string> components;
    std::set<std::string> seen;
    collect_components(model, *def, components, seen);
    Verdict v;
    for (const auto& c : components) v.add(verify_component(c, model, options).diagnostics);
    finish(v);
    return v;
}

Verdict verify(std::string_view name, const Model& model, const VerifyOptions& options) {
    if (model.find_interface(name)) return verify_interface(name, model, options);
    if (model.find_component(name)) return verify_component(name, model, options);
    if (model.find_system(name)) return verify_system(name, model, options);
    throw std::invalid_argument("unknown definition: " + std::string(name));
}

Verdict verify_all(const Model& model, const VerifyOptions& options) {
    Verdict v;
    for (const auto& ref : model.order) {
        if (ref.kind == DefinitionKind::System) continue;  // its components are verified on their own
        v.add(verify(model.name_of(ref), model, options).diagnostics);
    }
    finish(v);
    return v;
}

CompositionVerdict check_composition_theorem(const ComponentDef& c, const ComponentDef& d, const Model& model,
                                             const VerifyOptions& options) {
    auto provides = [](const ComponentDef& def) -> const Port* {
        for (const auto& p : def.ports) {
            if (p.direction == PortDirection::Provides) return &p;
        }
        return nullptr;
    };
    const Port* cp = provides(c);
    const Port* dp = provides(d);
    if (!cp || !dp) throw std::invalid_argument("interface chain mismatch: both components need a provides port");
    const Port* link = nullptr;
    for (const auto& p : c.ports) {
        if (p.direction == PortDirection::Requires && p.interface == dp->interface) {
            link = &p;
            break;
        }
    }
    if (!link) throw std::invalid_argument("interface chain mismatch: " + c.name + " requires no " + dp->interface);

    CompositionVerdict out;
    out.provides = cp->name;
    out.link = link->name;
    auto o = explore_options(options);

    auto ce = lts::explore(model, c.name, o);
    out.upper.add(check_port_refinements(ce, model, options));
    finish(out.upper);

    auto de = lts::explore(model, d.name, o);
    out.lower.add(check_port_refinements(de, model, options));
    finish(out.lower);

    // C with the linked port left to D, D renamed into C's naming
    lts::ExploreOptions open = o;
    open.open_ports = {link->name};
    auto copen = lts::explore(model, c.name, open);
    semantics::Subject csub(model, c.name, {{link->name}});
    int link_index = c.find_port(link->name);
    std::set<std::string> sync = csub.port_alphabet(link_index);

    std::string dprefix = dp->name + ".";
    lts::Lts dl = lts::rename(lts::strip(de).lts, [&](const std::string& label) {
        if (label.starts_with(dprefix)) return link->name + "." + label.substr(dprefix.size());
        return d.name + "." + label;
    });
    lts::Lts whole = lts::compose(lts::strip(copen).lts, dl, sync);

    lts::Lts spec = interface_spec(model, cp->interface, options.bound);
    out.consequent.add(port_refinement(whole, nullptr, csub.port_alphabet(c.find_port(cp->name)), cp->name, spec,
                                       c.name + "+" + d.name, cp->interface, cp->loc));
    finish(out.consequent);
    return out;
}

std::string format_report(const Verdict& v, std::string_view subject) {
    if (v.ok) return "ok: " + std::string(subject) + "\n";
    std::string out;
    for (const auto& d : v.diagnostics) out += format_report_line(d) + "\n";
    return out;
}

std::string report_json(const Verdict& v, std::string_view subject) {
    nlohmann::ordered_json j;
    j["subject"] = subject;
    j["ok"] = v.ok;
    j["verdict"] = v.ok ? "ok" : "violated";
    j["diagnostics"] = nlohmann::ordered_json::array();
    for (const auto& d : v.diagnostics) {
        nlohmann::ordered_json dj;
        dj["kind"] = kind_name(d.kind);
        dj["subject"] = d.subject;
        dj["trace"] = d.trace;
        dj["detail"] = d.detail;
        if (!d.refusal.empty()) dj["refusal"] = d.refusal;
        dj["locs"] = nlohmann::ordered_json::array();
        for (const auto& loc : d.locs) dj["locs"].push_back({{"file", loc.file}, {"line", loc.line}, {"col", loc.column}});
        j["diagnostics"].push_back(std::move(dj));
    }
    return j.dump(2) + "\n";
}

}  // namespace dzn::verify
