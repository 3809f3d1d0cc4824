#pragma once

#include "dzn/ast.hpp"
#include "dzn/semantics.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dzn::lts {

constexpr std::size_t default_bound = 1'000'000;

struct Edge {
    std::size_t from = 0;
    std::string label;
    std::size_t to = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Lts {
    std::size_t states = 1;
    std::size_t initial = 0;
    std::vector<Edge> edges;
    std::set<std::string> alphabet;  // visible labels; tau is never a member

    std::size_t add_state() { return states++; }
    void add_edge(std::size_t from, std::string label, std::size_t to);

    /// Edge indices leaving each state, in edge order.
    std::vector<std::vector<std::size_t>> out_edges() const;
};

bool is_tau(std::string_view label);

struct Failure {
    std::vector<std::string> trace;
    std::set<std::string> refusal;

    friend bool operator==(const Failure&, const Failure&) = default;
    friend auto operator<=>(const Failure&, const Failure&) = default;
};

class BoundExceeded : public std::runtime_error {
public:
    explicit BoundExceeded(std::size_t bound)
        : std::runtime_error("exploration bound of " + std::to_string(bound) + " states exceeded"), bound(bound) {}
    std::size_t bound;
};

// Exploration

struct EdgeInfo {
    bool failure = false;    // illegal or range_error self-loop
    bool violating = false;  // part of a client call the provides contract forbids
    std::string offending;   // label completing the counterexample trace
    SourceLoc loc;
};

struct UnhandledSite {
    std::size_t state = 0;
    std::string label;
    SourceLoc loc;
};

struct Exploration {
    std::string subject;
    Lts lts;
    std::vector<EdgeInfo> info;                // parallel to lts.edges
    std::vector<bool> at_rest;                 // state lies between run-to-completion steps
    std::vector<semantics::State> configs;     // meaningful for states at rest
    std::vector<UnhandledSite> unhandled;
};

struct ExploreOptions {
    std::size_t bound = default_bound;
    std::set<std::string> open_ports;
};

/// Breadth-first exploration of an interface, or of a component with its port interfaces.
Exploration explore(const Model& model, std::string_view subject, const ExploreOptions& options = {});

Lts explore(const InterfaceDef& def, const Model& model, std::size_t bound = default_bound);
Lts explore_component(const ComponentDef& def, const Model& model, std::size_t bound = default_bound);

// Transformations

/// Keeps the selected edges and the states still reachable from the initial state.
struct Restriction {
    Lts lts;
    std::vector<std::size_t> edge_origin;   // new edge -> original edge
    std::vector<std::size_t> state_origin;  // new state -> original state
};
Restriction restrict(const Lts& l, const std::vector<bool>& keep_edge);

/// Drops failure edges (and violating edges when asked) and unreachable states.
Restriction strip(const Exploration& e, bool drop_violating = true);

Lts compose(const Lts& a, const Lts& b, const std::set<std::string>& sync);
Lts project(const Lts& l, const std::set<std::string>& keep);
Lts rename(const Lts& l, const std::function<std::string(const std::string&)>& f);
/// Relabels "from.<rest>" to "to.<rest>"; with an empty from, prefixes every visible label.
Lts rename_port(const Lts& l, std::string_view from, std::string_view to);

// Analysis helpers

struct Paths {
    std::vector<long> parent_edge;  // -1 for the initial and unreachable states
    std::vector<bool> reached;
};
Paths shortest_paths(const Lts& l);
std::vector<std::size_t> path_edges(const Lts& l, const Paths& p, std::size_t state);
std::vector<std::string> trace_to(const Lts& l, const Paths& p, std::size_t state, bool visible_only = true);

std::set<std::string> initials(const Lts& l, const std::vector<std::vector<std::size_t>>& out, std::size_t state);
std::set<std::size_t> tau_closure(const Lts& l, const std::vector<std::vector<std::size_t>>& out, std::set<std::size_t> states);

/// Tau-SCCs with a cycle from which no visible edge can be reached.
struct Divergence {
    std::vector<std::size_t> states;
    std::size_t entry = 0;  // member closest to the initial state
};
std::vector<Divergence> divergences(const Lts& l);

// Normalisation and comparison

struct NormalizedLts {
    std::vector<std::set<std::size_t>> nodes;
    std::size_t initial = 0;
    std::vector<std::map<std::string, std::size_t>> next;
    std::vector<std::vector<std::set<std::string>>> acceptances;
};

class Divergent : public std::runtime_error {
public:
    explicit Divergent(std::vector<std::string> trace)
        : std::runtime_error("reference LTS diverges"), trace(std::move(trace)) {}
    std::vector<std::string> trace;
};

NormalizedLts normalize(const Lts& spec);

struct TraceVerdict {
    bool equal = true;
    std::vector<std::string> trace;  // shortest trace in exactly one of the two
    int only_in = 0;                 // 1 or 2
};
TraceVerdict trace_equivalent(const Lts& a, const Lts& b);

// Aldebaran interchange

class AutParseError : public std::runtime_error {
public:
    AutParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

std::string write_aut(const Lts& l);
Lts read_aut(std::string_view text);

/// Canonical breadth-first renumbering; equal results mean isomorphic up to that numbering.
Lts canonical(const Lts& l);
bool isomorphic(const Lts& a, const Lts& b);

}  // namespace dzn::lts
