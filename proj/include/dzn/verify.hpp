#pragma once

#include "dzn/ast.hpp"
#include "dzn/diagnostic.hpp"
#include "dzn/lts.hpp"

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dzn::verify {

struct Verdict {
    bool ok = true;
    std::vector<Diagnostic> diagnostics;

    void add(Diagnostic d);
    void add(std::vector<Diagnostic> ds);
};

/// Kind, subject, trace length, then trace and detail.
void sort_diagnostics(std::vector<Diagnostic>& ds);

// Checks on a single LTS

/// States without an outgoing edge other than failure self-loops. With at_rest, states
/// in the middle of a step are skipped.
std::vector<Diagnostic> check_deadlock(const lts::Lts& l, const std::string& subject = {},
                                       const std::vector<bool>* at_rest = nullptr);

/// Tau-SCCs that cannot reach a visible edge.
std::vector<Diagnostic> check_livelock(const lts::Lts& l, const std::string& subject = {});

/// One diagnostic per (state, failure label), trace ending at the state.
std::vector<Diagnostic> check_illegal_and_range(const lts::Lts& l, const std::string& subject = {});

class LivelockGateSkipped : public std::logic_error {
public:
    explicit LivelockGateSkipped(std::vector<std::string> trace)
        : std::logic_error("implementation diverges; run check_livelock first"), trace(std::move(trace)) {}
    std::vector<std::string> trace;
};

struct RefinementResult {
    bool ok = true;
    DiagnosticKind kind = DiagnosticKind::RefinementTrace;
    std::vector<std::string> trace;    // visible labels; for trace violations ends with offending
    std::string offending;             // label the interface does not allow
    std::set<std::string> refusal;     // failure violations
    std::vector<std::size_t> impl_path;  // impl edges of the counterexample, offending edge included
};

/// Stable-failures refinement, impl against spec. Refusals are only measured where
/// measured[s] holds (all stable states when null). Throws lts::Divergent or
/// LivelockGateSkipped on divergent inputs.
RefinementResult refine(const lts::Lts& impl, const lts::Lts& spec, const std::vector<bool>* measured = nullptr);

Verdict check_refinement(const lts::Lts& impl, const lts::Lts& spec, const std::string& subject = {});

// Orchestration

struct VerifyOptions {
    std::size_t bound = lts::default_bound;
};

Verdict verify_interface(std::string_view name, const Model& model, const VerifyOptions& options = {});
Verdict verify_component(std::string_view name, const Model& model, const VerifyOptions& options = {});
/// Every component type instantiated in the system, nested systems included.
Verdict verify_system(std::string_view name, const Model& model, const VerifyOptions& options = {});
/// Dispatches on the kind of definition; throws std::invalid_argument for unknown names.
Verdict verify(std::string_view name, const Model& model, const VerifyOptions& options = {});
/// Every definition in source order.
Verdict verify_all(const Model& model, const VerifyOptions& options = {});

/// Per-provides-port refinement of an explored component against its port interfaces,
/// preceded by the livelock gate on each projection.
std::vector<Diagnostic> check_port_refinements(const lts::Exploration& e, const Model& model,
                                               const VerifyOptions& options = {});

// Compositionality harness

struct CompositionVerdict {
    Verdict upper;       // (C || J) restricted to I refines I
    Verdict lower;       // (D || K) restricted to J refines J
    Verdict consequent;  // (C || D || K) restricted to I refines I
    std::string provides;  // C's provides port
    std::string link;      // C's requires port bound to D

    bool implication_holds() const { return !(upper.ok && lower.ok) || consequent.ok; }
    bool all_hold() const { return upper.ok && lower.ok && consequent.ok; }
};

/// Throws std::invalid_argument when C has no requires port of the interface D provides.
CompositionVerdict check_composition_theorem(const ComponentDef& c, const ComponentDef& d, const Model& model,
                                             const VerifyOptions& options = {});

// Reports

/// "ok: name" or one report line per diagnostic, newline terminated.
std::string format_report(const Verdict& v, std::string_view subject);
std::string report_json(const Verdict& v, std::string_view subject);

}  // namespace dzn::verify
