#pragma once

#include "dzn/ast.hpp"
#include "dzn/diagnostic.hpp"
#include "dzn/lts.hpp"
#include "dzn/semantics.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dzn::simulate {

struct DiagramEvent {
    std::size_t seq = 0;
    std::size_t step = 0;  // index of the run-to-completion step that produced it
    std::string from;
    std::string to;
    std::string label;
    SourceLoc loc;
    std::string kind;  // call, reply, out, illegal, range_error
};

struct SimulationState {
    std::shared_ptr<const Model> model;
    std::string subject;
    std::vector<std::string> lifelines;
    std::vector<std::string> trace;  // labels accepted so far, emitted ones included
    std::size_t steps = 0;           // completed or failed run-to-completion steps
    semantics::State state;          // configuration after the last complete step
    std::vector<std::string> configs;
    std::vector<DiagramEvent> diagram;
    std::vector<std::string> next_valid;
    std::vector<std::string> next_illegal;

    bool violated = false;
    std::string violation;  // "illegal", "range_error(x)" or "unhandled"
    std::string rejected;   // first trace label that was not offered

    bool accepts(std::string_view label) const;
};

class NotOffered : public std::runtime_error {
public:
    NotOffered(const std::string& label, std::vector<std::string> offers)
        : std::runtime_error("label not offered: " + label), offers(std::move(offers)) {}
    std::vector<std::string> offers;
};

/// Replays labels until one is not offered or a step fails. Events emitted by a step may
/// be listed in the trace or left out.
SimulationState replay(std::shared_ptr<const Model> model, std::string_view subject, const std::vector<std::string>& trace);
/// Non-owning convenience; the model must outlive the result.
SimulationState replay(const Model& model, std::string_view subject, const std::vector<std::string>& trace);

/// replay(trace + [label]); throws NotOffered unless label is a next event.
SimulationState extend(const SimulationState& s, const std::string& label);

/// Transitive closure of extend from the empty trace.
lts::Lts simulator_lts(const Model& model, std::string_view subject, std::size_t bound = lts::default_bound);

/// One label per line; blank lines and surrounding whitespace are ignored.
std::vector<std::string> read_trace(std::string_view text);

}  // namespace dzn::simulate
