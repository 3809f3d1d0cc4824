#pragma once

#include "dzn/ast.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dzn::semantics {

struct Value {
    TypeKind kind = TypeKind::Void;
    int decl = -1;
    std::int64_t v = 0;  // bool as 0/1, enum literal index, integer value

    friend bool operator==(const Value&, const Value&) = default;
    friend auto operator<=>(const Value&, const Value&) = default;
};

Value make_bool(bool b);
Value make_enum(int decl, int literal);
Value make_int(Type type, std::int64_t n);

/// "true", "State.On", "3", "void".
std::string to_string(const Model& model, const Value& value);

/// All values of a finite type. Void yields the single void value.
std::vector<Value> domain(const Model& model, Type type);

/// Cartesian product of the parameter domains, in lexicographic order.
std::vector<std::vector<Value>> argument_tuples(const Model& model, const std::vector<Param>& params);

struct Configuration {
    std::string owner;
    std::vector<Value> store;  // indexed like the owner's behaviour variables

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

enum class ActionKind { Call, Reply, Out, Tau, Illegal, RangeError };

struct Action {
    ActionKind kind = ActionKind::Tau;
    std::string port;  // empty in interface scope
    std::string event;
    std::vector<Value> args;
    Value value;           // Reply
    std::string variable;  // RangeError
};

/// Canonical label: "p.e", "p.e(1,true)", "p.e -> v", "p.e!", "tau", "illegal", "range_error(n)".
std::string label(const Model& model, const Action& action);

std::string call_label(const Model& model, std::string_view port, std::string_view event, const std::vector<Value>& args);
std::string reply_label(const Model& model, std::string_view port, std::string_view event, const Value& value);
std::string out_label(const Model& model, std::string_view port, std::string_view event, const std::vector<Value>& args);

inline const std::string tau_label = "tau";
inline const std::string illegal_label = "illegal";
inline std::string range_error_label(std::string_view variable) { return "range_error(" + std::string(variable) + ")"; }
bool is_failure_label(std::string_view label);

enum class Outcome { Ok, Illegal, RangeError, Unhandled };

// Why a step failed: the illegal statement, a call the port refused, or a range violation.
enum class Cause { None, IllegalStatement, RejectedCall, Range, NoClause };

struct TriggerDescriptor {
    int port = -1;  // -1 in interface scope
    int event = -1;
    std::vector<Value> args;

    friend bool operator==(const TriggerDescriptor&, const TriggerDescriptor&) = default;
};

struct StepResult {
    Configuration next;
    std::vector<Action> emitted;     // calls and out events in execution order, then the reply
    std::vector<SourceLoc> locs;     // parallel to emitted
    Outcome outcome = Outcome::Ok;
    Cause cause = Cause::None;
    std::string variable;            // RangeError
    SourceLoc loc;                   // executed clause, or the failing statement
    std::optional<Value> reply;
};

struct Enabled {
    std::vector<TriggerDescriptor> valid;
    std::vector<TriggerDescriptor> illegal;
    std::vector<TriggerDescriptor> unhandled;
};

/// Thrown when a variable initializer evaluates outside its declared range.
class InitialRangeError : public std::runtime_error {
public:
    InitialRangeError(std::string variable, SourceLoc loc)
        : std::runtime_error("initial value of " + variable + " out of range"), variable(std::move(variable)), loc(loc) {}
    std::string variable;
    SourceLoc loc;
};

// Receives the event calls a component body makes. Returns the reply (void value for void
// events) or nullopt when the port refuses the call.
class Environment {
public:
    virtual ~Environment() = default;
    virtual std::optional<Value> event(int port, int event, const std::vector<Value>& args, const SourceLoc& loc) = 0;
};

// Compiled behaviour of one interface or component: clause lookup plus the interpreter.
class Machine {
public:
    Machine(const Model& model, const InterfaceDef& def);
    Machine(const Model& model, const ComponentDef& def);

    const std::string& owner() const { return owner_; }
    bool is_interface() const { return iface_ != nullptr; }
    const InterfaceDef* interface_def() const { return iface_; }
    const ComponentDef* component_def() const { return comp_; }
    const Model& model() const { return model_; }

    Configuration initial() const;

    /// Clause handling the trigger in this configuration, or nullptr when unhandled.
    const OnClause* select(const Configuration& config, int port, int event) const;

    /// Runs one clause to completion. Without an environment, event calls are refused.
    StepResult run(const Configuration& config, const TriggerDescriptor& trigger, Environment* env) const;

    const EventDecl& event_decl(int port, int event) const;

private:
    struct Entry {
        std::vector<ExprPtr> guards;
        const OnClause* clause;
        int port;
        int event;
    };

    const Model& model_;
    const InterfaceDef* iface_ = nullptr;
    const ComponentDef* comp_ = nullptr;
    const Behaviour* beh_ = nullptr;
    std::string owner_;
    std::vector<Entry> entries_;

    friend class Interpreter;
};

Configuration initial_configuration(const Model& model, const InterfaceDef& def);
Configuration initial_configuration(const Model& model, const ComponentDef& def);

Enabled enabled(const Model& model, const InterfaceDef& def, const Configuration& config);
Enabled enabled(const Model& model, const ComponentDef& def, const Configuration& config);

// Standalone component step. Calls on requires ports get their reply from the oracle,
// nullopt meaning refusal; without an oracle void calls succeed and valued calls are refused.
using ReplyOracle = std::function<std::optional<Value>(int port, int event, const std::vector<Value>& args)>;

StepResult step(const Model& model, const InterfaceDef& def, const Configuration& config, const TriggerDescriptor& trigger);
StepResult step(const Model& model, const ComponentDef& def, const Configuration& config, const TriggerDescriptor& trigger,
                const ReplyOracle& oracle = {});

// Composite subject: an interface on its own, or a component with one interface instance per port.

struct State {
    Configuration self;
    std::vector<Configuration> ports;  // per component port; empty for interfaces

    friend bool operator==(const State&, const State&) = default;
    friend auto operator<=>(const State&, const State&) = default;
};

struct Offer {
    enum class Kind { In, Out } kind = Kind::In;
    int port = -1;
    int event = -1;
    std::vector<Value> args;
    std::string label;
};

struct Occurrence {
    std::string label;
    ActionKind kind = ActionKind::Call;
    std::string from;
    std::string to;
    SourceLoc loc;
};

enum class FireStatus {
    Ok,         // explored; may still be flagged violating
    Failed,     // illegal or range error
    Refused,    // neither side accepts: no transition
    Unhandled,  // the contract allows the event but nothing handles it
};

struct FireResult {
    FireStatus status = FireStatus::Refused;
    std::vector<Occurrence> chain;  // edges in order; for failures the prefix executed before it
    State next;
    bool violating = false;        // client call the provides-port contract forbids
    std::string failure_label;     // "illegal" or "range_error(x)"
    std::string offending;         // label completing the counterexample, may be empty
    SourceLoc loc;
};

// Reply and out-event choices for open ports, enumerated like an odometer.
class Choices {
public:
    int pick(int size);
    bool advance();  // false when all combinations are exhausted
    void rewind() { cursor_ = 0; }

private:
    std::vector<int> picks_;
    std::vector<int> sizes_;
    std::size_t cursor_ = 0;
};

struct SubjectOptions {
    std::set<std::string> open_ports;  // requires ports replaced by a chaotic environment
};

class Subject {
public:
    Subject(const Model& model, std::string_view name, SubjectOptions options = {});

    const Model& model() const { return model_; }
    const std::string& name() const { return name_; }
    bool is_interface() const { return self_.is_interface(); }
    const Machine& machine() const { return self_; }
    const ComponentDef* component() const { return self_.component_def(); }

    /// May throw InitialRangeError.
    State initial() const;

    std::vector<Offer> offers(const State& state) const;
    FireResult fire(const State& state, const Offer& offer, Choices* choices = nullptr) const;

    /// Finds the client offer with the given trigger label.
    std::optional<Offer> offer_for(const State& state, std::string_view label) const;

    std::vector<std::string> lifelines() const;

    /// Visible labels of one port in composite naming ("p.e", "p.e -> v", "p.x!").
    std::set<std::string> port_alphabet(int port) const;
    /// Every visible label the subject can produce.
    std::set<std::string> alphabet() const;

    /// Flattened values of all parties, used as the stable-state key.
    std::string key(const State& state) const;

    /// Configurations rendered as "party: var=value, ..." lines.
    std::vector<std::string> describe(const State& state) const;

private:
    const Model& model_;
    std::string name_;
    Machine self_;
    std::vector<std::optional<Machine>> ports_;  // nullopt for open ports
    std::vector<bool> open_;

    std::vector<Offer> port_offers(const State& state, int port) const;
    FireResult fire_interface(const State& state, const Offer& offer) const;
    FireResult fire_component(const State& state, const Offer& offer, Choices* choices) const;
};

/// Labels of an interface on its own ("e", "e -> v", "x!"), prefixed with port + "." when given.
std::set<std::string> interface_alphabet(const Model& model, const InterfaceDef& def, std::string_view port = {});

}  // namespace dzn::semantics
