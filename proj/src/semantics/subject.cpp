#include "dzn/semantics.hpp"

namespace dzn::semantics {

int Choices::pick(int size) {
    if (cursor_ < picks_.size()) return picks_[cursor_++];
    picks_.push_back(0);
    sizes_.push_back(size);
    ++cursor_;
    return 0;
}

bool Choices::advance() {
    picks_.resize(cursor_);
    sizes_.resize(cursor_);
    while (!picks_.empty()) {
        if (picks_.back() + 1 < sizes_.back()) {
            ++picks_.back();
            cursor_ = 0;
            return true;
        }
        picks_.pop_back();
        sizes_.pop_back();
    }
    cursor_ = 0;
    return false;
}

namespace {

Machine make_machine(const Model& model, std::string_view name) {
    auto ref = model.find(name);
    if (!ref) throw std::invalid_argument("unknown definition " + std::string(name));
    switch (ref->kind) {
    case DefinitionKind::Interface: return Machine(model, model.interfaces[ref->index]);
    case DefinitionKind::Component: return Machine(model, model.components[ref->index]);
    case DefinitionKind::System: break;
    }
    throw std::invalid_argument(std::string(name) + " is a system; only interfaces and components can be explored");
}

const std::string env_lifeline = "env";

}  // namespace

Subject::Subject(const Model& model, std::string_view name, SubjectOptions options)
    : model_(model), name_(name), self_(make_machine(model, name)) {
    if (const ComponentDef* comp = self_.component_def()) {
        for (const auto& port : comp->ports) {
            if (port.interface_index < 0) throw std::invalid_argument("unresolved port " + port.name);
            bool open = options.open_ports.count(port.name) > 0;
            if (open && port.direction != PortDirection::Requires) {
                throw std::invalid_argument("only requires ports can be opened: " + port.name);
            }
            open_.push_back(open);
            if (open) {
                ports_.emplace_back(std::nullopt);
            } else {
                ports_.emplace_back(Machine(model, model.interfaces[port.interface_index]));
            }
        }
        for (const auto& p : options.open_ports) {
            if (comp->find_port(p) < 0) throw std::invalid_argument("no port " + p + " on " + name_);
        }
    }
}

State Subject::initial() const {
    State s;
    s.self = self_.initial();
    const ComponentDef* comp = self_.component_def();
    for (std::size_t i = 0; i < ports_.size(); ++i) {
        if (ports_[i]) {
            s.ports.push_back(ports_[i]->initial());
        } else {
            s.ports.push_back(Configuration{comp->ports[i].name, {}});
        }
    }
    return s;
}

std::vector<Offer> Subject::offers(const State& state) const {
    std::vector<Offer> out;
    if (const InterfaceDef* iface = self_.interface_def()) {
        for (std::size_t e = 0; e < iface->events.size(); ++e) {
            const auto& ev = iface->events[e];
            for (auto& args : argument_tuples(model_, ev.params)) {
                Offer o{ev.direction == Direction::In ? Offer::Kind::In : Offer::Kind::Out, -1, static_cast<int>(e), args, {}};
                if (o.kind == Offer::Kind::In) {
                    o.label = call_label(model_, "", ev.name, args);
                } else {
                    if (self_.run(state.self, {-1, o.event, args}, nullptr).outcome != Outcome::Ok) continue;
                    o.label = out_label(model_, "", ev.name, args);
                }
                out.push_back(std::move(o));
            }
        }
        return out;
    }
    for (std::size_t p = 0; p < ports_.size(); ++p) {
        auto more = port_offers(state, static_cast<int>(p));
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

std::vector<Offer> Subject::port_offers(const State& state, int p) const {
    std::vector<Offer> out;
    const Port& port = self_.component_def()->ports[p];
    const auto& iface = model_.interfaces[port.interface_index];
    for (std::size_t e = 0; e < iface.events.size(); ++e) {
        const auto& ev = iface.events[e];
        bool provides = port.direction == PortDirection::Provides;
        if (provides != (ev.direction == Direction::In)) continue;
        for (auto& args : argument_tuples(model_, ev.params)) {
            Offer o{provides ? Offer::Kind::In : Offer::Kind::Out, p, static_cast<int>(e), args, {}};
            if (provides) {
                o.label = call_label(model_, port.name, ev.name, args);
            } else {
                if (ports_[p] && ports_[p]->run(state.ports[p], {-1, o.event, args}, nullptr).outcome != Outcome::Ok) continue;
                o.label = out_label(model_, port.name, ev.name, args);
            }
            out.push_back(std::move(o));
        }
    }
    return out;
}

std::optional<Offer> Subject::offer_for(const State& state, std::string_view label) const {
    for (auto& o : offers(state)) {
        if (o.label == label) return o;
    }
    return std::nullopt;
}

FireResult Subject::fire(const State& state, const Offer& offer, Choices* choices) const {
    return self_.is_interface() ? fire_interface(state, offer) : fire_component(state, offer, choices);
}

namespace {

std::string failure_label_of(const StepResult& r) {
    return r.outcome == Outcome::RangeError ? range_error_label(r.variable) : illegal_label;
}

}  // namespace

FireResult Subject::fire_interface(const State& state, const Offer& offer) const {
    const auto& ev = self_.event_decl(-1, offer.event);
    StepResult r = self_.run(state.self, {-1, offer.event, offer.args}, nullptr);
    FireResult out;
    out.loc = r.loc.line ? r.loc : ev.loc;
    out.next = state;
    if (offer.kind == Offer::Kind::Out) {
        if (r.outcome != Outcome::Ok) return out;
        out.status = FireStatus::Ok;
        out.chain.push_back({offer.label, ActionKind::Out, name_, env_lifeline, r.loc});
        out.next.self = r.next;
        return out;
    }
    switch (r.outcome) {
    case Outcome::Ok:
        out.status = FireStatus::Ok;
        out.chain.push_back({offer.label, ActionKind::Call, env_lifeline, name_, r.loc});
        if (ev.return_type.resolved.kind != TypeKind::Void) {
            out.chain.push_back({reply_label(model_, "", ev.name, r.reply.value_or(Value{})), ActionKind::Reply, name_,
                                 env_lifeline, r.loc});
        }
        out.next.self = r.next;
        break;
    case Outcome::Illegal:
    case Outcome::RangeError:
        out.status = FireStatus::Failed;
        out.failure_label = failure_label_of(r);
        out.offending = offer.label;
        break;
    case Outcome::Unhandled:
        out.status = FireStatus::Unhandled;
        out.offending = offer.label;
        break;
    }
    return out;
}

namespace {

// Routes the component's event calls through the port interfaces, recording occurrences.
class CompositeEnvironment : public Environment {
public:
    CompositeEnvironment(const Model& model, const ComponentDef& comp, const std::vector<std::optional<Machine>>& machines,
                         std::vector<Configuration> ports, Choices* choices)
        : model_(model), comp_(comp), machines_(machines), ports(std::move(ports)), choices_(choices) {}

    std::optional<Value> event(int p, int e, const std::vector<Value>& args, const SourceLoc& loc) override {
        const Port& port = comp_.ports[p];
        const EventDecl& ev = model_.interfaces[port.interface_index].events[e];
        if (ev.direction == Direction::Out) {
            if (machines_[p]) {
                StepResult r = machines_[p]->run(ports[p], {-1, e, args}, nullptr);
                if (r.outcome == Outcome::Ok) ports[p] = r.next;
            }
            occurrences.push_back({out_label(model_, port.name, ev.name, args), ActionKind::Out, comp_.name, env_lifeline, loc});
            return Value{};
        }
        std::string label = call_label(model_, port.name, ev.name, args);
        Type rt = ev.return_type.resolved;
        Value reply;
        if (machines_[p]) {
            StepResult r = machines_[p]->run(ports[p], {-1, e, args}, nullptr);
            if (r.outcome != Outcome::Ok) {
                rejected = label;
                rejected_loc = loc;
                return std::nullopt;
            }
            ports[p] = r.next;
            if (r.reply) reply = *r.reply;
        } else if (rt.kind != TypeKind::Void) {
            auto dom = domain(model_, rt);
            int k = choices_ ? choices_->pick(static_cast<int>(dom.size())) : 0;
            reply = dom[k];
        }
        occurrences.push_back({label, ActionKind::Call, comp_.name, port.name, loc});
        if (rt.kind != TypeKind::Void) {
            reply.kind = rt.kind;
            reply.decl = rt.decl;
            occurrences.push_back({reply_label(model_, port.name, ev.name, reply), ActionKind::Reply, port.name, comp_.name, loc});
        }
        return reply;
    }

    const Model& model_;
    const ComponentDef& comp_;
    const std::vector<std::optional<Machine>>& machines_;
    std::vector<Configuration> ports;
    Choices* choices_;
    std::vector<Occurrence> occurrences;
    std::string rejected;
    SourceLoc rejected_loc;
};

}  // namespace

FireResult Subject::fire_component(const State& state, const Offer& offer, Choices* choices) const {
    const ComponentDef& comp = *self_.component_def();
    const Port& port = comp.ports[offer.port];
    const EventDecl& ev = self_.event_decl(offer.port, offer.event);
    CompositeEnvironment env(model_, comp, ports_, state.ports, choices);
    FireResult out;
    out.next = state;
    out.loc = port.loc;

    bool contract_ok = true;
    Occurrence head;
    if (offer.kind == Offer::Kind::In) {
        if (ports_[offer.port]) {
            StepResult m = ports_[offer.port]->run(state.ports[offer.port], {-1, offer.event, offer.args}, nullptr);
            contract_ok = m.outcome == Outcome::Ok;
            if (contract_ok) env.ports[offer.port] = m.next;
        }
        head = {offer.label, ActionKind::Call, env_lifeline, name_, {}};
    } else {
        if (ports_[offer.port]) {
            StepResult m = ports_[offer.port]->run(state.ports[offer.port], {-1, offer.event, offer.args}, nullptr);
            if (m.outcome != Outcome::Ok) return out;
            env.ports[offer.port] = m.next;
        }
        head = {offer.label, ActionKind::Out, port.name, name_, {}};
    }

    const OnClause* clause = self_.select(state.self, offer.port, offer.event);
    if (!clause) {
        out.offending = offer.label;
        if (offer.kind == Offer::Kind::Out) {
            // the port performed an event the component does not accept
            out.status = FireStatus::Failed;
            out.failure_label = illegal_label;
        } else {
            out.status = contract_ok ? FireStatus::Unhandled : FireStatus::Refused;
        }
        return out;
    }
    head.loc = clause->loc;

    StepResult r = self_.run(state.self, {offer.port, offer.event, offer.args}, &env);
    if (r.outcome == Outcome::Illegal && r.cause == Cause::IllegalStatement && !contract_ok) return out;  // both refuse

    out.violating = !contract_ok;
    out.chain.push_back(head);
    out.chain.insert(out.chain.end(), env.occurrences.begin(), env.occurrences.end());
    if (r.outcome == Outcome::Ok) {
        out.status = FireStatus::Ok;
        out.loc = clause->loc;
        if (offer.kind == Offer::Kind::In && ev.return_type.resolved.kind != TypeKind::Void) {
            Value v = r.reply.value_or(Value{});
            out.chain.push_back({reply_label(model_, port.name, ev.name, v), ActionKind::Reply, name_, env_lifeline, clause->loc});
        }
        out.next.self = r.next;
        out.next.ports = env.ports;
        return out;
    }
    out.status = FireStatus::Failed;
    out.failure_label = failure_label_of(r);
    if (r.cause == Cause::RejectedCall) {
        out.offending = env.rejected;
        out.loc = env.rejected_loc;
    } else {
        out.loc = r.loc;
        if (env.occurrences.empty()) {
            out.chain.clear();
            out.offending = offer.label;
        }
    }
    return out;
}

std::vector<std::string> Subject::lifelines() const {
    std::vector<std::string> out{env_lifeline, name_};
    if (const ComponentDef* comp = self_.component_def()) {
        for (const auto& p : comp->ports) {
            if (p.direction == PortDirection::Requires) out.push_back(p.name);
        }
    }
    return out;
}

std::set<std::string> Subject::port_alphabet(int port) const {
    const ComponentDef* comp = self_.component_def();
    if (!comp) throw std::invalid_argument(name_ + " has no ports");
    const Port& p = comp->ports.at(port);
    return interface_alphabet(model_, model_.interfaces[p.interface_index], p.name);
}

std::set<std::string> Subject::alphabet() const {
    if (const InterfaceDef* iface = self_.interface_def()) return interface_alphabet(model_, *iface);
    std::set<std::string> out;
    for (std::size_t p = 0; p < ports_.size(); ++p) {
        auto a = port_alphabet(static_cast<int>(p));
        out.insert(a.begin(), a.end());
    }
    return out;
}

std::string Subject::key(const State& state) const {
    std::string k;
    auto add = [&](const Configuration& c) {
        for (const auto& v : c.store) {
            k += std::to_string(v.v);
            k += ',';
        }
        k += '|';
    };
    add(state.self);
    for (const auto& p : state.ports) add(p);
    return k;
}

namespace {

std::string describe_config(const Model& model, const std::string& party, const Behaviour* beh, const Configuration& c) {
    std::string s = party + ":";
    for (std::size_t i = 0; i < c.store.size(); ++i) {
        s += i ? ", " : " ";
        s += (beh ? beh->variables[i].name : "?") + "=" + to_string(model, c.store[i]);
    }
    return s;
}

const Behaviour* behaviour_of(const Machine& m) {
    if (m.interface_def()) return m.interface_def()->behaviour ? &*m.interface_def()->behaviour : nullptr;
    return m.component_def()->behaviour ? &*m.component_def()->behaviour : nullptr;
}

}  // namespace

std::vector<std::string> Subject::describe(const State& state) const {
    std::vector<std::string> out{describe_config(model_, name_, behaviour_of(self_), state.self)};
    if (const ComponentDef* comp = self_.component_def()) {
        for (std::size_t i = 0; i < ports_.size(); ++i) {
            if (!ports_[i]) continue;
            out.push_back(describe_config(model_, comp->ports[i].name, behaviour_of(*ports_[i]), state.ports[i]));
        }
    }
    return out;
}

}  // namespace dzn::semantics
