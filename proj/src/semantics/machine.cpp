#include "dzn/semantics.hpp"

namespace dzn::semantics {

namespace {

struct Abort {
    Outcome outcome;
    Cause cause;
    std::string variable;
    SourceLoc loc;
};

void flatten(const std::vector<BehaviourItem>& items, std::vector<ExprPtr>& guards,
             const std::function<void(const std::vector<ExprPtr>&, const OnClause*)>& sink) {
    for (const auto& item : items) {
        if (auto* g = std::get_if<std::shared_ptr<GuardedBlock>>(&item)) {
            guards.push_back((*g)->guard);
            flatten((*g)->items, guards, sink);
            guards.pop_back();
        } else {
            sink(guards, std::get<std::shared_ptr<OnClause>>(item).get());
        }
    }
}

}  // namespace

class Interpreter {
public:
    Interpreter(const Machine& m, Configuration config, Environment* env, StepResult& out)
        : m_(m), config_(std::move(config)), env_(env), out_(out) {}

    Configuration& config() { return config_; }

    bool guards_hold(const std::vector<ExprPtr>& guards) {
        std::vector<Value> frame;
        for (const auto& g : guards) {
            if (!eval(g, frame).v) return false;
        }
        return true;
    }

    // Executes the clause for the trigger; reply type comes from the trigger event.
    void run_clause(const OnClause& clause, const TriggerDescriptor& trigger) {
        std::vector<Value> frame(static_cast<std::size_t>(clause.frame_size));
        for (std::size_t i = 0; i < trigger.args.size() && i < frame.size(); ++i) frame[i] = trigger.args[i];
        const EventDecl& ev = m_.event_decl(trigger.port, trigger.event);
        reply_type_ = ev.return_type.resolved;
        exec(clause.body, frame);
        if (reply_) out_.reply = reply_;
    }

    Value eval(const ExprPtr& e, std::vector<Value>& frame) {
        switch (e->kind) {
        case ExprKind::Bool: return make_bool(e->bool_value);
        case ExprKind::Int: return Value{TypeKind::Integer, -1, e->int_value};
        case ExprKind::EnumLiteral: return make_enum(e->type_decl, e->literal);
        case ExprKind::FieldTest: return make_bool(read(e->scope, e->slot, frame).v == e->literal);
        case ExprKind::Var: return read(e->scope, e->slot, frame);
        case ExprKind::Not: return make_bool(!eval(e->operands[0], frame).v);
        case ExprKind::Neg: return Value{TypeKind::Integer, -1, -eval(e->operands[0], frame).v};
        case ExprKind::Binary: {
            if (e->op == BinOp::And) return make_bool(eval(e->operands[0], frame).v && eval(e->operands[1], frame).v);
            if (e->op == BinOp::Or) return make_bool(eval(e->operands[0], frame).v || eval(e->operands[1], frame).v);
            Value a = eval(e->operands[0], frame);
            Value b = eval(e->operands[1], frame);
            switch (e->op) {
            case BinOp::Eq: return make_bool(a.v == b.v);
            case BinOp::Ne: return make_bool(a.v != b.v);
            case BinOp::Lt: return make_bool(a.v < b.v);
            case BinOp::Le: return make_bool(a.v <= b.v);
            case BinOp::Gt: return make_bool(a.v > b.v);
            case BinOp::Ge: return make_bool(a.v >= b.v);
            case BinOp::Add: return Value{TypeKind::Integer, -1, a.v + b.v};
            case BinOp::Sub: return Value{TypeKind::Integer, -1, a.v - b.v};
            default: break;
            }
            break;
        }
        case ExprKind::Call: return call_function(e, frame);
        case ExprKind::EventCall: return call_event(e, frame);
        case ExprKind::Dotted: break;
        }
        throw std::logic_error("unresolved expression at " + to_string(e->loc));
    }

private:
    enum class Flow { Normal, Return };

    Value read(VarScope scope, int slot, std::vector<Value>& frame) {
        return scope == VarScope::State ? config_.store.at(slot) : frame.at(slot);
    }

    // Converts a value for storage into a declared type, checking subint bounds.
    Value narrow(Type target, Value v, const std::string& name, const SourceLoc& loc) {
        if (target.kind == TypeKind::Int) {
            const auto& t = m_.model().types.at(target.decl);
            if (v.v < t.lo || v.v > t.hi) throw Abort{Outcome::RangeError, Cause::Range, name, loc};
            return make_int(target, v.v);
        }
        return v;
    }

    std::vector<Value> arguments(const ExprPtr& e, const std::vector<Param>& params, std::vector<Value>& frame) {
        std::vector<Value> args;
        for (std::size_t i = 0; i < e->operands.size(); ++i) {
            Value v = eval(e->operands[i], frame);
            args.push_back(narrow(params[i].type.resolved, v, params[i].name, e->operands[i]->loc));
        }
        return args;
    }

    Value call_function(const ExprPtr& e, std::vector<Value>& frame) {
        const Function& f = m_.beh_->functions.at(e->function);
        auto args = arguments(e, f.params, frame);
        std::vector<Value> callee(static_cast<std::size_t>(std::max<int>(f.frame_size, static_cast<int>(args.size()))));
        for (std::size_t i = 0; i < args.size(); ++i) callee[i] = args[i];
        Value saved = return_value_;
        return_value_ = Value{};
        exec(f.body, callee);
        Value r = return_value_;
        return_value_ = saved;
        if (f.return_type.resolved.kind == TypeKind::Void) return Value{};
        return narrow(f.return_type.resolved, r, f.name, e->loc);
    }

    Value call_event(const ExprPtr& e, std::vector<Value>& frame) {
        const EventDecl& ev = m_.event_decl(e->port, e->event);
        auto args = arguments(e, ev.params, frame);
        const std::string& port = m_.comp_->ports.at(e->port).name;
        Action a;
        a.kind = ev.direction == Direction::In ? ActionKind::Call : ActionKind::Out;
        a.port = port;
        a.event = ev.name;
        a.args = args;
        std::optional<Value> r;
        if (env_) r = env_->event(e->port, e->event, args, e->loc);
        if (!r) throw Abort{Outcome::Illegal, Cause::RejectedCall, {}, e->loc};
        out_.emitted.push_back(a);
        out_.locs.push_back(e->loc);
        if (ev.return_type.resolved.kind == TypeKind::Void) return Value{};
        Value v = *r;
        v.kind = ev.return_type.resolved.kind;
        v.decl = ev.return_type.resolved.decl;
        return v;
    }

    void assign(VarScope scope, int slot, Value v, std::vector<Value>& frame) {
        if (scope == VarScope::State) {
            config_.store.at(slot) = v;
        } else {
            frame.at(slot) = v;
        }
    }

    Flow exec(const StmtPtr& s, std::vector<Value>& frame) {
        if (!s) return Flow::Normal;
        switch (s->kind) {
        case StmtKind::Block:
            for (const auto& c : s->body) {
                if (exec(c, frame) == Flow::Return) return Flow::Return;
            }
            return Flow::Normal;
        case StmtKind::Assign:
        case StmtKind::Local: {
            Value v = eval(s->expr, frame);
            assign(s->scope, s->slot, narrow(s->target_type, v, s->name, s->loc), frame);
            return Flow::Normal;
        }
        case StmtKind::If:
            if (eval(s->expr, frame).v) return exec(s->then_branch, frame);
            return exec(s->else_branch, frame);
        case StmtKind::Expression: eval(s->expr, frame); return Flow::Normal;
        case StmtKind::Reply: {
            Value v = eval(s->expr, frame);
            if (reply_type_.kind == TypeKind::Enum) v.decl = reply_type_.decl;
            reply_ = narrow(reply_type_, v, "reply", s->loc);
            return Flow::Normal;
        }
        case StmtKind::Return:
            if (s->expr) return_value_ = eval(s->expr, frame);
            return Flow::Return;
        case StmtKind::Illegal: throw Abort{Outcome::Illegal, Cause::IllegalStatement, {}, s->loc};
        case StmtKind::Empty: return Flow::Normal;
        }
        return Flow::Normal;
    }

    const Machine& m_;
    Configuration config_;
    Environment* env_;
    StepResult& out_;
    Type reply_type_;
    std::optional<Value> reply_;
    Value return_value_;
};

Machine::Machine(const Model& model, const InterfaceDef& def)
    : model_(model), iface_(&def), beh_(def.behaviour ? &*def.behaviour : nullptr), owner_(def.name) {
    if (beh_) {
        std::vector<ExprPtr> guards;
        flatten(beh_->items, guards, [&](const std::vector<ExprPtr>& g, const OnClause* on) {
            for (const auto& t : on->triggers) entries_.push_back({g, on, -1, t.event_index});
        });
    }
}

Machine::Machine(const Model& model, const ComponentDef& def)
    : model_(model), comp_(&def), beh_(def.behaviour ? &*def.behaviour : nullptr), owner_(def.name) {
    if (beh_) {
        std::vector<ExprPtr> guards;
        flatten(beh_->items, guards, [&](const std::vector<ExprPtr>& g, const OnClause* on) {
            for (const auto& t : on->triggers) entries_.push_back({g, on, t.port_index, t.event_index});
        });
    }
}

const EventDecl& Machine::event_decl(int port, int event) const {
    if (iface_) return iface_->events.at(event);
    int ii = comp_->ports.at(port).interface_index;
    return model_.interfaces.at(ii).events.at(event);
}

Configuration Machine::initial() const {
    Configuration c;
    c.owner = owner_;
    if (!beh_) return c;
    StepResult scratch;
    for (const auto& var : beh_->variables) {
        Interpreter in(*this, c, nullptr, scratch);
        std::vector<Value> frame;
        Value v = in.eval(var.init, frame);
        Type t = var.type.resolved;
        if (t.kind == TypeKind::Int) {
            const auto& decl = model_.types.at(t.decl);
            if (v.v < decl.lo || v.v > decl.hi) throw InitialRangeError(var.name, var.loc);
            v = make_int(t, v.v);
        }
        c.store.push_back(v);
    }
    return c;
}

const OnClause* Machine::select(const Configuration& config, int port, int event) const {
    StepResult scratch;
    Interpreter in(*this, config, nullptr, scratch);
    for (const auto& e : entries_) {
        if (e.port == port && e.event == event && in.guards_hold(e.guards)) return e.clause;
    }
    return nullptr;
}

StepResult Machine::run(const Configuration& config, const TriggerDescriptor& trigger, Environment* env) const {
    if (trigger.event < 0 || (comp_ && (trigger.port < 0 || trigger.port >= static_cast<int>(comp_->ports.size())))) {
        throw std::invalid_argument("trigger not declared by " + owner_);
    }
    const EventDecl& ev = event_decl(trigger.port, trigger.event);
    if (trigger.args.size() != ev.params.size()) throw std::invalid_argument("wrong argument count for " + ev.name);

    StepResult out;
    out.next = config;
    if (!beh_ && iface_) {
        // an interface without behaviour accepts every in-event
        if (ev.direction == Direction::In) return out;
        out.outcome = Outcome::Unhandled;
        out.cause = Cause::NoClause;
        return out;
    }
    const OnClause* clause = select(config, trigger.port, trigger.event);
    if (!clause) {
        out.outcome = Outcome::Unhandled;
        out.cause = Cause::NoClause;
        return out;
    }
    out.loc = clause->loc;
    Interpreter in(*this, config, env, out);
    try {
        in.run_clause(*clause, trigger);
        out.next = std::move(in.config());
        if (ev.direction == Direction::In && ev.return_type.resolved.kind != TypeKind::Void) {
            Action r;
            r.kind = ActionKind::Reply;
            r.port = comp_ ? comp_->ports.at(trigger.port).name : std::string();
            r.event = ev.name;
            r.value = out.reply.value_or(Value{});
            out.emitted.push_back(r);
            out.locs.push_back(clause->loc);
        }
    } catch (const Abort& a) {
        out.next = config;
        out.outcome = a.outcome;
        out.cause = a.cause;
        out.variable = a.variable;
        out.loc = a.loc;
        out.reply.reset();
    }
    return out;
}

Configuration initial_configuration(const Model& model, const InterfaceDef& def) { return Machine(model, def).initial(); }
Configuration initial_configuration(const Model& model, const ComponentDef& def) { return Machine(model, def).initial(); }

namespace {

class OracleEnvironment : public Environment {
public:
    OracleEnvironment(const Machine& m, const ReplyOracle& oracle) : m_(m), oracle_(oracle) {}

    std::optional<Value> event(int port, int event, const std::vector<Value>& args, const SourceLoc&) override {
        const EventDecl& ev = m_.event_decl(port, event);
        if (ev.direction == Direction::Out) return Value{};
        if (oracle_) return oracle_(port, event, args);
        if (ev.return_type.resolved.kind == TypeKind::Void) return Value{};
        return std::nullopt;
    }

private:
    const Machine& m_;
    const ReplyOracle& oracle_;
};

template <typename Def>
Enabled classify(const Model& model, const Def& def, const Configuration& config, bool interface) {
    Machine m(model, def);
    Enabled out;
    ReplyOracle first_value = [&](int port, int event, const std::vector<Value>&) -> std::optional<Value> {
        return domain(model, m.event_decl(port, event).return_type.resolved).front();
    };
    OracleEnvironment env(m, first_value);
    auto consider = [&](int port, int event, const EventDecl& ev) {
        for (auto& args : argument_tuples(model, ev.params)) {
            TriggerDescriptor t{port, event, args};
            StepResult r = m.run(config, t, &env);
            if (r.outcome == Outcome::Unhandled) {
                // out events without a clause are simply not offered by an interface
                if (!(interface && ev.direction == Direction::Out)) out.unhandled.push_back(t);
            } else if (r.outcome == Outcome::Illegal && r.cause == Cause::IllegalStatement) {
                out.illegal.push_back(t);
            } else {
                out.valid.push_back(t);
            }
        }
    };
    if constexpr (std::is_same_v<Def, InterfaceDef>) {
        for (std::size_t e = 0; e < def.events.size(); ++e) consider(-1, static_cast<int>(e), def.events[e]);
    } else {
        for (std::size_t p = 0; p < def.ports.size(); ++p) {
            const Port& port = def.ports[p];
            if (port.interface_index < 0) continue;
            const auto& iface = model.interfaces[port.interface_index];
            for (std::size_t e = 0; e < iface.events.size(); ++e) {
                Direction want = port.direction == PortDirection::Provides ? Direction::In : Direction::Out;
                if (iface.events[e].direction == want) consider(static_cast<int>(p), static_cast<int>(e), iface.events[e]);
            }
        }
    }
    return out;
}

}  // namespace

Enabled enabled(const Model& model, const InterfaceDef& def, const Configuration& config) {
    return classify(model, def, config, true);
}

Enabled enabled(const Model& model, const ComponentDef& def, const Configuration& config) {
    return classify(model, def, config, false);
}

StepResult step(const Model& model, const InterfaceDef& def, const Configuration& config, const TriggerDescriptor& trigger) {
    return Machine(model, def).run(config, trigger, nullptr);
}

StepResult step(const Model& model, const ComponentDef& def, const Configuration& config, const TriggerDescriptor& trigger,
                const ReplyOracle& oracle) {
    Machine m(model, def);
    OracleEnvironment env(m, oracle);
    return m.run(config, trigger, &env);
}

}  // namespace dzn::semantics
