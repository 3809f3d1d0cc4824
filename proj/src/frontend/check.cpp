#include "dzn/frontend.hpp"

#include "internal.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>

namespace dzn::frontend {

namespace {

using detail::make_error;

constexpr std::int64_t overlap_domain_limit = 65536;

bool int_like(Type t) { return t.kind == TypeKind::Int || t.kind == TypeKind::Integer; }

bool assignable(Type target, Type source) {
    if (int_like(target)) return int_like(source);
    if (target.kind == TypeKind::Enum) return source.kind == TypeKind::Enum && source.decl == target.decl;
    return target.kind == source.kind;
}

int count_calls(const ExprPtr& e) {
    if (!e) return 0;
    int n = (e->kind == ExprKind::Call || e->kind == ExprKind::EventCall) ? 1 : 0;
    for (const auto& op : e->operands) n += count_calls(op);
    return n;
}

struct FlatClause {
    std::vector<ExprPtr> guards;
    const OnClause* clause;
    const Trigger* trigger;
};

void flatten(const std::vector<BehaviourItem>& items, std::vector<ExprPtr>& guards, std::vector<FlatClause>& out) {
    for (const auto& item : items) {
        if (auto* g = std::get_if<std::shared_ptr<GuardedBlock>>(&item)) {
            guards.push_back((*g)->guard);
            flatten((*g)->items, guards, out);
            guards.pop_back();
        } else {
            const auto& on = std::get<std::shared_ptr<OnClause>>(item);
            for (const auto& t : on->triggers) out.push_back({guards, on.get(), &t});
        }
    }
}

// Evaluates a call-free, already type-checked expression over a state valuation.
std::int64_t eval_pure(const ExprPtr& e, const std::vector<std::int64_t>& state) {
    switch (e->kind) {
    case ExprKind::Bool: return e->bool_value ? 1 : 0;
    case ExprKind::Int: return e->int_value;
    case ExprKind::EnumLiteral: return e->literal;
    case ExprKind::FieldTest: return state[e->slot] == e->literal ? 1 : 0;
    case ExprKind::Var: return state[e->slot];
    case ExprKind::Not: return eval_pure(e->operands[0], state) ? 0 : 1;
    case ExprKind::Neg: return -eval_pure(e->operands[0], state);
    case ExprKind::Binary: {
        if (e->op == BinOp::And) return eval_pure(e->operands[0], state) && eval_pure(e->operands[1], state);
        if (e->op == BinOp::Or) return eval_pure(e->operands[0], state) || eval_pure(e->operands[1], state);
        std::int64_t a = eval_pure(e->operands[0], state);
        std::int64_t b = eval_pure(e->operands[1], state);
        switch (e->op) {
        case BinOp::Eq: return a == b;
        case BinOp::Ne: return a != b;
        case BinOp::Lt: return a < b;
        case BinOp::Le: return a <= b;
        case BinOp::Gt: return a > b;
        case BinOp::Ge: return a >= b;
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        default: return 0;
        }
    }
    default: return 0;
    }
}

class Checker {
public:
    explicit Checker(const Model& model) : model_(model) {}

    std::vector<Diagnostic> run() {
        for (const auto& t : model_.types) {
            if (t.kind == TypeKind::Enum) {
                std::set<std::string> lits;
                for (const auto& l : t.literals) {
                    if (!lits.insert(l).second) error(t.loc, "duplicate literal " + l + " in enum " + t.name);
                }
            }
        }
        for (const auto& iface : model_.interfaces) check_interface(iface);
        for (const auto& comp : model_.components) check_component(comp);
        for (const auto& sys : model_.systems) check_system(sys);
        check_containment();
        sort_by_location(diags_);
        return std::move(diags_);
    }

private:
    void error(const SourceLoc& loc, std::string message) {
        diags_.push_back(make_error(DiagnosticKind::WellFormedness, loc, std::move(message), subject_));
    }

    // Definitions

    void check_interface(const InterfaceDef& iface) {
        subject_ = iface.name;
        iface_ = &iface;
        comp_ = nullptr;
        for (const auto& ev : iface.events) {
            if (ev.direction == Direction::Out && ev.return_type.resolved.kind != TypeKind::Void) {
                error(ev.loc, "out event " + ev.name + " must return void");
            }
            std::set<std::string> names;
            for (const auto& p : ev.params) {
                if (!names.insert(p.name).second) error(p.loc, "duplicate parameter " + p.name);
                if (p.type.resolved.kind == TypeKind::Void) error(p.loc, "parameter " + p.name + " cannot be void");
            }
        }
        if (!iface.behaviour) {
            for (const auto& ev : iface.events) {
                if (ev.return_type.resolved.kind != TypeKind::Void) {
                    error(ev.loc, "valued event " + ev.name + " requires a behaviour that replies");
                }
            }
            return;
        }
        check_behaviour(*iface.behaviour);
    }

    void check_component(const ComponentDef& comp) {
        subject_ = comp.name;
        iface_ = nullptr;
        comp_ = &comp;
        check_port_names(comp.ports);
        std::vector<FlatClause> clauses;
        if (comp.behaviour) {
            std::vector<ExprPtr> guards;
            flatten(comp.behaviour->items, guards, clauses);
            check_behaviour(*comp.behaviour);
        }
        for (const auto& port : comp.ports) {
            if (port.direction != PortDirection::Provides || port.interface_index < 0) continue;
            const auto& iface = model_.interfaces[port.interface_index];
            for (std::size_t e = 0; e < iface.events.size(); ++e) {
                if (iface.events[e].direction != Direction::In) continue;
                bool handled = false;
                for (const auto& fc : clauses) {
                    if (fc.trigger->port == port.name && fc.trigger->event_index == static_cast<int>(e)) handled = true;
                }
                if (!handled) error(comp.loc, "no on clause for " + port.name + "." + iface.events[e].name);
            }
        }
    }

    void check_port_names(const std::vector<Port>& ports) {
        std::set<std::string> names;
        for (const auto& p : ports) {
            if (!names.insert(p.name).second) error(p.loc, "duplicate port " + p.name);
        }
    }

    // Behaviour

    void check_behaviour(const Behaviour& beh) {
        beh_ = &beh;
        for (const auto& v : beh.variables) {
            if (v.type.resolved.kind == TypeKind::Void) error(v.loc, "variable " + v.name + " cannot be void");
            if (!is_constant(v.init)) {
                error(v.init->loc, "initializer of " + v.name + " must be a constant");
                continue;
            }
            auto t = type_of(v.init, Context::Guard);
            if (t && !assignable(v.type.resolved, *t)) error(v.init->loc, "type mismatch in initializer of " + v.name);
        }
        check_recursion(beh);
        for (const auto& f : beh.functions) {
            FunctionCtx ctx{&f};
            function_ = &ctx;
            reply_types_.clear();
            in_handler_ = false;
            check_stmt(f.body);
            if (f.return_type.resolved.kind != TypeKind::Void && !always_returns(f.body)) {
                error(f.loc, "function " + f.name + " does not return a value on every path");
            }
            function_ = nullptr;
        }
        std::vector<FlatClause> clauses;
        std::vector<ExprPtr> guards;
        flatten(beh.items, guards, clauses);
        std::set<const ExprPtr::element_type*> seen_guards;
        for (const auto& fc : clauses) {
            for (const auto& g : fc.guards) {
                if (!seen_guards.insert(g.get()).second) continue;
                if (count_calls(g) > 0) {
                    error(g->loc, "guards must not contain calls");
                    continue;
                }
                auto t = type_of(g, Context::Guard);
                if (t && t->kind != TypeKind::Bool) error(g->loc, "guard must be boolean");
            }
        }
        std::set<const OnClause*> seen;
        for (const auto& fc : clauses) {
            if (!seen.insert(fc.clause).second) continue;
            check_clause(*fc.clause);
        }
        if (!had_errors_in_types()) check_overlaps(beh, clauses);
        beh_ = nullptr;
    }

    bool had_errors_in_types() {
        for (const auto& d : diags_) {
            if (d.subject == subject_) return true;
        }
        return false;
    }

    const EventDecl* trigger_event(const Trigger& t) const {
        if (t.event_index < 0) return nullptr;
        if (iface_) return &iface_->events[t.event_index];
        const Port& port = comp_->ports[t.port_index];
        if (port.interface_index < 0) return nullptr;
        return &model_.interfaces[port.interface_index].events[t.event_index];
    }

    void check_clause(const OnClause& on) {
        reply_types_.clear();
        in_handler_ = true;
        bool out_clause = false;
        for (const auto& t : on.triggers) {
            const EventDecl* ev = trigger_event(t);
            if (!ev) continue;
            if (comp_) {
                const Port& port = comp_->ports[t.port_index];
                bool provides = port.direction == PortDirection::Provides;
                if (provides && ev->direction != Direction::In) {
                    error(t.loc, "trigger " + t.port + "." + t.event + " is an out event of a provides port");
                } else if (!provides && ev->direction != Direction::Out) {
                    error(t.loc, "trigger " + t.port + "." + t.event + " is an in event of a requires port");
                }
            }
            if (ev->direction == Direction::Out) out_clause = true;
            if (ev->direction == Direction::In) reply_types_.push_back(ev->return_type.resolved);
        }
        check_stmt(on.body);
        bool valued = false;
        for (auto t : reply_types_) valued = valued || t.kind != TypeKind::Void;
        auto counts = reply_counts(on.body);
        if (valued) {
            if (counts.count(0)) error(on.loc, "missing reply on some path of a valued event");
            if (counts.count(2)) error(on.loc, "reply executed more than once");
        } else if (contains_reply(on.body)) {
            error(on.loc, out_clause ? "reply in out-event clause" : "reply in void event handler");
        }
        if (out_clause && iface_ && contains_illegal(on.body)) {
            error(on.loc, "illegal is not allowed in an out-event clause");
        }
        in_handler_ = false;
    }

    void check_overlaps(const Behaviour& beh, const std::vector<FlatClause>& clauses) {
        std::int64_t domain = 1;
        std::vector<std::int64_t> lo, size;
        for (const auto& v : beh.variables) {
            Type t = v.type.resolved;
            std::int64_t l = 0, n = 1;
            if (t.kind == TypeKind::Bool) n = 2;
            else if (t.kind == TypeKind::Enum) n = static_cast<std::int64_t>(model_.types[t.decl].literals.size());
            else if (t.kind == TypeKind::Int) {
                l = model_.types[t.decl].lo;
                n = model_.types[t.decl].hi - l + 1;
            }
            lo.push_back(l);
            size.push_back(n);
            if (n > overlap_domain_limit || (domain *= n) > overlap_domain_limit) return;
        }
        std::map<std::pair<int, int>, std::vector<const FlatClause*>> by_trigger;
        for (const auto& fc : clauses) by_trigger[{fc.trigger->port_index, fc.trigger->event_index}].push_back(&fc);
        std::set<std::pair<int, int>> reported;
        std::vector<std::int64_t> state(beh.variables.size());
        for (std::int64_t k = 0; k < domain; ++k) {
            std::int64_t rest = k;
            for (std::size_t i = 0; i < state.size(); ++i) {
                state[i] = lo[i] + rest % size[i];
                rest /= size[i];
            }
            for (const auto& [key, list] : by_trigger) {
                if (list.size() < 2 || reported.count(key)) continue;
                const FlatClause* first = nullptr;
                for (const FlatClause* fc : list) {
                    bool on = true;
                    for (const auto& g : fc->guards) on = on && eval_pure(g, state) != 0;
                    if (!on) continue;
                    if (first) {
                        std::string name = (fc->trigger->port.empty() ? "" : fc->trigger->port + ".") + fc->trigger->event;
                        error(fc->trigger->loc, "overlapping guards for trigger " + name);
                        reported.insert(key);
                        break;
                    }
                    first = fc;
                }
            }
        }
    }

    void check_recursion(const Behaviour& beh) {
        std::vector<std::set<int>> calls(beh.functions.size());
        std::function<void(const ExprPtr&, std::set<int>&)> expr_calls = [&](const ExprPtr& e, std::set<int>& out) {
            if (!e) return;
            if (e->kind == ExprKind::Call && e->function >= 0) out.insert(e->function);
            for (const auto& op : e->operands) expr_calls(op, out);
        };
        std::function<void(const StmtPtr&, std::set<int>&)> stmt_calls = [&](const StmtPtr& s, std::set<int>& out) {
            if (!s) return;
            expr_calls(s->expr, out);
            for (const auto& c : s->body) stmt_calls(c, out);
            stmt_calls(s->then_branch, out);
            stmt_calls(s->else_branch, out);
        };
        for (std::size_t i = 0; i < beh.functions.size(); ++i) stmt_calls(beh.functions[i].body, calls[i]);
        std::vector<int> colour(beh.functions.size(), 0);
        std::function<bool(int)> cyclic = [&](int f) {
            colour[f] = 1;
            for (int g : calls[f]) {
                if (colour[g] == 1 || (colour[g] == 0 && cyclic(g))) return true;
            }
            colour[f] = 2;
            return false;
        };
        for (std::size_t i = 0; i < beh.functions.size(); ++i) {
            std::fill(colour.begin(), colour.end(), 0);
            if (cyclic(static_cast<int>(i))) error(beh.functions[i].loc, "recursive function " + beh.functions[i].name);
        }
    }

    // Statements

    struct FunctionCtx {
        const Function* function;
    };

    void check_stmt(const StmtPtr& s) {
        if (!s) return;
        switch (s->kind) {
        case StmtKind::Block:
            for (const auto& c : s->body) check_stmt(c);
            break;
        case StmtKind::Local:
            if (s->type.resolved.kind == TypeKind::Void) error(s->loc, "local " + s->name + " cannot be void");
            [[fallthrough]];
        case StmtKind::Assign: {
            auto t = type_of(s->expr, Context::Value);
            if (t && !assignable(s->target_type, *t)) error(s->loc, "type mismatch in assignment to " + s->name);
            break;
        }
        case StmtKind::If: {
            auto t = type_of(s->expr, Context::Value);
            if (t && t->kind != TypeKind::Bool) error(s->expr->loc, "condition must be boolean");
            check_stmt(s->then_branch);
            check_stmt(s->else_branch);
            break;
        }
        case StmtKind::Expression:
            if (s->expr->kind != ExprKind::Call && s->expr->kind != ExprKind::EventCall) {
                error(s->loc, "expression statement must be a call");
            }
            type_of(s->expr, Context::Statement);
            break;
        case StmtKind::Reply: {
            if (function_) {
                error(s->loc, "reply is not allowed in functions");
                break;
            }
            auto t = type_of(s->expr, Context::Value);
            if (!t) break;
            for (auto rt : reply_types_) {
                if (rt.kind != TypeKind::Void && !assignable(rt, *t)) error(s->loc, "reply value has the wrong type");
            }
            break;
        }
        case StmtKind::Return: {
            if (!function_) {
                error(s->loc, "return outside of a function");
                break;
            }
            Type rt = function_->function->return_type.resolved;
            if (!s->expr) {
                if (rt.kind != TypeKind::Void) error(s->loc, "missing return value");
                break;
            }
            if (rt.kind == TypeKind::Void) {
                error(s->loc, "void function returns a value");
                break;
            }
            auto t = type_of(s->expr, Context::Value);
            if (t && !assignable(rt, *t)) error(s->loc, "return value has the wrong type");
            break;
        }
        case StmtKind::Illegal:
        case StmtKind::Empty:
            break;
        }
    }

    static std::set<int> reply_counts(const StmtPtr& s) {
        if (!s) return {0};
        switch (s->kind) {
        case StmtKind::Illegal: return {};
        case StmtKind::Reply: return {1};
        case StmtKind::Block: {
            std::set<int> acc{0};
            for (const auto& c : s->body) {
                std::set<int> next;
                for (int a : acc) {
                    for (int b : reply_counts(c)) next.insert(std::min(a + b, 2));
                }
                acc = std::move(next);
            }
            return acc;
        }
        case StmtKind::If: {
            auto a = reply_counts(s->then_branch);
            auto b = reply_counts(s->else_branch);
            a.insert(b.begin(), b.end());
            return a;
        }
        default: return {0};
        }
    }

    static bool contains_kind(const StmtPtr& s, StmtKind kind) {
        if (!s) return false;
        if (s->kind == kind) return true;
        for (const auto& c : s->body) {
            if (contains_kind(c, kind)) return true;
        }
        return contains_kind(s->then_branch, kind) || contains_kind(s->else_branch, kind);
    }

    static bool contains_reply(const StmtPtr& s) { return contains_kind(s, StmtKind::Reply); }
    static bool contains_illegal(const StmtPtr& s) { return contains_kind(s, StmtKind::Illegal); }

    static bool always_returns(const StmtPtr& s) {
        if (!s) return false;
        switch (s->kind) {
        case StmtKind::Return:
        case StmtKind::Illegal: return true;
        case StmtKind::Block:
            for (const auto& c : s->body) {
                if (always_returns(c)) return true;
            }
            return false;
        case StmtKind::If: return always_returns(s->then_branch) && always_returns(s->else_branch);
        default: return false;
        }
    }

    // Expressions

    enum class Context { Guard, Value, Statement };

    static bool is_constant(const ExprPtr& e) {
        if (!e) return false;
        switch (e->kind) {
        case ExprKind::Var:
        case ExprKind::FieldTest:
        case ExprKind::Call:
        case ExprKind::EventCall: return false;
        default:
            for (const auto& op : e->operands) {
                if (!is_constant(op)) return false;
            }
            return true;
        }
    }

    std::optional<Type> type_of(const ExprPtr& e, Context ctx) {
        if (ctx != Context::Guard && count_calls(e) > 1) {
            error(e->loc, "at most one call per expression");
            return std::nullopt;
        }
        return infer(e, ctx == Context::Statement);
    }

    std::optional<Type> infer(const ExprPtr& e, bool statement_level) {
        switch (e->kind) {
        case ExprKind::Bool: return Type{TypeKind::Bool, -1};
        case ExprKind::Int: return Type{TypeKind::Integer, -1};
        case ExprKind::EnumLiteral: return Type{TypeKind::Enum, e->type_decl};
        case ExprKind::FieldTest: return Type{TypeKind::Bool, -1};
        case ExprKind::Var: return e->var_type;
        case ExprKind::Dotted: return std::nullopt;
        case ExprKind::Not: {
            auto t = infer(e->operands[0], false);
            if (t && t->kind != TypeKind::Bool) error(e->loc, "operand of ! must be boolean");
            return Type{TypeKind::Bool, -1};
        }
        case ExprKind::Neg: {
            auto t = infer(e->operands[0], false);
            if (t && !int_like(*t)) error(e->loc, "operand of - must be an integer");
            return Type{TypeKind::Integer, -1};
        }
        case ExprKind::Binary: {
            auto a = infer(e->operands[0], false);
            auto b = infer(e->operands[1], false);
            if (!a || !b) return std::nullopt;
            switch (e->op) {
            case BinOp::And:
            case BinOp::Or:
                if (a->kind != TypeKind::Bool || b->kind != TypeKind::Bool) error(e->loc, "operands of && and || must be boolean");
                return Type{TypeKind::Bool, -1};
            case BinOp::Eq:
            case BinOp::Ne:
                if (!assignable(*a, *b) || a->kind == TypeKind::Void) error(e->loc, "incomparable operands");
                return Type{TypeKind::Bool, -1};
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge:
                if (!int_like(*a) || !int_like(*b)) error(e->loc, "ordering requires integer operands");
                return Type{TypeKind::Bool, -1};
            case BinOp::Add:
            case BinOp::Sub:
                if (!int_like(*a) || !int_like(*b)) error(e->loc, "arithmetic requires integer operands");
                return Type{TypeKind::Integer, -1};
            }
            return std::nullopt;
        }
        case ExprKind::Call: {
            if (e->function < 0) return std::nullopt;
            const Function& f = beh_->functions[e->function];
            check_arguments(e, f.params, "function " + f.name);
            Type rt = f.return_type.resolved;
            if (rt.kind == TypeKind::Void && !statement_level) error(e->loc, "void function " + f.name + " used as a value");
            return rt;
        }
        case ExprKind::EventCall: {
            if (e->port < 0 || e->event < 0 || !comp_) return std::nullopt;
            const Port& port = comp_->ports[e->port];
            if (port.interface_index < 0) return std::nullopt;
            const EventDecl& ev = model_.interfaces[port.interface_index].events[e->event];
            std::string name = port.name + "." + ev.name;
            if (port.direction == PortDirection::Provides && ev.direction == Direction::In) {
                error(e->loc, "cannot call in event " + name + " of a provides port");
            } else if (port.direction == PortDirection::Requires && ev.direction == Direction::Out) {
                error(e->loc, "cannot call out event " + name + " of a requires port");
            }
            check_arguments(e, ev.params, "event " + name);
            Type rt = ev.return_type.resolved;
            if (rt.kind == TypeKind::Void && !statement_level) error(e->loc, "void event " + name + " used as a value");
            return rt;
        }
        }
        return std::nullopt;
    }

    void check_arguments(const ExprPtr& e, const std::vector<Param>& params, const std::string& what) {
        if (e->operands.size() != params.size()) {
            error(e->loc, what + " expects " + std::to_string(params.size()) + " argument(s)");
            return;
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto t = infer(e->operands[i], false);
            if (t && !assignable(params[i].type.resolved, *t)) {
                error(e->operands[i]->loc, "argument " + std::to_string(i + 1) + " of " + what + " has the wrong type");
            }
        }
    }

    // Systems

    struct EndpointInfo {
        bool ok = false;
        bool external = false;
        PortDirection direction = PortDirection::Provides;
        std::string interface;
    };

    const std::vector<Port>* ports_of(std::string_view definition) const {
        if (const auto* c = model_.find_component(definition)) return &c->ports;
        if (const auto* s = model_.find_system(definition)) return &s->ports;
        return nullptr;
    }

    EndpointInfo describe(const SystemDef& sys, const Endpoint& ep) {
        EndpointInfo info;
        const std::vector<Port>* ports = nullptr;
        if (ep.instance.empty()) {
            info.external = true;
            ports = &sys.ports;
        } else {
            const Instance* inst = nullptr;
            for (const auto& i : sys.instances) {
                if (i.name == ep.instance) inst = &i;
            }
            if (!inst) {
                error(ep.loc, "unresolved instance " + ep.instance);
                return info;
            }
            ports = ports_of(inst->component);
            if (!ports) return info;
        }
        for (const auto& p : *ports) {
            if (p.name == ep.port) {
                info.ok = true;
                info.direction = p.direction;
                info.interface = p.interface;
                return info;
            }
        }
        error(ep.loc, "unresolved port " + to_string(ep));
        return info;
    }

    void check_system(const SystemDef& sys) {
        subject_ = sys.name;
        iface_ = nullptr;
        comp_ = nullptr;
        check_port_names(sys.ports);
        std::set<std::string> inst_names;
        for (const auto& inst : sys.instances) {
            if (!inst_names.insert(inst.name).second) error(inst.loc, "duplicate instance " + inst.name);
            if (model_.find_interface(inst.component)) error(inst.loc, inst.component + " is an interface, not a component");
        }

        std::map<std::pair<std::string, std::string>, int> bound;
        std::map<std::string, std::set<std::string>> uses;  // requirer instance -> provider instances
        for (const auto& b : sys.bindings) {
            EndpointInfo l = describe(sys, b.left);
            EndpointInfo r = describe(sys, b.right);
            for (const Endpoint* ep : {&b.left, &b.right}) {
                if (++bound[{ep->instance, ep->port}] == 2) error(b.loc, "port bound twice: " + to_string(*ep));
            }
            if (!l.ok || !r.ok) continue;
            if (l.external && r.external) {
                error(b.loc, "binding connects two external ports");
                continue;
            }
            if (l.interface != r.interface) {
                error(b.loc, "binding connects different interfaces " + l.interface + " and " + r.interface);
            }
            if (l.external || r.external) {
                if (l.direction != r.direction) {
                    error(b.loc, "external port must bind to an instance port of the same direction");
                }
            } else if (l.direction == r.direction) {
                error(b.loc, "binding must pair a provides port with a requires port");
            } else {
                const Endpoint& req = l.direction == PortDirection::Requires ? b.left : b.right;
                const Endpoint& prov = l.direction == PortDirection::Requires ? b.right : b.left;
                uses[req.instance].insert(prov.instance);
            }
        }
        for (const auto& p : sys.ports) {
            if (!bound.count({"", p.name})) error(p.loc, "port not bound: " + p.name);
        }
        for (const auto& inst : sys.instances) {
            const auto* ports = ports_of(inst.component);
            if (!ports) continue;
            for (const auto& p : *ports) {
                if (!bound.count({inst.name, p.name})) error(inst.loc, "port not bound: " + inst.name + "." + p.name);
            }
        }

        std::map<std::string, int> colour;
        std::function<bool(const std::string&)> cyclic = [&](const std::string& n) {
            colour[n] = 1;
            for (const auto& m : uses[n]) {
                if (colour[m] == 1 || (colour[m] == 0 && cyclic(m))) return true;
            }
            colour[n] = 2;
            return false;
        };
        for (const auto& inst : sys.instances) {
            if (colour[inst.name] == 0 && cyclic(inst.name)) {
                error(sys.loc, "circular binding of ports involving " + inst.name);
                break;
            }
        }
    }

    void check_containment() {
        std::map<std::string, int> colour;
        std::function<bool(const SystemDef&)> cyclic = [&](const SystemDef& s) {
            colour[s.name] = 1;
            for (const auto& inst : s.instances) {
                const SystemDef* sub = model_.find_system(inst.component);
                if (!sub) continue;
                if (colour[sub->name] == 1 || (colour[sub->name] == 0 && cyclic(*sub))) return true;
            }
            colour[s.name] = 2;
            return false;
        };
        for (const auto& s : model_.systems) {
            if (colour[s.name] == 0 && cyclic(s)) {
                subject_ = s.name;
                error(s.loc, "system containment is cyclic at " + s.name);
            }
        }
    }

    const Model& model_;
    std::vector<Diagnostic> diags_;
    std::string subject_;
    const InterfaceDef* iface_ = nullptr;
    const ComponentDef* comp_ = nullptr;
    const Behaviour* beh_ = nullptr;
    FunctionCtx* function_ = nullptr;
    std::vector<Type> reply_types_;
    bool in_handler_ = false;
};

}  // namespace

std::vector<Diagnostic> check_wellformed(const Model& model) { return Checker(model).run(); }

}  // namespace dzn::frontend
