#include "internal.hpp"

#include <set>

namespace dzn::frontend::detail {

namespace {

struct LocalVar {
    std::string name;
    int slot;
    Type type;
};

class Resolver {
public:
    Resolver(Model& model, std::vector<Diagnostic>& diagnostics) : model_(model), diags_(diagnostics) {}

    void run() {
        check_definition_names();
        check_global_types();
        for (auto& iface : model_.interfaces) resolve_interface(iface);
        for (auto& comp : model_.components) resolve_component(comp);
        for (auto& sys : model_.systems) resolve_system(sys);
    }

private:
    void error(const SourceLoc& loc, std::string message) {
        diags_.push_back(make_error(DiagnosticKind::WellFormedness, loc, std::move(message), owner_));
    }

    void check_definition_names() {
        std::set<std::string> seen;
        for (const auto& ref : model_.order) {
            std::string name(model_.name_of(ref));
            if (!seen.insert(name).second) error(model_.loc_of(ref), "duplicate definition " + name);
        }
    }

    void check_global_types() {
        std::set<std::string> seen;
        for (const auto& t : model_.types) {
            if (t.in_behaviour) continue;
            if (!seen.insert(t.name).second) error(t.loc, "duplicate type " + t.name);
        }
    }

    void resolve_type(TypeName& tn) {
        if (tn.name == "void") {
            tn.resolved = {TypeKind::Void, -1};
            return;
        }
        if (tn.name == "bool") {
            tn.resolved = {TypeKind::Bool, -1};
            return;
        }
        int found = find_type(tn.name);
        if (found < 0) {
            error(tn.loc, "unresolved type " + tn.name);
            tn.resolved = {TypeKind::Void, -1};
            return;
        }
        tn.resolved = {model_.types[found].kind, found};
    }

    int find_type(std::string_view name) const {
        for (std::size_t i = 0; i < model_.types.size(); ++i) {
            const auto& t = model_.types[i];
            if (t.in_behaviour && t.owner == owner_ && t.name == name) return static_cast<int>(i);
        }
        for (std::size_t i = 0; i < model_.types.size(); ++i) {
            const auto& t = model_.types[i];
            if (!t.in_behaviour && t.name == name) return static_cast<int>(i);
        }
        return -1;
    }

    void resolve_interface(InterfaceDef& iface) {
        owner_ = iface.name;
        iface_ = &iface;
        comp_ = nullptr;
        std::set<std::string> names;
        for (auto& ev : iface.events) {
            if (!names.insert(ev.name).second) error(ev.loc, "duplicate event " + ev.name + " in " + iface.name);
            resolve_type(ev.return_type);
            for (auto& p : ev.params) resolve_type(p.type);
        }
        if (iface.behaviour) resolve_behaviour(*iface.behaviour);
    }

    void resolve_component(ComponentDef& comp) {
        owner_ = comp.name;
        iface_ = nullptr;
        comp_ = &comp;
        resolve_ports(comp.ports);
        if (comp.behaviour) resolve_behaviour(*comp.behaviour);
    }

    void resolve_ports(std::vector<Port>& ports) {
        for (auto& port : ports) {
            port.interface_index = -1;
            for (std::size_t i = 0; i < model_.interfaces.size(); ++i) {
                if (model_.interfaces[i].name == port.interface) port.interface_index = static_cast<int>(i);
            }
            if (port.interface_index < 0) error(port.loc, "unresolved interface " + port.interface);
        }
    }

    void resolve_system(SystemDef& sys) {
        owner_ = sys.name;
        iface_ = nullptr;
        comp_ = nullptr;
        resolve_ports(sys.ports);
        for (const auto& inst : sys.instances) {
            if (!model_.find_component(inst.component) && !model_.find_system(inst.component)) {
                error(inst.loc, "unresolved component " + inst.component);
            }
        }
    }

    void resolve_behaviour(Behaviour& beh) {
        beh_ = &beh;
        std::set<std::string> names;
        for (auto& v : beh.variables) {
            if (!names.insert(v.name).second) error(v.loc, "duplicate variable " + v.name);
            resolve_type(v.type);
            locals_.clear();
            resolve_expr(v.init);
        }
        std::set<std::string> fnames;
        for (auto& f : beh.functions) {
            if (!fnames.insert(f.name).second) error(f.loc, "duplicate function " + f.name);
        }
        for (auto& f : beh.functions) {
            resolve_type(f.return_type);
            begin_frame();
            for (auto& p : f.params) {
                resolve_type(p.type);
                declare(p.name, p.type.resolved, p.loc);
            }
            resolve_stmt(f.body);
            f.frame_size = max_slot_;
        }
        for (auto& item : beh.items) resolve_item(item);
        beh_ = nullptr;
    }

    void resolve_item(BehaviourItem& item) {
        if (auto* g = std::get_if<std::shared_ptr<GuardedBlock>>(&item)) {
            locals_.clear();
            resolve_expr((*g)->guard);
            for (auto& sub : (*g)->items) resolve_item(sub);
            return;
        }
        auto& on = *std::get<std::shared_ptr<OnClause>>(item);
        const EventDecl* first_event = nullptr;
        for (auto& t : on.triggers) {
            const EventDecl* ev = resolve_trigger(t);
            if (!first_event) first_event = ev;
        }
        const Trigger& head = on.triggers.front();
        for (const auto& t : on.triggers) {
            if (t.formals != head.formals) {
                error(t.loc, "triggers sharing an on clause must have identical formal parameters");
            }
        }
        begin_frame();
        for (std::size_t i = 0; i < head.formals.size(); ++i) {
            Type type{TypeKind::Void, -1};
            if (first_event && i < first_event->params.size()) type = first_event->params[i].type.resolved;
            declare(head.formals[i], type, head.loc);
        }
        resolve_stmt(on.body);
        on.frame_size = max_slot_;
    }

    const EventDecl* resolve_trigger(Trigger& t) {
        const InterfaceDef* iface = nullptr;
        if (iface_) {
            if (!t.port.empty()) {
                error(t.loc, "interface triggers have no port: " + t.port + "." + t.event);
                return nullptr;
            }
            iface = iface_;
        } else {
            if (t.port.empty()) {
                error(t.loc, "component triggers must name a port: " + t.event);
                return nullptr;
            }
            t.port_index = comp_->find_port(t.port);
            if (t.port_index < 0) {
                error(t.loc, "unresolved port " + t.port);
                return nullptr;
            }
            int ii = comp_->ports[t.port_index].interface_index;
            if (ii < 0) return nullptr;  // already reported
            iface = &model_.interfaces[ii];
        }
        t.event_index = iface->find_event(t.event);
        if (t.event_index < 0) {
            error(t.loc, "unresolved event " + t.event + (t.port.empty() ? "" : " on port " + t.port));
            return nullptr;
        }
        const EventDecl& ev = iface->events[t.event_index];
        if (t.formals.size() != ev.params.size()) {
            error(t.loc, "trigger " + t.event + " expects " + std::to_string(ev.params.size()) + " parameter(s)");
        }
        return &ev;
    }

    void begin_frame() {
        locals_.clear();
        next_slot_ = 0;
        max_slot_ = 0;
        block_floor_ = 0;
    }

    void declare(const std::string& name, Type type, const SourceLoc& loc) {
        for (auto it = locals_.rbegin(); it != locals_.rend() && it->slot >= block_floor_; ++it) {
            if (it->name == name) error(loc, "duplicate local " + name);
        }
        locals_.push_back({name, next_slot_, type});
        ++next_slot_;
        if (next_slot_ > max_slot_) max_slot_ = next_slot_;
    }

    const LocalVar* find_local(std::string_view name) const {
        for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
            if (it->name == name) return &*it;
        }
        return nullptr;
    }

    int find_state(std::string_view name) const {
        if (!beh_) return -1;
        for (std::size_t i = 0; i < beh_->variables.size(); ++i) {
            if (beh_->variables[i].name == name) return static_cast<int>(i);
        }
        return -1;
    }

    bool bind_variable(const std::string& name, VarScope& scope, int& slot, Type* type) {
        if (const LocalVar* local = find_local(name)) {
            scope = VarScope::Local;
            slot = local->slot;
            if (type) *type = local->type;
            return true;
        }
        int s = find_state(name);
        if (s >= 0) {
            scope = VarScope::State;
            slot = s;
            if (type) *type = beh_->variables[s].type.resolved;
            return true;
        }
        return false;
    }

    void resolve_stmt(const StmtPtr& s) {
        if (!s) return;
        switch (s->kind) {
        case StmtKind::Block: {
            std::size_t mark = locals_.size();
            int floor = block_floor_;
            int slot_mark = next_slot_;
            block_floor_ = next_slot_;
            for (auto& child : s->body) resolve_stmt(child);
            locals_.resize(mark);
            next_slot_ = slot_mark;
            block_floor_ = floor;
            break;
        }
        case StmtKind::Local:
            resolve_type(s->type);
            resolve_expr(s->expr);
            s->scope = VarScope::Local;
            s->slot = next_slot_;
            s->target_type = s->type.resolved;
            declare(s->name, s->type.resolved, s->loc);
            break;
        case StmtKind::Assign:
            if (!bind_variable(s->name, s->scope, s->slot, &s->target_type)) {
                error(s->loc, "unresolved variable " + s->name);
            }
            resolve_expr(s->expr);
            break;
        case StmtKind::If:
            resolve_expr(s->expr);
            resolve_stmt(s->then_branch);
            resolve_stmt(s->else_branch);
            break;
        case StmtKind::Expression:
        case StmtKind::Reply:
        case StmtKind::Return:
            resolve_expr(s->expr);
            break;
        case StmtKind::Illegal:
        case StmtKind::Empty:
            break;
        }
    }

    void resolve_expr(const ExprPtr& e) {
        if (!e) return;
        for (auto& op : e->operands) resolve_expr(op);
        switch (e->kind) {
        case ExprKind::Var:
            if (!bind_variable(e->name, e->scope, e->slot, &e->var_type)) {
                error(e->loc, "unresolved variable " + e->name);
            }
            break;
        case ExprKind::Dotted: {
            Type vtype;
            if (bind_variable(e->qualifier, e->scope, e->slot, &vtype)) {
                e->kind = ExprKind::FieldTest;
                e->var_type = vtype;
                if (vtype.kind != TypeKind::Enum) {
                    error(e->loc, e->qualifier + " is not of an enum type");
                    break;
                }
                e->type_decl = vtype.decl;
            } else {
                int t = find_type(e->qualifier);
                if (t < 0 || model_.types[t].kind != TypeKind::Enum) {
                    error(e->loc, "unresolved name " + e->qualifier);
                    break;
                }
                e->kind = ExprKind::EnumLiteral;
                e->type_decl = t;
            }
            const auto& lits = model_.types[e->type_decl].literals;
            for (std::size_t i = 0; i < lits.size(); ++i) {
                if (lits[i] == e->name) e->literal = static_cast<int>(i);
            }
            if (e->literal < 0) error(e->loc, "unknown literal " + e->name + " of enum " + model_.types[e->type_decl].name);
            break;
        }
        case ExprKind::EventCall: {
            if (!comp_) {
                error(e->loc, "event calls are not allowed in interface behaviour: " + e->qualifier + "." + e->name);
                break;
            }
            e->port = comp_->find_port(e->qualifier);
            if (e->port < 0) {
                error(e->loc, "unresolved port " + e->qualifier);
                break;
            }
            int ii = comp_->ports[e->port].interface_index;
            if (ii < 0) break;
            e->event = model_.interfaces[ii].find_event(e->name);
            if (e->event < 0) error(e->loc, "unresolved event " + e->name + " on port " + e->qualifier);
            break;
        }
        case ExprKind::Call: {
            if (beh_) {
                for (std::size_t i = 0; i < beh_->functions.size(); ++i) {
                    if (beh_->functions[i].name == e->name) e->function = static_cast<int>(i);
                }
            }
            if (e->function < 0) error(e->loc, "unresolved function " + e->name);
            break;
        }
        default:
            break;
        }
    }

    Model& model_;
    std::vector<Diagnostic>& diags_;
    std::string owner_;
    const InterfaceDef* iface_ = nullptr;
    const ComponentDef* comp_ = nullptr;
    const Behaviour* beh_ = nullptr;
    std::vector<LocalVar> locals_;
    int next_slot_ = 0;
    int max_slot_ = 0;
    int block_floor_ = 0;
};

}  // namespace

void resolve(Model& model, std::vector<Diagnostic>& diagnostics) {
    std::size_t before = diagnostics.size();
    Resolver(model, diagnostics).run();
    model.resolved = diagnostics.size() == before;
}

}  // namespace dzn::frontend::detail
