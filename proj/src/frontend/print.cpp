#include "dzn/frontend.hpp"

#include <sstream>

namespace dzn::frontend {

namespace {

const char* op_text(BinOp op) {
    switch (op) {
    case BinOp::Or: return "||";
    case BinOp::And: return "&&";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    }
    return "?";
}

class Printer {
public:
    explicit Printer(const Model& model) : model_(model) {}

    std::string run() {
        for (std::size_t i = 0; i < model_.types.size(); ++i) {
            const auto& t = model_.types[i];
            if (t.owner.empty() && t.declared_in.empty()) type_decl(static_cast<int>(i));
        }
        bool first = out_.tellp() == 0;
        for (const auto& ref : model_.order) {
            if (!first) out_ << "\n";
            first = false;
            switch (ref.kind) {
            case DefinitionKind::Interface: interface(model_.interfaces[ref.index]); break;
            case DefinitionKind::Component: component(model_.components[ref.index]); break;
            case DefinitionKind::System: system(model_.systems[ref.index]); break;
            }
        }
        return out_.str();
    }

private:
    void indent() { out_ << std::string(depth_ * 2, ' '); }

    void type_decl(int index) {
        const auto& t = model_.types[index];
        indent();
        if (t.kind == TypeKind::Enum) {
            out_ << "enum " << t.name << " {";
            for (std::size_t i = 0; i < t.literals.size(); ++i) out_ << (i ? ", " : "") << t.literals[i];
            out_ << "};\n";
        } else {
            out_ << "subint " << t.name << " {" << t.lo << ".." << t.hi << "};\n";
        }
    }

    void params(const std::vector<Param>& ps) {
        out_ << "(";
        for (std::size_t i = 0; i < ps.size(); ++i) out_ << (i ? ", " : "") << ps[i].type.name << " " << ps[i].name;
        out_ << ")";
    }

    void interface(const InterfaceDef& def) {
        out_ << "interface " << def.name << " {\n";
        ++depth_;
        for (int t : def.types) type_decl(t);
        for (const auto& ev : def.events) {
            indent();
            out_ << (ev.direction == Direction::In ? "in " : "out ") << ev.return_type.name << " " << ev.name;
            params(ev.params);
            out_ << ";\n";
        }
        if (def.behaviour) behaviour(*def.behaviour);
        --depth_;
        out_ << "}\n";
    }

    void ports(const std::vector<Port>& ps) {
        for (const auto& p : ps) {
            indent();
            out_ << (p.direction == PortDirection::Provides ? "provides " : "requires ") << p.interface << " " << p.name
                 << ";\n";
        }
    }

    void component(const ComponentDef& def) {
        out_ << "component " << def.name << " {\n";
        ++depth_;
        ports(def.ports);
        if (def.behaviour) behaviour(*def.behaviour);
        --depth_;
        out_ << "}\n";
    }

    void system(const SystemDef& def) {
        out_ << "component " << def.name << " {\n";
        ++depth_;
        ports(def.ports);
        indent();
        out_ << "system {\n";
        ++depth_;
        for (const auto& inst : def.instances) {
            indent();
            out_ << inst.component << " " << inst.name << ";\n";
        }
        for (const auto& b : def.bindings) {
            indent();
            out_ << to_string(b.left) << " <=> " << to_string(b.right) << ";\n";
        }
        --depth_;
        indent();
        out_ << "}\n";
        --depth_;
        out_ << "}\n";
    }

    void behaviour(const Behaviour& beh) {
        indent();
        out_ << "behaviour {\n";
        ++depth_;
        for (int t : beh.types) type_decl(t);
        for (const auto& v : beh.variables) {
            indent();
            out_ << v.type.name << " " << v.name << " = " << expr(v.init) << ";\n";
        }
        for (const auto& f : beh.functions) {
            indent();
            out_ << f.return_type.name << " " << f.name;
            params(f.params);
            out_ << " ";
            statement(f.body, false);
        }
        for (const auto& item : beh.items) behaviour_item(item);
        --depth_;
        indent();
        out_ << "}\n";
    }

    void behaviour_item(const BehaviourItem& item) {
        indent();
        if (auto* g = std::get_if<std::shared_ptr<GuardedBlock>>(&item)) {
            out_ << "[" << expr((*g)->guard) << "] {\n";
            ++depth_;
            for (const auto& i : (*g)->items) behaviour_item(i);
            --depth_;
            indent();
            out_ << "}\n";
            return;
        }
        const auto& on = std::get<std::shared_ptr<OnClause>>(item);
        out_ << "on ";
        for (std::size_t i = 0; i < on->triggers.size(); ++i) {
            const auto& t = on->triggers[i];
            if (i) out_ << ", ";
            if (!t.port.empty()) out_ << t.port << ".";
            out_ << t.event;
            if (t.parens) {
                out_ << "(";
                for (std::size_t k = 0; k < t.formals.size(); ++k) out_ << (k ? ", " : "") << t.formals[k];
                out_ << ")";
            }
        }
        out_ << ": ";
        statement(on->body, false);
    }

    // Prints a statement starting at the current column; the caller has already indented.
    void statement(const StmtPtr& s, bool do_indent) {
        if (do_indent) indent();
        switch (s->kind) {
        case StmtKind::Block:
            out_ << "{\n";
            ++depth_;
            for (const auto& c : s->body) statement(c, true);
            --depth_;
            indent();
            out_ << "}\n";
            break;
        case StmtKind::Assign: out_ << s->name << " = " << expr(s->expr) << ";\n"; break;
        case StmtKind::Local: out_ << s->type.name << " " << s->name << " = " << expr(s->expr) << ";\n"; break;
        case StmtKind::If:
            out_ << "if (" << expr(s->expr) << ") ";
            statement(s->then_branch, false);
            if (s->else_branch) {
                indent();
                out_ << "else ";
                statement(s->else_branch, false);
            }
            break;
        case StmtKind::Expression: out_ << expr(s->expr) << ";\n"; break;
        case StmtKind::Reply: out_ << "reply(" << expr(s->expr) << ");\n"; break;
        case StmtKind::Return:
            out_ << "return";
            if (s->expr) out_ << " " << expr(s->expr);
            out_ << ";\n";
            break;
        case StmtKind::Illegal: out_ << "illegal;\n"; break;
        case StmtKind::Empty: out_ << ";\n"; break;
        }
    }

    std::string operand(const ExprPtr& e) {
        if (e->kind == ExprKind::Binary) return "(" + expr(e) + ")";
        return expr(e);
    }

    std::string arguments(const std::vector<ExprPtr>& args) {
        std::string s = "(";
        for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + expr(args[i]);
        return s + ")";
    }

    std::string expr(const ExprPtr& e) {
        switch (e->kind) {
        case ExprKind::Bool: return e->bool_value ? "true" : "false";
        case ExprKind::Int: return std::to_string(e->int_value);
        case ExprKind::Dotted:
        case ExprKind::EnumLiteral:
        case ExprKind::FieldTest: return e->qualifier + "." + e->name;
        case ExprKind::Var: return e->name;
        case ExprKind::Not: return "!" + operand(e->operands[0]);
        case ExprKind::Neg: return "-" + operand(e->operands[0]);
        case ExprKind::Binary:
            return operand(e->operands[0]) + " " + op_text(e->op) + " " + operand(e->operands[1]);
        case ExprKind::Call: return e->name + arguments(e->operands);
        case ExprKind::EventCall: return e->qualifier + "." + e->name + arguments(e->operands);
        }
        return "";
    }

    const Model& model_;
    std::ostringstream out_;
    int depth_ = 0;
};

}  // namespace

std::string print(const Model& model) { return Printer(model).run(); }

}  // namespace dzn::frontend
