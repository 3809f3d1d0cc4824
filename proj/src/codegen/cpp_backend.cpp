#include "dzn/codegen.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#ifndef DZN_HOST_CXX
#define DZN_HOST_CXX "c++"
#endif

namespace dzn::codegen {

namespace {

// Inward events of the generated machine: provides in-events and requires out-events of a
// component, or every event of an interface.
struct Inward {
    int port = -1;
    int event = -1;
    std::string label_head;  // "p.e" or "e"
    const EventDecl* decl = nullptr;
};

class CppEmitter {
public:
    CppEmitter(const Model& m, std::string_view subject) : m_(m) {
        auto ref = m.find(subject);
        if (!ref || ref->kind == DefinitionKind::System) {
            throw std::invalid_argument("no component or interface named " + std::string(subject));
        }
        if (ref->kind == DefinitionKind::Component) {
            comp_ = &m.components.at(ref->index);
            beh_ = comp_->behaviour ? &*comp_->behaviour : nullptr;
            name_ = comp_->name;
            source_ = comp_->loc.file;
        } else {
            iface_ = &m.interfaces.at(ref->index);
            beh_ = iface_->behaviour ? &*iface_->behaviour : nullptr;
            name_ = iface_->name;
            source_ = iface_->loc.file;
        }
        cls_ = name_ == "Runtime" || name_ == "Failure" ? name_ + "_" : name_;
        collect_inward();
    }

    std::vector<GeneratedFile> files() {
        std::string src = source();  // registers the emitters the header declares
        return {{cls_ + ".hpp", header()}, {cls_ + ".cpp", src}, {"main.cpp", stub()}};
    }

private:
    // Names

    std::string unique(std::string base) {
        std::string n = base;
        for (int k = 2; !used_.insert(n).second; ++k) n = base + "_" + std::to_string(k);
        return n;
    }

    const EventDecl& event_decl(int port, int event) const {
        if (iface_) return iface_->events.at(event);
        return m_.interfaces.at(comp_->ports.at(port).interface_index).events.at(event);
    }

    std::string port_name(int port) const { return port < 0 ? std::string() : comp_->ports.at(port).name; }

    std::string head(int port, const EventDecl& ev) const {
        std::string p = port_name(port);
        return p.empty() ? ev.name : p + "." + ev.name;
    }

    void collect_inward() {
        if (iface_) {
            for (std::size_t e = 0; e < iface_->events.size(); ++e) {
                const auto& ev = iface_->events[e];
                inward_.push_back({-1, static_cast<int>(e), ev.name, &ev});
            }
        } else {
            for (std::size_t p = 0; p < comp_->ports.size(); ++p) {
                const Port& port = comp_->ports[p];
                if (port.interface_index < 0) continue;
                const auto& in = m_.interfaces.at(port.interface_index);
                Direction want = port.direction == PortDirection::Provides ? Direction::In : Direction::Out;
                for (std::size_t e = 0; e < in.events.size(); ++e) {
                    if (in.events[e].direction != want) continue;
                    inward_.push_back({static_cast<int>(p), static_cast<int>(e), port.name + "." + in.events[e].name, &in.events[e]});
                }
            }
        }
        for (auto& in : inward_) handler_[{in.port, in.event}] = unique("on_" + mangle(in.label_head));
        if (beh_) {
            for (std::size_t f = 0; f < beh_->functions.size(); ++f) function_.push_back(unique("fn_" + beh_->functions[f].name));
            for (const auto& v : beh_->variables) variable_.push_back(unique("v_" + v.name));
        }
    }

    static std::string mangle(const std::string& s) {
        std::string out;
        for (char c : s) out += c == '.' ? '_' : c;
        return out;
    }

    // Types

    std::string show(Type t, const std::string& v) {
        switch (t.kind) {
        case TypeKind::Bool: return "show_bool(" + v + ")";
        case TypeKind::Enum: enums_.insert(t.decl); return "show_" + enum_name(t.decl) + "(" + v + ")";
        case TypeKind::Int:
        case TypeKind::Integer: return "std::to_string(" + v + ")";
        case TypeKind::Void: break;
        }
        return "std::string(\"void\")";
    }

    std::string parse(Type t, const std::string& text, const std::string& v) {
        switch (t.kind) {
        case TypeKind::Bool: return "parse_bool(" + text + ", " + v + ")";
        case TypeKind::Enum: enums_.insert(t.decl); return "parse_" + enum_name(t.decl) + "(" + text + ", " + v + ")";
        case TypeKind::Int:
        case TypeKind::Integer: return "parse_int(" + text + ", " + v + ")";
        case TypeKind::Void: break;
        }
        return "false";
    }

    std::string enum_name(int decl) const { return m_.types.at(decl).name + "_" + std::to_string(decl); }

    std::string narrow(Type target, const std::string& v, const std::string& name) const {
        if (target.kind != TypeKind::Int) return v;
        const auto& t = m_.types.at(target.decl);
        return "chk(" + v + ", " + std::to_string(t.lo) + ", " + std::to_string(t.hi) + ", \"" + name + "\")";
    }

    // Expressions

    static bool impure(const ExprPtr& e) {
        if (!e) return false;
        if (e->kind == ExprKind::Call || e->kind == ExprKind::EventCall) return true;
        return std::any_of(e->operands.begin(), e->operands.end(), [](const ExprPtr& o) { return impure(o); });
    }

    std::string var(VarScope scope, int slot) const {
        return scope == VarScope::State ? variable_.at(slot) : "f[" + std::to_string(slot) + "]";
    }

    std::string arguments(const ExprPtr& e, const std::vector<Param>& params) {
        if (e->operands.empty()) return "()";
        std::string s = "({";
        for (std::size_t i = 0; i < e->operands.size(); ++i) {
            if (i) s += ", ";
            s += narrow(params[i].type.resolved, expr(e->operands[i]), params[i].name);
        }
        return s + "})";
    }

    static const char* op(BinOp o) {
        switch (o) {
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

    std::string expr(const ExprPtr& e) {
        switch (e->kind) {
        case ExprKind::Bool: return e->bool_value ? "1" : "0";
        case ExprKind::Int: return std::to_string(e->int_value);
        case ExprKind::EnumLiteral: {
            const auto& t = m_.types.at(e->type_decl);
            return std::to_string(e->literal) + "/*" + t.name + "." + t.literals.at(e->literal) + "*/";
        }
        case ExprKind::FieldTest: {
            const auto& t = m_.types.at(e->var_type.decl);
            return "(" + var(e->scope, e->slot) + " == " + std::to_string(e->literal) + "/*" + t.literals.at(e->literal) + "*/)";
        }
        case ExprKind::Var: return var(e->scope, e->slot);
        case ExprKind::Not: return "!(" + expr(e->operands[0]) + ")";
        case ExprKind::Neg: return "-(" + expr(e->operands[0]) + ")";
        case ExprKind::Binary: {
            std::string a = expr(e->operands[0]);
            std::string b = expr(e->operands[1]);
            if (e->op != BinOp::And && e->op != BinOp::Or && impure(e->operands[0]) && impure(e->operands[1])) {
                // keep left-to-right evaluation of the two calls
                return "[&] { std::int64_t l = " + a + "; std::int64_t r = " + b + "; return std::int64_t(l " + op(e->op) + " r); }()";
            }
            return "(" + a + " " + op(e->op) + " " + b + ")";
        }
        case ExprKind::Call: {
            const Function& f = beh_->functions.at(e->function);
            return function_.at(e->function) + arguments(e, f.params);
        }
        case ExprKind::EventCall: {
            const EventDecl& ev = event_decl(e->port, e->event);
            auto key = std::make_pair(e->port, e->event);
            if (!emitter_.count(key)) emitter_[key] = unique("ev_" + mangle(head(e->port, ev)));
            return emitter_[key] + arguments(e, ev.params);
        }
        case ExprKind::Dotted: break;
        }
        throw std::logic_error("unresolved expression");
    }

    // Statements

    struct Context {
        Type reply;     // clause of a valued event
        Type result;    // function return type
        std::string function;
    };

    void line(std::ostringstream& o, int depth, const std::string& text) { o << std::string(4 * depth, ' ') << text << '\n'; }

    void stmt(std::ostringstream& o, int d, const StmtPtr& s, const Context& cx) {
        if (!s) return;
        switch (s->kind) {
        case StmtKind::Block:
            for (const auto& c : s->body) {
                if (c && c->kind == StmtKind::Block) {
                    line(o, d, "{");
                    stmt(o, d + 1, c, cx);
                    line(o, d, "}");
                } else {
                    stmt(o, d, c, cx);
                }
            }
            return;
        case StmtKind::Assign:
        case StmtKind::Local:
            line(o, d, var(s->scope, s->slot) + " = " + narrow(s->target_type, expr(s->expr), s->name) + ";");
            return;
        case StmtKind::If:
            line(o, d, "if (" + expr(s->expr) + ") {");
            stmt(o, d + 1, s->then_branch, cx);
            if (s->else_branch) {
                line(o, d, "} else {");
                stmt(o, d + 1, s->else_branch, cx);
            }
            line(o, d, "}");
            return;
        case StmtKind::Expression: line(o, d, expr(s->expr) + ";"); return;
        case StmtKind::Reply:
            line(o, d, "reply = " + narrow(cx.reply, expr(s->expr), "reply") + ";");
            line(o, d, "replied = true;");
            return;
        case StmtKind::Return:
            line(o, d, s->expr ? "return " + narrow(cx.result, expr(s->expr), cx.function) + ";" : "return 0;");
            return;
        case StmtKind::Illegal: line(o, d, "throw Failure{\"illegal\"};"); return;
        case StmtKind::Empty: return;
        }
    }

    // Clause selection, in the order of the flattened behaviour.
    struct Entry {
        std::vector<ExprPtr> guards;
        const OnClause* clause;
    };

    void flatten(const std::vector<BehaviourItem>& items, std::vector<ExprPtr>& guards, int port, int event, std::vector<Entry>& out) {
        for (const auto& item : items) {
            if (auto* g = std::get_if<std::shared_ptr<GuardedBlock>>(&item)) {
                guards.push_back((*g)->guard);
                flatten((*g)->items, guards, port, event, out);
                guards.pop_back();
            } else {
                const auto& on = std::get<std::shared_ptr<OnClause>>(item);
                for (const auto& t : on->triggers) {
                    if (t.event_index == event && (iface_ || t.port_index == port)) out.push_back({guards, on.get()});
                }
            }
        }
    }

    static std::string where(const SourceLoc& loc) {
        std::string file = loc.file.substr(loc.file.find_last_of('/') + 1);
        return file + ":" + std::to_string(loc.line);
    }

    std::string params_signature(std::size_t n) const {
        return n == 0 ? "()" : "(const std::array<std::int64_t, " + std::to_string(n) + ">& a)";
    }

    void handler(std::ostringstream& o, const Inward& in) {
        const EventDecl& ev = *in.decl;
        std::size_t n = ev.params.size();
        bool valued = ev.direction == Direction::In && ev.return_type.resolved.kind != TypeKind::Void;
        line(o, 0, "void " + cls_ + "::" + handler_[{in.port, in.event}] + params_signature(n) + " {");
        if (!beh_) {
            // an interface without behaviour accepts its in-events
            if (iface_ && ev.direction == Direction::In) {
                line(o, 1, "return;");
            } else {
                line(o, 1, "throw Failure{\"unhandled\"};");
            }
            line(o, 0, "}");
            o << '\n';
            return;
        }
        std::vector<Entry> entries;
        std::vector<ExprPtr> guards;
        flatten(beh_->items, guards, in.port, in.event, entries);
        bool total = false;
        for (const auto& en : entries) {
            std::string cond;
            for (const auto& g : en.guards) cond += (cond.empty() ? "" : " && ") + expr(g);
            int d = 1;
            if (!cond.empty()) {
                line(o, 1, "if (" + cond + ") {");
                d = 2;
            }
            line(o, d, "// " + where(en.clause->loc));
            std::size_t frame = std::max<std::size_t>({static_cast<std::size_t>(en.clause->frame_size), n, 1});
            line(o, d, "std::int64_t f[" + std::to_string(frame) + "] = {};");
            for (std::size_t i = 0; i < n; ++i) line(o, d, "f[" + std::to_string(i) + "] = a[" + std::to_string(i) + "];");
            if (valued) line(o, d, "std::int64_t reply = 0;");
            if (valued) line(o, d, "bool replied = false;");
            stmt(o, d, en.clause->body, {ev.return_type.resolved, {}, {}});
            if (valued) {
                line(o, d, "rt_.log(\"" + in.label_head + " -> \" + (replied ? " + show(ev.return_type.resolved, "reply") +
                               " : std::string(\"void\")));");
            }
            line(o, d, "return;");
            if (cond.empty()) {
                total = true;
                break;
            }
            line(o, 1, "}");
        }
        if (!total) {
            bool requires_out = comp_ && ev.direction == Direction::Out;
            line(o, 1, requires_out ? "throw Failure{\"illegal\"};" : "throw Failure{\"unhandled\"};");
        }
        line(o, 0, "}");
        o << '\n';
    }

    void function(std::ostringstream& o, std::size_t index) {
        const Function& f = beh_->functions[index];
        std::size_t n = f.params.size();
        line(o, 0, "std::int64_t " + cls_ + "::" + function_[index] + params_signature(n) + " {");
        std::size_t frame = std::max<std::size_t>({static_cast<std::size_t>(f.frame_size), n, 1});
        line(o, 1, "std::int64_t f[" + std::to_string(frame) + "] = {};");
        for (std::size_t i = 0; i < n; ++i) line(o, 1, "f[" + std::to_string(i) + "] = a[" + std::to_string(i) + "];");
        stmt(o, 1, f.body, {{}, f.return_type.resolved, f.name});
        line(o, 1, "return 0;");
        line(o, 0, "}");
        o << '\n';
    }

    void emitter(std::ostringstream& o, std::pair<int, int> key, const std::string& name) {
        const EventDecl& ev = event_decl(key.first, key.second);
        std::size_t n = ev.params.size();
        std::string ret = ev.return_type.resolved.kind == TypeKind::Void ? "void" : "std::int64_t";
        line(o, 0, ret + " " + cls_ + "::" + name + params_signature(n) + " {");
        std::string label = "std::string(\"" + head(key.first, ev) + (n ? "(\")" : "\")");
        for (std::size_t i = 0; i < n; ++i) {
            label += std::string(i ? " + \",\"" : "") + " + " + show(ev.params[i].type.resolved, "a[" + std::to_string(i) + "]");
        }
        if (n) label += " + \")\"";
        if (ev.direction == Direction::Out) label += " + \"!\"";
        line(o, 1, "std::string label = " + label + ";");
        line(o, 1, "rt_.log(label);");
        if (ret != "void") {
            line(o, 1, "std::int64_t v = 0;");
            line(o, 1, "if (!" + parse(ev.return_type.resolved, "rt_.reply(label)", "v") + ") throw Failure{label + \" -> ?\"};");
            line(o, 1, "return v;");
        }
        line(o, 0, "}");
        o << '\n';
    }

    void dispatch(std::ostringstream& o) {
        line(o, 0, "bool " + cls_ + "::dispatch(const std::string& label) {");
        line(o, 1, "std::vector<std::string> args;");
        for (const auto& in : inward_) {
            const EventDecl& ev = *in.decl;
            std::size_t n = ev.params.size();
            bool out = ev.direction == Direction::Out;
            line(o, 1, "if (split(label, \"" + in.label_head + "\", " + std::to_string(n) + ", " + (out ? "true" : "false") + ", args)) {");
            std::string call = handler_[{in.port, in.event}] + "(";
            if (n) {
                line(o, 2, "std::array<std::int64_t, " + std::to_string(n) + "> a{};");
                for (std::size_t i = 0; i < n; ++i) {
                    line(o, 2, "if (!" + parse(ev.params[i].type.resolved, "args[" + std::to_string(i) + "]", "a[" + std::to_string(i) + "]") +
                                   ") return false;");
                }
                call += "a";
            }
            line(o, 2, call + ");");
            line(o, 2, "return true;");
            line(o, 1, "}");
        }
        line(o, 1, "return false;");
        line(o, 0, "}");
        o << '\n';
    }

    std::string source() {
        // bodies first: they register the event emitters and enum helpers they use
        std::ostringstream body;
        line(body, 0, cls_ + "::" + cls_ + "(Runtime& rt) : rt_(rt) {");
        if (beh_) {
            for (std::size_t i = 0; i < beh_->variables.size(); ++i) {
                const auto& v = beh_->variables[i];
                line(body, 1, variable_[i] + " = " + narrow(v.type.resolved, expr(v.init), v.name) + ";");
            }
        }
        line(body, 0, "}");
        body << '\n';
        dispatch(body);
        for (const auto& in : inward_) handler(body, in);
        if (beh_) {
            for (std::size_t f = 0; f < beh_->functions.size(); ++f) function(body, f);
        }
        std::ostringstream emitters;
        for (const auto& [key, name] : emitter_) emitter(emitters, key, name);

        std::ostringstream o;
        o << "// " << cls_ << " state machine, generated by dzn from " << where(comp_ ? comp_->loc : iface_->loc) << "\n";
        o << "#include \"" << cls_ << ".hpp\"\n\n";
        o << "namespace dzn_gen {\n\nnamespace {\n\n";
        o << runtime_helpers();
        for (int e : enums_) o << enum_helpers(e);
        o << "}  // namespace\n\n";
        o << body.str() << emitters.str();
        o << "}  // namespace dzn_gen\n";
        return o.str();
    }

    std::string runtime_helpers() const {
        return R"GEN(std::int64_t chk(std::int64_t v, std::int64_t lo, std::int64_t hi, const char* name) {
    if (v < lo || v > hi) throw Failure{std::string("range_error(") + name + ")"};
    return v;
}

std::string show_bool(std::int64_t v) { return v ? "true" : "false"; }

bool parse_bool(const std::string& s, std::int64_t& v) {
    if (s == "true" || s == "false") {
        v = s == "true";
        return true;
    }
    return false;
}

bool parse_int(const std::string& s, std::int64_t& v) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size();
}

// Splits "head(x,y)" or "head" (with a trailing '!' for out events) into its arguments.
bool split(const std::string& label, const std::string& head, std::size_t n, bool out, std::vector<std::string>& args) {
    if (label.compare(0, head.size(), head) != 0) return false;
    std::string rest = label.substr(head.size());
    if (out) {
        if (rest.empty() || rest.back() != '!') return false;
        rest.pop_back();
    }
    args.clear();
    if (n == 0) return rest.empty();
    if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')') return false;
    std::string inner = rest.substr(1, rest.size() - 2);
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = inner.find(',', pos);
        args.push_back(inner.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return args.size() == n;
}

)GEN";
    }

    std::string enum_helpers(int decl) const {
        const auto& t = m_.types.at(decl);
        std::string n = enum_name(decl);
        std::string names;
        for (std::size_t i = 0; i < t.literals.size(); ++i) names += (i ? ", \"" : "\"") + t.name + "." + t.literals[i] + "\"";
        std::string size = std::to_string(t.literals.size());
        std::ostringstream o;
        o << "const char* const " << n << "_names[" << size << "] = {" << names << "};\n\n";
        o << "std::string show_" << n << "(std::int64_t v) { return " << n << "_names[v]; }\n\n";
        o << "bool parse_" << n << "(const std::string& s, std::int64_t& v) {\n";
        o << "    for (std::int64_t i = 0; i < " << size << "; ++i) {\n";
        o << "        if (s == " << n << "_names[i]) {\n";
        o << "            v = i;\n            return true;\n        }\n    }\n    return false;\n}\n\n";
        return o.str();
    }

    std::string header() {
        std::ostringstream o;
        o << "// " << cls_ << " state machine, generated by dzn\n";
        o << "#pragma once\n\n#include <array>\n#include <cstdint>\n#include <functional>\n#include <string>\n#include <vector>\n\n";
        o << "namespace dzn_gen {\n\n";
        o << "// illegal, unhandled or range_error(x); ends the run\n";
        o << "struct Failure {\n    std::string label;\n};\n\n";
        o << "struct Runtime {\n";
        o << "    std::function<void(const std::string&)> log;           // outward label\n";
        o << "    std::function<std::string(const std::string&)> reply;  // value returned to a valued call\n";
        o << "};\n\n";
        o << "class " << cls_ << " {\npublic:\n";
        o << "    explicit " << cls_ << "(Runtime& rt);\n";
        o << "    // Runs the step for an inward label; false when the label is not one.\n";
        o << "    bool dispatch(const std::string& label);\n\nprivate:\n";
        for (const auto& in : inward_) o << "    void " << handler_[{in.port, in.event}] << params_signature(in.decl->params.size()) << ";\n";
        if (beh_) {
            for (std::size_t f = 0; f < beh_->functions.size(); ++f) {
                o << "    std::int64_t " << function_[f] << params_signature(beh_->functions[f].params.size()) << ";\n";
            }
        }
        for (const auto& [key, name] : emitter_) {
            const EventDecl& ev = event_decl(key.first, key.second);
            o << "    " << (ev.return_type.resolved.kind == TypeKind::Void ? "void " : "std::int64_t ") << name
              << params_signature(ev.params.size()) << ";\n";
        }
        o << "\n    Runtime& rt_;\n";
        if (beh_) {
            for (std::size_t i = 0; i < beh_->variables.size(); ++i) o << "    std::int64_t " << variable_[i] << " = 0;  // " << beh_->variables[i].name << "\n";
        }
        o << "};\n\n}  // namespace dzn_gen\n";
        return o.str();
    }

    std::string stub() const {
        std::string s = R"GEN(// Trace conformance stub, generated by dzn
#include "CLASS.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Line {
    std::size_t number;
    std::string text;
};

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    std::size_t b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: " << argv[0] << " TRACE\n";
        return 2;
    }
    std::ifstream in(argv[1]);
    if (!in) {
        std::cerr << "cannot read " << argv[1] << "\n";
        return 2;
    }
    std::vector<Line> lines;
    std::string text;
    for (std::size_t n = 1; std::getline(in, text); ++n) {
        text = trim(text);
        if (!text.empty()) lines.push_back({n, text});
    }

    std::size_t next = 0;
    auto mismatch = [&](const std::string& got) {
        if (next < lines.size()) {
            std::cout << "MISMATCH line " << lines[next].number << ": expected " << lines[next].text << ", got " << got << "\n";
        } else {
            std::size_t n = lines.empty() ? 1 : lines.back().number + 1;
            std::cout << "MISMATCH line " << n << ": expected end of trace, got " << got << "\n";
        }
        std::exit(1);
    };
    dzn_gen::Runtime rt;
    rt.log = [&](const std::string& label) {
        if (next >= lines.size() || lines[next].text != label) mismatch(label);
        ++next;
    };
    rt.reply = [&](const std::string& call) {
        std::string head = call + " -> ";
        if (next >= lines.size() || lines[next].text.compare(0, head.size(), head) != 0) mismatch(head + "?");
        return lines[next++].text.substr(head.size());
    };

    try {
        dzn_gen::CLASS machine(rt);
        while (next < lines.size()) {
            std::size_t at = next++;
            if (!machine.dispatch(lines[at].text)) {
                next = at;
                mismatch("nothing");
            }
        }
    } catch (const dzn_gen::Failure& f) {
        mismatch(f.label);
    }
    std::cout << "ACCEPTED " << lines.size() << "\n";
    return 0;
}
)GEN";
        for (std::size_t pos; (pos = s.find("CLASS")) != std::string::npos;) s.replace(pos, 5, cls_);
        return s;
    }

    const Model& m_;
    const ComponentDef* comp_ = nullptr;
    const InterfaceDef* iface_ = nullptr;
    const Behaviour* beh_ = nullptr;
    std::string name_, cls_, source_;
    std::set<std::string> used_;
    std::vector<Inward> inward_;
    std::map<std::pair<int, int>, std::string> handler_;
    std::map<std::pair<int, int>, std::string> emitter_;
    std::vector<std::string> function_;
    std::vector<std::string> variable_;
    std::set<int> enums_;
};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

bool is_emission(const std::string& line) {
    std::size_t b = line.find_first_not_of(' ');
    return b != std::string::npos && line.compare(b, 3, "ev_") == 0 && line.size() >= 2 && line.compare(line.size() - 2, 2, ");") == 0;
}

}  // namespace

RunResult Backend::build_and_run(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir,
                                 const std::filesystem::path& trace_file) const {
    return run(build(files, dir), trace_file);
}

std::vector<GeneratedFile> CppBackend::emit(std::string_view subject, const Model& model) const {
    if (!model.resolved) throw std::invalid_argument("model is not resolved");
    return CppEmitter(model, subject).files();
}

std::vector<GeneratedFile> FaultyBackend::emit(std::string_view subject, const Model& model) const {
    auto files = CppBackend::emit(subject, model);
    for (auto& f : files) {
        if (f.path == "main.cpp" || !f.path.ends_with(".cpp")) continue;
        std::vector<std::string> lines;
        std::istringstream in(f.text);
        for (std::string l; std::getline(in, l);) lines.push_back(l);
        for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
            if (is_emission(lines[i]) && is_emission(lines[i + 1]) && lines[i] != lines[i + 1]) {
                std::swap(lines[i], lines[i + 1]);
                std::string text;
                for (const auto& l : lines) text += l + '\n';
                f.text = text;
                return files;
            }
        }
    }
    return files;
}

void write_files(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir) {
    for (const auto& f : files) {
        auto p = dir / f.path;
        std::filesystem::create_directories(p.parent_path());
        if (std::filesystem::exists(p) && read_file(p) == f.text) continue;
        std::ofstream out(p, std::ios::binary);
        out << f.text;
        if (!out) throw std::runtime_error("cannot write " + p.string());
    }
}

std::filesystem::path CppBackend::build(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    auto exe = dir / "stub";
    // unchanged sources keep the previous build
    bool fresh = std::filesystem::exists(exe);
    for (const auto& f : files) {
        auto p = dir / f.path;
        if (!std::filesystem::exists(p) || read_file(p) != f.text ||
            (fresh && std::filesystem::last_write_time(p) > std::filesystem::last_write_time(exe))) {
            fresh = false;
        }
    }
    write_files(files, dir);
    if (fresh) return exe;

    const char* env = std::getenv("CXX");
    std::string cxx = env && *env ? env : DZN_HOST_CXX;
    std::string cmd = quote(cxx) + " -std=c++17 -O1 -o " + quote(exe.string());
    for (const auto& f : files) {
        if (f.path.ends_with(".cpp")) cmd += " " + quote((dir / f.path).string());
    }
    auto log = dir / "build.log";
    cmd += " > " + quote(log.string()) + " 2>&1";
    std::filesystem::remove(exe);
    int rc = std::system(cmd.c_str());
    if (rc != 0 || !std::filesystem::exists(exe)) throw BuildError("build failed in " + dir.string() + ":\n" + read_file(log));
    return exe;
}

RunResult CppBackend::run(const std::filesystem::path& executable, const std::filesystem::path& trace_file) const {
    std::string cmd = quote(executable.string()) + " " + quote(trace_file.string()) + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("cannot run " + executable.string());
    RunResult r;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
    int status = pclose(pipe);

    static const std::regex accepted(R"(^ACCEPTED (\d+)\n?$)");
    static const std::regex mismatch(R"(^MISMATCH line (\d+): expected (.*), got (.*)\n?$)");
    std::smatch m;
    if (status == 0 && std::regex_match(r.output, m, accepted)) {
        r.accepted = true;
    } else if (std::regex_match(r.output, m, mismatch)) {
        r.line = std::stoul(m[1].str());
        r.expected = m[2].str();
        r.actual = m[3].str();
    } else {
        r.actual = "stub protocol error";
    }
    return r;
}

std::unique_ptr<Backend> make_backend(std::string_view name) {
    if (name == "cpp") return std::make_unique<CppBackend>();
    if (name == "cpp-faulty") return std::make_unique<FaultyBackend>();
    throw std::invalid_argument("unknown backend: " + std::string(name));
}

std::vector<std::string> backend_names() { return {"cpp", "cpp-faulty"}; }

}  // namespace dzn::codegen
