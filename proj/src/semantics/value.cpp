#include "dzn/semantics.hpp"

namespace dzn::semantics {

Value make_bool(bool b) { return Value{TypeKind::Bool, -1, b ? 1 : 0}; }
Value make_enum(int decl, int literal) { return Value{TypeKind::Enum, decl, literal}; }
Value make_int(Type type, std::int64_t n) { return Value{type.kind, type.decl, n}; }

std::string to_string(const Model& model, const Value& value) {
    switch (value.kind) {
    case TypeKind::Void: return "void";
    case TypeKind::Bool: return value.v ? "true" : "false";
    case TypeKind::Enum: {
        const auto& t = model.types.at(value.decl);
        return t.name + "." + t.literals.at(static_cast<std::size_t>(value.v));
    }
    case TypeKind::Int:
    case TypeKind::Integer: return std::to_string(value.v);
    }
    return "?";
}

std::vector<Value> domain(const Model& model, Type type) {
    std::vector<Value> out;
    switch (type.kind) {
    case TypeKind::Void: out.push_back(Value{}); break;
    case TypeKind::Bool:
        out.push_back(make_bool(false));
        out.push_back(make_bool(true));
        break;
    case TypeKind::Enum:
        for (std::size_t i = 0; i < model.types.at(type.decl).literals.size(); ++i) {
            out.push_back(make_enum(type.decl, static_cast<int>(i)));
        }
        break;
    case TypeKind::Int: {
        const auto& t = model.types.at(type.decl);
        for (std::int64_t n = t.lo; n <= t.hi; ++n) out.push_back(make_int(type, n));
        break;
    }
    case TypeKind::Integer: throw std::logic_error("unbounded integer has no finite domain");
    }
    return out;
}

std::vector<std::vector<Value>> argument_tuples(const Model& model, const std::vector<Param>& params) {
    std::vector<std::vector<Value>> tuples{{}};
    for (const auto& p : params) {
        auto dom = domain(model, p.type.resolved);
        std::vector<std::vector<Value>> next;
        for (const auto& prefix : tuples) {
            for (const auto& v : dom) {
                auto t = prefix;
                t.push_back(v);
                next.push_back(std::move(t));
            }
        }
        tuples = std::move(next);
    }
    return tuples;
}

namespace {

std::string qualified(std::string_view port, std::string_view event) {
    std::string s;
    if (!port.empty()) {
        s += port;
        s += '.';
    }
    s += event;
    return s;
}

std::string args_suffix(const Model& model, const std::vector<Value>& args) {
    if (args.empty()) return {};
    std::string s = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) s += ',';
        s += to_string(model, args[i]);
    }
    return s + ")";
}

}  // namespace

std::string call_label(const Model& model, std::string_view port, std::string_view event, const std::vector<Value>& args) {
    return qualified(port, event) + args_suffix(model, args);
}

std::string reply_label(const Model& model, std::string_view port, std::string_view event, const Value& value) {
    return qualified(port, event) + " -> " + to_string(model, value);
}

std::string out_label(const Model& model, std::string_view port, std::string_view event, const std::vector<Value>& args) {
    return qualified(port, event) + args_suffix(model, args) + "!";
}

std::string label(const Model& model, const Action& a) {
    switch (a.kind) {
    case ActionKind::Call: return call_label(model, a.port, a.event, a.args);
    case ActionKind::Reply: return reply_label(model, a.port, a.event, a.value);
    case ActionKind::Out: return out_label(model, a.port, a.event, a.args);
    case ActionKind::Tau: return tau_label;
    case ActionKind::Illegal: return illegal_label;
    case ActionKind::RangeError: return range_error_label(a.variable);
    }
    return "?";
}

bool is_failure_label(std::string_view label) {
    return label == illegal_label || label.starts_with("range_error(");
}

std::set<std::string> interface_alphabet(const Model& model, const InterfaceDef& def, std::string_view port) {
    std::set<std::string> out;
    for (const auto& ev : def.events) {
        for (const auto& args : argument_tuples(model, ev.params)) {
            if (ev.direction == Direction::Out) {
                out.insert(out_label(model, port, ev.name, args));
                continue;
            }
            out.insert(call_label(model, port, ev.name, args));
        }
        if (ev.direction == Direction::In && ev.return_type.resolved.kind != TypeKind::Void) {
            for (const auto& v : domain(model, ev.return_type.resolved)) out.insert(reply_label(model, port, ev.name, v));
        }
    }
    return out;
}

}  // namespace dzn::semantics
