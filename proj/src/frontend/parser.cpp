#include "internal.hpp"

#include <charconv>
#include <stdexcept>

namespace dzn::frontend::detail {

namespace {

struct SyntaxError {
    SourceLoc loc;
    std::string message;
};

class Parser {
public:
    Parser(const std::vector<Token>& tokens, Model& model) : tokens_(tokens), model_(model) {}

    void parse_file() {
        while (peek().kind != TokenKind::End) {
            if (at("enum") || at("subint")) {
                parse_type_decl("", false, "");
            } else if (at("interface")) {
                parse_interface();
            } else if (at("component")) {
                parse_component();
            } else {
                fail("expected 'interface', 'component', 'enum' or 'subint'");
            }
        }
    }

private:
    const Token& peek(std::size_t k = 0) const {
        std::size_t i = pos_ + k;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }

    bool at(std::string_view text, std::size_t k = 0) const {
        const Token& t = peek(k);
        return t.kind != TokenKind::End && t.kind != TokenKind::Integer && t.text == text;
    }

    bool at_identifier(std::size_t k = 0) const {
        const Token& t = peek(k);
        return t.kind == TokenKind::Identifier && !is_keyword(t.text);
    }

    [[noreturn]] void fail(std::string_view expected) const {
        const Token& t = peek();
        std::string got = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError{t.loc, "unexpected " + got + ", " + std::string(expected)};
    }

    const Token& next() {
        const Token& t = peek();
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }

    const Token& expect(std::string_view text) {
        if (!at(text)) fail("expected '" + std::string(text) + "'");
        return next();
    }

    bool accept(std::string_view text) {
        if (!at(text)) return false;
        next();
        return true;
    }

    const Token& expect_identifier() {
        if (!at_identifier()) fail("expected identifier");
        return next();
    }

    std::int64_t parse_integer_token() {
        bool negative = accept("-");
        if (peek().kind != TokenKind::Integer) fail("expected integer");
        const Token& t = next();
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
            throw SyntaxError{t.loc, "integer literal out of range: " + t.text};
        }
        return negative ? -v : v;
    }

    // Types

    bool at_type_start() const { return at("bool") || at("void") || at_identifier(); }

    TypeName parse_type_name() {
        TypeName tn;
        tn.loc = peek().loc;
        if (at("bool") || at("void")) {
            tn.name = next().text;
        } else {
            tn.name = expect_identifier().text;
        }
        return tn;
    }

    int parse_type_decl(const std::string& owner, bool in_behaviour, const std::string& declared_in) {
        TypeDecl decl;
        decl.loc = peek().loc;
        decl.owner = owner;
        decl.in_behaviour = in_behaviour;
        decl.declared_in = declared_in;
        if (accept("enum")) {
            decl.kind = TypeKind::Enum;
            decl.name = expect_identifier().text;
            expect("{");
            decl.literals.push_back(expect_identifier().text);
            while (accept(",")) {
                if (at("}")) break;
                decl.literals.push_back(expect_identifier().text);
            }
            expect("}");
        } else {
            expect("subint");
            decl.kind = TypeKind::Int;
            decl.name = expect_identifier().text;
            expect("{");
            decl.lo = parse_integer_token();
            expect("..");
            decl.hi = parse_integer_token();
            if (decl.hi < decl.lo) throw SyntaxError{decl.loc, "empty integer range in subint " + decl.name};
            expect("}");
        }
        expect(";");
        model_.types.push_back(std::move(decl));
        return static_cast<int>(model_.types.size()) - 1;
    }

    // Definitions

    void parse_interface() {
        InterfaceDef def;
        def.loc = expect("interface").loc;
        def.name = expect_identifier().text;
        expect("{");
        while (!at("}")) {
            if (at("in") || at("out")) {
                def.events.push_back(parse_event());
            } else if (at("enum") || at("subint")) {
                def.types.push_back(parse_type_decl("", false, def.name));
            } else if (at("behaviour")) {
                if (def.behaviour) fail("only one behaviour per interface");
                def.behaviour = parse_behaviour(def.name);
            } else {
                fail("expected event declaration, type declaration or behaviour");
            }
        }
        expect("}");
        accept(";");
        model_.order.push_back({DefinitionKind::Interface, static_cast<int>(model_.interfaces.size())});
        model_.interfaces.push_back(std::move(def));
    }

    EventDecl parse_event() {
        EventDecl ev;
        ev.loc = peek().loc;
        ev.direction = next().text == "in" ? Direction::In : Direction::Out;
        ev.return_type = parse_type_name();
        ev.name = expect_identifier().text;
        ev.params = parse_params();
        expect(";");
        return ev;
    }

    std::vector<Param> parse_params() {
        std::vector<Param> params;
        expect("(");
        if (!at(")")) {
            do {
                Param p;
                p.loc = peek().loc;
                p.type = parse_type_name();
                p.name = expect_identifier().text;
                params.push_back(std::move(p));
            } while (accept(","));
        }
        expect(")");
        return params;
    }

    Port parse_port() {
        Port port;
        port.direction = next().text == "provides" ? PortDirection::Provides : PortDirection::Requires;
        port.loc = peek().loc;
        port.interface = expect_identifier().text;
        port.name = expect_identifier().text;
        expect(";");
        return port;
    }

    void parse_component() {
        SourceLoc loc = expect("component").loc;
        std::string name = expect_identifier().text;
        expect("{");
        std::vector<Port> ports;
        while (at("provides") || at("requires")) ports.push_back(parse_port());

        if (at("system")) {
            SystemDef sys;
            sys.name = name;
            sys.loc = loc;
            sys.ports = std::move(ports);
            next();
            expect("{");
            while (!at("}")) {
                if (at_identifier() && at_identifier(1)) {
                    Instance inst;
                    inst.loc = peek().loc;
                    inst.component = next().text;
                    inst.name = next().text;
                    expect(";");
                    sys.instances.push_back(std::move(inst));
                } else {
                    Binding b;
                    b.loc = peek().loc;
                    b.left = parse_endpoint();
                    expect("<=>");
                    b.right = parse_endpoint();
                    expect(";");
                    sys.bindings.push_back(std::move(b));
                }
            }
            expect("}");
            expect("}");
            accept(";");
            model_.order.push_back({DefinitionKind::System, static_cast<int>(model_.systems.size())});
            model_.systems.push_back(std::move(sys));
            return;
        }

        ComponentDef def;
        def.name = name;
        def.loc = loc;
        def.ports = std::move(ports);
        if (at("behaviour")) def.behaviour = parse_behaviour(def.name);
        if (at("provides") || at("requires")) fail("ports must be declared before the behaviour");
        expect("}");
        accept(";");
        model_.order.push_back({DefinitionKind::Component, static_cast<int>(model_.components.size())});
        model_.components.push_back(std::move(def));
    }

    Endpoint parse_endpoint() {
        Endpoint e;
        e.loc = peek().loc;
        std::string first = expect_identifier().text;
        if (accept(".")) {
            e.instance = first;
            e.port = expect_identifier().text;
        } else {
            e.port = first;
        }
        return e;
    }

    // Behaviour

    Behaviour parse_behaviour(const std::string& owner) {
        Behaviour beh;
        beh.loc = expect("behaviour").loc;
        expect("{");
        while (!at("}")) {
            if (at("enum") || at("subint")) {
                beh.types.push_back(parse_type_decl(owner, true, ""));
            } else if (at("[") || at("on")) {
                beh.items.push_back(parse_behaviour_item());
            } else if (at_type_start() && at_identifier(1) && at("(", 2)) {
                beh.functions.push_back(parse_function());
            } else if (at_type_start() && at_identifier(1)) {
                Variable v;
                v.loc = peek().loc;
                v.type = parse_type_name();
                v.name = expect_identifier().text;
                expect("=");
                v.init = parse_expr();
                expect(";");
                beh.variables.push_back(std::move(v));
            } else {
                fail("expected type, variable, function, guard or on clause");
            }
        }
        expect("}");
        return beh;
    }

    Function parse_function() {
        Function f;
        f.loc = peek().loc;
        f.return_type = parse_type_name();
        f.name = expect_identifier().text;
        f.params = parse_params();
        if (!at("{")) fail("expected function body");
        f.body = parse_statement();
        return f;
    }

    BehaviourItem parse_behaviour_item() {
        if (at("[")) {
            auto g = std::make_shared<GuardedBlock>();
            g->loc = next().loc;
            g->guard = parse_expr();
            expect("]");
            if (accept("{")) {
                while (!at("}")) {
                    if (!at("[") && !at("on")) fail("expected guard or on clause");
                    g->items.push_back(parse_behaviour_item());
                }
                expect("}");
            } else {
                if (!at("[") && !at("on")) fail("expected guard or on clause");
                g->items.push_back(parse_behaviour_item());
            }
            return g;
        }
        auto on = std::make_shared<OnClause>();
        on->loc = expect("on").loc;
        do {
            on->triggers.push_back(parse_trigger());
        } while (accept(","));
        expect(":");
        on->body = parse_statement();
        return on;
    }

    Trigger parse_trigger() {
        Trigger t;
        t.loc = peek().loc;
        std::string first = expect_identifier().text;
        if (accept(".")) {
            t.port = first;
            t.event = expect_identifier().text;
        } else {
            t.event = first;
        }
        if (accept("(")) {
            t.parens = true;
            if (!at(")")) {
                do {
                    t.formals.push_back(expect_identifier().text);
                } while (accept(","));
            }
            expect(")");
        }
        return t;
    }

    // Statements

    StmtPtr parse_statement() {
        auto s = std::make_shared<Stmt>();
        s->loc = peek().loc;
        if (accept("{")) {
            s->kind = StmtKind::Block;
            while (!at("}")) {
                if (peek().kind == TokenKind::End) fail("expected '}'");
                s->body.push_back(parse_statement());
            }
            expect("}");
        } else if (accept("illegal")) {
            s->kind = StmtKind::Illegal;
            expect(";");
        } else if (accept("reply")) {
            s->kind = StmtKind::Reply;
            expect("(");
            s->expr = parse_expr();
            expect(")");
            expect(";");
        } else if (accept("return")) {
            s->kind = StmtKind::Return;
            if (!at(";")) s->expr = parse_expr();
            expect(";");
        } else if (accept("if")) {
            s->kind = StmtKind::If;
            expect("(");
            s->expr = parse_expr();
            expect(")");
            s->then_branch = parse_statement();
            if (accept("else")) s->else_branch = parse_statement();
        } else if (accept(";")) {
            s->kind = StmtKind::Empty;
        } else if ((at("bool") || at_identifier()) && at_identifier(1) && at("=", 2)) {
            s->kind = StmtKind::Local;
            s->type = parse_type_name();
            s->name = expect_identifier().text;
            expect("=");
            s->expr = parse_expr();
            expect(";");
        } else if (at_identifier() && at("=", 1)) {
            s->kind = StmtKind::Assign;
            s->name = next().text;
            next();
            s->expr = parse_expr();
            expect(";");
        } else {
            s->kind = StmtKind::Expression;
            s->expr = parse_expr();
            expect(";");
        }
        return s;
    }

    // Expressions

    ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs, const SourceLoc& loc) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Binary;
        e->op = op;
        e->loc = loc;
        e->operands = {std::move(lhs), std::move(rhs)};
        return e;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at("||")) {
            SourceLoc loc = next().loc;
            lhs = make_binary(BinOp::Or, lhs, parse_and(), loc);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (at("&&")) {
            SourceLoc loc = next().loc;
            lhs = make_binary(BinOp::And, lhs, parse_equality(), loc);
        }
        return lhs;
    }

    ExprPtr parse_equality() {
        ExprPtr lhs = parse_relational();
        while (at("==") || at("!=")) {
            const Token& t = next();
            lhs = make_binary(t.text == "==" ? BinOp::Eq : BinOp::Ne, lhs, parse_relational(), t.loc);
        }
        return lhs;
    }

    ExprPtr parse_relational() {
        ExprPtr lhs = parse_additive();
        while (at("<") || at("<=") || at(">") || at(">=")) {
            const Token& t = next();
            BinOp op = t.text == "<" ? BinOp::Lt : t.text == "<=" ? BinOp::Le : t.text == ">" ? BinOp::Gt : BinOp::Ge;
            lhs = make_binary(op, lhs, parse_additive(), t.loc);
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_unary();
        while (at("+") || at("-")) {
            const Token& t = next();
            lhs = make_binary(t.text == "+" ? BinOp::Add : BinOp::Sub, lhs, parse_unary(), t.loc);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at("!") || at("-")) {
            const Token& t = next();
            auto e = std::make_shared<Expr>();
            e->loc = t.loc;
            e->kind = t.text == "!" ? ExprKind::Not : ExprKind::Neg;
            e->operands.push_back(parse_unary());
            return e;
        }
        return parse_primary();
    }

    std::vector<ExprPtr> parse_arguments() {
        std::vector<ExprPtr> args;
        expect("(");
        if (!at(")")) {
            do {
                args.push_back(parse_expr());
            } while (accept(","));
        }
        expect(")");
        return args;
    }

    ExprPtr parse_primary() {
        auto e = std::make_shared<Expr>();
        e->loc = peek().loc;
        if (peek().kind == TokenKind::Integer) {
            e->kind = ExprKind::Int;
            e->int_value = parse_integer_token();
            return e;
        }
        if (at("true") || at("false")) {
            e->kind = ExprKind::Bool;
            e->bool_value = next().text == "true";
            return e;
        }
        if (accept("(")) {
            ExprPtr inner = parse_expr();
            expect(")");
            return inner;
        }
        std::string first = expect_identifier().text;
        if (accept(".")) {
            e->qualifier = first;
            e->name = expect_identifier().text;
            if (at("(")) {
                e->kind = ExprKind::EventCall;
                e->operands = parse_arguments();
            } else {
                e->kind = ExprKind::Dotted;
            }
            return e;
        }
        e->name = first;
        if (at("(")) {
            e->kind = ExprKind::Call;
            e->operands = parse_arguments();
        } else {
            e->kind = ExprKind::Var;
        }
        return e;
    }

    const std::vector<Token>& tokens_;
    Model& model_;
    std::size_t pos_ = 0;
};

}  // namespace

void parse_tokens(const std::vector<Token>& tokens, Model& model, std::vector<Diagnostic>& diagnostics) {
    Parser parser(tokens, model);
    try {
        parser.parse_file();
    } catch (const SyntaxError& e) {
        diagnostics.push_back(make_error(DiagnosticKind::Syntax, e.loc, e.message));
    }
}

}  // namespace dzn::frontend::detail
