#pragma once

#include "dzn/diagnostic.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dzn {

// Integer is the type of literals and arithmetic; Int is a declared subint.
enum class TypeKind { Void, Bool, Enum, Int, Integer };

struct Type {
    TypeKind kind = TypeKind::Void;
    int decl = -1;  // index into Model::types for Enum and Int

    friend bool operator==(const Type&, const Type&) = default;
};

struct TypeDecl {
    std::string name;
    TypeKind kind = TypeKind::Enum;
    std::vector<std::string> literals;  // Enum
    std::int64_t lo = 0;                // Int, inclusive
    std::int64_t hi = 0;
    SourceLoc loc;
    std::string owner;  // empty for global and interface-level types
    bool in_behaviour = false;
    std::string declared_in;  // interface name for interface-level types
};

struct TypeName {
    std::string name;  // "void", "bool", or a declared type
    SourceLoc loc;
    Type resolved;
};

enum class Direction { In, Out };

struct Param {
    std::string name;
    TypeName type;
    SourceLoc loc;
};

struct EventDecl {
    std::string name;
    Direction direction = Direction::In;
    TypeName return_type;
    std::vector<Param> params;
    SourceLoc loc;
};

enum class ExprKind {
    Bool,
    Int,
    Dotted,       // a.b before resolution
    EnumLiteral,  // Type.Literal
    FieldTest,    // var.Literal, shorthand for var == Type.Literal
    Var,
    Not,
    Neg,
    Binary,
    Call,       // behaviour function
    EventCall,  // port.event(args)
};

enum class BinOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub };

enum class VarScope { State, Local };

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
    ExprKind kind = ExprKind::Bool;
    SourceLoc loc;
    bool bool_value = false;
    std::int64_t int_value = 0;
    std::string qualifier;  // Dotted/EnumLiteral/FieldTest/EventCall left part
    std::string name;
    BinOp op = BinOp::Eq;
    std::vector<ExprPtr> operands;  // unary/binary operands or call arguments

    // filled by name resolution
    int type_decl = -1;
    int literal = -1;
    VarScope scope = VarScope::State;
    int slot = -1;
    Type var_type;  // Var/FieldTest: declared type of the variable
    int port = -1;
    int event = -1;
    int function = -1;
};

enum class StmtKind { Block, Assign, Local, If, Expression, Reply, Return, Illegal, Empty };

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;

struct Stmt {
    StmtKind kind = StmtKind::Empty;
    SourceLoc loc;
    std::vector<StmtPtr> body;  // Block
    ExprPtr expr;               // Assign/Local value, If condition, Expression, Reply, Return
    StmtPtr then_branch;
    StmtPtr else_branch;
    std::string name;  // Assign/Local target
    TypeName type;     // Local declared type

    // filled by name resolution
    VarScope scope = VarScope::State;
    int slot = -1;
    Type target_type;
};

struct Variable {
    std::string name;
    TypeName type;
    ExprPtr init;
    SourceLoc loc;
};

struct Function {
    std::string name;
    TypeName return_type;
    std::vector<Param> params;
    StmtPtr body;
    SourceLoc loc;
    int frame_size = 0;
};

struct Trigger {
    std::string port;  // empty in interface behaviour
    std::string event;
    std::vector<std::string> formals;
    bool parens = false;
    SourceLoc loc;

    int port_index = -1;
    int event_index = -1;
};

struct OnClause {
    std::vector<Trigger> triggers;
    StmtPtr body;
    SourceLoc loc;
    int frame_size = 0;
};

struct GuardedBlock;
using BehaviourItem = std::variant<std::shared_ptr<OnClause>, std::shared_ptr<GuardedBlock>>;

struct GuardedBlock {
    ExprPtr guard;
    std::vector<BehaviourItem> items;
    SourceLoc loc;
};

struct Behaviour {
    std::vector<int> types;  // behaviour-local type declarations
    std::vector<Variable> variables;
    std::vector<Function> functions;
    std::vector<BehaviourItem> items;
    SourceLoc loc;
};

struct InterfaceDef {
    std::string name;
    std::vector<int> types;  // interface-level type declarations
    std::vector<EventDecl> events;
    std::optional<Behaviour> behaviour;
    SourceLoc loc;

    int find_event(std::string_view event) const;
};

enum class PortDirection { Provides, Requires };

struct Port {
    std::string name;
    std::string interface;
    PortDirection direction = PortDirection::Provides;
    SourceLoc loc;
    int interface_index = -1;
};

struct ComponentDef {
    std::string name;
    std::vector<Port> ports;
    std::optional<Behaviour> behaviour;
    SourceLoc loc;

    int find_port(std::string_view port) const;
};

struct Instance {
    std::string name;
    std::string component;  // component or system name
    SourceLoc loc;
};

struct Endpoint {
    std::string instance;  // empty: external port of the system
    std::string port;
    SourceLoc loc;

    friend bool operator==(const Endpoint& a, const Endpoint& b) {
        return a.instance == b.instance && a.port == b.port;
    }
};

std::string to_string(const Endpoint& e);

struct Binding {
    Endpoint left;
    Endpoint right;
    SourceLoc loc;
};

struct SystemDef {
    std::string name;
    std::vector<Port> ports;
    std::vector<Instance> instances;
    std::vector<Binding> bindings;
    SourceLoc loc;

    int find_port(std::string_view port) const;
};

enum class DefinitionKind { Interface, Component, System };

struct DefinitionRef {
    DefinitionKind kind;
    int index;
};

struct Model {
    std::vector<TypeDecl> types;
    std::vector<InterfaceDef> interfaces;
    std::vector<ComponentDef> components;
    std::vector<SystemDef> systems;
    std::vector<DefinitionRef> order;  // source order
    bool resolved = false;

    std::size_t definition_count() const { return order.size(); }
    std::optional<DefinitionRef> find(std::string_view name) const;
    const InterfaceDef* find_interface(std::string_view name) const;
    const ComponentDef* find_component(std::string_view name) const;
    const SystemDef* find_system(std::string_view name) const;
    std::string_view name_of(DefinitionRef ref) const;
    const SourceLoc& loc_of(DefinitionRef ref) const;
};

}  // namespace dzn
