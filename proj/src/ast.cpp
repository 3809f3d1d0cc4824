#include "dzn/ast.hpp"

namespace dzn {

int InterfaceDef::find_event(std::string_view event) const {
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].name == event) return static_cast<int>(i);
    }
    return -1;
}

namespace {

template <typename Ports>
int find_port_in(const Ports& ports, std::string_view port) {
    for (std::size_t i = 0; i < ports.size(); ++i) {
        if (ports[i].name == port) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

int ComponentDef::find_port(std::string_view port) const { return find_port_in(ports, port); }

int SystemDef::find_port(std::string_view port) const { return find_port_in(ports, port); }

std::string to_string(const Endpoint& e) { return e.instance.empty() ? e.port : e.instance + "." + e.port; }

std::optional<DefinitionRef> Model::find(std::string_view name) const {
    for (const auto& ref : order) {
        if (name_of(ref) == name) return ref;
    }
    return std::nullopt;
}

const InterfaceDef* Model::find_interface(std::string_view name) const {
    for (const auto& d : interfaces) {
        if (d.name == name) return &d;
    }
    return nullptr;
}

const ComponentDef* Model::find_component(std::string_view name) const {
    for (const auto& d : components) {
        if (d.name == name) return &d;
    }
    return nullptr;
}

const SystemDef* Model::find_system(std::string_view name) const {
    for (const auto& d : systems) {
        if (d.name == name) return &d;
    }
    return nullptr;
}

std::string_view Model::name_of(DefinitionRef ref) const {
    switch (ref.kind) {
    case DefinitionKind::Interface: return interfaces[ref.index].name;
    case DefinitionKind::Component: return components[ref.index].name;
    case DefinitionKind::System: return systems[ref.index].name;
    }
    return {};
}

const SourceLoc& Model::loc_of(DefinitionRef ref) const {
    switch (ref.kind) {
    case DefinitionKind::Interface: return interfaces[ref.index].loc;
    case DefinitionKind::Component: return components[ref.index].loc;
    case DefinitionKind::System: break;
    }
    return systems[ref.index].loc;
}

}  // namespace dzn
