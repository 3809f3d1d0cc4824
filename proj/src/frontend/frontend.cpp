#include "dzn/frontend.hpp"

#include "internal.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dzn::frontend {

ParseResult parse(std::string_view source, std::string_view file) {
    SourceFile f{std::string(file), std::string(source)};
    return parse(std::span<const SourceFile>(&f, 1));
}

ParseResult parse(std::span<const SourceFile> files) {
    ParseResult result;
    for (const auto& f : files) {
        auto tokens = detail::lex(f.text, f.path, result.diagnostics);
        detail::parse_tokens(tokens, result.model, result.diagnostics);
    }
    if (result.diagnostics.empty()) detail::resolve(result.model, result.diagnostics);
    sort_by_location(result.diagnostics);
    return result;
}

ParseResult load(std::span<const SourceFile> files) {
    ParseResult result = parse(files);
    if (result.ok()) result.diagnostics = check_wellformed(result.model);
    return result;
}

std::vector<SourceFile> read_files(std::span<const std::string> paths) {
    std::vector<SourceFile> files;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        files.push_back({path, ss.str()});
    }
    return files;
}

std::string type_name(const Model& model, Type type) {
    switch (type.kind) {
    case TypeKind::Void: return "void";
    case TypeKind::Bool: return "bool";
    case TypeKind::Integer: return "integer";
    case TypeKind::Enum:
    case TypeKind::Int: return type.decl >= 0 ? model.types[type.decl].name : "?";
    }
    return "?";
}

}  // namespace dzn::frontend
