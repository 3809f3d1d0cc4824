#pragma once

#include "dzn/ast.hpp"
#include "dzn/diagnostic.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dzn::frontend {

struct SourceFile {
    std::string path;
    std::string text;
};

struct ParseResult {
    Model model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return diagnostics.empty(); }
};

/// Lexes, parses and name-resolves one source text. Deterministic.
ParseResult parse(std::string_view source, std::string_view file);

/// Files are concatenated in the given order into a single model.
ParseResult parse(std::span<const SourceFile> files);

/// Static well-formedness: bindings, triggers, types, replies, completeness.
std::vector<Diagnostic> check_wellformed(const Model& model);

/// parse followed by check_wellformed when parsing succeeded.
ParseResult load(std::span<const SourceFile> files);

/// Reads files from disk; throws std::runtime_error on I/O failure.
std::vector<SourceFile> read_files(std::span<const std::string> paths);

/// Canonical source rendering; parse(print(m)) is structurally identical to m.
std::string print(const Model& model);

std::string type_name(const Model& model, Type type);

}  // namespace dzn::frontend
