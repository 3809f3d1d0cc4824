#pragma once

#include "dzn/ast.hpp"
#include "dzn/diagnostic.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dzn::frontend::detail {

enum class TokenKind { Identifier, Integer, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    SourceLoc loc;
};

std::vector<Token> lex(std::string_view source, std::string_view file, std::vector<Diagnostic>& diagnostics);

/// Appends the definitions of one token stream to model. Stops at the first syntax error.
void parse_tokens(const std::vector<Token>& tokens, Model& model, std::vector<Diagnostic>& diagnostics);

/// Name resolution over the whole model; fills the resolution fields of the AST.
void resolve(Model& model, std::vector<Diagnostic>& diagnostics);

Diagnostic make_error(DiagnosticKind kind, const SourceLoc& loc, std::string message, std::string subject = {});

bool is_keyword(std::string_view word);

}  // namespace dzn::frontend::detail
