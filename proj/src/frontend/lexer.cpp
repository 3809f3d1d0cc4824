#include "internal.hpp"

#include <array>
#include <cctype>

namespace dzn::frontend::detail {

namespace {

constexpr std::array<std::string_view, 8> multi_char_punct = {
    "<=>", "==", "!=", "<=", ">=", "&&", "||", "..",
};

constexpr std::string_view single_char_punct = "{}()[];,.:=<>+-!";

constexpr std::array<std::string_view, 20> keywords = {
    "interface", "component", "system", "behaviour", "provides", "requires", "in",
    "out",       "on",        "illegal", "enum",     "subint",   "if",       "else",
    "reply",     "return",    "void",    "bool",     "true",     "false",
};

}  // namespace

bool is_keyword(std::string_view word) {
    for (auto k : keywords) {
        if (k == word) return true;
    }
    return false;
}

Diagnostic make_error(DiagnosticKind kind, const SourceLoc& loc, std::string message, std::string subject) {
    Diagnostic d;
    d.kind = kind;
    d.subject = std::move(subject);
    d.detail = std::move(message);
    d.locs.push_back(loc);
    return d;
}

std::vector<Token> lex(std::string_view src, std::string_view file, std::vector<Diagnostic>& diagnostics) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    int line = 1;
    int column = 1;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        SourceLoc loc{std::string(file), line, column};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            tokens.push_back({TokenKind::Identifier, std::string(src.substr(i, j - i)), loc});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            tokens.push_back({TokenKind::Integer, std::string(src.substr(i, j - i)), loc});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (auto p : multi_char_punct) {
            if (src.substr(i, p.size()) == p) {
                tokens.push_back({TokenKind::Punct, std::string(p), loc});
                advance(p.size());
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (single_char_punct.find(c) != std::string_view::npos) {
            tokens.push_back({TokenKind::Punct, std::string(1, c), loc});
            advance(1);
            continue;
        }
        diagnostics.push_back(make_error(DiagnosticKind::Syntax, loc,
                                         std::string("unexpected character '") + c + "'"));
        advance(1);
    }
    tokens.push_back({TokenKind::End, "", SourceLoc{std::string(file), line, column}});
    return tokens;
}

}  // namespace dzn::frontend::detail
