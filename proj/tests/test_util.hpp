#pragma once

#include "dzn/frontend.hpp"

#include <string>

namespace test {

inline std::string corpus_path(const std::string& rel) { return std::string(DZN_CORPUS_DIR) + "/" + rel; }

inline dzn::frontend::ParseResult load_model(const std::string& name, const std::string& dir = "models") {
    std::vector<std::string> paths{corpus_path(dir + "/" + name + ".dzn")};
    auto files = dzn::frontend::read_files(paths);
    return dzn::frontend::load(files);
}

inline dzn::frontend::ParseResult load_text(const std::string& text, const std::string& file = "inline.dzn") {
    std::vector<dzn::frontend::SourceFile> files{{file, text}};
    return dzn::frontend::load(files);
}

}  // namespace test
