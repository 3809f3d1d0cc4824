#include "dzn/lts.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <sstream>

namespace dzn::lts {

std::string write_aut(const Lts& l) {
    std::ostringstream out;
    out << "des (" << l.initial << ", " << l.edges.size() << ", " << l.states << ")\n";
    for (const auto& e : l.edges) out << "(" << e.from << ",\"" << e.label << "\"," << e.to << ")\n";
    return out.str();
}

namespace {

class LineParser {
public:
    LineParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }

    void expect(char c) {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }

    std::size_t number() {
        skip_space();
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
        if (ec != std::errc()) fail("expected a number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return v;
    }

    std::string label() {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '"') {
            std::size_t end = text_.find('"', pos_ + 1);
            if (end == std::string_view::npos) fail("unterminated label");
            std::string s(text_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            return s;
        }
        std::size_t end = pos_;
        while (end < text_.size() && text_[end] != ',') ++end;
        std::string s(text_.substr(pos_, end - pos_));
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        if (s.empty()) fail("empty label");
        pos_ = end;
        return s;
    }

    void keyword(std::string_view word) {
        skip_space();
        if (text_.substr(pos_, word.size()) != word) fail("expected '" + std::string(word) + "'");
        pos_ += word.size();
    }

    [[noreturn]] void fail(const std::string& what) const { throw AutParseError(line_, what); }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

}  // namespace

Lts read_aut(std::string_view text) {
    Lts l;
    std::size_t line_no = 0, declared_edges = 0;
    bool header = false;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        LineParser p(line, line_no);
        if (p.at_end()) {
            if (end == text.size()) break;
            continue;
        }
        if (!header) {
            p.keyword("des");
            p.expect('(');
            l.initial = p.number();
            p.expect(',');
            declared_edges = p.number();
            p.expect(',');
            l.states = p.number();
            p.expect(')');
            if (!p.at_end()) p.fail("trailing characters after header");
            if (l.states == 0 || l.initial >= l.states) p.fail("initial state outside the state range");
            header = true;
            continue;
        }
        p.expect('(');
        std::size_t from = p.number();
        p.expect(',');
        std::string label = p.label();
        p.expect(',');
        std::size_t to = p.number();
        p.expect(')');
        if (!p.at_end()) p.fail("trailing characters after edge");
        if (from >= l.states || to >= l.states) p.fail("edge endpoint outside the state range");
        l.add_edge(from, std::move(label), to);
        if (end == text.size()) break;
    }
    if (!header) throw AutParseError(line_no, "missing des header");
    if (l.edges.size() != declared_edges) {
        throw AutParseError(line_no, "header declares " + std::to_string(declared_edges) + " edges, found " +
                                         std::to_string(l.edges.size()));
    }
    return l;
}

Lts canonical(const Lts& l) {
    auto out = l.out_edges();
    for (auto& list : out) {
        std::stable_sort(list.begin(), list.end(),
                         [&](std::size_t x, std::size_t y) { return l.edges[x].label < l.edges[y].label; });
    }
    std::vector<long> id(l.states, -1);
    std::vector<std::size_t> order;
    auto number = [&](std::size_t root) {
        std::deque<std::size_t> queue{root};
        id[root] = static_cast<long>(order.size());
        order.push_back(root);
        while (!queue.empty()) {
            std::size_t s = queue.front();
            queue.pop_front();
            for (std::size_t e : out[s]) {
                std::size_t t = l.edges[e].to;
                if (id[t] >= 0) continue;
                id[t] = static_cast<long>(order.size());
                order.push_back(t);
                queue.push_back(t);
            }
        }
    };
    number(l.initial);
    for (std::size_t s = 0; s < l.states; ++s) {
        if (id[s] < 0) number(s);
    }
    Lts c;
    c.states = l.states;
    c.initial = 0;
    std::vector<Edge> edges;
    for (const auto& e : l.edges) edges.push_back({static_cast<std::size_t>(id[e.from]), e.label, static_cast<std::size_t>(id[e.to])});
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to);
    });
    for (auto& e : edges) c.add_edge(e.from, std::move(e.label), e.to);
    c.alphabet.insert(l.alphabet.begin(), l.alphabet.end());
    return c;
}

bool isomorphic(const Lts& a, const Lts& b) {
    Lts ca = canonical(a);
    Lts cb = canonical(b);
    return ca.states == cb.states && ca.edges == cb.edges;
}

}  // namespace dzn::lts
