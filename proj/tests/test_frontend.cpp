#include "dzn/frontend.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dzn;

namespace {

std::string read(const std::string& rel) {
    std::ifstream in(test::corpus_path(rel));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

std::vector<std::string> details(const frontend::ParseResult& r) {
    std::vector<std::string> out;
    for (const auto& d : r.diagnostics) out.push_back(d.detail);
    return out;
}

bool has(const frontend::ParseResult& r, const std::string& detail) {
    auto ds = details(r);
    return std::find(ds.begin(), ds.end(), detail) != ds.end();
}

// line and column of the first occurrence of needle, 1-based
SourceLoc locate(const std::string& text, const std::string& needle, const std::string& file = "inline.dzn") {
    auto at = text.find(needle);
    REQUIRE(at != std::string::npos);
    SourceLoc loc;
    loc.file = file;
    loc.line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(at), '\n'));
    auto bol = text.rfind('\n', at);
    loc.column = static_cast<int>(at - (bol == std::string::npos ? 0 : bol + 1)) + 1;
    return loc;
}

void check_locs_in_bounds(const std::string& text, const frontend::ParseResult& r) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    for (const auto& d : r.diagnostics) {
        REQUIRE_FALSE(d.locs.empty());
        for (const auto& l : d.locs) {
            INFO(format_source_diagnostic(d));
            REQUIRE(l.line >= 1);
            REQUIRE(l.line <= static_cast<int>(std::max<std::size_t>(lines.size(), 1)));
            CHECK(l.column >= 1);
            CHECK(l.column <= static_cast<int>(lines.empty() ? 1 : lines[l.line - 1].size() + 1));
        }
    }
}

}  // namespace

TEST_CASE("listings parse and are well formed") {
    for (const char* name : {"idevice_plain", "idevice", "fork", "system"}) {
        CAPTURE(name);
        auto r = test::load_model(name);
        CHECK(r.ok());
        for (const auto& d : r.diagnostics) MESSAGE(format_source_diagnostic(d));
    }
}

TEST_CASE("IDevice listing shape") {
    auto r = test::load_model("idevice");
    REQUIRE(r.ok());
    REQUIRE(r.model.interfaces.size() == 1);
    const auto& i = r.model.interfaces[0];
    CHECK(i.name == "IDevice");
    REQUIRE(i.events.size() == 2);
    CHECK(i.events[0].name == "turnon");
    CHECK(i.events[1].name == "turnoff");
    CHECK(i.events[0].direction == Direction::In);
    REQUIRE(i.behaviour);
    CHECK(i.behaviour->items.size() == 2);
    CHECK(i.loc.line == 1);
    CHECK(i.loc.column == 1);
}

TEST_CASE("empty source") {
    auto r = test::load_text("");
    CHECK(r.ok());
    CHECK(r.model.definition_count() == 0);
    CHECK(test::load_text("// only a comment\n\n").model.definition_count() == 0);
}

TEST_CASE("misspelled requires interface") {
    std::string text = replace(read("models/fork.dzn"), "requires IDevice r0", "requires IDevic r0");
    auto r = test::load_text(text, "fork.dzn");
    REQUIRE(r.diagnostics.size() == 1);
    const auto& d = r.diagnostics[0];
    CHECK(d.detail == "unresolved interface IDevic");
    CHECK(d.kind == DiagnosticKind::WellFormedness);
    auto at = locate(text, "IDevic r0", "fork.dzn");
    REQUIRE(d.locs.size() >= 1);
    CHECK(d.locs[0].line == at.line);
    CHECK(format_source_diagnostic(d).starts_with("fork.dzn:" + std::to_string(at.line) + ":"));
    check_locs_in_bounds(text, r);
}

TEST_CASE("port bound twice") {
    std::string text =
        replace(read("models/system.dzn"), "controller.process <=> processor.process;", "controller.load <=> processor.process;");
    auto r = test::load_text(text);
    REQUIRE_FALSE(r.ok());
    CHECK(has(r, "port bound twice: controller.load"));
    check_locs_in_bounds(text, r);
}

TEST_CASE("trigger on an in event of a requires port") {
    std::string text = replace(read("models/fork.dzn"), "on p.turnon():", "on r0.turnon():");
    auto r = test::load_text(text);
    REQUIRE_FALSE(r.ok());
    CHECK(has(r, "trigger r0.turnon is an in event of a requires port"));
    // p.turnon is now unhandled as well
    CHECK(has(r, "no on clause for p.turnon"));
    check_locs_in_bounds(text, r);
}

TEST_CASE("well-formedness diagnostics") {
    const std::string device = read("models/idevice.dzn");
    struct Case {
        std::string text;
        std::string detail;
    };
    std::vector<Case> cases{
        {device + device, "duplicate definition IDevice"},
        {"interface I { out bool e(); behaviour { } }", "out event e must return void"},
        {"interface I { in void e(); in void e(); behaviour { on e: ; } }", "duplicate event e in I"},
        {"interface I { in bool e(); behaviour { on e: ; } }", "missing reply on some path of a valued event"},
        {"interface I { in bool e(); behaviour { on e: {reply(true); reply(false);} } }", "reply executed more than once"},
        {"interface I { in void e(); behaviour { on e: reply(true); } }", "reply in void event handler"},
        {"interface I { in bool e(); behaviour { on e: reply(3); } }", "reply value has the wrong type"},
        {"interface I { in void e(); behaviour { bool b = 1; on e: ; } }", "type mismatch in initializer of b"},
        {"interface I { in void e(); behaviour { bool b = false; on e: b = 2; } }", "type mismatch in assignment to b"},
        {"interface I { in void e(); behaviour { on e: x = 1; } }", "unresolved variable x"},
        {"interface I { in void e(); behaviour { bool b = false; [b] on e: ; [true] on e: ; } }", "overlapping guards for trigger e"},
        {"interface I { in void e(); behaviour { enum S {A, A}; on e: ; } }", "duplicate literal A in enum S"},
        {"interface I { in void e(); behaviour { on f: ; } }", "unresolved event f"},
        {device + "component C { provides IDevice p; provides IDevice p; behaviour { on p.turnon(): ; on p.turnoff(): ; } }",
         "duplicate port p"},
        {device + "component C { provides IDevice p; behaviour { on p.turnon(): ; } }", "no on clause for p.turnoff"},
        {device + "component C { provides IDevice p; behaviour { on p.turnon(): p.turnoff(); on p.turnoff(): ; } }",
         "cannot call in event p.turnoff of a provides port"},
        {device + "component C { provides IDevice p; behaviour { on q.turnon(): ; on p.turnon(): ; on p.turnoff(): ; } }",
         "unresolved port q"},
        {device + "component S { provides IDevice p; system { Nope n; p <=> n.p; } }", "unresolved component Nope"},
    };
    for (const auto& c : cases) {
        auto r = test::load_text(c.text);
        INFO(c.text);
        CHECK(has(r, c.detail));
        check_locs_in_bounds(c.text, r);
    }
}

TEST_CASE("binding checks") {
    const std::string base = read("models/system.dzn");
    auto mismatch = test::load_text(replace(base, "controller.process <=> processor.process;", "controller.process <=> loader.load;"));
    CHECK(has(mismatch, "binding connects different interfaces IProcess and ILoad"));
    auto loose = test::load_text(replace(base, "    controller.unload <=> unloader.unload;\n", ""));
    CHECK(has(loose, "port not bound: controller.unload"));
    CHECK(has(loose, "port not bound: unloader.unload"));

    // A requires port of c bound to itself through d and back
    std::string loop = read("models/idevice.dzn") + R"(
component Relay {
  provides IDevice p;
  requires IDevice r;
  behaviour {
    on p.turnon(): r.turnon();
    on p.turnoff(): r.turnoff();
  }
}
component Loop {
  system {
    Relay a;
    Relay b;
    a.r <=> b.p;
    b.r <=> a.p;
  }
}
)";
    auto cyclic = test::load_text(loop);
    REQUIRE_FALSE(cyclic.ok());
    bool circular = false;
    for (const auto& d : details(cyclic)) circular = circular || d.starts_with("circular binding of ports");
    CHECK(circular);
}

TEST_CASE("syntax errors carry a location") {
    for (std::string text : {"interface I { in void e() behaviour { } }", "component C { provides I p; behaviour { on p.e(): {; } }",
                             "interface", "interface I { in void e(); behaviour { subint R {3..1}; on e: ; } }", "@"}) {
        auto r = test::load_text(text);
        INFO(text);
        REQUIRE_FALSE(r.ok());
        CHECK(r.diagnostics[0].kind == DiagnosticKind::Syntax);
        check_locs_in_bounds(text, r);
    }
    auto r = test::load_text("interface I {\n  in void e()\n  behaviour { }\n}\n", "x.dzn");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(format_source_diagnostic(r.diagnostics[0]).starts_with("x.dzn:3:3: error: "));
}

TEST_CASE("diagnostics are sorted by location") {
    std::string text = "interface I { in void e(); behaviour { on e: x = 1; on e: y = 2; } }";
    auto r = test::load_text(text);
    REQUIRE(r.diagnostics.size() >= 2);
    for (std::size_t i = 1; i < r.diagnostics.size(); ++i) {
        const auto& a = r.diagnostics[i - 1].locs[0];
        const auto& b = r.diagnostics[i].locs[0];
        CHECK(std::tie(a.file, a.line, a.column) <= std::tie(b.file, b.line, b.column));
    }
}

TEST_CASE("parse is deterministic and print round trips") {
    std::size_t n = 0;
    for (const char* dir : {"models", "faulty", "checks"}) {
        for (const auto& f : std::filesystem::directory_iterator(test::corpus_path(dir))) {
            if (f.path().extension() != ".dzn") continue;
            auto r = test::load_model(f.path().stem().string(), dir);
            REQUIRE(r.ok());
            std::string printed = frontend::print(r.model);
            CHECK(frontend::print(test::load_model(f.path().stem().string(), dir).model) == printed);
            auto again = test::load_text(printed);
            INFO(f.path().string() << "\n" << printed);
            REQUIRE(again.ok());
            CHECK(frontend::print(again.model) == printed);
            CHECK(again.model.definition_count() == r.model.definition_count());
            CHECK(again.model.interfaces.size() == r.model.interfaces.size());
            CHECK(again.model.components.size() == r.model.components.size());
            CHECK(again.model.systems.size() == r.model.systems.size());
            ++n;
        }
    }
    CHECK(n >= 20);
}

TEST_CASE("files are concatenated in order") {
    std::vector<frontend::SourceFile> files{{"a.dzn", read("models/idevice.dzn")},
                                            {"b.dzn", replace(read("models/fork.dzn"), read("models/idevice.dzn"), "")}};
    auto r = frontend::load(files);
    REQUIRE(r.ok());
    CHECK(r.model.definition_count() == 2);
    CHECK(r.model.loc_of(r.model.order[1]).file == "b.dzn");

    std::vector<frontend::SourceFile> swapped{files[1], files[0]};
    CHECK(frontend::load(swapped).ok());
}
