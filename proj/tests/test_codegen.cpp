#include "dzn/codegen.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace dzn;
using namespace dzn::codegen;

namespace fs = std::filesystem;
using Labels = std::vector<std::string>;

namespace {

fs::path gen_dir() { return fs::path(DZN_GEN_DIR) / "tests"; }

fs::path write_trace(const std::string& name, const Labels& labels) {
    fs::create_directories(gen_dir());
    auto p = gen_dir() / (name + ".trace");
    std::ofstream f(p);
    for (const auto& l : labels) f << l << '\n';
    return p;
}

lts::Lts valid_lts(const Model& m, const std::string& subject) { return lts::strip(lts::explore(m, subject)).lts; }

// Asserts that every cover path starts at the initial state, is connected and spells its trace.
void check_paths(const lts::Lts& l, const TraceSuite& s) {
    REQUIRE(s.paths.size() == s.traces.size());
    for (std::size_t i = 0; i < s.paths.size(); ++i) {
        std::size_t at = l.initial;
        Labels spelled;
        for (std::size_t e : s.paths[i]) {
            REQUIRE(e < l.edges.size());
            CHECK(l.edges[e].from == at);
            at = l.edges[e].to;
            spelled.push_back(l.edges[e].label);
        }
        CHECK(spelled == s.traces[i]);
    }
}

std::set<std::size_t> all_edges(const lts::Lts& l) {
    std::set<std::size_t> s;
    for (std::size_t i = 0; i < l.edges.size(); ++i) s.insert(i);
    return s;
}

std::vector<std::pair<std::string, std::string>> corpus_components() {
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(test::corpus_path("models"))) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto r = test::load_model(f.stem().string());
        for (const auto& c : r.model.components) out.push_back({f.stem().string(), c.name});
    }
    return out;
}

}  // namespace

TEST_CASE("cover of the IDevice interface") {
    auto r = test::load_model("idevice");
    REQUIRE(r.ok());
    auto l = valid_lts(r.model, "IDevice");
    CHECK(l.edges.size() == 2);
    auto s = trace_cover(l);
    REQUIRE(s.traces.size() == 1);
    CHECK(s.traces[0] == Labels{"turnon", "turnoff"});
    check_paths(l, s);
}

TEST_CASE("cover of degenerate and branching graphs") {
    lts::Lts point;
    auto empty = trace_cover(point);
    CHECK(empty.traces.empty());
    CHECK(empty.covered_edges.empty());

    lts::Lts diamond;
    diamond.states = 4;
    diamond.add_edge(0, "a", 1);
    diamond.add_edge(0, "b", 2);
    diamond.add_edge(1, "x", 3);
    diamond.add_edge(2, "y", 3);
    auto s = trace_cover(diamond);
    CHECK(s.traces.size() >= 2);
    check_paths(diamond, s);
    CHECK(s.covered_edges == all_edges(diamond));
    CHECK(oracle::marked_edges(diamond, s.traces) == all_edges(diamond));

    // same label on both branches: replaying the labels still marks both
    lts::Lts twin;
    twin.states = 3;
    twin.add_edge(0, "a", 1);
    twin.add_edge(0, "a", 2);
    twin.add_edge(1, "b", 0);
    auto t = trace_cover(twin);
    check_paths(twin, t);
    CHECK(oracle::marked_edges(twin, t.traces) == all_edges(twin));
}

TEST_CASE("cover traces end at rest") {
    auto r = test::load_model("fork");
    auto e = lts::explore(r.model, "Fork");
    auto valid = lts::strip(e);
    std::vector<bool> rest(valid.lts.states);
    for (std::size_t s = 0; s < rest.size(); ++s) rest[s] = e.at_rest[valid.state_origin[s]];
    auto s = trace_cover(valid.lts, &rest);
    check_paths(valid.lts, s);
    for (const auto& p : s.paths) CHECK(rest[valid.lts.edges[p.back()].to]);
}

TEST_CASE("cover reaches every edge of every corpus LTS") {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(test::corpus_path("models"))) files.push_back(e.path());
    for (const auto& f : files) {
        auto r = test::load_model(f.stem().string());
        REQUIRE(r.ok());
        for (auto ref : r.model.order) {
            if (ref.kind == DefinitionKind::System) continue;
            std::string name(r.model.name_of(ref));
            auto l = valid_lts(r.model, name);
            auto s = trace_cover(l);
            INFO(f.stem().string() << " " << name);
            check_paths(l, s);
            CHECK(oracle::marked_edges(l, s.traces) == all_edges(l));
        }
    }
}

TEST_CASE("Fork conforms with the reference backend") {
    auto r = test::load_model("fork");
    REQUIRE(r.ok());
    ConformanceOptions o;
    o.work_dir = gen_dir();
    auto rep = check_conformance("Fork", r.model, CppBackend(), o);
    INFO(format_report(rep));
    CHECK(rep.ok());
    CHECK(rep.total >= 1);
    CHECK(rep.passed == rep.total);
    CHECK(rep.covered == rep.edges);
    CHECK(rep.checks == Labels{"determinism", "completeness", "simulator trace equivalence", "trace cover", "trace execution"});
    CHECK(fs::exists(gen_dir() / "Fork" / "cpp" / "Fork.cpp"));
    CHECK(format_report(rep).find("trace equivalent") != std::string::npos);
}

TEST_CASE("swapped emissions are caught at the exact line") {
    auto r = test::load_model("fork");
    ConformanceOptions o;
    o.work_dir = gen_dir();
    auto rep = check_conformance("Fork", r.model, FaultyBackend(), o);
    CHECK_FALSE(rep.ok());
    REQUIRE_FALSE(rep.failures.empty());

    // expected line: the first r0.turnon of the failing trace, counted from 1
    auto e = lts::explore(r.model, "Fork");
    auto suite = trace_cover(lts::strip(e).lts);
    const auto& trace = suite.traces.at(rep.failures[0].trace);
    auto it = std::find(trace.begin(), trace.end(), "r0.turnon");
    REQUIRE(it != trace.end());
    CHECK(rep.failures[0].line == static_cast<std::size_t>(it - trace.begin()) + 1);
    CHECK(rep.failures[0].expected == "r0.turnon");
    CHECK(rep.failures[0].actual == "r1.turnon");

    auto faulty = FaultyBackend().emit("Fork", r.model);
    auto plain = CppBackend().emit("Fork", r.model);
    REQUIRE(faulty.size() == plain.size());
    CHECK(faulty[1].text != plain[1].text);
    CHECK(faulty[0].text == plain[0].text);
}

TEST_CASE("stub protocol on hand-written traces") {
    auto r = test::load_model("fork");
    CppBackend b;
    auto files = generate("Fork", r.model, b);
    auto dir = gen_dir() / "Fork" / "cpp";

    auto ok = b.build_and_run(files, dir, write_trace("fork_ok", {"p.turnon", "r0.turnon", "r1.turnon", "p.turnoff", "r0.turnoff", "r1.turnoff"}));
    CHECK(ok.accepted);
    CHECK(ok.output == "ACCEPTED 6\n");

    auto swapped = b.build_and_run(files, dir, write_trace("fork_swapped", {"p.turnon", "r1.turnon", "r0.turnon"}));
    CHECK_FALSE(swapped.accepted);
    CHECK(swapped.output == "MISMATCH line 2: expected r1.turnon, got r0.turnon\n");

    auto early = b.build_and_run(files, dir, write_trace("fork_early", {"p.turnon", "r0.turnon"}));
    CHECK(early.line == 3);
    CHECK(early.expected == "end of trace");
    CHECK(early.actual == "r1.turnon");

    auto idle = b.build_and_run(files, dir, write_trace("fork_idle", {"r0.turnon"}));
    CHECK(idle.output == "MISMATCH line 1: expected r0.turnon, got nothing\n");

    // a failure takes the place of the next emission
    auto refused = b.build_and_run(files, dir, write_trace("fork_off", {"p.turnoff"}));
    CHECK(refused.output == "MISMATCH line 2: expected end of trace, got unhandled\n");

    auto empty = b.build_and_run(files, dir, write_trace("fork_empty", {}));
    CHECK(empty.output == "ACCEPTED 0\n");
}

TEST_CASE("valued replies are compared as text") {
    auto r = test::load_model("health");
    REQUIRE(r.ok());
    CppBackend b;
    auto files = generate("Monitor", r.model, b);
    auto dir = gen_dir() / "Monitor" / "cpp";
    Labels t{"health.healthy", "device.poll", "device.poll -> Status.Ok", "health.healthy -> true",
             "health.healthy", "device.poll", "device.poll -> Status.Busy", "health.healthy -> false"};
    CHECK(b.build_and_run(files, dir, write_trace("monitor_ok", t)).accepted);

    Labels wrong = t;
    wrong[3] = "health.healthy -> false";
    auto res = b.build_and_run(files, dir, write_trace("monitor_wrong", wrong));
    CHECK(res.line == 4);
    CHECK(res.expected == "health.healthy -> false");
    CHECK(res.actual == "health.healthy -> true");
}

TEST_CASE("every corpus component conforms") {
    ConformanceOptions o;
    o.work_dir = gen_dir();
    CppBackend b;
    std::size_t n = 0;
    for (const auto& [file, component] : corpus_components()) {
        auto r = test::load_model(file);
        auto rep = check_conformance(component, r.model, b, o);
        INFO(format_report(rep));
        CHECK(rep.ok());
        CHECK(rep.covered == rep.edges);
        ++n;
    }
    CHECK(n >= 15);
}

TEST_CASE("generation needs a verified model") {
    auto r = test::load_model("fork_mutant", "faulty");
    REQUIRE(r.ok());
    CHECK_THROWS_AS(generate("Fork", r.model, CppBackend()), NotVerified);
    CHECK_FALSE(generate("Fork", r.model, CppBackend(), true).empty());
    CHECK_THROWS_AS(generate("Nope", r.model, CppBackend()), std::invalid_argument);
    CHECK_THROWS_AS(make_backend("cobol"), std::invalid_argument);
    CHECK(make_backend("cpp")->name() == "cpp");
    CHECK(make_backend("cpp-faulty")->name() == "cpp-faulty");

    auto s = test::load_model("system");
    CHECK_THROWS_AS(generate("System", s.model, CppBackend()), std::invalid_argument);
}

TEST_CASE("component without events") {
    auto r = test::load_text("interface INone { behaviour { } }\ncomponent Idle { provides INone p; behaviour { } }\n");
    REQUIRE(r.ok());
    ConformanceOptions o;
    o.work_dir = gen_dir();
    CppBackend b;
    auto rep = check_conformance("Idle", r.model, b, o);
    CHECK(rep.total == 0);
    CHECK(rep.traces_pass());
    CHECK(format_report(rep).find("0/0 traces") != std::string::npos);

    // nothing can happen, so verification reports a deadlock
    CHECK_THROWS_AS(generate("Idle", r.model, b), NotVerified);
    auto files = generate("Idle", r.model, b, true);
    auto dir = gen_dir() / "Idle" / "cpp";
    CHECK(b.build_and_run(files, dir, write_trace("idle_empty", {})).accepted);
    auto res = b.build_and_run(files, dir, write_trace("idle_one", {"p.x"}));
    CHECK_FALSE(res.accepted);
    CHECK(res.line == 1);
}

TEST_CASE("generated code reports range errors") {
    auto r = test::load_model("range", "checks");
    REQUIRE(r.ok());
    CppBackend b;
    CHECK_THROWS_AS(generate("Counter", r.model, b), NotVerified);
    auto files = generate("Counter", r.model, b, true);
    auto dir = gen_dir() / "Counter" / "cpp";
    auto res = b.build_and_run(files, dir, write_trace("counter_overflow", {"c.inc", "c.inc", "c.inc"}));
    CHECK(res.output == "MISMATCH line 4: expected end of trace, got range_error(n)\n");
    CHECK(b.build_and_run(files, dir, write_trace("counter_ok", {"c.inc", "c.inc", "c.reset", "c.inc"})).accepted);
}
