#include "dzn/simulate.hpp"
#include "dzn/verify.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>

using namespace dzn;
using namespace dzn::simulate;

using Labels = std::vector<std::string>;

TEST_CASE("replay Fork after p.turnon") {
    auto r = test::load_model("fork");
    REQUIRE(r.ok());
    auto s = replay(r.model, "Fork", {"p.turnon"});
    REQUIRE(s.diagram.size() == 3);
    CHECK(s.diagram[0].from == "env");
    CHECK(s.diagram[0].to == "Fork");
    CHECK(s.diagram[0].label == "p.turnon");
    CHECK(s.diagram[1].from == "Fork");
    CHECK(s.diagram[1].to == "r0");
    CHECK(s.diagram[1].label == "r0.turnon");
    CHECK(s.diagram[2].to == "r1");
    CHECK(s.diagram[2].label == "r1.turnon");
    CHECK(s.next_valid == Labels{"p.turnoff"});
    CHECK(s.next_illegal.empty());
    CHECK(s.lifelines == Labels{"env", "Fork", "r0", "r1"});
    CHECK(s.trace == Labels{"p.turnon", "r0.turnon", "r1.turnon"});
    // the full trace replays to the same place
    auto full = replay(r.model, "Fork", s.trace);
    CHECK(full.trace == s.trace);
    CHECK(full.diagram.size() == 3);
    for (const auto& ev : s.diagram) CHECK(ev.loc.file.find("fork.dzn") != std::string::npos);
}

TEST_CASE("replay IDevice from the start") {
    auto r = test::load_model("idevice");
    auto s = replay(r.model, "IDevice", {});
    CHECK(s.diagram.empty());
    CHECK(s.next_valid == Labels{"turnon"});
    CHECK(s.next_illegal == Labels{"turnoff"});

    auto bad = extend(s, "turnoff");
    CHECK(bad.violated);
    CHECK(bad.violation == "illegal");
    CHECK(bad.next_valid.empty());
    CHECK(bad.next_illegal.empty());
    CHECK(bad.diagram.back().kind == "illegal");
}

TEST_CASE("mutant counterexample replays to the violation") {
    auto r = test::load_model("fork_mutant", "faulty");
    auto v = verify::verify_component("Fork", r.model);
    const Diagnostic* illegal = nullptr;
    for (const auto& d : v.diagnostics) {
        if (d.kind == DiagnosticKind::Illegal) {
            illegal = &d;
            break;
        }
    }
    REQUIRE(illegal);
    auto s = replay(r.model, "Fork", illegal->trace);
    CHECK(s.violated);
    CHECK(s.rejected.empty());
    CHECK(s.violation == "illegal");
    REQUIRE(s.diagram.size() == 5);
    CHECK(s.diagram.back().label == "r0.turnon");
    CHECK(s.diagram.back().kind == "illegal");
    CHECK(s.diagram.back().to == "r0");

    // the prefix without the violating action replays cleanly and offers it
    Labels prefix(illegal->trace.begin(), illegal->trace.end() - 2);
    auto before = replay(r.model, "Fork", prefix);
    CHECK_FALSE(before.violated);
    CHECK(before.accepts("p.turnon"));

    // step by step through extend
    auto step = replay(r.model, "Fork", {});
    step = extend(step, "p.turnon");
    step = extend(step, "p.turnon");
    CHECK(step.violated);
    CHECK(step.diagram.back().label == "r0.turnon");
}

TEST_CASE("extend equals replay and rejects unknown labels") {
    auto r = test::load_model("fork");
    auto s0 = replay(r.model, "Fork", {});
    auto s1 = extend(s0, "p.turnon");
    auto direct = replay(r.model, "Fork", {"p.turnon"});
    CHECK(s1.trace == direct.trace);
    CHECK(s1.configs == direct.configs);
    CHECK(s1.next_valid == direct.next_valid);
    // prefix monotonicity of the diagram
    auto s2 = extend(s1, "p.turnoff");
    REQUIRE(s2.diagram.size() > s1.diagram.size());
    for (std::size_t i = 0; i < s1.diagram.size(); ++i) CHECK(s2.diagram[i].label == s1.diagram[i].label);

    try {
        (void)extend(s1, "p.turnon");
        FAIL("expected NotOffered");
    } catch (const NotOffered& e) {
        CHECK(e.offers == Labels{"p.turnoff"});
    }
    auto stop = replay(r.model, "Fork", {"p.turnoff", "p.turnon"});
    CHECK(stop.rejected == "p.turnoff");
    CHECK(stop.diagram.empty());
    CHECK_THROWS_AS(replay(r.model, "Fork", {"p turn on!?#"}), std::invalid_argument);
    CHECK_THROWS_AS(replay(r.model, "Nope", {}), std::invalid_argument);
    CHECK_THROWS_AS(extend(s1, "p turn on!?#"), std::invalid_argument);
}

TEST_CASE("simulator LTS is trace equivalent to exploration") {
    struct Case {
        const char* file;
        const char* dir;
        const char* subject;
    };
    for (auto c : {Case{"idevice", "models", "IDevice"}, Case{"idevice_plain", "models", "IDevice"}, Case{"fork", "models", "Fork"},
                   Case{"fork_mutant", "faulty", "Fork"}, Case{"fork_refuse", "faulty", "Fork"},
                   Case{"system", "models", "ProcessController"}}) {
        auto r = test::load_model(c.file, c.dir);
        REQUIRE(r.ok());
        auto verdict = lts::trace_equivalent(lts::explore(r.model, c.subject).lts, simulator_lts(r.model, c.subject, 10000));
        INFO(c.file << " " << c.subject);
        CHECK(verdict.equal);
    }
}

TEST_CASE("simulator LTS matches exploration over the whole corpus") {
    std::size_t files = 0;
    for (const auto& f : std::filesystem::directory_iterator(test::corpus_path("models"))) {
        auto r = test::load_model(f.path().stem().string());
        REQUIRE(r.ok());
        for (auto ref : r.model.order) {
            std::string name(r.model.name_of(ref));
            if (ref.kind == DefinitionKind::System) continue;
            lts::ExploreOptions o;
            o.bound = 10000;
            INFO(f.path().stem().string() << " " << name);
            CHECK(lts::trace_equivalent(lts::explore(r.model, name, o).lts, simulator_lts(r.model, name, 10000)).equal);
        }
        ++files;
    }
    CHECK(files >= 15);
}

TEST_CASE("simulator LTS of an empty interface") {
    auto r = test::load_text("interface E { behaviour { } }");
    REQUIRE(r.ok());
    CHECK(simulator_lts(r.model, "E").states == 1);
}

TEST_CASE("trace files") {
    CHECK(read_trace("p.turnon\n  r0.turnon \n\nr1.turnon") == Labels{"p.turnon", "r0.turnon", "r1.turnon"});
    CHECK(read_trace("").empty());
}
