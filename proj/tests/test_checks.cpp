#include "dzn/verify.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dzn;
using namespace dzn::verify;

namespace fs = std::filesystem;
using Labels = std::vector<std::string>;

namespace {

std::string read(const std::string& rel) {
    std::ifstream in(test::corpus_path(rel));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

using oracle::bfs;
using oracle::deadlocks;
using oracle::failure;
using oracle::livelocks;

}  // namespace

TEST_CASE("deadlock model") {
    auto r = test::load_model("deadlock", "checks");
    REQUIRE(r.ok());
    Verdict v = verify_all(r.model);
    REQUIRE(v.diagnostics.size() == 1);
    const auto& d = v.diagnostics[0];
    CHECK(d.kind == DiagnosticKind::Deadlock);

    auto fixture = lts::read_aut(read("checks/deadlock.aut"));
    CHECK(lts::isomorphic(fixture, lts::explore(r.model, "IStuck").lts));
    auto found = deadlocks(fixture);
    REQUIRE(found.size() == 1);
    CHECK(d.trace == found[0]);
    CHECK(d.trace == Labels{"turnon"});
}

TEST_CASE("livelock model") {
    auto r = test::load_model("livelock", "checks");
    REQUIRE(r.ok());
    Verdict v = verify_all(r.model);
    INFO(format_report(v, "livelock"));
    REQUIRE(v.diagnostics.size() == 1);
    const auto& d = v.diagnostics[0];
    CHECK(d.kind == DiagnosticKind::Livelock);
    CHECK(d.subject == "Spinner");

    auto fixture = lts::read_aut(read("checks/livelock.aut"));
    CHECK(lts::isomorphic(fixture, lts::explore(r.model, "Spinner").lts));
    // only the provides port is observable
    auto found = livelocks(fixture, [](const std::string& l) { return l.starts_with("p."); });
    REQUIRE(found.size() == 1);
    CHECK(d.trace == found[0]);
    CHECK(d.trace == Labels{"p.start", "t.enable"});
}

TEST_CASE("range model") {
    auto r = test::load_model("range", "checks");
    REQUIRE(r.ok());
    Verdict v = verify_all(r.model);
    REQUIRE(v.diagnostics.size() == 1);
    const auto& d = v.diagnostics[0];
    CHECK(d.kind == DiagnosticKind::RangeError);

    auto fixture = lts::read_aut(read("checks/range.aut"));
    CHECK(lts::isomorphic(fixture, lts::explore(r.model, "Counter").lts));
    // the fixture path leads to the failing state; the step function adds the trigger
    auto path = bfs(fixture, [](const lts::Edge& e) { return !failure(e); });
    std::optional<Labels> to_failure;
    for (const auto& e : fixture.edges) {
        if (e.label == "range_error(n)" && path[e.from] && (!to_failure || path[e.from]->size() < to_failure->size())) {
            to_failure = path[e.from];
        }
    }
    REQUIRE(to_failure);
    semantics::Subject s(r.model, "Counter");
    auto shortest = oracle::shortest_failure(s, "range_error(n)");
    REQUIRE(shortest);
    CHECK(Labels(shortest->begin(), shortest->end() - 1) == *to_failure);
    CHECK(d.trace == *shortest);
    CHECK(d.trace == Labels{"c.inc", "c.inc", "c.inc"});
}

TEST_CASE("Aldebaran round trip over the corpus") {
    std::size_t n = 0;
    for (const char* dir : {"models", "faulty", "checks"}) {
        for (const auto& f : fs::directory_iterator(test::corpus_path(dir))) {
            if (f.path().extension() != ".dzn") continue;
            auto r = test::load_model(f.path().stem().string(), dir);
            REQUIRE(r.ok());
            for (auto ref : r.model.order) {
                if (ref.kind == DefinitionKind::System) continue;
                auto l = lts::explore(r.model, r.model.name_of(ref)).lts;
                INFO(f.path().string() << " " << r.model.name_of(ref));
                CHECK(lts::isomorphic(lts::read_aut(lts::write_aut(l)), l));
                ++n;
            }
        }
    }
    CHECK(n >= 40);
}

TEST_CASE("composition of the lamp chain") {
    auto r = test::load_model("chain");
    REQUIRE(r.ok());
    auto cv = check_composition_theorem(*r.model.find_component("Controller"), *r.model.find_component("Fork"), r.model);
    CHECK(cv.upper.ok);
    CHECK(cv.lower.ok);
    CHECK(cv.consequent.ok);
    CHECK(cv.implication_holds());
    CHECK(cv.provides == "s");
    CHECK(cv.link == "r");

    auto bad = test::load_model("chain_faulty", "faulty");
    REQUIRE(bad.ok());
    auto fv = check_composition_theorem(*bad.model.find_component("Controller"), *bad.model.find_component("Fork"), bad.model);
    CHECK(fv.upper.ok);
    CHECK_FALSE(fv.lower.ok);
    CHECK(fv.implication_holds());
    bool refusal = false;
    for (const auto& d : fv.lower.diagnostics) refusal = refusal || d.kind == DiagnosticKind::RefinementFailure;
    CHECK(refusal);

    // D's provides interface must match the link
    CHECK_THROWS_AS(check_composition_theorem(*r.model.find_component("Fork"), *r.model.find_component("Controller"), r.model),
                    std::invalid_argument);
}
