#include "dzn/lts.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace dzn;
using namespace dzn::lts;

namespace {

Lts toggle(const std::string& a, const std::string& b) {
    Lts l;
    l.states = 2;
    l.add_edge(0, a, 1);
    l.add_edge(1, b, 0);
    return l;
}

std::size_t count_label(const Lts& l, const std::string& label) {
    return static_cast<std::size_t>(std::count_if(l.edges.begin(), l.edges.end(), [&](const Edge& e) { return e.label == label; }));
}

std::size_t rest_states(const Exploration& e) { return static_cast<std::size_t>(std::count(e.at_rest.begin(), e.at_rest.end(), true)); }

}  // namespace

TEST_CASE("IDevice exploration has two states and four edges") {
    auto r = test::load_model("idevice");
    REQUIRE(r.ok());
    Lts l = explore(*r.model.find_interface("IDevice"), r.model);
    CHECK(l.states == 2);
    CHECK(l.edges.size() == 4);
    CHECK(count_label(l, "illegal") == 2);
    CHECK(write_aut(l).starts_with("des (0, 4, 2)\n"));
}

TEST_CASE("interface without events has a single state") {
    auto r = frontend::parse("interface Empty { behaviour { } }", "empty.dzn");
    REQUIRE(r.ok());
    Lts l = explore(r.model.interfaces[0], r.model);
    CHECK(l.states == 1);
    CHECK(l.edges.empty());
    CHECK(write_aut(l) == "des (0, 0, 1)\n");
}

TEST_CASE("valued call expands into call and reply edges") {
    auto r = frontend::parse(R"(
interface IDevice {
  in bool turnon();
  in void turnoff();
  behaviour {
    enum State {On, Off};
    State s = State.Off;
    [s.Off] {
      on turnon: { s = State.On; reply(true); }
      on turnoff: illegal;
    }
    [s.On] {
      on turnon: illegal;
      on turnoff: s = State.Off;
    }
  }
}
)", "valued.dzn");
    REQUIRE(r.ok());
    Lts l = explore(r.model.interfaces[0], r.model);
    CHECK(count_label(l, "turnon") == 1);
    CHECK(count_label(l, "turnon -> true") == 1);
    CHECK(l.states == 3);
}

TEST_CASE("Fork composite has two rest states") {
    auto r = test::load_model("fork");
    REQUIRE(r.ok());
    Exploration e = explore(r.model, "Fork");
    CHECK(rest_states(e) == 2);
    for (const auto& info : e.info) CHECK_FALSE(info.failure);
    CHECK(e.unhandled.empty());
    // p.turnon, r0.turnon, r1.turnon leads back to a rest state with s = On everywhere
    auto out = e.lts.out_edges();
    std::size_t s = e.lts.initial;
    for (const char* label : {"p.turnon", "r0.turnon", "r1.turnon"}) {
        std::size_t next = s;
        for (std::size_t k : out[s]) {
            if (e.lts.edges[k].label == label) next = e.lts.edges[k].to;
        }
        REQUIRE(next != s);
        s = next;
    }
    CHECK(e.at_rest[s]);
    semantics::Subject subj(r.model, "Fork");
    for (const auto& line : subj.describe(e.configs[s])) CHECK(line.find("State.On") != std::string::npos);
}

TEST_CASE("component with no ports and empty behaviour") {
    auto r = frontend::parse("component Idle { behaviour { } }", "idle.dzn");
    REQUIRE(r.ok());
    Lts l = explore_component(r.model.components[0], r.model);
    CHECK(l.states == 1);
    CHECK(l.edges.empty());
}

TEST_CASE("Fork mutant reaches an illegal edge") {
    auto r = test::load_model("fork_mutant", "faulty");
    REQUIRE(r.ok());
    Exploration e = explore(r.model, "Fork");
    CHECK(count_label(e.lts, "illegal") >= 1);
}

TEST_CASE("composition") {
    Lts unit;
    Lts t = toggle("a", "b");
    CHECK(isomorphic(compose(t, unit, {}), t));
    CHECK(compose(t, t, {"a", "b"}).states == 2);
    CHECK(compose(toggle("a", "b"), toggle("c", "d"), {}).states == 4);
    Lts tau_side;
    tau_side.states = 2;
    tau_side.add_edge(0, "tau", 1);
    // a is blocked because the other side never offers it; tau still moves
    Lts blocked = compose(t, tau_side, {"a"});
    CHECK(blocked.states == 2);
    CHECK(blocked.edges.size() == 1);
    CHECK(compose(t, tau_side, {}).states == 4);
}

TEST_CASE("projection") {
    auto r = test::load_model("fork");
    REQUIRE(r.ok());
    Exploration e = explore(r.model, "Fork");
    Lts same = project(e.lts, e.lts.alphabet);
    CHECK(same.edges == e.lts.edges);
    semantics::Subject subj(r.model, "Fork");
    Lts p = project(e.lts, subj.port_alphabet(r.model.components[0].find_port("p")));
    CHECK(p.states == e.lts.states);
    CHECK(p.edges.size() == e.lts.edges.size());
    std::size_t r_edges = 0;
    for (const auto& edge : e.lts.edges) r_edges += edge.label.starts_with("r") ? 1 : 0;
    CHECK(count_label(p, "tau") == r_edges);
    Lts none = project(e.lts, {});
    CHECK(count_label(none, "tau") == e.lts.edges.size());
    CHECK(none.alphabet.empty());
}

TEST_CASE("normalisation") {
    Lts det = toggle("a", "b");
    NormalizedLts n = normalize(det);
    CHECK(n.nodes.size() == 2);
    for (const auto& acc : n.acceptances) CHECK(acc.size() == 1);

    Lts branch;
    branch.states = 5;
    branch.add_edge(0, "tau", 1);
    branch.add_edge(0, "tau", 2);
    branch.add_edge(1, "a", 3);
    branch.add_edge(2, "b", 4);
    NormalizedLts nb = normalize(branch);
    REQUIRE(!nb.acceptances.empty());
    auto acc = nb.acceptances[nb.initial];
    CHECK(acc == std::vector<std::set<std::string>>{{"a"}, {"b"}});

    auto r = test::load_model("idevice");
    REQUIRE(r.ok());
    Exploration e = explore(r.model, "IDevice");
    NormalizedLts ni = normalize(strip(e).lts);
    CHECK(ni.nodes.size() == 2);
    CHECK(ni.acceptances[ni.initial] == std::vector<std::set<std::string>>{{"turnon"}});
    CHECK(ni.acceptances[ni.next[ni.initial].at("turnon")] == std::vector<std::set<std::string>>{{"turnoff"}});

    Lts div;
    div.states = 2;
    div.add_edge(0, "a", 1);
    div.add_edge(1, "tau", 1);
    try {
        normalize(div);
        FAIL("expected divergence");
    } catch (const Divergent& d) {
        CHECK(d.trace == std::vector<std::string>{"a"});
    }
}

TEST_CASE("trace equivalence") {
    auto r = test::load_model("idevice");
    REQUIRE(r.ok());
    Lts dev = strip(explore(r.model, "IDevice")).lts;
    CHECK(trace_equivalent(dev, dev).equal);
    Lts missing = dev;
    std::erase_if(missing.edges, [](const Edge& e) { return e.label == "turnoff"; });
    TraceVerdict v = trace_equivalent(dev, missing);
    CHECK_FALSE(v.equal);
    CHECK(v.trace == std::vector<std::string>{"turnon", "turnoff"});
    CHECK(v.only_in == 1);
    TraceVerdict back = trace_equivalent(missing, dev);
    CHECK(back.only_in == 2);

    Lts unrolled;
    unrolled.states = 4;
    unrolled.add_edge(0, "a", 1);
    unrolled.add_edge(1, "b", 2);
    unrolled.add_edge(2, "a", 3);
    unrolled.add_edge(3, "b", 0);
    CHECK(trace_equivalent(toggle("a", "b"), unrolled).equal);
}

TEST_CASE("Aldebaran round trip and errors") {
    auto r = test::load_model("fork");
    REQUIRE(r.ok());
    Lts l = explore(r.model, "Fork").lts;
    Lts back = read_aut(write_aut(l));
    CHECK(isomorphic(l, back));
    CHECK_THROWS_AS(read_aut("des (0, 1, 1)\n(0,\"a\"\n"), AutParseError);
    try {
        read_aut("des (0, 2, 2)\n(0,\"a\",1)\n(1,\"b\",7)\n");
        FAIL("expected parse error");
    } catch (const AutParseError& e) {
        CHECK(e.line == 3);
    }
    Lts unq = read_aut("des (0, 1, 2)\n(0, tau, 1)\n");
    CHECK(unq.edges[0].label == "tau");
    CHECK(unq.alphabet.empty());
}
