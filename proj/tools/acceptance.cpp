// Acceptance run: one PASS/FAIL line per criterion, exit 0 only when all pass.
#include "dzn/codegen.hpp"
#include "dzn/frontend.hpp"
#include "dzn/simulate.hpp"
#include "dzn/verify.hpp"
#include "oracles.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace dzn;
namespace fs = std::filesystem;
using Labels = std::vector<std::string>;

namespace {

struct Check {
    bool ok = true;
    std::string why;  // first failure

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) why = what;
        ok = ok && cond;
    }
};

fs::path corpus(const std::string& rel) { return fs::path(DZN_CORPUS_DIR) / rel; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Model load(const std::string& rel) {
    std::vector<std::string> paths{corpus(rel).string()};
    auto files = frontend::read_files(paths);
    auto r = frontend::load(files);
    if (!r.ok()) throw std::runtime_error(rel + ": " + format_source_diagnostic(r.diagnostics.front()));
    return std::move(r.model);
}

std::vector<fs::path> dzn_files(const std::string& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(corpus(dir))) {
        if (e.path().extension() == ".dzn") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string rel(const std::string& dir, const fs::path& p) { return dir + "/" + p.filename().string(); }

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::vector<Diagnostic> of_kind(const verify::Verdict& v, DiagnosticKind k) {
    std::vector<Diagnostic> out;
    for (const auto& d : v.diagnostics) {
        if (d.kind == k) out.push_back(d);
    }
    return out;
}

lts::Lts port_view(const Model& m, const std::string& component, const std::string& port) {
    auto e = lts::explore(m, component);
    semantics::Subject s(m, component);
    auto proj = lts::project(lts::strip(e).lts, s.port_alphabet(m.find_component(component)->find_port(port)));
    return lts::rename(proj, [&](const std::string& l) { return l.substr(port.size() + 1); });
}

Check p1() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    for (const char* f : {"idevice_plain", "idevice", "fork", "system"}) {
        auto m = load(std::string("models/") + f + ".dzn");
        c.expect(verify::verify_all(m).ok, std::string(f) + " does not verify");
    }
    double t = seconds_since(t0);
    c.expect(t < 5.0, "took " + std::to_string(t) + " s");
    return c;
}

Check p2() {
    Check c;
    auto m = load("faulty/fork_mutant.dzn");
    auto illegal = of_kind(verify::verify_component("Fork", m), DiagnosticKind::Illegal);
    c.expect(!illegal.empty(), "no illegal diagnostic");
    if (!c.ok) return c;
    const Labels& trace = illegal.front().trace;
    semantics::Subject s(m, "Fork");
    auto bfs = oracle::shortest_failure(s, "illegal");
    c.expect(bfs && *bfs == trace, "trace differs from the breadth-first oracle");
    c.expect(trace.size() == 5, "trace length " + std::to_string(trace.size()));
    auto sim = simulate::replay(m, "Fork", trace);
    c.expect(sim.violated && sim.violation == "illegal" && sim.rejected.empty(), "replay does not reach the violation");
    return c;
}

Check p3() {
    Check c;
    auto good = load("models/fork.dzn");
    auto impl = port_view(good, "Fork", "p");
    auto spec = lts::strip(lts::explore(good, "IDevice")).lts;
    bool engine = verify::check_refinement(impl, spec).ok;
    bool brute = oracle::refinement_violations(impl, spec, 8).empty();
    c.expect(engine && brute, "Fork does not refine IDevice");

    auto bad = load("faulty/fork_refuse.dzn");
    auto bimpl = port_view(bad, "Fork", "p");
    auto bspec = lts::strip(lts::explore(bad, "IDevice")).lts;
    auto res = verify::refine(bimpl, bspec);
    auto violations = oracle::refinement_violations(bimpl, bspec, 8);
    c.expect(!res.ok && res.kind == DiagnosticKind::RefinementFailure, "mutant passes refinement");
    c.expect(res.refusal == std::set<std::string>{"turnoff"}, "refusal is not {turnoff}");
    c.expect(violations.count({true, res.trace, res.refusal}) == 1, "oracle does not find the reported failure");
    c.expect(oracle::shortest(violations) == res.trace.size(), "reported failure is not a shortest one");
    auto failures = of_kind(verify::verify_component("Fork", bad), DiagnosticKind::RefinementFailure);
    c.expect(failures.size() == 1 && failures[0].refusal == std::set<std::string>{"turnoff"}, "component verdict disagrees");
    return c;
}

Check p4() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    std::size_t models = 0;
    for (const auto& f : dzn_files("models")) {
        auto m = load(rel("models", f));
        for (auto ref : m.order) {
            if (ref.kind == DefinitionKind::System) continue;
            std::string name(m.name_of(ref));
            lts::ExploreOptions o;
            o.bound = 10000;
            bool eq = lts::trace_equivalent(lts::explore(m, name, o).lts, simulate::simulator_lts(m, name, 10000)).equal;
            c.expect(eq, f.filename().string() + " " + name + " differs");
        }
        ++models;
    }
    double t = seconds_since(t0);
    c.expect(models >= 15, "only " + std::to_string(models) + " models");
    c.expect(t < 60.0, "took " + std::to_string(t) + " s");
    return c;
}

Check p5() {
    Check c;
    codegen::ConformanceOptions o;
    o.work_dir = fs::path(DZN_GEN_DIR) / "acceptance";
    codegen::CppBackend cpp;
    std::size_t components = 0;
    for (const auto& f : dzn_files("models")) {
        auto m = load(rel("models", f));
        for (const auto& comp : m.components) {
            auto e = lts::explore(m, comp.name);
            auto valid = lts::strip(e);
            std::vector<bool> rest(valid.lts.states);
            for (std::size_t s = 0; s < rest.size(); ++s) rest[s] = e.at_rest[valid.state_origin[s]];
            auto suite = codegen::trace_cover(valid.lts, &rest);
            c.expect(oracle::marked_edges(valid.lts, suite.traces).size() == valid.lts.edges.size(), comp.name + " cover incomplete");
            auto rep = codegen::check_conformance(comp.name, m, cpp, o);
            c.expect(rep.ok() && rep.covered == rep.edges, comp.name + " does not conform");
            ++components;
        }
    }
    c.expect(components > 0, "no components");

    auto fork = load("models/fork.dzn");
    auto rep = codegen::check_conformance("Fork", fork, codegen::FaultyBackend(), o);
    c.expect(!rep.ok() && !rep.failures.empty(), "swapped emissions not caught");
    if (!c.ok) return c;
    auto suite = codegen::trace_cover(lts::strip(lts::explore(fork, "Fork")).lts);
    const auto& trace = suite.traces.at(rep.failures[0].trace);
    auto it = std::find(trace.begin(), trace.end(), "r0.turnon");
    c.expect(it != trace.end() && rep.failures[0].line == static_cast<std::size_t>(it - trace.begin()) + 1, "wrong mismatch line");
    c.expect(rep.failures[0].expected == "r0.turnon" && rep.failures[0].actual == "r1.turnon", "wrong mismatch labels");
    return c;
}

Check p6() {
    Check c;
    auto m = load("models/chain.dzn");
    auto v = verify::check_composition_theorem(*m.find_component("Controller"), *m.find_component("Fork"), m);
    c.expect(v.upper.ok && v.lower.ok && v.consequent.ok, "chain antecedents or consequent fail");
    auto bad = load("faulty/chain_faulty.dzn");
    auto fv = verify::check_composition_theorem(*bad.find_component("Controller"), *bad.find_component("Fork"), bad);
    c.expect(fv.upper.ok && !fv.lower.ok, "faulty chain: not exactly the lower antecedent fails");
    c.expect(!of_kind(fv.lower, DiagnosticKind::RefinementFailure).empty(), "faulty chain: no refinement failure");
    c.expect(fv.implication_holds(), "implication broken");
    return c;
}

Check p7() {
    Check c;
    struct Case {
        const char* file;
        const char* subject;
        DiagnosticKind kind;
    };
    for (auto k : {Case{"deadlock", "IStuck", DiagnosticKind::Deadlock}, Case{"livelock", "Spinner", DiagnosticKind::Livelock},
                   Case{"range", "Counter", DiagnosticKind::RangeError}}) {
        auto m = load(std::string("checks/") + k.file + ".dzn");
        auto v = verify::verify_all(m);
        c.expect(v.diagnostics.size() == 1 && v.diagnostics[0].kind == k.kind, std::string(k.file) + ": not exactly one diagnostic");
        if (!c.ok) return c;
        auto fixture = lts::read_aut(slurp(corpus(std::string("checks/") + k.file + ".aut")));
        c.expect(lts::isomorphic(fixture, lts::explore(m, k.subject).lts), std::string(k.file) + ": fixture differs");
        std::optional<Labels> expected;
        if (k.kind == DiagnosticKind::Deadlock) {
            auto found = oracle::deadlocks(fixture);
            if (found.size() == 1) expected = found[0];
        } else if (k.kind == DiagnosticKind::Livelock) {
            auto found = oracle::livelocks(fixture, [](const std::string& l) { return l.starts_with("p."); });
            if (found.size() == 1) expected = found[0];
        } else {
            semantics::Subject s(m, k.subject);
            expected = oracle::shortest_failure(s, "range_error(n)");
        }
        c.expect(expected && *expected == v.diagnostics[0].trace, std::string(k.file) + ": trace is not minimal");
    }
    return c;
}

Check p8() {
    Check c;
    std::size_t n = 0;
    for (const char* dir : {"models", "faulty", "checks"}) {
        for (const auto& f : dzn_files(dir)) {
            auto m = load(rel(dir, f));
            for (auto ref : m.order) {
                if (ref.kind == DefinitionKind::System) continue;
                auto l = lts::explore(m, m.name_of(ref)).lts;
                c.expect(lts::isomorphic(lts::read_aut(lts::write_aut(l)), l), f.filename().string() + " " + std::string(m.name_of(ref)));
                ++n;
            }
        }
    }
    c.expect(n > 0, "no LTSs");
    return c;
}

Check p9() {
    Check c;
    for (const char* dir : {"models", "faulty", "checks"}) {
        for (const auto& f : dzn_files(dir)) {
            auto run = [&] {
                auto m = load(rel(dir, f));
                auto v = verify::verify_all(m);
                return verify::format_report(v, "all") + verify::report_json(v, "all");
            };
            c.expect(run() == run(), f.filename().string() + " reports differ");
        }
    }
    return c;
}

}  // namespace

int main() {
    std::vector<std::pair<const char*, Check (*)()>> criteria{{"P1", p1}, {"P2", p2}, {"P3", p3}, {"P4", p4}, {"P5", p5},
                                                              {"P6", p6}, {"P7", p7}, {"P8", p8}, {"P9", p9}};
    bool all = true;
    for (auto [name, run] : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = run();
        } catch (const std::exception& e) {
            c.ok = false;
            c.why = std::string("exception: ") + e.what();
        }
        char time[32];
        std::snprintf(time, sizeof time, "%.2f s", seconds_since(t0));
        std::cout << name << (c.ok ? " PASS" : " FAIL") << " (" << time << ")" << (c.ok ? "" : ": " + c.why) << "\n";
        all = all && c.ok;
    }
    return all ? 0 : 1;
}
