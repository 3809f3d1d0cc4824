#include "dzn/codegen.hpp"
#include "dzn/simulate.hpp"
#include "dzn/verify.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace dzn::codegen {

std::vector<GeneratedFile> generate(std::string_view subject, const Model& model, const Backend& backend, bool force) {
    auto ref = model.find(subject);
    if (!ref) throw std::invalid_argument("unknown subject: " + std::string(subject));
    if (ref->kind == DefinitionKind::System) throw std::invalid_argument("systems are not generated: " + std::string(subject));
    if (!force) {
        auto v = verify::verify(subject, model);
        if (!v.ok) throw NotVerified(std::string(subject) + " does not verify:\n" + verify::format_report(v, subject));
    }
    return backend.emit(subject, model);
}

ConformanceReport check_conformance(std::string_view subject, const Model& model, const Backend& backend,
                                    const ConformanceOptions& options) {
    ConformanceReport r;
    r.model = std::string(subject);
    r.backend = backend.name();

    lts::ExploreOptions eo;
    eo.bound = options.bound;
    lts::Exploration e = lts::explore(model, subject, eo);

    // one successor per label from every state at rest
    r.checks.push_back("determinism");
    auto out = e.lts.out_edges();
    for (std::size_t s = 0; s < e.lts.states; ++s) {
        if (!e.at_rest[s]) continue;
        std::map<std::string, std::size_t> seen;
        for (std::size_t id : out[s]) {
            if (e.info[id].failure) continue;
            auto [it, added] = seen.emplace(e.lts.edges[id].label, e.lts.edges[id].to);
            if (!added && it->second != e.lts.edges[id].to) {
                r.deterministic = false;
                r.nondeterministic.push_back(std::to_string(s) + " " + e.lts.edges[id].label);
            }
        }
    }

    r.checks.push_back("completeness");
    for (const auto& u : e.unhandled) {
        r.complete = false;
        r.unhandled.push_back(u.label + " @" + to_string(u.loc));
    }

    r.checks.push_back("simulator trace equivalence");
    r.simulator_equivalent = lts::trace_equivalent(e.lts, simulate::simulator_lts(model, subject, options.bound)).equal;

    r.checks.push_back("trace cover");
    lts::Restriction valid = lts::strip(e);
    std::vector<bool> rest(valid.lts.states);
    for (std::size_t s = 0; s < rest.size(); ++s) rest[s] = e.at_rest[valid.state_origin[s]];
    TraceSuite suite = trace_cover(valid.lts, &rest);
    r.edges = valid.lts.edges.size();
    r.covered = suite.covered_edges.size();
    r.total = suite.traces.size();

    r.checks.push_back("trace execution");
    if (suite.traces.empty()) return r;
    auto files = generate(subject, model, backend, options.force);
    auto dir = options.work_dir / std::string(subject) / backend.name();
    auto exe = backend.build(files, dir);
    std::filesystem::create_directories(dir / "traces");
    for (std::size_t i = 0; i < suite.traces.size(); ++i) {
        auto path = dir / "traces" / ("trace" + std::to_string(i) + ".txt");
        {
            std::ofstream f(path, std::ios::binary);
            for (const auto& label : suite.traces[i]) f << label << '\n';
        }
        RunResult run = backend.run(exe, path);
        if (run.accepted) {
            ++r.passed;
        } else {
            r.failures.push_back({i, run.line, run.expected, run.actual});
        }
    }
    return r;
}

std::string format_report(const ConformanceReport& r) {
    std::ostringstream o;
    o << "conformance " << r.model << " backend " << r.backend << ": " << r.passed << "/" << r.total << " traces passed, "
      << r.covered << "/" << r.edges << " edges covered\n";
    for (const auto& f : r.failures) {
        o << "  trace " << f.trace << " line " << f.line << ": expected " << f.expected << ", got " << f.actual << "\n";
    }
    o << "  deterministic: " << (r.deterministic ? "yes" : "no") << "\n";
    for (const auto& w : r.nondeterministic) o << "    nondeterministic at " << w << "\n";
    o << "  complete: " << (r.complete ? "yes" : "no") << "\n";
    for (const auto& u : r.unhandled) o << "    unhandled " << u << "\n";
    o << "  simulator trace equivalent: " << (r.simulator_equivalent ? "yes" : "no") << "\n";
    o << "  checks:";
    for (const auto& c : r.checks) o << " [" << c << "]";
    o << "\n";
    if (r.ok()) {
        o << "  verifier, simulator and generated code are trace equivalent\n";
    } else if (r.traces_pass()) {
        o << "  every cover trace runs on the generated code; equality not established\n";
    }
    return o.str();
}

}  // namespace dzn::codegen
