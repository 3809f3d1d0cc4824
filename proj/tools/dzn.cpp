// dzn: parse, verify, simulate and generate code for Dezyne-style models.
#include "dzn/codegen.hpp"
#include "dzn/daemon.hpp"
#include "dzn/frontend.hpp"
#include "dzn/simulate.hpp"
#include "dzn/verify.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using dzn::daemon::Json;

constexpr int exit_ok = 0;
constexpr int exit_diagnostics = 1;
constexpr int exit_usage = 2;

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::vector<std::string> files;
    std::string subject;
    std::size_t bound = dzn::lts::default_bound;
    bool json = false;
    std::string trace;
    std::string out;
    std::string backend = "cpp";
    bool force = false;
    bool valid_only = false;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
    long idle = 3600;
};

std::size_t default_bound() {
    const char* env = std::getenv("DZN_EXPLORATION_BOUND");
    if (!env || !*env) return dzn::lts::default_bound;
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(env, &used);
        if (used == std::string(env).size() && v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw Usage("DZN_EXPLORATION_BOUND must be a positive integer");
}

// Loads the model; prints frontend diagnostics and returns nullopt when there are any.
std::optional<dzn::Model> load(const Config& c) {
    std::vector<dzn::frontend::SourceFile> files;
    try {
        files = dzn::frontend::read_files(c.files);
    } catch (const std::runtime_error& e) {
        throw Usage(e.what());
    }
    auto r = dzn::frontend::load(files);
    if (r.ok()) return std::move(r.model);
    if (c.json) {
        std::cout << Json{{"ok", false}, {"diagnostics", dzn::daemon::diagnostics_json(r.diagnostics)}}.dump(2) << "\n";
    } else {
        for (const auto& d : r.diagnostics) std::cout << dzn::format_source_diagnostic(d) << "\n";
    }
    return std::nullopt;
}

void require_subject(const dzn::Model& m, const std::string& subject) {
    if (!m.find(subject)) throw Usage("unknown subject: " + subject);
}

std::string read_trace_text(const std::string& path) {
    std::ostringstream s;
    if (path == "-") {
        s << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw Usage("cannot read trace file " + path);
        s << in.rdbuf();
    }
    return s.str();
}

void print_not_verified(const Config& c, const dzn::codegen::NotVerified& e) {
    if (c.json) {
        std::cout << Json{{"subject", c.subject}, {"ok", false}, {"error", e.what()}}.dump(2) << "\n";
    } else {
        std::cout << e.what();
    }
}

int cmd_parse(const Config& c) {
    auto m = load(c);
    if (!m) return exit_diagnostics;
    if (c.json) {
        std::cout << Json{{"ok", true}, {"definitions", m->definition_count()}, {"diagnostics", Json::array()}}.dump(2) << "\n";
    } else {
        std::cout << "ok: " << m->definition_count() << " definitions\n";
    }
    return exit_ok;
}

int cmd_verify(const Config& c) {
    auto m = load(c);
    if (!m) return exit_diagnostics;
    dzn::verify::VerifyOptions o;
    o.bound = c.bound;
    dzn::verify::Verdict v;
    std::string subject = c.subject.empty() ? "all" : c.subject;
    if (c.subject.empty()) {
        v = dzn::verify::verify_all(*m, o);
    } else {
        require_subject(*m, c.subject);
        v = dzn::verify::verify(c.subject, *m, o);
    }
    std::cout << (c.json ? dzn::verify::report_json(v, subject) : dzn::verify::format_report(v, subject));
    return v.diagnostics.empty() ? exit_ok : exit_diagnostics;
}

int cmd_simulate(const Config& c) {
    auto m = load(c);
    if (!m) return exit_diagnostics;
    require_subject(*m, c.subject);
    auto trace = c.trace.empty() ? std::vector<std::string>{} : dzn::simulate::read_trace(read_trace_text(c.trace));
    auto model = std::make_shared<const dzn::Model>(std::move(*m));
    dzn::simulate::SimulationState s;
    try {
        s = dzn::simulate::replay(model, c.subject, trace);
    } catch (const std::invalid_argument& e) {
        throw Usage(e.what());
    }
    if (c.json) {
        std::cout << dzn::daemon::diagram_json(s).dump(2) << "\n";
    } else {
        std::cout << "lifelines: ";
        for (std::size_t i = 0; i < s.lifelines.size(); ++i) std::cout << (i ? " " : "") << s.lifelines[i];
        std::cout << "\n";
        for (const auto& e : s.diagram) {
            std::cout << e.seq << " " << e.from << " -> " << e.to << ": " << e.label;
            if (e.kind == "illegal" || e.kind == "range_error") std::cout << " [" << e.kind << "]";
            std::cout << " @" << dzn::to_string(e.loc) << "\n";
        }
        if (!s.rejected.empty()) std::cout << "rejected: " << s.rejected << "\n";
        for (const auto& l : s.next_valid) std::cout << "next: " << l << "\n";
        for (const auto& l : s.next_illegal) std::cout << "next (illegal): " << l << "\n";
        std::cout << "verdict: " << (s.violated ? "violated " + s.violation : std::string("ok")) << "\n";
    }
    return s.violated || !s.rejected.empty() ? exit_diagnostics : exit_ok;
}

int cmd_lts(const Config& c) {
    auto m = load(c);
    if (!m) return exit_diagnostics;
    require_subject(*m, c.subject);
    dzn::lts::ExploreOptions o;
    o.bound = c.bound;
    auto e = dzn::lts::explore(*m, c.subject, o);
    dzn::lts::Lts l = c.valid_only ? dzn::lts::strip(e).lts : e.lts;
    std::string text;
    if (c.json) {
        Json edges = Json::array();
        for (const auto& x : l.edges) edges.push_back({{"from", x.from}, {"label", x.label}, {"to", x.to}});
        text = Json{{"subject", c.subject}, {"states", l.states}, {"initial", l.initial}, {"edges", edges}}.dump(2) + "\n";
    } else {
        text = dzn::lts::write_aut(l);
    }
    if (c.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.out, std::ios::binary);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + c.out);
    }
    return exit_ok;
}

int cmd_cover(const Config& c) {
    auto m = load(c);
    if (!m) return exit_diagnostics;
    require_subject(*m, c.subject);
    dzn::lts::ExploreOptions o;
    o.bound = c.bound;
    auto e = dzn::lts::explore(*m, c.subject, o);
    auto valid = dzn::lts::strip(e);
    std::vector<bool> rest(valid.lts.states);
    for (std::size_t s = 0; s < rest.size(); ++s) rest[s] = e.at_rest[valid.state_origin[s]];
    auto suite = dzn::codegen::trace_cover(valid.lts, &rest);
    if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        for (std::size_t i = 0; i < suite.traces.size(); ++i) {
            std::ofstream f(std::filesystem::path(c.out) / ("trace" + std::to_string(i) + ".txt"), std::ios::binary);
            for (const auto& l : suite.traces[i]) f << l << "\n";
        }
    }
    if (c.json) {
        std::cout << Json{{"subject", c.subject}, {"edges", valid.lts.edges.size()}, {"covered", suite.covered_edges.size()},
                          {"traces", suite.traces}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "cover " << c.subject << ": " << suite.traces.size() << " traces, " << suite.covered_edges.size() << "/"
                  << valid.lts.edges.size() << " edges\n";
        for (std::size_t i = 0; i < suite.traces.size(); ++i) {
            std::cout << "trace " << i << ":";
            for (const auto& l : suite.traces[i]) std::cout << " " << l;
            std::cout << "\n";
        }
    }
    return exit_ok;
}

int cmd_generate(const Config& c) {
    auto m = load(c);
    if (!m) return exit_diagnostics;
    require_subject(*m, c.subject);
    auto backend = dzn::codegen::make_backend(c.backend);
    std::vector<dzn::codegen::GeneratedFile> files;
    try {
        files = dzn::codegen::generate(c.subject, *m, *backend, c.force);
    } catch (const dzn::codegen::NotVerified& e) {
        print_not_verified(c, e);
        return exit_diagnostics;
    }
    auto dir = std::filesystem::path(c.out.empty() ? "gen" : c.out) / c.subject / backend->name();
    dzn::codegen::write_files(files, dir);
    if (c.json) {
        Json paths = Json::array();
        for (const auto& f : files) paths.push_back((dir / f.path).string());
        std::cout << Json{{"subject", c.subject}, {"backend", backend->name()}, {"files", paths}}.dump(2) << "\n";
    } else {
        for (const auto& f : files) std::cout << (dir / f.path).string() << "\n";
    }
    return exit_ok;
}

int cmd_conform(const Config& c) {
    auto m = load(c);
    if (!m) return exit_diagnostics;
    require_subject(*m, c.subject);
    auto backend = dzn::codegen::make_backend(c.backend);
    dzn::codegen::ConformanceOptions o;
    o.work_dir = c.out.empty() ? "gen" : c.out;
    o.bound = c.bound;
    o.force = c.force;
    dzn::codegen::ConformanceReport r;
    try {
        r = dzn::codegen::check_conformance(c.subject, *m, *backend, o);
    } catch (const dzn::codegen::NotVerified& e) {
        print_not_verified(c, e);
        return exit_diagnostics;
    }
    if (c.json) {
        Json failures = Json::array();
        for (const auto& f : r.failures) failures.push_back({{"trace", f.trace}, {"line", f.line}, {"expected", f.expected}, {"actual", f.actual}});
        std::cout << Json{{"model", r.model},
                          {"backend", r.backend},
                          {"total", r.total},
                          {"passed", r.passed},
                          {"failures", failures},
                          {"edges", r.edges},
                          {"covered", r.covered},
                          {"deterministic", r.deterministic},
                          {"complete", r.complete},
                          {"simulator_equivalent", r.simulator_equivalent},
                          {"checks", r.checks},
                          {"ok", r.ok()}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << dzn::codegen::format_report(r);
    }
    return r.ok() ? exit_ok : exit_diagnostics;
}

dzn::daemon::Daemon* serving = nullptr;

int cmd_serve(const Config& c) {
    dzn::daemon::Options o;
    o.static_dir = c.static_dir;
    o.idle_timeout = std::chrono::seconds(c.idle);
    o.bound = c.bound;
    dzn::daemon::Daemon d(o);
    serving = &d;
    std::signal(SIGINT, [](int) {
        if (serving) serving->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (serving) serving->stop();
    });
    std::cerr << "serving on http://" << c.host << ":" << c.port << "\n";
    bool ok = d.run(c.host, c.port);
    serving = nullptr;
    if (!ok) throw std::runtime_error("cannot serve on " + c.host + ":" + std::to_string(c.port));
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    Config c;
    CLI::App app{"Parse, verify, simulate and generate code for Dezyne-style models", "dzn"};
    app.require_subcommand(1);
    try {
        c.bound = default_bound();
    } catch (const Usage& e) {
        std::cerr << "dzn: " << e.what() << "\n";
        return exit_usage;
    }

    auto common = [&](CLI::App* sub, bool subject) {
        if (subject) sub->add_option("subject", c.subject, "interface, component or system")->required();
        sub->add_option("files", c.files, "model files")->required()->check(CLI::ExistingFile);
        sub->add_option("--bound", c.bound, "exploration bound in states (default from DZN_EXPLORATION_BOUND)");
        sub->add_flag("--json", c.json, "JSON output");
    };

    std::map<std::string, std::function<int(const Config&)>> commands;
    auto* parse = app.add_subcommand("parse", "syntax and well-formedness only");
    common(parse, false);
    commands["parse"] = cmd_parse;

    auto* verify = app.add_subcommand("verify", "verify a subject; 'all' checks every definition");
    common(verify, true);
    commands["verify"] = [](const Config& cfg) {
        Config v = cfg;
        if (v.subject == "all") v.subject.clear();
        return cmd_verify(v);
    };

    auto* simulate = app.add_subcommand("simulate", "replay a trace and print the sequence diagram");
    common(simulate, true);
    simulate->add_option("--trace", c.trace, "trace file, one label per line; - reads stdin");
    commands["simulate"] = cmd_simulate;

    auto* lts = app.add_subcommand("lts", "write the state graph in Aldebaran format");
    common(lts, true);
    lts->add_option("--out", c.out, "output .aut file (default stdout)");
    lts->add_flag("--valid", c.valid_only, "drop illegal and range_error edges");
    commands["lts"] = cmd_lts;

    auto* cover = app.add_subcommand("cover", "trace graph cover of the valid state graph");
    common(cover, true);
    cover->add_option("--out", c.out, "directory for trace files");
    commands["cover"] = cmd_cover;

    auto* generate = app.add_subcommand("generate", "generate code and a conformance stub");
    common(generate, true);
    generate->add_option("--backend", c.backend, "backend")->check(CLI::IsMember(dzn::codegen::backend_names()));
    generate->add_option("--out", c.out, "output root (default gen)");
    generate->add_flag("--force", c.force, "generate without verifying");
    commands["generate"] = cmd_generate;

    auto* conform = app.add_subcommand("conform", "run the cover traces through the generated code");
    common(conform, true);
    conform->add_option("--backend", c.backend, "backend")->check(CLI::IsMember(dzn::codegen::backend_names()));
    conform->add_option("--out", c.out, "output root (default gen)");
    conform->add_flag("--force", c.force, "generate without verifying");
    commands["conform"] = cmd_conform;

    auto* serve = app.add_subcommand("serve", "run the simulation daemon");
    serve->add_option("--port", c.port, "port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", c.host, "address to bind");
    serve->add_option("--static", c.static_dir, "directory served under /static/");
    serve->add_option("--idle", c.idle, "session idle timeout in seconds");
    serve->add_option("--bound", c.bound, "exploration bound for /verify");
    commands["serve"] = cmd_serve;

    if (argc < 2) {
        std::cerr << app.help();
        return exit_usage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        for (auto* sub : app.get_subcommands()) return commands.at(sub->get_name())(c);
    } catch (const Usage& e) {
        std::cerr << "dzn: " << e.what() << "\n";
        return exit_usage;
    } catch (const dzn::lts::BoundExceeded& e) {
        std::cerr << "dzn: " << e.what() << "\n";
        return exit_usage;
    } catch (const dzn::codegen::BuildError& e) {
        std::cerr << "dzn: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "dzn: internal error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
