#include "dzn/lts.hpp"
#include "dzn/verify.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <thread>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

// Runs the dzn binary through the shell; stderr is discarded.
Run dzn_cli(const std::string& args, const std::string& env = {}) {
    std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(DZN_CLI) + "' " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string corpus(const std::string& rel) { return "'" + test::corpus_path(rel) + "'"; }

fs::path scratch(const std::string& name) {
    fs::path dir = fs::path(DZN_GEN_DIR) / "cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

dzn::verify::Verdict direct_verify(const std::string& rel, const std::string& subject) {
    std::vector<std::string> paths{test::corpus_path(rel)};
    auto files = dzn::frontend::read_files(paths);
    auto r = dzn::frontend::load(files);
    REQUIRE(r.ok());
    return subject == "all" ? dzn::verify::verify_all(r.model) : dzn::verify::verify(subject, r.model);
}

}  // namespace

TEST_CASE("cli usage errors exit 2") {
    CHECK(dzn_cli("").status == 2);
    CHECK(dzn_cli("frobnicate").status == 2);
    CHECK(dzn_cli("verify Fork /no/such/file.dzn").status == 2);
    CHECK(dzn_cli("verify Nope " + corpus("models/fork.dzn")).status == 2);
    CHECK(dzn_cli("generate Fork " + corpus("models/fork.dzn") + " --backend cobol").status == 2);
    CHECK(dzn_cli("verify Fork " + corpus("models/fork.dzn"), "DZN_EXPLORATION_BOUND=zero").status == 2);
    // an exploration that outgrows its bound is not a verdict
    CHECK(dzn_cli("verify Fork " + corpus("models/fork.dzn") + " --bound 2").status == 2);
    CHECK(dzn_cli("verify Fork " + corpus("models/fork.dzn"), "DZN_EXPLORATION_BOUND=2").status == 2);
}

TEST_CASE("cli parse") {
    auto ok = dzn_cli("parse " + corpus("models/fork.dzn"));
    CHECK(ok.status == 0);
    CHECK(ok.out == "ok: 2 definitions\n");

    auto dir = scratch("parse");
    std::ofstream(dir / "broken.dzn") << "interface IDevic { in void turnon(); behaviour { on turnon: ; } }\n"
                                         "component C { provides IDevice p; }\n";
    auto bad = dzn_cli("parse '" + (dir / "broken.dzn").string() + "' --json");
    CHECK(bad.status == 1);
    auto j = nlohmann::json::parse(bad.out);
    CHECK(j["ok"] == false);
    REQUIRE_FALSE(j["diagnostics"].empty());
    CHECK(j["diagnostics"][0]["locs"][0]["line"] == 2);
}

TEST_CASE("cli verify matches the library report") {
    auto ok = dzn_cli("verify Fork " + corpus("models/fork.dzn"));
    CHECK(ok.status == 0);
    CHECK(ok.out == dzn::verify::format_report(direct_verify("models/fork.dzn", "Fork"), "Fork"));

    auto bad = dzn_cli("verify all " + corpus("faulty/fork_mutant.dzn"));
    CHECK(bad.status == 1);
    CHECK(bad.out == dzn::verify::format_report(direct_verify("faulty/fork_mutant.dzn", "all"), "all"));

    auto json = dzn_cli("verify Fork " + corpus("faulty/fork_mutant.dzn") + " --json");
    CHECK(json.status == 1);
    CHECK(json.out == dzn::verify::report_json(direct_verify("faulty/fork_mutant.dzn", "Fork"), "Fork"));
    CHECK(dzn_cli("verify Fork " + corpus("faulty/fork_mutant.dzn") + " --json").out == json.out);
}

TEST_CASE("cli simulate") {
    auto dir = scratch("simulate");
    std::ofstream(dir / "mutant.trace") << "p.turnon\nr0.turnon\nr1.turnon\np.turnon\n";
    auto v = dzn_cli("simulate Fork " + corpus("faulty/fork_mutant.dzn") + " --trace '" + (dir / "mutant.trace").string() + "' --json");
    CHECK(v.status == 1);
    auto j = nlohmann::json::parse(v.out);
    CHECK(j["verdict"]["status"] == "violated");
    CHECK(j["verdict"]["kind"] == "illegal");

    auto ok = dzn_cli("simulate Fork " + corpus("models/fork.dzn") + " --trace - < '" + (dir / "mutant.trace").string() + "'");
    // the good Fork does not offer a second p.turnon
    CHECK(ok.status == 1);
    CHECK(ok.out.find("rejected: p.turnon") != std::string::npos);

    std::ofstream(dir / "good.trace") << "p.turnon\np.turnoff\n";
    auto good = dzn_cli("simulate Fork " + corpus("models/fork.dzn") + " --trace '" + (dir / "good.trace").string() + "'");
    CHECK(good.status == 0);
    CHECK(good.out.find("verdict: ok") != std::string::npos);
}

TEST_CASE("cli lts writes the explored graph") {
    auto dir = scratch("lts");
    auto out = dir / "fork.aut";
    auto r = dzn_cli("lts Fork " + corpus("models/fork.dzn") + " --out '" + out.string() + "'");
    CHECK(r.status == 0);
    auto loaded = test::load_model("fork");
    CHECK(dzn::lts::isomorphic(dzn::lts::read_aut(slurp(out)), dzn::lts::explore(loaded.model, "Fork").lts));
    CHECK(dzn_cli("lts Fork " + corpus("models/fork.dzn")).out == slurp(out));
    auto json = nlohmann::json::parse(dzn_cli("lts Fork " + corpus("models/fork.dzn") + " --json").out);
    auto l = dzn::lts::explore(loaded.model, "Fork").lts;
    CHECK(json["states"] == l.states);
    CHECK(json["initial"] == l.initial);
    REQUIRE(json["edges"].size() == l.edges.size());
    for (std::size_t i = 0; i < l.edges.size(); ++i) {
        CHECK(json["edges"][i]["from"] == l.edges[i].from);
        CHECK(json["edges"][i]["label"] == l.edges[i].label);
        CHECK(json["edges"][i]["to"] == l.edges[i].to);
    }
}

TEST_CASE("cli cover, generate and conform") {
    auto dir = scratch("gen");
    auto cover = dzn_cli("cover Fork " + corpus("models/fork.dzn") + " --out '" + (dir / "traces").string() + "'");
    CHECK(cover.status == 0);
    CHECK(cover.out.find("6/6 edges") != std::string::npos);
    CHECK(slurp(dir / "traces" / "trace0.txt") == "p.turnon\nr0.turnon\nr1.turnon\np.turnoff\nr0.turnoff\nr1.turnoff\n");

    auto gen = dzn_cli("generate Fork " + corpus("models/fork.dzn") + " --backend cpp --out '" + dir.string() + "'");
    CHECK(gen.status == 0);
    CHECK(fs::exists(dir / "Fork" / "cpp" / "Fork.cpp"));
    CHECK(dzn_cli("generate Fork " + corpus("faulty/fork_mutant.dzn") + " --out '" + dir.string() + "'").status == 1);
    auto listed = nlohmann::json::parse(dzn_cli("generate Fork " + corpus("models/fork.dzn") + " --json --out '" + dir.string() + "'").out);
    CHECK(listed["backend"] == "cpp");
    for (const auto& f : listed["files"]) CHECK(fs::exists(f.get<std::string>()));
    auto refused = nlohmann::json::parse(dzn_cli("generate Fork " + corpus("faulty/fork_mutant.dzn") + " --json").out);
    CHECK(refused["ok"] == false);

    auto ok = dzn_cli("conform Fork " + corpus("models/fork.dzn") + " --backend cpp --out '" + dir.string() + "'");
    CHECK(ok.status == 0);
    CHECK(ok.out.find("1/1 traces passed") != std::string::npos);
    auto bad = dzn_cli("conform Fork " + corpus("models/fork.dzn") + " --backend cpp-faulty --out '" + dir.string() + "' --json");
    CHECK(bad.status == 1);
    auto j = nlohmann::json::parse(bad.out);
    REQUIRE(j["failures"].size() == 1);
    CHECK(j["failures"][0]["line"] == 2);
    CHECK(j["failures"][0]["expected"] == "r0.turnon");
    CHECK(j["failures"][0]["actual"] == "r1.turnon");
}

TEST_CASE("cli serve") {
    int port;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    auto dir = scratch("serve");
    auto pid = dir / "pid";
    std::string cmd = "'" + std::string(DZN_CLI) + "' serve --port " + std::to_string(port) + " >/dev/null 2>&1 & echo $! > '" +
                      pid.string() + "'";
    REQUIRE(std::system(cmd.c_str()) == 0);
    httplib::Client c("127.0.0.1", port);
    httplib::Result r;
    for (int i = 0; i < 100 && !r; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        r = c.Get("/sessions/none");
    }
    REQUIRE(r);
    CHECK(r->status == 404);
    std::string kill = "kill $(cat '" + pid.string() + "')";
    CHECK(std::system(kill.c_str()) == 0);
}
