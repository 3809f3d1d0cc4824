#pragma once

#include "dzn/ast.hpp"
#include "dzn/lts.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dzn::codegen {

struct TraceSuite {
    std::vector<std::vector<std::string>> traces;
    std::vector<std::vector<std::size_t>> paths;  // edge ids per trace
    std::set<std::size_t> covered_edges;
};

/// Greedy edge cover from the initial state. With a rest mask every trace is extended
/// to end in a state at rest.
TraceSuite trace_cover(const lts::Lts& l, const std::vector<bool>* at_rest = nullptr);

struct GeneratedFile {
    std::string path;  // relative to the backend directory
    std::string text;
};

struct RunResult {
    bool accepted = false;
    std::size_t line = 0;  // mismatching line, 1-based
    std::string expected;
    std::string actual;
    std::string output;  // stub stdout
};

class BuildError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    /// Files for a component or an interface.
    virtual std::vector<GeneratedFile> emit(std::string_view subject, const Model& model) const = 0;
    /// Writes the files into dir and builds the stub; returns the executable.
    virtual std::filesystem::path build(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir) const = 0;
    virtual RunResult run(const std::filesystem::path& executable, const std::filesystem::path& trace_file) const = 0;

    RunResult build_and_run(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir,
                            const std::filesystem::path& trace_file) const;
};

/// Host C++ compiler backend. CXX in the environment overrides the configured compiler.
class CppBackend : public Backend {
public:
    std::string name() const override { return "cpp"; }
    std::vector<GeneratedFile> emit(std::string_view subject, const Model& model) const override;
    std::filesystem::path build(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir) const override;
    RunResult run(const std::filesystem::path& executable, const std::filesystem::path& trace_file) const override;
};

/// Reference backend with a planted fault: the first two adjacent emitting statements of
/// the generated machine are swapped.
class FaultyBackend : public CppBackend {
public:
    std::string name() const override { return "cpp-faulty"; }
    std::vector<GeneratedFile> emit(std::string_view subject, const Model& model) const override;
};

/// "cpp" or "cpp-faulty"; throws std::invalid_argument otherwise.
std::unique_ptr<Backend> make_backend(std::string_view name);
std::vector<std::string> backend_names();

class NotVerified : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Emits the files for subject after verifying it; force skips the verification.
std::vector<GeneratedFile> generate(std::string_view subject, const Model& model, const Backend& backend, bool force = false);
/// Writes files below dir, creating directories.
void write_files(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir);

struct ConformanceFailure {
    std::size_t trace = 0;
    std::size_t line = 0;
    std::string expected;
    std::string actual;
};

struct ConformanceReport {
    std::string model;
    std::string backend;
    std::size_t total = 0;
    std::size_t passed = 0;
    std::vector<ConformanceFailure> failures;

    std::size_t edges = 0;
    std::size_t covered = 0;
    bool deterministic = true;
    std::vector<std::string> nondeterministic;  // "state label" witnesses
    bool complete = true;
    std::vector<std::string> unhandled;
    bool simulator_equivalent = false;  // trace equivalence of verifier and simulator LTS
    std::vector<std::string> checks;    // sub-checks that ran, in order

    bool traces_pass() const { return failures.empty() && passed == total; }
    /// All equalities established: every sub-check ran and held.
    bool ok() const { return traces_pass() && deterministic && complete && simulator_equivalent; }
};

struct ConformanceOptions {
    std::filesystem::path work_dir = "gen";
    std::size_t bound = 10'000;
    bool force = false;
};

ConformanceReport check_conformance(std::string_view subject, const Model& model, const Backend& backend,
                                    const ConformanceOptions& options = {});

std::string format_report(const ConformanceReport& r);

}  // namespace dzn::codegen
