#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dzn {

struct SourceLoc {
    std::string file;
    int line = 1;
    int column = 1;

    friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
    friend auto operator<=>(const SourceLoc&, const SourceLoc&) = default;
};

std::string to_string(const SourceLoc& loc);

// Declaration order is the reporting order of verification results.
enum class DiagnosticKind {
    Syntax,
    WellFormedness,
    Deadlock,
    Illegal,
    RangeError,
    Unhandled,
    Livelock,
    RefinementTrace,
    RefinementFailure,
};

std::string_view kind_name(DiagnosticKind kind);

struct Diagnostic {
    DiagnosticKind kind = DiagnosticKind::Syntax;
    std::string subject;
    std::vector<std::string> trace;
    std::string detail;
    std::vector<SourceLoc> locs;
    std::set<std::string> refusal;  // refinement failures only
};

/// "file:line:col: error: message" for frontend diagnostics.
std::string format_source_diagnostic(const Diagnostic& d);

/// "KIND subject: label label ... @file:line:col" for verification reports.
std::string format_report_line(const Diagnostic& d);

/// Stable order: by location, then message.
void sort_by_location(std::vector<Diagnostic>& diagnostics);

}  // namespace dzn
