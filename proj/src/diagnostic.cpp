#include "dzn/diagnostic.hpp"

#include <algorithm>

namespace dzn {

std::string to_string(const SourceLoc& loc) {
    return loc.file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

std::string_view kind_name(DiagnosticKind kind) {
    switch (kind) {
    case DiagnosticKind::Syntax: return "syntax";
    case DiagnosticKind::WellFormedness: return "wellformedness";
    case DiagnosticKind::Deadlock: return "deadlock";
    case DiagnosticKind::Illegal: return "illegal";
    case DiagnosticKind::RangeError: return "range_error";
    case DiagnosticKind::Unhandled: return "unhandled";
    case DiagnosticKind::Livelock: return "livelock";
    case DiagnosticKind::RefinementTrace: return "refinement_trace";
    case DiagnosticKind::RefinementFailure: return "refinement_failure";
    }
    return "unknown";
}

std::string format_source_diagnostic(const Diagnostic& d) {
    std::string where = d.locs.empty() ? std::string("<unknown>") : to_string(d.locs.front());
    return where + ": error: " + d.detail;
}

std::string format_report_line(const Diagnostic& d) {
    std::string line(kind_name(d.kind));
    line += " " + d.subject + ":";
    for (const auto& label : d.trace) line += " " + label;
    if (!d.detail.empty()) line += " [" + d.detail + "]";
    if (!d.locs.empty()) line += " @" + to_string(d.locs.front());
    return line;
}

void sort_by_location(std::vector<Diagnostic>& diagnostics) {
    std::stable_sort(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        SourceLoc la = a.locs.empty() ? SourceLoc{} : a.locs.front();
        SourceLoc lb = b.locs.empty() ? SourceLoc{} : b.locs.front();
        if (la != lb) return la < lb;
        return a.detail < b.detail;
    });
}

}  // namespace dzn
