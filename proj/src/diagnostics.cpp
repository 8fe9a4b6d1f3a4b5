#include "mscflow/diagnostics.hpp"

#include <algorithm>

#include "mscflow/error.hpp"

namespace mscflow {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::io: return "io";
    case Errc::syntax: return "syntax";
    case Errc::type: return "type";
    case Errc::contract: return "contract";
    case Errc::resource_exceeded: return "resource-exceeded";
    case Errc::receiver_constant_mismatch: return "receiver-constant-mismatch";
    case Errc::backend_failure: return "backend-failure";
    case Errc::backend_type_mismatch: return "backend-type-mismatch";
    case Errc::read_before_write: return "read-before-write";
    case Errc::stuck: return "stuck";
    case Errc::invariant: return "invariant";
    case Errc::unknown_action: return "unknown-action";
    case Errc::arity: return "arity";
    case Errc::input: return "input";
    case Errc::transport: return "transport";
    case Errc::http_status: return "http-status";
    case Errc::json_parse: return "json-parse";
    case Errc::output_field: return "output-field";
    case Errc::validation: return "validation";
    case Errc::planner_depth: return "planner-depth";
    case Errc::script: return "script";
    case Errc::nondeterministic_backend: return "nondeterministic-backend";
    }
    return "unknown";
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string format_diagnostic(std::string_view file, const Diagnostic& d) {
    std::string out(file);
    out += ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": ";
    out += d.severity == Severity::error ? "error" : "warning";
    out += "[" + d.code + "]: " + d.message;
    return out;
}

nlohmann::json to_json(const Diagnostic& d) {
    return {
        {"severity", d.severity == Severity::error ? "error" : "warning"},
        {"code", d.code},
        {"message", d.message},
        {"line", d.span.line},
        {"column", d.span.column},
        {"begin", d.span.begin},
        {"end", d.span.end},
    };
}

nlohmann::json to_json(const std::vector<Diagnostic>& diags) {
    auto arr = nlohmann::json::array();
    for (const auto& d : diags) arr.push_back(to_json(d));
    return arr;
}

} // namespace mscflow
