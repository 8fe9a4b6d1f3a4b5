#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mscflow {

/// Byte range in a source buffer; line and column are 1-based.
struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;
    int column = 0;

    bool operator==(const SourceSpan&) const = default;
};

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;
    std::string message;
    SourceSpan span;
};

bool has_errors(const std::vector<Diagnostic>& diags);

/// `file:line:col: severity[code]: message`
std::string format_diagnostic(std::string_view file, const Diagnostic& d);

nlohmann::json to_json(const Diagnostic& d);
nlohmann::json to_json(const std::vector<Diagnostic>& diags);

} // namespace mscflow
