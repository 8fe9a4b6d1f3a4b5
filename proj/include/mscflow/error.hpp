#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mscflow {

/// Error categories surfaced by the library. Callers that need to map
/// failures onto exit codes switch on these.
enum class Errc {
    io,
    syntax,
    type,
    contract,
    resource_exceeded,
    receiver_constant_mismatch,
    backend_failure,
    backend_type_mismatch,
    read_before_write,
    stuck,
    invariant,
    unknown_action,
    arity,
    input,
    transport,
    http_status,
    json_parse,
    output_field,
    validation,
    planner_depth,
    script,
    nondeterministic_backend,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace mscflow
