#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "mscflow/parser.hpp"
#include "mscflow/typecheck.hpp"

namespace testing {

inline std::string source_path(const std::string& rel) {
    return std::string(MSCFLOW_SOURCE_DIR) + "/" + rel;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Corpus {
    mscflow::WorkflowDecl decl;
    std::vector<mscflow::ActionDecl> actions;
    mscflow::ActionRegistry registry;
};

/// Parses workflows/<stem>.msc and workflows/<stem>.act.
inline Corpus load(const std::string& stem) {
    Corpus c;
    auto wf = mscflow::parse_workflow(read_text(source_path("workflows/" + stem + ".msc")));
    REQUIRE_MESSAGE(wf.ok(), stem << ": " << (wf.diagnostics.empty() ? "" : wf.diagnostics[0].message));
    c.decl = mscflow::assign_control_tags(*wf.value);
    auto acts = mscflow::parse_actions(read_text(source_path("workflows/" + stem + ".act")));
    REQUIRE(acts.ok());
    c.actions = *acts.value;
    c.registry = mscflow::make_registry(c.actions);
    return c;
}

inline mscflow::WorkflowDecl parse_ok(const std::string& text) {
    auto r = mscflow::parse_workflow(text);
    if (!r.ok())
        for (const auto& d : r.diagnostics) MESSAGE(d.message);
    REQUIRE(r.ok());
    return mscflow::assign_control_tags(*r.value);
}

inline mscflow::Lifeline L(const char* n) { return mscflow::Lifeline(n); }
inline mscflow::Atom var(const char* n) { return mscflow::Atom::var(n); }
inline mscflow::Atom str(const char* s) { return mscflow::Atom::constant(mscflow::Value::string(s)); }
inline mscflow::Atom boolean(bool b) { return mscflow::Atom::constant(mscflow::Value::boolean(b)); }

} // namespace testing
