#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mscflow/error.hpp"
#include "mscflow/parser.hpp"
#include "mscflow/projection.hpp"
#include "mscflow/render.hpp"
#include "mscflow/runtime.hpp"
#include "mscflow/semantics.hpp"
#include "mscflow/typecheck.hpp"
#include "mscflow/verify.hpp"

namespace py = pybind11;
using namespace mscflow;
using nlohmann::json;

namespace {

// Everything crosses the boundary as JSON text; the Python side decodes it.
struct Loaded {
    WorkflowDecl decl;
    std::vector<ActionDecl> actions;
    ActionRegistry registry;
};

Loaded load(const std::string& workflow, const std::string& actions) {
    auto wf = parse_workflow(workflow);
    if (!wf.ok()) throw Error(Errc::syntax, to_json(wf.diagnostics).dump());
    auto acts = parse_actions(actions);
    if (!acts.ok()) throw Error(Errc::syntax, to_json(acts.diagnostics).dump());
    Loaded l{assign_control_tags(*wf.value), *acts.value, {}};
    l.registry = make_registry(l.actions);
    return l;
}

Loaded load_typed(const std::string& workflow, const std::string& actions) {
    auto l = load(workflow, actions);
    auto diags = check_well_typed(l.decl, l.actions);
    if (has_errors(diags)) throw Error(Errc::type, to_json(diags).dump());
    return l;
}

std::string check_text(const std::string& workflow, const std::string& actions) {
    auto wf = parse_workflow(workflow);
    if (!wf.ok()) return to_json(wf.diagnostics).dump();
    auto acts = parse_actions(actions);
    if (!acts.ok()) return to_json(acts.diagnostics).dump();
    return to_json(check_well_typed(assign_control_tags(*wf.value), *acts.value)).dump();
}

std::string project_text(const std::string& workflow, const std::string& actions) {
    auto l = load_typed(workflow, actions);
    json out = json::object();
    for (const auto& [a, s] : project_all(l.decl)) out[a.name()] = to_text(s);
    return out.dump();
}

std::string enumerate_traces(const std::string& workflow, std::size_t unroll) {
    auto wf = parse_workflow(workflow);
    if (!wf.ok()) throw Error(Errc::syntax, to_json(wf.diagnostics).dump());
    auto decl = assign_control_tags(*wf.value);
    return global_semantics(decl.body, Bound{unroll}, decl.lifelines()).to_json().dump();
}

std::string verify_text(const std::string& workflow, const std::string& actions, std::size_t unroll) {
    auto l = load_typed(workflow, actions);
    json out = json::array();
    for (const auto& r : verify_all(VerifyTarget::of(l.decl), Bound{unroll})) out.push_back(r.to_json());
    return out.dump();
}

std::string run_script(const std::string& workflow, const std::string& actions,
                       const std::string& inputs, const std::string& script) {
    auto l = load_typed(workflow, actions);
    Inputs in;
    const auto given = json::parse(inputs);
    for (const auto& [k, v] : given.items()) in[k] = Value::from_json(v);
    ScriptBackend backend(Script::from_json(json::parse(script)));
    auto r = run(project_all(l.decl), l.decl, in, l.registry, backend);
    return json{{"result", r.result.to_json()}, {"trace", r.trace.to_json()}, {"events", r.log.size()}}.dump();
}

std::string render(const std::string& trace) { return render_ascii(MscTuple::from_json(json::parse(trace))); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Global workflows: parsing, projection, semantics, runs and checks";
    py::register_exception<Error>(m, "MscflowError");
    m.def("check", &check_text, py::arg("workflow"), py::arg("actions") = "");
    m.def("project", &project_text, py::arg("workflow"), py::arg("actions") = "");
    m.def("enumerate", &enumerate_traces, py::arg("workflow"), py::arg("unroll") = 1);
    m.def("verify", &verify_text, py::arg("workflow"), py::arg("actions") = "", py::arg("unroll") = 1);
    m.def("run_script", &run_script, py::arg("workflow"), py::arg("actions"), py::arg("inputs"),
          py::arg("script"));
    m.def("render", &render, py::arg("trace"));
}
