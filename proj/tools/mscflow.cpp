// mscflow command-line driver.
//
// Exit codes: 0 success, 1 workflow or verification failure, 2 usage or
// I/O error, 3 internal invariant violation (stuck projected program).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mscflow/actions.hpp"
#include "mscflow/error.hpp"
#include "mscflow/parser.hpp"
#include "mscflow/planner.hpp"
#include "mscflow/projection.hpp"
#include "mscflow/render.hpp"
#include "mscflow/runtime.hpp"
#include "mscflow/semantics.hpp"
#include "mscflow/typecheck.hpp"
#include "mscflow/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mscflow;

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kInternal = 3 };

struct Options {
    std::string workflow;
    std::string actions;
    std::string format = "text";
    std::size_t unroll = 1;
    std::size_t cap = kDefaultResourceCap;
    std::string lifeline;
    std::string mode = "global";
    std::string backend = "pure";
    std::string scheduler = "round_robin";
    std::vector<std::string> inputs;
    std::string trace_out;
    std::string log_out;
    bool concurrent = false;
    std::size_t max_steps = 1000000;
    std::vector<std::string> checks;
    std::string trace;
    std::string render_format = "ascii";
    std::string planner;
    std::string caller = "Caller";
};

// A failure that has already been reported.
struct Reported {
    int code;
};

bool structured(const Options& o) { return o.format == "json"; }

int exit_code_for(Errc c) {
    switch (c) {
    case Errc::io:
    case Errc::input: return kUsage;
    case Errc::stuck:
    case Errc::invariant: return kInternal;
    default: return kFail;
    }
}

[[noreturn]] void report_error(const Options& o, Errc code, const std::string& message,
                               const std::vector<Diagnostic>& diags = {}) {
    if (structured(o)) {
        json j{{"ok", false}, {"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
        if (!diags.empty()) j["diagnostics"] = to_json(diags);
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& d : diags) std::cerr << format_diagnostic(o.workflow, d) << "\n";
        std::cerr << "error[" << to_string(code) << "]: " << message << "\n";
    }
    throw Reported{exit_code_for(code)};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
    out << text;
}

struct Loaded {
    WorkflowDecl decl;
    std::vector<ActionDecl> actions;
    ActionRegistry registry;
    std::vector<Diagnostic> diagnostics; // parse + type errors
};

// Parses the workflow file (which may also hold actions) and the actions
// file, `<stem>.act` by default.
Loaded load(const Options& o, bool require_typed) {
    Loaded l;
    auto text = read_file(o.workflow);
    auto unit = parse_unit(text);
    if (!unit.ok()) {
        l.diagnostics = unit.diagnostics;
        if (require_typed) report_error(o, Errc::syntax, "workflow does not parse", l.diagnostics);
        return l;
    }
    if (unit.value->workflows.size() != 1) {
        l.diagnostics.push_back({Severity::error, "syntax", "expected exactly one workflow", {}});
        if (require_typed) report_error(o, Errc::syntax, "expected exactly one workflow");
        return l;
    }
    l.decl = assign_control_tags(unit.value->workflows.front());
    l.actions = unit.value->actions;
    std::string act_path = o.actions;
    if (act_path.empty()) {
        auto guess = fs::path(o.workflow).replace_extension(".act");
        if (fs::exists(guess)) act_path = guess.string();
    }
    if (!act_path.empty()) {
        auto acts = parse_actions(read_file(act_path));
        if (!acts.ok()) {
            for (auto d : acts.diagnostics) l.diagnostics.push_back(d);
            if (require_typed)
                report_error(o, Errc::syntax, "actions file '" + act_path + "' does not parse",
                             l.diagnostics);
            return l;
        }
        l.actions.insert(l.actions.end(), acts.value->begin(), acts.value->end());
    }
    l.registry = make_registry(l.actions);
    auto diags = check_well_typed(l.decl, l.actions);
    l.diagnostics.insert(l.diagnostics.end(), diags.begin(), diags.end());
    if (require_typed && has_errors(l.diagnostics))
        report_error(o, Errc::type, "workflow is not well typed", l.diagnostics);
    return l;
}

std::unique_ptr<ActionBackend> make_backend(const Options& o) {
    const auto& b = o.backend;
    if (b == "pure") return std::make_unique<PureBackend>();
    if (b.rfind("mock:", 0) == 0) return std::make_unique<ScriptBackend>(Script::load(b.substr(5)));
    if (b.rfind("llm:", 0) == 0) {
        auto cfg = LlmClientConfig::load(b.substr(4));
        const char* key = std::getenv(cfg.credential_env.c_str());
        if (!key || !*key)
            throw Error(Errc::input, "the llm backend needs the environment variable " +
                                         cfg.credential_env);
        return std::make_unique<LlmBackend>(cfg);
    }
    throw Error(Errc::input, "unknown backend '" + b + "' (pure, mock:FILE, llm:FILE)");
}

std::optional<ValueType> param_type(const WorkflowDecl& d, const std::string& key) {
    for (const auto& p : d.params)
        if (p.name == key || p.owner.name() + "." + p.name == key) return p.type;
    return std::nullopt;
}

std::pair<std::string, std::string> split_input(const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw Error(Errc::input, "input '" + kv + "' is not of the form name=value");
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

Inputs workflow_inputs(const Options& o, const WorkflowDecl& d) {
    Inputs in;
    for (const auto& kv : o.inputs) {
        auto [k, v] = split_input(kv);
        auto t = param_type(d, k);
        if (!t) throw Error(Errc::input, "workflow has no parameter '" + k + "'");
        auto val = Value::parse_as(v, *t);
        if (!val)
            throw Error(Errc::input, "input '" + k + "' is not a " + std::string(type_name(*t)));
        in[k] = *val;
    }
    return in;
}

Scheduler parse_scheduler(const std::string& s) {
    if (s == "round_robin") return Scheduler::round_robin();
    if (s.rfind("random:", 0) == 0) return Scheduler::random(std::stoull(s.substr(7)));
    if (s.rfind("script:", 0) == 0) {
        std::vector<Lifeline> order;
        std::stringstream ss(s.substr(7));
        std::string item;
        while (std::getline(ss, item, ',')) order.emplace_back(item);
        return Scheduler::scripted(order);
    }
    throw Error(Errc::input, "unknown scheduler '" + s + "'");
}

void emit(const Options& o, const json& doc, const std::string& text) {
    if (structured(o)) std::cout << doc.dump(2) << "\n";
    else std::cout << text;
}

// ---- subcommands -------------------------------------------------------

int cmd_check(const Options& o) {
    auto l = load(o, false);
    bool ok = !has_errors(l.diagnostics);
    std::string text;
    for (const auto& d : l.diagnostics) text += format_diagnostic(o.workflow, d) + "\n";
    if (ok)
        text += "ok: workflow " + l.decl.name + ", " + std::to_string(l.decl.lifelines().size()) +
                " lifelines, " + std::to_string(l.actions.size()) + " actions\n";
    if (!structured(o) && !ok) {
        std::cerr << text;
        return kFail;
    }
    emit(o, json{{"ok", ok}, {"workflow", l.decl.name}, {"diagnostics", to_json(l.diagnostics)}},
         text);
    return ok ? kOk : kFail;
}

int cmd_project(const Options& o) {
    auto l = load(o, true);
    auto d = project_all(l.decl);
    if (!o.lifeline.empty()) {
        Lifeline a(o.lifeline);
        if (!d.count(a)) throw Error(Errc::input, "workflow has no lifeline '" + o.lifeline + "'");
        d = DistributedProgram{{a, d.at(a)}};
    }
    emit(o, json{{"ok", true}, {"programs", to_json(d)}}, to_text(d));
    return kOk;
}

int cmd_enumerate(const Options& o) {
    auto l = load(o, true);
    Bound b{o.unroll, o.cap};
    MscSet out;
    if (o.mode == "global") {
        out = global_semantics(l.decl.body, b, l.decl.lifelines());
    } else {
        auto d = project_all(l.decl);
        if (o.mode == "distributed") out = distributed_semantics(d, b);
        else if (o.mode == "prefix") out = distributed_prefix_semantics(d, b);
        else if (o.mode == "erased") {
            for (const auto& [_, m] : distributed_semantics(d, b)) out.insert(erase(m));
        } else {
            throw Error(Errc::input, "unknown mode '" + o.mode +
                                         "' (global, distributed, erased, prefix)");
        }
    }
    std::string text = std::to_string(out.size()) + " traces (" + o.mode + ", unroll " +
                       std::to_string(o.unroll) + ")\n";
    std::size_t i = 0;
    for (const auto& [_, m] : out) text += "\n# trace " + std::to_string(++i) + "\n" + m.to_string();
    emit(o,
         json{{"ok", true}, {"mode", o.mode}, {"bound", o.unroll}, {"count", out.size()},
              {"traces", out.to_json()}},
         text);
    return kOk;
}

int cmd_run(const Options& o) {
    auto l = load(o, true);
    auto d = project_all(l.decl);
    auto inputs = workflow_inputs(o, l.decl);
    auto backend = make_backend(o);

    if (o.scheduler.rfind("exhaustive", 0) == 0) {
        ExploreOptions eo;
        if (o.scheduler.size() > 11) eo.depth = std::stoull(o.scheduler.substr(11));
        auto r = explore(d, l.decl, inputs, l.registry, *backend, eo);
        std::string text = "verdict: " + std::string(to_string(r.verdict)) + "\nstates: " +
                           std::to_string(r.states) + "\nterminal states: " +
                           std::to_string(r.terminal_states) + "\nterminal traces: " +
                           std::to_string(r.terminal_traces.size()) + "\n";
        json j{{"ok", r.verdict == ExploreResult::Verdict::ok},
               {"verdict", std::string(to_string(r.verdict))},
               {"states", r.states},
               {"terminal_states", r.terminal_states},
               {"frontier", r.frontier},
               {"terminal_traces", r.terminal_traces.size()}};
        if (r.verdict == ExploreResult::Verdict::stuck) {
            auto sched = json::array();
            std::string names;
            for (const auto& s : r.witness_schedule) {
                sched.push_back(s.name());
                names += s.name() + " ";
            }
            j["witness_schedule"] = sched;
            text += "stuck after schedule: " + names + "\n";
        }
        emit(o, j, text);
        switch (r.verdict) {
        case ExploreResult::Verdict::ok: return kOk;
        case ExploreResult::Verdict::stuck: return kInternal;
        case ExploreResult::Verdict::bounded: return kFail;
        }
    }

    RunOptions ro;
    ro.scheduler = parse_scheduler(o.scheduler);
    ro.max_steps = o.max_steps;
    auto r = o.concurrent ? run_concurrent(d, l.decl, inputs, l.registry, *backend, ro)
                          : run(d, l.decl, inputs, l.registry, *backend, ro);
    if (!o.trace_out.empty()) write_file(o.trace_out, r.trace.to_json().dump(2) + "\n");
    if (!o.log_out.empty()) write_file(o.log_out, log_to_ndjson(r.log));
    emit(o,
         json{{"ok", true},
              {"result", r.result.to_json()},
              {"events", r.log.size()},
              {"trace", r.trace.to_json()}},
         "result: " + r.result.to_display() + "\n");
    return kOk;
}

int cmd_verify(const Options& o) {
    auto l = load(o, true);
    auto t = VerifyTarget::of(l.decl);
    auto reports = verify_all(t, Bound{o.unroll, o.cap});
    if (!o.checks.empty()) {
        std::vector<VerificationReport> kept;
        for (auto& r : reports)
            for (const auto& c : o.checks)
                if (r.check.rfind(c, 0) == 0) {
                    kept.push_back(r);
                    break;
                }
        reports = kept;
    }
    bool ok = true;
    std::string text;
    auto arr = json::array();
    for (const auto& r : reports) {
        ok = ok && r.passed();
        std::string v = r.verdict == Verdict::pass ? "PASS"
                        : r.verdict == Verdict::fail ? "FAIL"
                                                     : "LIMIT";
        text += v + " " + r.check;
        if (r.bound) text += " (unroll " + std::to_string(*r.bound) + ")";
        if (!r.detail.empty()) text += ": " + r.detail;
        text += "\n";
        if (r.witness) text += r.witness->to_string();
        arr.push_back(r.to_json());
    }
    emit(o, json{{"ok", ok}, {"reports", arr}}, text);
    return ok ? kOk : kFail;
}

int cmd_render(const Options& o) {
    json j;
    try {
        j = json::parse(read_file(o.trace));
    } catch (const json::exception& e) {
        throw Error(Errc::io, "trace file '" + o.trace + "': " + e.what());
    }
    if (j.is_object() && j.contains("trace")) j = j["trace"];
    MscTuple m;
    try {
        m = MscTuple::from_json(j);
    } catch (const json::exception& e) {
        throw Error(Errc::io, "trace file '" + o.trace + "': " + e.what());
    }
    if (o.render_format == "dot") std::cout << render_dot(m);
    else if (o.render_format == "ascii") std::cout << render_ascii(m);
    else throw Error(Errc::input, "unknown render format '" + o.render_format + "'");
    return kOk;
}

int cmd_plan(const Options& o) {
    auto text = read_file(o.workflow);
    auto unit = parse_unit(text);
    if (!unit.ok()) report_error(o, Errc::syntax, "actions file does not parse", unit.diagnostics);
    auto registry = make_registry(unit.value->actions);
    auto it = registry.find(o.planner);
    if (it == registry.end() || it->second.kind != ActionKind::planner)
        throw Error(Errc::input, "no planner action named '" + o.planner + "'");
    const auto& planner = it->second;
    std::map<std::string, Value> given;
    for (const auto& kv : o.inputs) {
        auto [k, v] = split_input(kv);
        given[k] = Value::string(v);
    }
    std::vector<Value> inputs;
    for (const auto& in : planner.inputs) {
        auto g = given.find(in.name);
        if (g == given.end()) throw Error(Errc::input, "missing planner input '" + in.name + "'");
        auto val = Value::parse_as(g->second.as_string(), in.type);
        if (!val) throw Error(Errc::input, "input '" + in.name + "' has the wrong type");
        inputs.push_back(*val);
        given.erase(g);
    }
    if (!given.empty())
        throw Error(Errc::input, "planner has no input '" + given.begin()->first + "'");
    auto backend = make_backend(o);
    PlanOptions po;
    po.caller = Lifeline(o.caller);
    PlanResult r;
    try {
        r = plan_and_run(planner, inputs, *backend, registry, po);
    } catch (const ValidationError& e) {
        report_error(o, Errc::validation, e.what(), e.diagnostics());
    }
    if (!o.trace_out.empty()) write_file(o.trace_out, r.trace.to_json().dump(2) + "\n");
    emit(o,
         json{{"ok", true},
              {"result", r.result.to_json()},
              {"source", r.source},
              {"trace", r.trace.to_json()}},
         "generated workflow:\n" + pretty_print(r.workflow) + "result: " + r.result.to_display() +
             "\n");
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Global workflows for multi-agent coordination: check, project, run, verify"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c, bool with_actions = true) {
        c->add_option("workflow", o.workflow, "Workflow source file")->required();
        if (with_actions)
            c->add_option("--actions", o.actions, "Action declarations (default: <stem>.act)");
        c->add_option("--format", o.format, "Output format")
            ->check(CLI::IsMember({"text", "json"}));
    };

    auto* check = app.add_subcommand("check", "Parse and type-check a workflow");
    common(check);

    auto* project = app.add_subcommand("project", "Print the projected local programs");
    common(project);
    project->add_option("--lifeline", o.lifeline, "Only this lifeline");

    auto* enumerate = app.add_subcommand("enumerate", "Enumerate the bounded trace semantics");
    common(enumerate);
    enumerate->add_option("--unroll", o.unroll, "Loop unroll bound");
    enumerate->add_option("--cap", o.cap, "Maximum set size");
    enumerate->add_option("--mode", o.mode, "global, distributed, erased or prefix");

    auto* runc = app.add_subcommand("run", "Execute the projected programs");
    common(runc);
    runc->add_option("--backend", o.backend, "pure, mock:SCRIPT or llm:CONFIG");
    runc->add_option("--scheduler", o.scheduler,
                     "round_robin, random:SEED, script:A,B,.. or exhaustive[:DEPTH]");
    runc->add_option("--input", o.inputs, "Workflow input name=value")->allow_extra_args(false);
    runc->add_option("--trace-out", o.trace_out, "Write the trace document here");
    runc->add_option("--log-out", o.log_out, "Write the event log (NDJSON) here");
    runc->add_flag("--concurrent", o.concurrent, "One thread per lifeline");
    runc->add_option("--max-steps", o.max_steps, "Step limit");

    auto* verify = app.add_subcommand("verify", "Run the bounded correctness checks");
    common(verify);
    verify->add_option("--unroll", o.unroll, "Loop unroll bound");
    verify->add_option("--cap", o.cap, "Maximum set size");
    verify->add_option("--check", o.checks, "Only checks with this name prefix");

    auto* render = app.add_subcommand("render", "Draw a trace document");
    render->add_option("trace", o.trace, "Trace file")->required();
    render->add_option("--format", o.render_format, "ascii or dot")
        ->check(CLI::IsMember({"ascii", "dot"}));

    auto* plan = app.add_subcommand("plan", "Generate and run a planner sub-workflow");
    plan->add_option("actions", o.workflow, "File declaring the planner")->required();
    plan->add_option("--planner", o.planner, "Planner action name")->required();
    plan->add_option("--backend", o.backend, "mock:SCRIPT or llm:CONFIG");
    plan->add_option("--input", o.inputs, "Planner input name=value")->allow_extra_args(false);
    plan->add_option("--caller", o.caller, "Calling lifeline name");
    plan->add_option("--trace-out", o.trace_out, "Write the sub-workflow trace here");
    plan->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*check) return cmd_check(o);
        if (*project) return cmd_project(o);
        if (*enumerate) return cmd_enumerate(o);
        if (*runc) return cmd_run(o);
        if (*verify) return cmd_verify(o);
        if (*render) return cmd_render(o);
        if (*plan) return cmd_plan(o);
    } catch (const Reported& r) {
        return r.code;
    } catch (const Error& e) {
        try {
            report_error(o, e.code(), e.what());
        } catch (const Reported& r) {
            return r.code;
        }
    } catch (const std::exception& e) {
        try {
            report_error(o, Errc::invariant, e.what());
        } catch (const Reported& r) {
            return r.code;
        }
    }
    return kUsage;
}
