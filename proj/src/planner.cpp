#include "mscflow/planner.hpp"

#include <algorithm>

#include "mscflow/parser.hpp"
#include "mscflow/projection.hpp"
#include "mscflow/typecheck.hpp"
#include "mscflow/planner_prompt.hpp"

namespace mscflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool allows(const ActionDecl& planner, const std::string& what) {
    return std::find(planner.allow.begin(), planner.allow.end(), what) != planner.allow.end();
}

std::string strip_fence(const std::string& text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text.compare(first, 3, "```") != 0) return text;
    auto nl = text.find('\n', first);
    auto end = text.rfind("```");
    if (nl == std::string::npos || end <= nl) return text;
    return text.substr(nl + 1, end - nl - 1);
}

struct Shape {
    std::vector<std::pair<std::string, SourceSpan>> actions;
    std::vector<SourceSpan> ifs, whiles;
};

void walk(const GlobalWorkflow& p, Shape& s) {
    std::visit(overloaded{
                   [](const gw::Epsilon&) {},
                   [](const gw::Msg&) {},
                   [&](const gw::Act& a) { s.actions.push_back({a.action, p.span()}); },
                   [&](const gw::Seq& q) {
                       walk(q.first, s);
                       walk(q.second, s);
                   },
                   [&](const gw::If& i) {
                       s.ifs.push_back(p.span());
                       walk(i.then_branch, s);
                       walk(i.else_branch, s);
                   },
                   [&](const gw::While& w) {
                       s.whiles.push_back(p.span());
                       walk(w.body, s);
                       walk(w.exit, s);
                   },
               },
               p.node().v);
}

std::string signature_line(const ActionDecl& a) {
    std::string s = std::string(to_string(a.kind)) + " " + a.name + "(";
    for (std::size_t i = 0; i < a.inputs.size(); ++i) {
        if (i) s += ", ";
        s += a.inputs[i].name + ": " + std::string(type_name(a.inputs[i].type));
    }
    s += ") -> (";
    for (std::size_t i = 0; i < a.outputs.size(); ++i) {
        if (i) s += ", ";
        s += a.outputs[i].name + ": " + std::string(type_name(a.outputs[i].type));
    }
    s += ")";
    if (!a.description.empty()) s += "  // " + a.description;
    return s;
}

} // namespace

std::string planner_prompt_template() { return detail::kPlannerPrompt; }

std::string worker_summary(const ActionDecl& planner, const ActionRegistry& registry) {
    std::string out;
    for (const auto& l : planner.lifelines) out += "- " + l.name() + "\n";
    out += "Actions any worker can run:\n";
    if (planner.vocabulary.empty()) out += "  (none)\n";
    for (const auto& name : planner.vocabulary) {
        auto it = registry.find(name);
        out += "  " + (it == registry.end() ? name + " (undeclared)" : signature_line(it->second)) +
               "\n";
    }
    return out;
}

std::string compose_planner_prompt(const ActionDecl& planner, const std::vector<Value>& inputs,
                                   const ActionRegistry& registry) {
    std::string params, input_lines;
    for (std::size_t i = 0; i < planner.inputs.size(); ++i) {
        const auto& in = planner.inputs[i];
        if (i) params += ", ";
        params += in.name + ": " + std::string(type_name(in.type)) + " @ WORKER";
        input_lines += "- " + in.name + ": " + std::string(type_name(in.type)) + " = " +
                       (i < inputs.size() ? inputs[i].to_source() : std::string("?")) + "\n";
    }
    std::string constructs;
    if (allows(planner, "if"))
        constructs += "    if COND @ A then { ... } else { ... }   A decides, others follow\n";
    if (allows(planner, "while"))
        constructs += "    while (COND) @ A { ... } exit { ... }  A decides each round\n";
    std::string new_actions;
    if (allows(planner, "llm") || allows(planner, "pure"))
        new_actions = "- You may declare new actions before the workflow, of kinds: ";
    for (const char* k : {"llm", "pure"}) {
        if (allows(planner, k)) new_actions += std::string(k) + " ";
    }
    std::string allow_list;
    for (const auto& a : planner.allow) allow_list += (allow_list.empty() ? "" : ", ") + a;
    if (allow_list.empty()) allow_list = "linear workflows over the listed actions only";

    std::map<std::string, Value> slots{
        {"description", Value::string(planner.description)},
        {"workers", Value::string(worker_summary(planner, registry))},
        {"params", Value::string(params)},
        {"output_type",
         Value::string(std::string(type_name(planner.outputs.empty()
                                                 ? ValueType::string
                                                 : planner.outputs[0].type)))},
        {"constructs", Value::string(constructs)},
        {"new_actions", Value::string(new_actions)},
        {"allow", Value::string(allow_list)},
        {"inputs", Value::string(input_lines)},
        {"instructions",
         Value::string(planner.instructions.empty() ? "(none)" : planner.instructions)},
    };
    return render_template(planner_prompt_template(), slots);
}

std::vector<Diagnostic> validate_generated(const ActionDecl& planner, const std::string& source,
                                           const Lifeline& caller, const ActionRegistry& registry,
                                           std::optional<GeneratedWorkflow>* out,
                                           const PureRegistry& pure) {
    std::vector<Diagnostic> diags;
    auto err = [&](std::string code, SourceSpan span, std::string msg) {
        diags.push_back(Diagnostic{Severity::error, std::move(code), std::move(msg), span});
    };

    auto parsed = parse_unit(strip_fence(source));
    if (!parsed.ok()) return parsed.diagnostics;
    auto& unit = *parsed.value;
    if (unit.workflows.size() != 1) {
        err("planner-workflow-count", {},
            "generated text must contain exactly one workflow, found " +
                std::to_string(unit.workflows.size()));
        return diags;
    }
    auto wf = assign_control_tags(unit.workflows[0]);

    ActionRegistry combined = registry;
    std::set<std::string> fresh;
    for (const auto& a : unit.actions) {
        if (a.kind == ActionKind::planner || !allows(planner, std::string(to_string(a.kind)))) {
            err("planner-new-action", a.span,
                "new " + std::string(to_string(a.kind)) + " action '" + a.name +
                    "' is not allowed by this planner");
            continue;
        }
        if (registry.count(a.name)) {
            err("planner-new-action", a.span, "action '" + a.name + "' is already declared");
            continue;
        }
        if (a.kind == ActionKind::pure && !pure.has(a.name)) {
            err("planner-new-action", a.span,
                "pure action '" + a.name + "' has no implementation");
            continue;
        }
        combined[a.name] = a;
        fresh.insert(a.name);
    }

    std::set<Lifeline> workers(planner.lifelines.begin(), planner.lifelines.end());
    for (const auto& l : wf.lifelines()) {
        if (l == caller)
            err("planner-caller", wf.span,
                "lifeline " + l.name() + " is the calling lifeline and cannot be a worker");
        else if (!workers.count(l))
            err("planner-lifeline", wf.span, "lifeline " + l.name() + " is not a declared worker");
    }

    Shape shape;
    walk(wf.body, shape);
    if (!allows(planner, "if"))
        for (const auto& sp : shape.ifs) err("planner-allow", sp, "'if' is not allowed");
    if (!allows(planner, "while"))
        for (const auto& sp : shape.whiles) err("planner-allow", sp, "'while' is not allowed");
    for (const auto& [name, sp] : shape.actions) {
        bool in_vocab = std::find(planner.vocabulary.begin(), planner.vocabulary.end(), name) !=
                        planner.vocabulary.end();
        if (!in_vocab && !fresh.count(name))
            err("planner-action", sp, "action '" + name + "' is outside the planner vocabulary");
    }

    bool params_ok = wf.params.size() == planner.inputs.size();
    for (std::size_t i = 0; params_ok && i < wf.params.size(); ++i)
        params_ok = wf.params[i].name == planner.inputs[i].name &&
                    wf.params[i].type == planner.inputs[i].type;
    if (!params_ok)
        err("planner-params", wf.span, "workflow parameters must be exactly the planner inputs");

    const ValueType want = planner.outputs.at(0).type;
    if (wf.return_type && *wf.return_type != want)
        err("planner-return-type", wf.span,
            "workflow returns " + std::string(type_name(*wf.return_type)) + ", planner needs " +
                std::string(type_name(want)));

    auto tc = typecheck(wf, combined);
    diags.insert(diags.end(), tc.diagnostics.begin(), tc.diagnostics.end());
    if (tc.ok()) {
        auto it = tc.types.find({wf.return_at, wf.return_var});
        if (it != tc.types.end() && it->second != want)
            err("planner-return-type", wf.span,
                "return variable '" + wf.return_var + "' has type " +
                    std::string(type_name(it->second)) + ", planner needs " +
                    std::string(type_name(want)));
    }

    if (!has_errors(diags) && out) {
        std::vector<ActionDecl> news;
        for (const auto& a : unit.actions)
            if (fresh.count(a.name)) news.push_back(a);
        *out = GeneratedWorkflow{std::move(wf), std::move(news), std::move(combined)};
    }
    return diags;
}

PlanResult plan_and_run(const ActionDecl& planner, const std::vector<Value>& inputs,
                        ActionBackend& backend, const ActionRegistry& registry,
                        const PlanOptions& options) {
    if (planner.kind != ActionKind::planner)
        throw Error(Errc::contract, "plan_and_run on non-planner action '" + planner.name + "'");
    if (options.depth >= options.max_depth)
        throw Error(Errc::planner_depth, "planner '" + planner.name + "' nested deeper than " +
                                             std::to_string(options.max_depth));
    if (inputs.size() != planner.inputs.size())
        throw Error(Errc::arity, "planner '" + planner.name + "' takes " +
                                     std::to_string(planner.inputs.size()) + " inputs");

    auto prompt = compose_planner_prompt(planner, inputs, registry);
    auto text = backend.generate(planner, prompt,
                                 InvocationContext{options.caller, options.invocation});

    std::optional<GeneratedWorkflow> gen;
    auto diags = validate_generated(planner, text, options.caller, registry, &gen);
    if (has_errors(diags)) {
        std::string msg = "generated workflow for '" + planner.name + "' rejected:";
        for (const auto& d : diags)
            if (d.severity == Severity::error) msg += "\n  " + format_diagnostic("<generated>", d);
        throw ValidationError(msg, diags);
    }

    Inputs sub_inputs;
    for (std::size_t i = 0; i < inputs.size(); ++i) sub_inputs[planner.inputs[i].name] = inputs[i];

    // A fresh configuration: the sub-workflow shares nothing with the caller
    // but the backend.
    RunOptions ro;
    ro.planner_depth = options.depth + 1;
    ro.max_planner_depth = options.max_depth;
    auto d = project_all(gen->workflow);
    auto r = run(d, gen->workflow, sub_inputs, gen->registry, backend, ro);
    return PlanResult{r.result, text, gen->workflow, r.trace, r.log};
}

} // namespace mscflow
