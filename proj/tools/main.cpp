#include "geobuild/dsl.hpp"
#include "geobuild/interpreter.hpp"
#include "geobuild/metrics.hpp"
#include "geobuild/render.hpp"
#include "geobuild/runner.hpp"
#include "geobuild/task.hpp"
#include "geobuild/verifier.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace geobuild;

constexpr int kOk = 0;
constexpr int kTaskFailure = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    out << data;
}

std::string num(double v)
{
    std::string s = fmt::format("{:.6f}", v);
    return s == "-0.000000" ? s.substr(1) : s;
}

std::string describe(const GeoObject& o)
{
    if (const auto* p = o.get_if<Point>()) {
        return fmt::format("({}, {})", num(p->at.x), num(p->at.y));
    }
    if (const auto* l = o.get_if<Line>()) {
        return fmt::format("through ({}, {}) dir ({}, {})", num(l->base.x), num(l->base.y), num(l->dir.x),
                           num(l->dir.y));
    }
    if (const auto* s = o.get_if<Segment>()) {
        return fmt::format("({}, {}) to ({}, {})", num(s->a.x), num(s->a.y), num(s->b.x), num(s->b.y));
    }
    if (const auto* r = o.get_if<Ray>()) {
        return fmt::format("from ({}, {}) dir ({}, {})", num(r->origin.x), num(r->origin.y), num(r->dir.x),
                           num(r->dir.y));
    }
    if (const auto* c = o.get_if<Circle>()) {
        return fmt::format("center ({}, {}) radius {}", num(c->center.x), num(c->center.y), num(c->radius));
    }
    if (const auto* a = o.get_if<Angle>()) {
        return fmt::format("at ({}, {}) {} deg", num(a->vertex.x), num(a->vertex.y),
                           num(kernel::measure_angle(*a).oriented_degrees));
    }
    const auto& s = o.as<Scalar>();
    return fmt::format("{} {}", num(s.value), to_string(s.unit));
}

std::string object_table(const ConstructionState& state)
{
    std::string out;
    for (const Binding& b : state.bindings()) {
        out += fmt::format("{:<16}{:<9}{}\n", b.name, to_string(b.object.kind()), describe(b.object));
    }
    return out;
}

/// Parses and executes; a parse error is an input error.
ExecutionTrace load_and_run(const std::string& path)
{
    const std::string source = read_file(path);
    const dsl::ParseResult parsed = dsl::parse_program(source);
    if (!parsed.ok()) {
        throw InputError(fmt::format("{}:{}: syntax error ({}): {}", path, parsed.error->line,
                                     dsl::to_string(parsed.error->kind), parsed.error->message));
    }
    return execute_program(parsed.commands);
}

void print_failure(const ExecutionFailure& f)
{
    std::cerr << fmt::format("line {}: {}: {}\n", f.step_line, to_string(f.category), f.detail);
}

int cmd_exec(const std::string& program, const std::string& svg)
{
    const ExecutionTrace trace = load_and_run(program);
    if (trace.final_state.empty()) {
        std::cout << "empty state: no objects constructed\n";
    } else {
        std::cout << object_table(trace.final_state);
        std::cout << fmt::format("{} objects\n", trace.final_state.size());
    }
    if (!svg.empty() && !trace.final_state.empty()) {
        try {
            write_file(svg, render_svg(trace.final_state));
        } catch (const RenderError& e) {
            std::cerr << "not rendered: " << e.what() << "\n";
        }
    }
    if (trace.failure) {
        print_failure(*trace.failure);
        return kTaskFailure;
    }
    return kOk;
}

int cmd_render(const std::string& program, const std::string& out, const RenderOptions& opts)
{
    const ExecutionTrace trace = load_and_run(program);
    if (trace.failure) {
        print_failure(*trace.failure);
    }
    std::string svg;
    try {
        svg = render_svg(trace.final_state, opts);
    } catch (const RenderError& e) {
        throw InputError(e.what());
    }
    if (out.empty() || out == "-") {
        std::cout << svg;
    } else {
        write_file(out, svg);
    }
    return trace.failure ? kTaskFailure : kOk;
}

Task pick_task(const std::string& tasks_path, const std::string& id)
{
    TaskSet set;
    try {
        set = load_tasks(tasks_path, true);
    } catch (const TaskError& e) {
        throw InputError(e.what());
    }
    if (set.tasks.empty()) {
        throw InputError("no tasks in " + tasks_path);
    }
    if (id.empty()) {
        return set.tasks.front();
    }
    for (const Task& t : set.tasks) {
        if (t.id == id) {
            return t;
        }
    }
    throw InputError("no task with id " + id);
}

int cmd_verify(const std::string& tasks_path, const std::string& program, const std::string& id, bool as_json)
{
    const Task task = pick_task(tasks_path, id);
    const std::string source = read_file(program);
    const ExecutionTrace trace = execute_source(source);
    const VerificationReport report = verify_task(trace, task);

    nlohmann::json j;
    j["task_id"] = task.id;
    j["success"] = report.success;
    j["executable"] = report.executable;
    if (trace.failure) {
        j["failure"] = {{"line", trace.failure->step_line},
                        {"category", to_string(trace.failure->category)},
                        {"detail", trace.failure->detail}};
    }
    j["missing_objects"] = nlohmann::json::array();
    for (const MissingObject& m : report.missing_objects) {
        j["missing_objects"].push_back({{"type", to_string(m.type)}, {"name", m.name}});
    }
    j["conditions"] = nlohmann::json::array();
    for (std::size_t i = 0; i < report.condition_results.size(); ++i) {
        const Condition& c = task.conditions[i];
        const ConditionResult& r = report.condition_results[i];
        std::vector<std::string> objs;
        for (const ObjectRef& o : c.objects) {
            objs.push_back(o.display());
        }
        j["conditions"].push_back({{"type", to_string(c.type)},
                                   {"objects", objs},
                                   {"satisfied", r.satisfied},
                                   {"residual", std::isfinite(r.residual) ? nlohmann::json(r.residual) : nlohmann::json(nullptr)},
                                   {"reason", r.reason}});
    }
    j["scale"] = {{"applicable", report.scale.applicable}, {"value", report.scale.scale}};

    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << fmt::format("task {}: {}\n", task.id, report.success ? "SUCCESS" : "FAILED");
        if (trace.failure) {
            std::cout << fmt::format("  execution failed at line {}: {}: {}\n", trace.failure->step_line,
                                     to_string(trace.failure->category), trace.failure->detail);
        }
        for (const MissingObject& m : report.missing_objects) {
            std::cout << fmt::format("  missing {} {}\n", to_string(m.type), m.name);
        }
        for (const auto& c : j["conditions"]) {
            std::cout << fmt::format("  {:<9}{}({}) residual={}{}\n",
                                     c["satisfied"].get<bool>() ? "ok" : "VIOLATED", c["type"].get<std::string>(),
                                     fmt::join(c["objects"].get<std::vector<std::string>>(), ", "),
                                     c["residual"].is_null() ? std::string("n/a")
                                                             : fmt::format("{:.6g}", c["residual"].get<double>()),
                                     c["reason"].get<std::string>().empty() ? "" : "  " + c["reason"].get<std::string>());
        }
    }
    return report.success ? kOk : kTaskFailure;
}

int cmd_run(RunConfig config)
{
    RunResult result;
    try {
        result = run_benchmark(config);
    } catch (const TaskError& e) {
        throw InputError(e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    for (const LoadIssue& issue : result.skipped_tasks) {
        std::cerr << fmt::format("{}:{}: skipped: {}\n", config.tasks_path.string(), issue.line, issue.message);
    }
    std::cout << render_report(result.summary, ReportFormat::Text);
    return result.summary.successes == result.summary.problems ? kOk : kTaskFailure;
}

int cmd_report(const std::string& run_dir, const std::string& format, std::size_t top)
{
    std::vector<SessionOutcome> outcomes;
    try {
        outcomes = load_run(run_dir);
    } catch (const LogError& e) {
        throw InputError(e.what());
    }
    std::cout << render_report(aggregate(outcomes), format == "json" ? ReportFormat::Json : ReportFormat::Text, top);
    return kOk;
}

int cmd_validate(const std::string& tasks_path)
{
    std::ifstream in(tasks_path);
    if (!in) {
        throw InputError("cannot read " + tasks_path);
    }
    const TaskSet set = parse_tasks(in, false);
    for (const LoadIssue& issue : set.issues) {
        std::cout << fmt::format("{}:{}: {}\n", tasks_path, issue.line, issue.message);
    }
    std::map<std::string, std::size_t> categories = category_histogram(set.tasks);
    std::cout << fmt::format("{} valid, {} invalid\n", set.tasks.size(), set.issues.size());
    for (const auto& [cat, n] : categories) {
        std::cout << fmt::format("  category {:<20}{}\n", cat, n);
    }
    for (const auto& [lvl, n] : difficulty_histogram(set.tasks)) {
        std::cout << fmt::format("  difficulty {:<18}{}\n", lvl, n);
    }
    return set.issues.empty() ? kOk : kInputError;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Construct, render and verify GeoDSL geometry programs"};
    app.require_subcommand(1);

    std::string program;
    std::string svg;
    auto* exec = app.add_subcommand("exec", "Execute a program and print the object table");
    exec->add_option("program", program, "GeoDSL program file")->required();
    exec->add_option("--svg", svg, "Write the rendered diagram here");

    std::string tasks;
    std::string task_id;
    bool as_json = false;
    auto* verify = app.add_subcommand("verify", "Check a program against a task");
    verify->add_option("tasks", tasks, "Task file (one JSON record per line)")->required();
    verify->add_option("program", program, "GeoDSL program file")->required();
    verify->add_option("--task-id", task_id, "Task to check; defaults to the first record");
    verify->add_flag("--json", as_json, "Print the report as JSON");

    std::string out;
    RenderOptions ropts;
    auto* render = app.add_subcommand("render", "Render a program to SVG");
    render->add_option("program", program, "GeoDSL program file")->required();
    render->add_option("-o,--out", out, "Output file; stdout when omitted");
    render->add_option("--width", ropts.width, "Canvas width in px")->capture_default_str();
    render->add_option("--height", ropts.height, "Canvas height in px")->capture_default_str();
    render->add_option("--margin", ropts.margin_fraction, "Margin as a fraction of the figure")->capture_default_str();
    render->add_flag("!--no-labels", ropts.label_points, "Omit point labels");

    RunConfig config;
    std::string agent;
    std::string tasks_path;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Run an agent over a task set");
    run->add_option("--tasks", tasks_path, "Task file")->required();
    run->add_option("--agent", agent, "replay:<script.json> or remote:<config.json>")->required();
    run->add_option("--budget", config.budget, "Maximum steps per task")->capture_default_str();
    run->add_flag("--vision,!--no-vision", config.vision, "Attach rendered diagrams to feedback");
    run->add_option("--out", out_dir, "Directory for session logs and the report")->required();
    run->add_option("--workers", config.workers, "Sessions run in parallel")->capture_default_str();
    run->add_option("--seed", config.seed, "Seed forwarded to the agent")->capture_default_str();

    std::string run_dir;
    std::string format = "text";
    std::size_t top = 10;
    auto* report = app.add_subcommand("report", "Summarize a run directory");
    report->add_option("run_dir", run_dir, "Directory written by `run`")->required();
    report->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    report->add_option("--top", top, "Rows in the failed-condition table")->capture_default_str();

    auto* validate = app.add_subcommand("validate-tasks", "Check a task file against the schema");
    validate->add_option("tasks", tasks, "Task file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*exec) {
            return cmd_exec(program, svg);
        }
        if (*verify) {
            return cmd_verify(tasks, program, task_id, as_json);
        }
        if (*render) {
            ropts.validate();
            return cmd_render(program, out, ropts);
        }
        if (*run) {
            config.tasks_path = tasks_path;
            config.agent = AgentSpec::parse(agent);
            config.output_dir = out_dir;
            return cmd_run(config);
        }
        if (*report) {
            return cmd_report(run_dir, format, top);
        }
        if (*validate) {
            return cmd_validate(tasks);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const RenderError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
