#include "geobuild/session.hpp"

#include "geobuild/render.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace geobuild {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string describe(const ExecutionFailure& f)
{
    return fmt::format("line {}: {}: {}", f.step_line, to_string(f.category), f.detail);
}

std::vector<std::string> ref_names(const Condition& c)
{
    std::vector<std::string> out;
    for (const ObjectRef& r : c.objects) {
        out.push_back(r.display());
    }
    return out;
}

json failure_json(const std::optional<ExecutionFailure>& f)
{
    if (!f) {
        return nullptr;
    }
    return json{{"line", f->step_line}, {"category", to_string(f->category)}, {"detail", f->detail}};
}

json report_json(const VerificationReport& r, std::span<const Condition> conditions)
{
    json missing = json::array();
    for (const MissingObject& m : r.missing_objects) {
        missing.push_back({{"type", to_string(m.type)}, {"name", m.name}});
    }
    json results = json::array();
    for (std::size_t i = 0; i < r.condition_results.size(); ++i) {
        const ConditionResult& c = r.condition_results[i];
        json entry{{"satisfied", c.satisfied}, {"residual", finite_or_null(c.residual)}, {"reason", c.reason}};
        if (i < conditions.size()) {
            entry["type"] = to_string(conditions[i].type);
            entry["objects"] = ref_names(conditions[i]);
        }
        results.push_back(std::move(entry));
    }
    return json{{"executable", r.executable},
                {"success", r.success},
                {"missing_objects", std::move(missing)},
                {"conditions", std::move(results)},
                {"scale", {{"applicable", r.scale.applicable}, {"value", r.scale.scale}}}};
}

} // namespace

bool Feedback::empty() const
{
    return execution_errors.empty() && missing_objects.empty() && violated_conditions.empty() && image.empty();
}

std::string Feedback::to_text() const
{
    if (empty()) {
        return "All checks passed.\n";
    }
    std::string out;
    if (!execution_errors.empty()) {
        out += "Execution errors:\n";
        for (const auto& e : execution_errors) {
            out += "  - " + e + "\n";
        }
    }
    if (!missing_objects.empty()) {
        out += "Missing required objects:\n";
        for (const auto& m : missing_objects) {
            out += fmt::format("  - {} {}\n", to_string(m.type), m.name);
        }
    }
    if (!violated_conditions.empty()) {
        out += "Violated conditions:\n";
        for (const auto& v : violated_conditions) {
            out += fmt::format("  - {}({}) residual={} {}\n", v.type, fmt::join(v.objects, ", "),
                               std::isfinite(v.residual) ? fmt::format("{:.4g}", v.residual) : std::string("n/a"),
                               v.reason);
        }
    }
    if (!image.empty()) {
        out += "Rendered diagram: " + image + "\n";
    }
    return out;
}

std::string_view to_string(SessionStatus status)
{
    switch (status) {
    case SessionStatus::Running: return "running";
    case SessionStatus::Success: return "success";
    case SessionStatus::BudgetExhausted: return "budget_exhausted";
    case SessionStatus::TransportError: return "transport_error";
    }
    return "running";
}

std::optional<SessionStatus> parse_session_status(std::string_view text)
{
    for (auto s : {SessionStatus::Running, SessionStatus::Success, SessionStatus::BudgetExhausted,
                   SessionStatus::TransportError}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    return std::nullopt;
}

std::string image_file_name(std::size_t step_index) { return fmt::format("step_{}.svg", step_index); }

Session::Session(Task task, std::size_t budget, bool vision) : task_(std::move(task)), budget_(budget), vision_(vision)
{
    if (budget_ < 1) {
        throw SessionError("budget must be at least 1");
    }
    if (const auto issues = validate_task(task_); !issues.empty()) {
        throw SessionError(fmt::format("invalid task {}: {}: {}", task_.id, issues.front().field,
                                       issues.front().reason));
    }
}

const Feedback& Session::step(std::string_view program_source, std::vector<std::string> notes)
{
    if (status_ != SessionStatus::Running) {
        throw SessionError(fmt::format("session is {}", to_string(status_)));
    }
    StepRecord rec;
    rec.index = steps_.size() + 1;
    rec.program_source = std::string(program_source);
    rec.notes = std::move(notes);

    const dsl::ParseResult parsed = dsl::parse_program(program_source);
    if (!parsed.ok()) {
        rec.trace.failure = to_failure(*parsed.error);
    } else if (parsed.commands.empty()) {
        rec.trace.failure = ExecutionFailure{0, FailureCategory::SyntaxError, "empty program"};
    } else {
        rec.trace = execute_program(parsed.commands);
    }
    try {
        rec.image_svg = render_svg(rec.trace.final_state);
    } catch (const RenderError&) {
        rec.image_svg.clear();
    }
    rec.report = verify_task(rec.trace, task_);
    if (rec.trace.failure) {
        if (auto h = classify_failure(*rec.trace.failure)) {
            rec.hallucinations.push_back(*h);
        }
        rec.feedback.execution_errors.push_back(describe(*rec.trace.failure));
    }
    rec.feedback.missing_objects = rec.report.missing_objects;
    for (std::size_t i = 0; i < rec.report.condition_results.size(); ++i) {
        const ConditionResult& r = rec.report.condition_results[i];
        if (!r.satisfied) {
            const Condition& c = task_.conditions[i];
            rec.feedback.violated_conditions.push_back(
                {std::string(to_string(c.type)), ref_names(c), r.residual, r.reason});
        }
    }
    const bool succeeded = rec.report.success;
    if (vision_ && !succeeded && !rec.image_svg.empty()) {
        rec.feedback.image = image_file_name(rec.index);
    }
    return append(std::move(rec), succeeded);
}

const Feedback& Session::record_transport_failure(const std::string& detail)
{
    if (status_ != SessionStatus::Running) {
        throw SessionError(fmt::format("session is {}", to_string(status_)));
    }
    StepRecord rec;
    rec.index = steps_.size() + 1;
    rec.transport_failure = true;
    rec.trace.failure = ExecutionFailure{0, FailureCategory::SyntaxError, "no program: " + detail};
    rec.feedback.execution_errors.push_back("agent transport failure: " + detail);
    return append(std::move(rec), false);
}

const Feedback& Session::append(StepRecord record, bool succeeded)
{
    steps_.push_back(std::move(record));
    if (succeeded) {
        status_ = SessionStatus::Success;
    } else if (steps_.size() >= budget_) {
        const bool all_transport =
            std::all_of(steps_.begin(), steps_.end(), [](const StepRecord& s) { return s.transport_failure; });
        status_ = all_transport ? SessionStatus::TransportError : SessionStatus::BudgetExhausted;
    }
    return steps_.back().feedback;
}

Session create_session(const Task& task, std::size_t budget, bool vision) { return Session(task, budget, vision); }

Session& run_session(Session& session, Agent& agent)
{
    while (session.status() == SessionStatus::Running) {
        const SessionView view{session.task(), session.steps(), session.vision(), session.steps().size() + 1};
        Proposal proposal;
        try {
            proposal = agent.propose(view);
        } catch (const TransportError& e) {
            session.record_transport_failure(e.what());
            continue;
        }
        session.step(proposal.program, std::move(proposal.notes));
    }
    return session;
}

std::vector<HallucinationEvent> hallucination_events(std::span<const StepRecord> steps, std::size_t budget)
{
    std::vector<HallucinationEvent> events;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        for (Hallucination h : steps[k].hallucinations) {
            HallucinationEvent e{steps[k].index, h, std::nullopt, 0};
            for (std::size_t j = k + 1; j < steps.size(); ++j) {
                const auto& later = steps[j].hallucinations;
                if (std::find(later.begin(), later.end(), h) == later.end()) {
                    e.recovered_at = steps[j].index;
                    break;
                }
            }
            e.recovery_steps = e.recovered_at ? *e.recovered_at - e.step : (budget > e.step ? budget - e.step : 0);
            events.push_back(e);
        }
    }
    return events;
}

json step_to_json(const StepRecord& step, bool vision)
{
    json objects = json::array();
    for (const Binding& b : step.trace.final_state.bindings()) {
        objects.push_back({{"name", b.name}, {"kind", to_string(b.object.kind())}});
    }
    json hall = json::array();
    for (Hallucination h : step.hallucinations) {
        hall.push_back(to_string(h));
    }
    json violated = json::array();
    for (const ViolatedCondition& v : step.feedback.violated_conditions) {
        violated.push_back({{"type", v.type},
                            {"objects", v.objects},
                            {"residual", finite_or_null(v.residual)},
                            {"reason", v.reason}});
    }
    json missing = json::array();
    for (const MissingObject& m : step.feedback.missing_objects) {
        missing.push_back({{"type", to_string(m.type)}, {"name", m.name}});
    }
    return json{{"step", step.index},
                {"program", step.program_source},
                {"transport_failure", step.transport_failure},
                {"executed_steps", step.trace.executed_steps},
                {"program_length", step.trace.program_length},
                {"failure", failure_json(step.trace.failure)},
                {"objects", std::move(objects)},
                {"success", step.report.success},
                {"hallucinations", std::move(hall)},
                {"feedback",
                 {{"execution_errors", step.feedback.execution_errors},
                  {"missing_objects", std::move(missing)},
                  {"violated_conditions", std::move(violated)},
                  {"image", step.feedback.image}}},
                {"image", step.image_svg.empty() ? json(nullptr) : json(image_file_name(step.index))},
                {"vision", vision},
                {"notes", step.notes}};
}

json session_summary_json(const Session& session)
{
    const auto steps = session.steps();
    json events = json::array();
    for (const HallucinationEvent& e : hallucination_events(steps, session.budget())) {
        events.push_back({{"step", e.step},
                          {"category", to_string(e.category)},
                          {"recovered_at", e.recovered_at ? json(*e.recovered_at) : json(nullptr)},
                          {"recovery_steps", e.recovery_steps}});
    }
    json final_missing = json::array();
    json final_failed = json::array();
    if (!steps.empty()) {
        const StepRecord& last = steps.back();
        for (const MissingObject& m : last.report.missing_objects) {
            final_missing.push_back({{"type", to_string(m.type)}, {"name", m.name}});
        }
        for (const ViolatedCondition& v : last.feedback.violated_conditions) {
            final_failed.push_back(v.type);
        }
    }
    return json{{"task_id", session.task().id},
                {"category", session.task().category},
                {"difficulty", session.task().difficulty},
                {"budget", session.budget()},
                {"vision", session.vision()},
                {"status", to_string(session.status())},
                {"steps", steps.size()},
                {"hallucination_events", std::move(events)},
                {"final_missing_objects", std::move(final_missing)},
                {"final_failed_conditions", std::move(final_failed)},
                {"final_report", steps.empty() ? json(nullptr) : report_json(steps.back().report, session.task().conditions)}};
}

void write_session_log(const Session& session, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "steps.jsonl", std::ios::binary | std::ios::trunc);
        for (const StepRecord& s : session.steps()) {
            out << step_to_json(s, session.vision()).dump() << '\n';
        }
    }
    for (const StepRecord& s : session.steps()) {
        if (!s.image_svg.empty()) {
            std::ofstream out(dir / image_file_name(s.index), std::ios::binary | std::ios::trunc);
            out << s.image_svg;
        }
    }
    std::ofstream out(dir / "session.json", std::ios::binary | std::ios::trunc);
    out << session_summary_json(session).dump(2) << '\n';
}

} // namespace geobuild
