#include "geobuild/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

namespace geobuild {

using nlohmann::json;

namespace {

constexpr Hallucination kHallucinations[] = {Hallucination::UndefinedReference, Hallucination::SyntaxError,
                                             Hallucination::OutputMismatch};

std::optional<ObjectType> parse_object_type(std::string_view text)
{
    for (ObjectType t : all_object_types()) {
        if (to_string(t) == text) {
            return t;
        }
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, std::size_t>> ranked(const std::map<std::string, std::size_t>& counts)
{
    std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

std::string percent(const LevelCount& c)
{
    return fmt::format("{}/{} ({:.1f}%)", c.successes, c.total,
                       c.total ? 100.0 * static_cast<double>(c.successes) / static_cast<double>(c.total) : 0.0);
}

} // namespace

SessionOutcome outcome_of(const Session& session)
{
    SessionOutcome o;
    o.task_id = session.task().id;
    o.category = session.task().category;
    o.difficulty = session.task().difficulty;
    o.status = session.status();
    o.steps = session.status() == SessionStatus::TransportError ? 0 : session.steps().size();
    o.hallucinations = hallucination_events(session.steps(), session.budget());
    if (!session.steps().empty()) {
        const StepRecord& last = session.steps().back();
        for (const MissingObject& m : last.report.missing_objects) {
            o.final_missing.push_back(m.type);
        }
        for (const ViolatedCondition& v : last.feedback.violated_conditions) {
            o.final_failed_conditions.push_back(v.type);
        }
    }
    return o;
}

SessionOutcome outcome_from_json(const json& j)
{
    try {
        SessionOutcome o;
        o.task_id = j.at("task_id").get<std::string>();
        o.category = j.at("category").get<std::string>();
        o.difficulty = j.at("difficulty").get<int>();
        const auto status = parse_session_status(j.at("status").get<std::string>());
        if (!status || *status == SessionStatus::Running) {
            throw LogError("session " + o.task_id + " has no terminal status");
        }
        o.status = *status;
        o.steps = o.status == SessionStatus::TransportError ? 0 : j.at("steps").get<std::size_t>();
        for (const json& e : j.at("hallucination_events")) {
            const auto h = parse_hallucination(e.at("category").get<std::string>());
            if (!h) {
                throw LogError("unknown hallucination category in session " + o.task_id);
            }
            HallucinationEvent ev;
            ev.step = e.at("step").get<std::size_t>();
            ev.category = *h;
            if (!e.at("recovered_at").is_null()) {
                ev.recovered_at = e.at("recovered_at").get<std::size_t>();
            }
            ev.recovery_steps = e.at("recovery_steps").get<std::size_t>();
            o.hallucinations.push_back(ev);
        }
        for (const json& m : j.at("final_missing_objects")) {
            const auto t = parse_object_type(m.at("type").get<std::string>());
            if (!t) {
                throw LogError("unknown object type in session " + o.task_id);
            }
            o.final_missing.push_back(*t);
        }
        o.final_failed_conditions = j.at("final_failed_conditions").get<std::vector<std::string>>();
        return o;
    } catch (const json::exception& e) {
        throw LogError(std::string("malformed session log: ") + e.what());
    }
}

RunSummary aggregate(std::span<const SessionOutcome> sessions)
{
    RunSummary s;
    for (ObjectType t : all_object_types()) {
        s.missing_objects_by_type[t] = 0;
    }
    for (Hallucination h : kHallucinations) {
        s.hallucinations_by_type[h] = 0;
    }
    std::size_t step_total = 0;
    std::size_t recovery_total = 0;
    for (const SessionOutcome& o : sessions) {
        ++s.problems;
        LevelCount& level = s.by_difficulty[o.difficulty];
        ++level.total;
        if (o.status == SessionStatus::TransportError) {
            ++s.transport_failures;
        }
        if (o.status == SessionStatus::Success) {
            ++s.successes;
            ++level.successes;
            step_total += o.steps;
            if (!s.steps) {
                s.steps = StepStats{o.steps, 0.0, o.steps};
            }
            s.steps->min = std::min(s.steps->min, o.steps);
            s.steps->max = std::max(s.steps->max, o.steps);
        }
        for (const HallucinationEvent& e : o.hallucinations) {
            ++s.hallucinations;
            ++s.hallucinations_by_type[e.category];
            recovery_total += e.recovery_steps;
        }
        for (ObjectType t : o.final_missing) {
            ++s.missing_objects_by_type[t];
        }
        for (const std::string& c : o.final_failed_conditions) {
            ++s.failed_conditions_by_type[c];
        }
    }
    if (s.problems) {
        s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.problems);
        s.hallucinations_per_problem = static_cast<double>(s.hallucinations) / static_cast<double>(s.problems);
    }
    if (s.steps) {
        s.steps->avg = static_cast<double>(step_total) / static_cast<double>(s.successes);
    }
    if (s.hallucinations) {
        s.avg_recovery_steps = static_cast<double>(recovery_total) / static_cast<double>(s.hallucinations);
    }
    return s;
}

json summary_to_json(const RunSummary& s)
{
    json hall = json::object();
    for (const auto& [h, n] : s.hallucinations_by_type) {
        hall[std::string(to_string(h))] = n;
    }
    json missing = json::object();
    std::size_t missing_total = 0;
    for (const auto& [t, n] : s.missing_objects_by_type) {
        missing[std::string(to_string(t))] = n;
        missing_total += n;
    }
    json failed = json::object();
    std::size_t failed_total = 0;
    for (const auto& [t, n] : s.failed_conditions_by_type) {
        failed[t] = n;
        failed_total += n;
    }
    json levels = json::object();
    for (const auto& [lvl, c] : s.by_difficulty) {
        levels[std::to_string(lvl)] = {{"successes", c.successes}, {"total", c.total}};
    }
    json steps = nullptr;
    if (s.steps) {
        steps = {{"min", s.steps->min}, {"avg", s.steps->avg}, {"max", s.steps->max}};
    }
    return json{{"problems", s.problems},
                {"successes", s.successes},
                {"transport_failures", s.transport_failures},
                {"success_rate", s.success_rate},
                {"steps", steps},
                {"hallucinations", s.hallucinations},
                {"hallucinations_per_problem", s.hallucinations_per_problem},
                {"hallucinations_by_type", hall},
                {"avg_recovery_steps", s.avg_recovery_steps},
                {"missing_objects", missing_total},
                {"missing_objects_by_type", missing},
                {"failed_conditions", failed_total},
                {"failed_conditions_by_type", failed},
                {"by_difficulty", levels}};
}

std::string render_report(const RunSummary& s, ReportFormat format, std::size_t top_n)
{
    if (format == ReportFormat::Json) {
        return summary_to_json(s).dump(2) + "\n";
    }
    std::size_t missing_total = 0;
    for (const auto& [t, n] : s.missing_objects_by_type) {
        missing_total += n;
    }
    std::size_t failed_total = 0;
    for (const auto& [t, n] : s.failed_conditions_by_type) {
        failed_total += n;
    }
    std::string out = "Overall\n";
    out += fmt::format("  {:<26}{}\n", "Problems", s.problems);
    out += fmt::format("  {:<26}{:.3f} ({}/{})\n", "Success rate", s.success_rate, s.successes, s.problems);
    if (s.steps) {
        out += fmt::format("  {:<26}{} / {:.3f} / {}\n", "Steps (min / avg / max)", s.steps->min, s.steps->avg,
                           s.steps->max);
    } else {
        out += fmt::format("  {:<26}n/a\n", "Steps (min / avg / max)");
    }
    out += fmt::format("  {:<26}{:.3f}\n", "Hallucinations / problem", s.hallucinations_per_problem);
    out += fmt::format("  {:<26}{:.3f}\n", "Avg recovery steps", s.avg_recovery_steps);
    out += fmt::format("  {:<26}{}\n", "Missing objects", missing_total);
    out += fmt::format("  {:<26}{}\n", "Failed conditions", failed_total);
    if (s.transport_failures) {
        out += fmt::format("  {:<26}{}\n", "Transport failures", s.transport_failures);
    }

    out += "\nHallucination types\n";
    for (const auto& [h, n] : s.hallucinations_by_type) {
        out += fmt::format("  {:<26}{}\n", to_string(h), n);
    }

    out += "\nMissing objects by type\n";
    for (const auto& [t, n] : s.missing_objects_by_type) {
        out += fmt::format("  {:<26}{}\n", to_string(t), n);
    }

    out += "\nTop failed conditions\n";
    if (s.failed_conditions_by_type.empty()) {
        out += "  (no failed conditions)\n";
    } else {
        const auto rows = ranked(s.failed_conditions_by_type);
        for (std::size_t i = 0; i < rows.size() && i < top_n; ++i) {
            out += fmt::format("  {:<26}{}\n", rows[i].first, rows[i].second);
        }
    }

    if (!s.by_difficulty.empty()) {
        out += "\nSuccess by difficulty\n";
        for (const auto& [lvl, c] : s.by_difficulty) {
            out += fmt::format("  Level {:<20}{}\n", lvl, percent(c));
        }
    }
    return out;
}

std::vector<SessionOutcome> load_run(const std::filesystem::path& run_dir)
{
    if (!std::filesystem::is_directory(run_dir)) {
        throw LogError("not a run directory: " + run_dir.string());
    }
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "session.json")) {
            dirs.push_back(entry.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<SessionOutcome> out;
    for (const auto& d : dirs) {
        std::ifstream in(d / "session.json");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw LogError(fmt::format("{}: {}", (d / "session.json").string(), e.what()));
        }
        out.push_back(outcome_from_json(j));
    }
    return out;
}

} // namespace geobuild
