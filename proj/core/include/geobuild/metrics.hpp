#pragma once

#include "geobuild/conditions.hpp"
#include "geobuild/interpreter.hpp"
#include "geobuild/session.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geobuild {

class LogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// What the aggregator needs from one finished session.
struct SessionOutcome {
    std::string task_id;
    std::string category;
    int difficulty = 1;
    SessionStatus status = SessionStatus::BudgetExhausted;
    std::size_t steps = 0;
    std::vector<HallucinationEvent> hallucinations;
    std::vector<ObjectType> final_missing;
    std::vector<std::string> final_failed_conditions;

    bool operator==(const SessionOutcome&) const = default;
};

SessionOutcome outcome_of(const Session& session);
SessionOutcome outcome_from_json(const nlohmann::json& summary);

struct StepStats {
    std::size_t min = 0;
    double avg = 0.0;
    std::size_t max = 0;

    bool operator==(const StepStats&) const = default;
};

struct LevelCount {
    std::size_t successes = 0;
    std::size_t total = 0;

    bool operator==(const LevelCount&) const = default;
};

struct RunSummary {
    std::size_t problems = 0;
    std::size_t successes = 0;
    std::size_t transport_failures = 0;
    double success_rate = 0.0;
    std::optional<StepStats> steps; // over successful sessions
    std::size_t hallucinations = 0;
    double hallucinations_per_problem = 0.0; // averaged over all problems
    std::map<Hallucination, std::size_t> hallucinations_by_type;
    double avg_recovery_steps = 0.0;
    std::map<ObjectType, std::size_t> missing_objects_by_type; // all five types present
    std::map<std::string, std::size_t> failed_conditions_by_type;
    std::map<int, LevelCount> by_difficulty;

    bool operator==(const RunSummary&) const = default;
};

/// Missing objects and failed conditions are counted at each session's final step.
RunSummary aggregate(std::span<const SessionOutcome> sessions);

enum class ReportFormat { Text, Json };

nlohmann::json summary_to_json(const RunSummary& summary);
std::string render_report(const RunSummary& summary, ReportFormat format, std::size_t top_n = 10);

/// Reads every `<run_dir>/*/session.json`, ordered by directory name.
std::vector<SessionOutcome> load_run(const std::filesystem::path& run_dir);

} // namespace geobuild
