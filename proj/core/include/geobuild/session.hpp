#pragma once

#include "geobuild/interpreter.hpp"
#include "geobuild/task.hpp"
#include "geobuild/verifier.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geobuild {

class SessionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised by agents when the model endpoint cannot be reached or answers
/// with something that is not a chat reply.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ViolatedCondition {
    std::string type;
    std::vector<std::string> objects;
    double residual = 0.0;
    std::string reason;

    bool operator==(const ViolatedCondition&) const = default;
};

struct Feedback {
    std::vector<std::string> execution_errors;
    std::vector<MissingObject> missing_objects;
    std::vector<ViolatedCondition> violated_conditions;
    std::string image; // file name of the rendered step, vision sessions only

    bool empty() const;
    /// Plain-text block for agent prompts.
    std::string to_text() const;
};

struct StepRecord {
    std::size_t index = 0; // 1-based
    std::string program_source;
    ExecutionTrace trace;
    VerificationReport report;
    std::string image_svg; // empty when nothing could be drawn
    std::vector<Hallucination> hallucinations;
    Feedback feedback;
    bool transport_failure = false;
    std::vector<std::string> notes;
};

enum class SessionStatus { Running, Success, BudgetExhausted, TransportError };

std::string_view to_string(SessionStatus status);
std::optional<SessionStatus> parse_session_status(std::string_view text);

class Session {
public:
    /// Throws SessionError when the budget is 0 or the task has validation issues.
    Session(Task task, std::size_t budget = 5, bool vision = false);

    const Task& task() const { return task_; }
    std::size_t budget() const { return budget_; }
    bool vision() const { return vision_; }
    SessionStatus status() const { return status_; }
    std::span<const StepRecord> steps() const { return steps_; }

    /// Parses, executes, renders and verifies one program. Throws SessionError
    /// once the session is terminal.
    const Feedback& step(std::string_view program_source, std::vector<std::string> notes = {});

    /// Consumes a step for an agent that produced no program at all.
    const Feedback& record_transport_failure(const std::string& detail);

private:
    const Feedback& append(StepRecord record, bool succeeded);

    Task task_;
    std::size_t budget_;
    bool vision_;
    SessionStatus status_ = SessionStatus::Running;
    std::vector<StepRecord> steps_;
};

Session create_session(const Task& task, std::size_t budget = 5, bool vision = false);

struct SessionView {
    const Task& task;
    std::span<const StepRecord> history;
    bool vision = false;
    std::size_t step_index = 1; // index of the step being proposed
};

struct Proposal {
    std::string program;
    std::vector<std::string> notes;
};

class Agent {
public:
    virtual ~Agent() = default;
    /// May throw TransportError.
    virtual Proposal propose(const SessionView& view) = 0;
};

/// Steps the session with agent proposals until it is terminal.
Session& run_session(Session& session, Agent& agent);

struct HallucinationEvent {
    std::size_t step = 0;
    Hallucination category = Hallucination::SyntaxError;
    std::optional<std::size_t> recovered_at;
    std::size_t recovery_steps = 0;

    bool operator==(const HallucinationEvent&) const = default;
};

/// A hallucination at step k is recovered at the first later step without
/// the same category; unrecovered events count budget - k steps.
std::vector<HallucinationEvent> hallucination_events(std::span<const StepRecord> steps, std::size_t budget);

nlohmann::json step_to_json(const StepRecord& step, bool vision);
nlohmann::json session_summary_json(const Session& session);

/// Writes `<dir>/steps.jsonl`, `<dir>/session.json` and one `step_<k>.svg`
/// per drawable step.
void write_session_log(const Session& session, const std::filesystem::path& dir);

std::string image_file_name(std::size_t step_index);

} // namespace geobuild
