#pragma once

#include "geobuild/agents.hpp"
#include "geobuild/metrics.hpp"
#include "geobuild/task.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geobuild {

struct AgentSpec {
    enum class Kind { Replay, Remote };
    Kind kind = Kind::Replay;
    std::filesystem::path path; // replay script or remote config

    /// "replay:<script.json>" or "remote:<config.json>". Throws std::invalid_argument.
    static AgentSpec parse(std::string_view text);
};

struct RunConfig {
    std::filesystem::path tasks_path;
    AgentSpec agent;
    std::size_t budget = 5;
    bool vision = false;
    std::filesystem::path output_dir;
    std::size_t workers = 1;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when budget or workers is 0.
    void validate() const;
};

/// Builds a fresh agent for one task; called from worker threads.
using AgentFactory = std::function<std::unique_ptr<Agent>(const Task&)>;

AgentFactory make_agent_factory(const AgentSpec& spec, std::uint64_t seed);

struct RunResult {
    std::vector<SessionOutcome> outcomes; // in task order
    RunSummary summary;
    std::vector<LoadIssue> skipped_tasks;
};

/// Runs one session per task on up to `workers` threads. When `output_dir`
/// is set, each session is logged under `<output_dir>/<task id>/`.
RunResult run_tasks(std::span<const Task> tasks, const AgentFactory& factory, std::size_t budget, bool vision,
                    std::size_t workers, const std::optional<std::filesystem::path>& output_dir);

/// Loads tasks, runs them and writes `summary.json` and `report.txt` next to
/// the session directories.
RunResult run_benchmark(const RunConfig& config);

/// Directory name used for a task's logs.
std::string session_dir_name(const std::string& task_id);

} // namespace geobuild
