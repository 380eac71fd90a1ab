#include "geobuild/runner.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace geobuild {

AgentSpec AgentSpec::parse(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon + 1 == text.size()) {
        throw std::invalid_argument("agent must be replay:<file> or remote:<file>");
    }
    const std::string_view kind = text.substr(0, colon);
    AgentSpec spec;
    spec.path = std::string(text.substr(colon + 1));
    if (kind == "replay") {
        spec.kind = Kind::Replay;
    } else if (kind == "remote") {
        spec.kind = Kind::Remote;
    } else {
        throw std::invalid_argument("unknown agent kind " + std::string(kind));
    }
    return spec;
}

void RunConfig::validate() const
{
    if (budget < 1) {
        throw std::invalid_argument("budget must be at least 1");
    }
    if (workers < 1) {
        throw std::invalid_argument("workers must be at least 1");
    }
}

AgentFactory make_agent_factory(const AgentSpec& spec, std::uint64_t seed)
{
    if (spec.kind == AgentSpec::Kind::Replay) {
        auto script = std::make_shared<const ReplayScript>(ReplayScript::load(spec.path));
        return [script](const Task& t) { return std::make_unique<ReplayAgent>(script->programs(t.id)); };
    }
    const RemoteAgentConfig config = RemoteAgentConfig::load(spec.path);
    return [config, seed](const Task&) { return std::make_unique<RemoteAgent>(config, seed); };
}

std::string session_dir_name(const std::string& task_id)
{
    std::string out;
    for (char c : task_id) {
        const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                          c == '-' || c == '.';
        out.push_back(safe ? c : '_');
    }
    if (out.empty() || out == "." || out == "..") {
        out = "_" + out;
    }
    return out;
}

RunResult run_tasks(std::span<const Task> tasks, const AgentFactory& factory, std::size_t budget, bool vision,
                    std::size_t workers, const std::optional<std::filesystem::path>& output_dir)
{
    std::vector<SessionOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    const auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                Session session(tasks[i], budget, vision);
                const auto agent = factory(tasks[i]);
                run_session(session, *agent);
                if (output_dir) {
                    write_session_log(session, *output_dir / session_dir_name(tasks[i].id));
                }
                outcomes[i] = outcome_of(session);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };

    const std::size_t n = std::max<std::size_t>(1, std::min(workers, tasks.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    RunResult result;
    result.outcomes = std::move(outcomes);
    result.summary = aggregate(result.outcomes);
    return result;
}

RunResult run_benchmark(const RunConfig& config)
{
    config.validate();
    const TaskSet set = load_tasks(config.tasks_path);
    const AgentFactory factory = make_agent_factory(config.agent, config.seed);
    std::optional<std::filesystem::path> out;
    if (!config.output_dir.empty()) {
        out = config.output_dir;
        std::filesystem::create_directories(*out);
    }
    RunResult result = run_tasks(set.tasks, factory, config.budget, config.vision, config.workers, out);
    result.skipped_tasks = set.issues;
    if (out) {
        std::ofstream(*out / "summary.json", std::ios::binary | std::ios::trunc)
            << render_report(result.summary, ReportFormat::Json);
        std::ofstream(*out / "report.txt", std::ios::binary | std::ios::trunc)
            << render_report(result.summary, ReportFormat::Text);
    }
    return result;
}

} // namespace geobuild
