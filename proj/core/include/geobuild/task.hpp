#pragma once

#include "geobuild/conditions.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geobuild {

struct Task {
    std::string id;
    std::string problem_text;
    RequiredObjects required;
    std::vector<Condition> conditions;
    std::string category;
    int difficulty = 1;
    std::vector<std::string> auxiliary; // extra names conditions may refer to

    bool operator==(const Task&) const = default;
};

/// Schema violation in a task record. `line` is 0 when not loaded from a file.
class TaskError : public std::runtime_error {
public:
    TaskError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct TaskIssue {
    std::string field;
    std::string reason;

    bool operator==(const TaskIssue&) const = default;
};

/// Empty iff the task is well formed: difficulty in 1..4, polygons with at
/// least 3 vertices, condition arities and targets present, and every
/// referenced name known from the required objects or the auxiliary list.
std::vector<TaskIssue> validate_task(const Task& task);

void to_json(nlohmann::json& j, const Condition& c);
void from_json(const nlohmann::json& j, Condition& c);
void to_json(nlohmann::json& j, const Task& t);
/// Throws TaskError on missing fields, wrong types or unknown condition types.
void from_json(const nlohmann::json& j, Task& t);

struct LoadIssue {
    std::size_t line = 0;
    std::string message;
};

struct TaskSet {
    std::vector<Task> tasks;
    std::vector<LoadIssue> issues; // skipped records, lenient mode only
};

/// Reads one JSON record per line; blank lines are skipped. Invalid records
/// are reported and skipped, or rethrown as TaskError when `strict`.
TaskSet parse_tasks(std::istream& in, bool strict = false);
TaskSet load_tasks(const std::filesystem::path& path, bool strict = false);

std::string serialize_tasks(std::span<const Task> tasks);

std::map<std::string, std::size_t> category_histogram(std::span<const Task> tasks);
std::map<int, std::size_t> difficulty_histogram(std::span<const Task> tasks);

} // namespace geobuild
