#pragma once

#include "geobuild/session.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace geobuild {

/// Replays a fixed program list; steps past the end get an empty program.
class ReplayAgent : public Agent {
public:
    explicit ReplayAgent(std::vector<std::string> programs) : programs_(std::move(programs)) {}
    Proposal propose(const SessionView& view) override;

private:
    std::vector<std::string> programs_;
};

/// task id -> programs, read from a JSON object `{"task": ["prog1", ...]}`.
class ReplayScript {
public:
    static ReplayScript load(const std::filesystem::path& path);
    static ReplayScript from_json(const nlohmann::json& j);

    /// Empty for unknown tasks.
    std::vector<std::string> programs(const std::string& task_id) const;

private:
    std::map<std::string, std::vector<std::string>> programs_;
};

struct RemoteAgentConfig {
    std::string endpoint; // e.g. https://host/v1/chat/completions
    std::string model;
    std::string token_env; // environment variable holding the bearer token; empty for none
    int timeout_seconds = 120;
    std::string system_prompt; // empty selects default_system_prompt()
    double temperature = 0.0;

    static RemoteAgentConfig load(const std::filesystem::path& path);
    static RemoteAgentConfig from_json(const nlohmann::json& j);
};

/// Chat-completion client. The request carries the system prompt, the
/// problem, and the full step history as alternating assistant/user turns;
/// in vision sessions the last failed step's diagram is attached inline.
class RemoteAgent : public Agent {
public:
    RemoteAgent(RemoteAgentConfig config, std::uint64_t seed);
    Proposal propose(const SessionView& view) override;

private:
    RemoteAgentConfig config_;
    std::uint64_t seed_;
};

nlohmann::json build_chat_request(const RemoteAgentConfig& config, const SessionView& view, std::uint64_t seed);

struct CodeBlock {
    std::string code;
    std::size_t blocks = 0; // fenced blocks found in the reply
};

/// First fenced block of `reply`; an unterminated fence runs to the end.
CodeBlock extract_code_block(std::string_view reply);

std::string base64_encode(std::string_view data);

std::string_view default_system_prompt();

} // namespace geobuild
