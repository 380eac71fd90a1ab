#include "geobuild/agents.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <regex>

namespace geobuild {

using nlohmann::json;

namespace {

constexpr std::string_view kSystemPrompt = R"(You write GeoDSL programs that construct plane geometry figures.

A program is a list of lines of the form
    command : inputs -> outputs
Inputs are names of existing objects or numeric expressions. Outputs are new
names (letters, digits, underscore). A name can be bound only once. Lines
starting with # are comments. Expressions contain no spaces; they may use
+ - * / parentheses and sin, cos, tan. Angles take a unit: 30° or 30deg for
degrees, 0.5rad for radians. A bare number in an angle slot is in degrees.

Commands:
    point : x y -> P                  point at coordinates
    point : -> P                      free point
    point : obj -> P                  point on a line, segment, ray or circle
    line : A B -> l                   line through two points
    segment : A B -> s
    ray : A B -> r                    ray from A through B
    circle : O A -> c                 center O through A
    circle : O r -> c                 center O, radius r
    angle : A B C -> a                angle at B from BA to BC
    const : value -> k                numeric constant
    intersect : o1 o2 -> X [Y]        intersection points, sorted by x then y
    parallel_line : P l -> m
    orthogonal_line : P l -> m
    midpoint : A B -> M               also midpoint : s -> M
    rotate : P angle O -> Q           counterclockwise about O
    line_bisector : A B -> m          perpendicular bisector
    angular_bisector : A B C -> m     bisector of the angle at B
    incenter : A B C -> I
    circumcenter : A B C -> O
    incircle : A B C -> c
    circumcircle : A B C -> c
    distance : A B -> d
    sum / minus / product / ratio : x y -> z

Construct every relation explicitly: the checker measures the finished figure
and does not accept declarations of parallelism, tangency or angle sizes.
Auxiliary objects are allowed. Use the point labels from the problem.
Answer with one fenced code block containing the whole program.)";

struct Url {
    std::string origin; // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url)
{
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) {
        throw TransportError("bad endpoint URL: " + url);
    }
    return Url{m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

std::string fenced(const std::string& program) { return "```\n" + program + (program.ends_with('\n') ? "" : "\n") + "```"; }

} // namespace

Proposal ReplayAgent::propose(const SessionView& view)
{
    const std::size_t i = view.step_index - 1;
    return Proposal{i < programs_.size() ? programs_[i] : std::string(), {}};
}

ReplayScript ReplayScript::from_json(const json& j)
{
    if (!j.is_object()) {
        throw std::invalid_argument("replay script must map task ids to program lists");
    }
    ReplayScript s;
    for (const auto& [id, list] : j.items()) {
        if (!list.is_array()) {
            throw std::invalid_argument("replay entry " + id + " is not a list");
        }
        s.programs_[id] = list.get<std::vector<std::string>>();
    }
    return s;
}

ReplayScript ReplayScript::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open " + path.string());
    }
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::vector<std::string> ReplayScript::programs(const std::string& task_id) const
{
    const auto it = programs_.find(task_id);
    return it == programs_.end() ? std::vector<std::string>{} : it->second;
}

RemoteAgentConfig RemoteAgentConfig::from_json(const json& j)
{
    RemoteAgentConfig c;
    try {
        c.endpoint = j.at("endpoint").get<std::string>();
        c.model = j.at("model").get<std::string>();
        c.token_env = j.value("token_env", std::string());
        c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
        c.system_prompt = j.value("system_prompt", std::string());
        c.temperature = j.value("temperature", c.temperature);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("remote agent config: ") + e.what());
    }
    split_url(c.endpoint);
    return c;
}

RemoteAgentConfig RemoteAgentConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open " + path.string());
    }
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
    }
}

json build_chat_request(const RemoteAgentConfig& config, const SessionView& view, std::uint64_t seed)
{
    json messages = json::array();
    messages.push_back({{"role", "system"},
                        {"content", config.system_prompt.empty() ? std::string(default_system_prompt())
                                                                 : config.system_prompt}});
    messages.push_back({{"role", "user"},
                        {"content", "Problem:\n" + view.task.problem_text +
                                        "\n\nWrite a GeoDSL program that constructs this figure."}});
    for (std::size_t i = 0; i < view.history.size(); ++i) {
        const StepRecord& step = view.history[i];
        messages.push_back({{"role", "assistant"}, {"content", fenced(step.program_source)}});
        const std::string text = "Feedback for step " + std::to_string(step.index) + ":\n" + step.feedback.to_text();
        const bool last = i + 1 == view.history.size();
        if (view.vision && last && !step.feedback.image.empty() && !step.image_svg.empty()) {
            messages.push_back(
                {{"role", "user"},
                 {"content",
                  json::array({{{"type", "text"}, {"text", text}},
                               {{"type", "image_url"},
                                {"image_url", {{"url", "data:image/svg+xml;base64," + base64_encode(step.image_svg)}}}}})}});
        } else {
            messages.push_back({{"role", "user"}, {"content", text}});
        }
    }
    return json{{"model", config.model},
                {"messages", std::move(messages)},
                {"temperature", config.temperature},
                {"seed", seed}};
}

RemoteAgent::RemoteAgent(RemoteAgentConfig config, std::uint64_t seed) : config_(std::move(config)), seed_(seed) {}

Proposal RemoteAgent::propose(const SessionView& view)
{
    const Url url = split_url(config_.endpoint);
    httplib::Client client(url.origin);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);

    httplib::Headers headers;
    if (!config_.token_env.empty()) {
        const char* token = std::getenv(config_.token_env.c_str());
        if (!token || !*token) {
            throw TransportError("environment variable " + config_.token_env + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    const std::string body = build_chat_request(config_, view, seed_).dump();
    const auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
        throw TransportError("request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw TransportError(fmt::format("endpoint answered HTTP {}", res->status));
    }

    Proposal p;
    std::string content;
    try {
        content = json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        p.notes.push_back("malformed reply");
        return p;
    }
    const CodeBlock block = extract_code_block(content);
    p.program = block.code;
    if (block.blocks == 0) {
        p.notes.push_back("reply has no fenced code block");
    } else if (block.blocks > 1) {
        p.notes.push_back(fmt::format("reply has {} fenced code blocks; used the first", block.blocks));
    }
    return p;
}

CodeBlock extract_code_block(std::string_view reply)
{
    CodeBlock out;
    bool inside = false;
    std::size_t pos = 0;
    std::string current;
    while (pos <= reply.size()) {
        const std::size_t end = std::min(reply.find('\n', pos), reply.size());
        std::string_view line = reply.substr(pos, end - pos);
        if (end == reply.size() && line.empty()) {
            break;
        }
        if (line.ends_with('\r')) {
            line.remove_suffix(1);
        }
        const std::size_t indent = line.find_first_not_of(" \t");
        const bool fence = indent != std::string_view::npos && line.substr(indent).starts_with("```");
        if (fence) {
            if (inside) {
                if (out.blocks == 1) {
                    out.code = current;
                }
                inside = false;
            } else {
                inside = true;
                ++out.blocks;
                current.clear();
            }
        } else if (inside) {
            current.append(line);
            current.push_back('\n');
        }
        if (end == reply.size()) {
            break;
        }
        pos = end + 1;
    }
    if (inside && out.blocks == 1) {
        out.code = current;
    }
    return out;
}

std::string base64_encode(std::string_view data)
{
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(data.data()), static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string_view default_system_prompt() { return kSystemPrompt; }

} // namespace geobuild
