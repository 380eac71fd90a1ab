#include "geobuild/task.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace geobuild {

using nlohmann::json;

namespace {

constexpr std::string_view kAngleSign = "\xE2\x88\xA0";

std::string label_string(const json& j, std::string_view what)
{
    if (!j.is_string()) {
        throw TaskError(0, fmt::format("{} must be a string", what));
    }
    return j.get<std::string>();
}

std::vector<std::string> label_list(const json& j, std::string_view what)
{
    if (!j.is_array()) {
        throw TaskError(0, fmt::format("{} must be a list", what));
    }
    std::vector<std::string> out;
    for (const json& e : j) {
        out.push_back(label_string(e, what));
    }
    return out;
}

/// "PA" -> {P, A} using the declared points; falls back to one character per
/// label when the declared points do not cover the text.
std::vector<std::string> split_compound(const std::string& text, std::span<const std::string> points,
                                        std::size_t count)
{
    if (auto parts = split_labels(text, points, count); !parts.empty()) {
        return parts;
    }
    if (count == 0 || text.size() == count) {
        std::vector<std::string> chars;
        for (char c : text) {
            chars.emplace_back(1, c);
        }
        if (count == 0 || chars.size() == count) {
            return chars;
        }
    }
    return {};
}

std::vector<std::string> compound(const json& j, std::span<const std::string> points, std::size_t count,
                                  std::string_view what)
{
    std::vector<std::string> parts;
    if (j.is_array()) {
        parts = label_list(j, what);
    } else {
        parts = split_compound(label_string(j, what), points, count);
    }
    if (parts.empty() || (count != 0 && parts.size() != count)) {
        throw TaskError(0, fmt::format("cannot read {} '{}'", what, j.dump()));
    }
    return parts;
}

json compound_to_json(std::span<const std::string> parts)
{
    const bool single = std::all_of(parts.begin(), parts.end(), [](const std::string& s) { return s.size() == 1; });
    if (single) {
        std::string joined;
        for (const auto& p : parts) {
            joined += p;
        }
        return joined;
    }
    return json(std::vector<std::string>(parts.begin(), parts.end()));
}

json ref_to_json(const ObjectRef& r)
{
    if (r.explicit_list) {
        return r.parts;
    }
    return r.parts.front();
}

ObjectRef ref_from_json(const json& j)
{
    if (j.is_string()) {
        return ObjectRef{{j.get<std::string>()}, false};
    }
    if (j.is_array() && !j.empty()) {
        return ObjectRef{label_list(j, "condition object"), true};
    }
    throw TaskError(0, "condition objects must be names or non-empty label lists");
}

struct KnownNames {
    std::vector<std::string> points;
    std::set<std::string> names;

    bool knows(const std::string& n) const { return names.contains(n); }

    /// Names in `text` that are not known, or empty when `text` resolves.
    std::vector<std::string> unknown_in(std::string_view text) const
    {
        if (text.starts_with(kAngleSign)) {
            text.remove_prefix(kAngleSign.size());
        }
        if (names.contains(std::string(text)) || !split_labels(text, points).empty()) {
            return {};
        }
        std::vector<std::string> alphabet = points;
        for (char c : text) {
            alphabet.emplace_back(1, c);
        }
        std::vector<std::string> out;
        for (const auto& part : split_labels(text, alphabet)) {
            if (!knows(part) && std::find(out.begin(), out.end(), part) == out.end()) {
                out.push_back(part);
            }
        }
        if (out.empty()) {
            out.emplace_back(text);
        }
        return out;
    }
};

KnownNames known_names(const Task& t)
{
    KnownNames k;
    k.points = t.required.points;
    for (const auto& n : t.auxiliary) {
        k.names.insert(n);
        if (std::find(k.points.begin(), k.points.end(), n) == k.points.end()) {
            k.points.push_back(n);
        }
    }
    k.names.insert(t.required.points.begin(), t.required.points.end());
    k.names.insert(t.required.circles.begin(), t.required.circles.end());
    for (const auto& [a, b] : t.required.segments) {
        k.names.insert(a + b);
    }
    for (const auto& [a, b] : t.required.lines) {
        k.names.insert(a + b);
    }
    for (const auto& poly : t.required.polygons) {
        std::string n;
        for (const auto& v : poly) {
            n += v;
        }
        k.names.insert(n);
    }
    return k;
}

} // namespace

TaskError::TaskError(std::size_t line, const std::string& message)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, message) : message), line_(line)
{
}

std::vector<TaskIssue> validate_task(const Task& t)
{
    std::vector<TaskIssue> issues;
    if (t.id.empty()) {
        issues.push_back({"id", "empty id"});
    }
    if (t.difficulty < 1 || t.difficulty > 4) {
        issues.push_back({"difficulty", fmt::format("difficulty {} outside 1..4", t.difficulty)});
    }
    const KnownNames known = known_names(t);
    const auto check_point = [&](const std::string& field, const std::string& p) {
        if (!known.knows(p)) {
            issues.push_back({field, "unknown reference " + p});
        }
    };
    for (std::size_t i = 0; i < t.required.segments.size(); ++i) {
        check_point(fmt::format("required_objects.segments[{}]", i), t.required.segments[i].first);
        check_point(fmt::format("required_objects.segments[{}]", i), t.required.segments[i].second);
    }
    for (std::size_t i = 0; i < t.required.lines.size(); ++i) {
        check_point(fmt::format("required_objects.lines[{}]", i), t.required.lines[i].first);
        check_point(fmt::format("required_objects.lines[{}]", i), t.required.lines[i].second);
    }
    for (std::size_t i = 0; i < t.required.polygons.size(); ++i) {
        const auto field = fmt::format("required_objects.polygons[{}]", i);
        if (t.required.polygons[i].size() < 3) {
            issues.push_back({field, "polygon needs at least 3 vertices"});
        }
        for (const auto& v : t.required.polygons[i]) {
            check_point(field, v);
        }
    }
    for (std::size_t i = 0; i < t.conditions.size(); ++i) {
        const Condition& c = t.conditions[i];
        const auto field = fmt::format("verification_conditions[{}]", i);
        const Arity a = condition_arity(c.type);
        if (c.objects.size() < a.min || c.objects.size() > a.max) {
            issues.push_back({field, fmt::format("{} objects for {}", c.objects.size(), to_string(c.type))});
        }
        if (needs_numeric_target(c.type) && !c.value && c.values.size() != 2) {
            issues.push_back({field, "missing numeric value"});
        }
        if (needs_label(c.type)) {
            if (!c.label) {
                issues.push_back({field, "missing value"});
            } else if (c.type == ConditionType::PolygonType && !is_supported_polygon_type(*c.label)) {
                issues.push_back({field, "unsupported polygon type " + *c.label});
            } else if (c.type == ConditionType::PolygonProperty) {
                const auto props = supported_polygon_properties();
                if (std::find(props.begin(), props.end(), *c.label) == props.end()) {
                    issues.push_back({field, "unsupported polygon property " + *c.label});
                }
            }
        }
        for (std::size_t j = 0; j < c.objects.size(); ++j) {
            const ObjectRef& r = c.objects[j];
            const auto ref_field = fmt::format("{}.objects[{}]", field, j);
            if (r.explicit_list) {
                for (const auto& p : r.parts) {
                    check_point(ref_field, p);
                }
                continue;
            }
            for (const auto& u : known.unknown_in(r.parts.front())) {
                issues.push_back({ref_field, "unknown reference " + u});
            }
        }
    }
    return issues;
}

void to_json(json& j, const Condition& c)
{
    j = json::object();
    j["type"] = std::string(to_string(c.type));
    json objects = json::array();
    for (const auto& r : c.objects) {
        objects.push_back(ref_to_json(r));
    }
    j["objects"] = std::move(objects);
    if (c.label) {
        j["value"] = *c.label;
    } else if (c.value) {
        j["value"] = *c.value;
    }
    if (!c.values.empty()) {
        j["values"] = c.values;
    }
}

void from_json(const json& j, Condition& c)
{
    if (!j.is_object()) {
        throw TaskError(0, "condition must be an object");
    }
    const auto type_it = j.find("type");
    if (type_it == j.end() || !type_it->is_string()) {
        throw TaskError(0, "condition without a type");
    }
    const auto type = parse_condition_type(type_it->get<std::string>());
    if (!type) {
        throw TaskError(0, "unknown condition type " + type_it->get<std::string>());
    }
    c = Condition{};
    c.type = *type;
    if (const auto it = j.find("objects"); it != j.end()) {
        if (!it->is_array()) {
            throw TaskError(0, "condition objects must be a list");
        }
        for (const json& r : *it) {
            c.objects.push_back(ref_from_json(r));
        }
    }
    if (const auto it = j.find("value"); it != j.end() && !it->is_null()) {
        if (it->is_string()) {
            c.label = it->get<std::string>();
        } else if (it->is_number()) {
            c.value = it->get<double>();
        } else {
            throw TaskError(0, "condition value must be a number or a name");
        }
    }
    if (const auto it = j.find("values"); it != j.end()) {
        if (!it->is_array() || !std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_number(); })) {
            throw TaskError(0, "condition values must be numbers");
        }
        c.values = it->get<std::vector<double>>();
    }
}

void to_json(json& j, const Task& t)
{
    json req = json::object();
    req["points"] = t.required.points;
    json segs = json::array();
    for (const auto& [a, b] : t.required.segments) {
        segs.push_back(compound_to_json(std::vector{a, b}));
    }
    req["segments"] = std::move(segs);
    json lines = json::array();
    for (const auto& [a, b] : t.required.lines) {
        lines.push_back(compound_to_json(std::vector{a, b}));
    }
    req["lines"] = std::move(lines);
    req["circles"] = t.required.circles;
    json polys = json::array();
    for (const auto& p : t.required.polygons) {
        polys.push_back(compound_to_json(p));
    }
    req["polygons"] = std::move(polys);

    j = json::object();
    j["id"] = t.id;
    j["problem_text"] = t.problem_text;
    j["required_objects"] = std::move(req);
    j["verification_conditions"] = t.conditions;
    j["category"] = t.category;
    j["difficulty"] = t.difficulty;
    if (!t.auxiliary.empty()) {
        j["auxiliary_objects"] = t.auxiliary;
    }
}

void from_json(const json& j, Task& t)
{
    if (!j.is_object()) {
        throw TaskError(0, "task record must be an object");
    }
    const auto field = [&](const char* name) -> const json& {
        const auto it = j.find(name);
        if (it == j.end()) {
            throw TaskError(0, fmt::format("missing field {}", name));
        }
        return *it;
    };
    t = Task{};
    const json& id = field("id");
    if (id.is_string()) {
        t.id = id.get<std::string>();
    } else if (id.is_number_integer()) {
        t.id = std::to_string(id.get<long long>());
    } else {
        throw TaskError(0, "id must be a string or integer");
    }
    t.problem_text = label_string(field("problem_text"), "problem_text");
    t.category = label_string(field("category"), "category");
    const json& difficulty = field("difficulty");
    if (!difficulty.is_number_integer()) {
        throw TaskError(0, "difficulty must be an integer");
    }
    t.difficulty = difficulty.get<int>();

    const json& req = field("required_objects");
    if (!req.is_object()) {
        throw TaskError(0, "required_objects must be an object");
    }
    const auto list = [&](const char* name) -> json {
        const auto it = req.find(name);
        if (it == req.end() || it->is_null()) {
            return json::array();
        }
        if (!it->is_array()) {
            throw TaskError(0, fmt::format("required_objects.{} must be a list", name));
        }
        return *it;
    };
    t.required.points = label_list(list("points"), "point");
    t.required.circles = label_list(list("circles"), "circle");
    for (const json& s : list("segments")) {
        const auto parts = compound(s, t.required.points, 2, "segment");
        t.required.segments.emplace_back(parts[0], parts[1]);
    }
    for (const json& s : list("lines")) {
        const auto parts = compound(s, t.required.points, 2, "line");
        t.required.lines.emplace_back(parts[0], parts[1]);
    }
    for (const json& p : list("polygons")) {
        t.required.polygons.push_back(compound(p, t.required.points, 0, "polygon"));
    }

    const json& conds = field("verification_conditions");
    if (!conds.is_array()) {
        throw TaskError(0, "verification_conditions must be a list");
    }
    for (const json& c : conds) {
        t.conditions.push_back(c.get<Condition>());
    }
    if (const auto it = j.find("auxiliary_objects"); it != j.end()) {
        t.auxiliary = label_list(*it, "auxiliary object");
    }
}

TaskSet parse_tasks(std::istream& in, bool strict)
{
    TaskSet out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::string problem;
        try {
            Task t = json::parse(line).get<Task>();
            const auto issues = validate_task(t);
            if (issues.empty()) {
                out.tasks.push_back(std::move(t));
                continue;
            }
            problem = "schema-violation: " + issues.front().field + ": " + issues.front().reason;
        } catch (const json::parse_error& e) {
            problem = std::string("parse failure: ") + e.what();
        } catch (const TaskError& e) {
            problem = std::string("schema-violation: ") + e.what();
        } catch (const json::exception& e) {
            problem = std::string("schema-violation: ") + e.what();
        }
        if (strict) {
            throw TaskError(number, problem);
        }
        out.issues.push_back({number, problem});
    }
    return out;
}

TaskSet load_tasks(const std::filesystem::path& path, bool strict)
{
    std::ifstream in(path);
    if (!in) {
        throw TaskError(0, "cannot open " + path.string());
    }
    return parse_tasks(in, strict);
}

std::string serialize_tasks(std::span<const Task> tasks)
{
    std::string out;
    for (const Task& t : tasks) {
        out += json(t).dump();
        out += '\n';
    }
    return out;
}

std::map<std::string, std::size_t> category_histogram(std::span<const Task> tasks)
{
    std::map<std::string, std::size_t> h;
    for (const Task& t : tasks) {
        ++h[t.category];
    }
    return h;
}

std::map<int, std::size_t> difficulty_histogram(std::span<const Task> tasks)
{
    std::map<int, std::size_t> h;
    for (const Task& t : tasks) {
        ++h[t.difficulty];
    }
    return h;
}

} // namespace geobuild
