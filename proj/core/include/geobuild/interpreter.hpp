#pragma once

#include "geobuild/dsl.hpp"
#include "geobuild/kernel.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geobuild {

/// One named object together with the command that produced it.
struct Binding {
    std::string name;
    GeoObject object;
    int source_line = 0;
    std::string command;
    std::vector<std::string> references; // object names the command consumed, in input order
};

/// Ordered, append-only name -> object table produced by executing a program.
class ConstructionState {
public:
    bool contains(std::string_view name) const;
    const Binding* find(std::string_view name) const;
    const GeoObject* object(std::string_view name) const;

    /// Appends a binding. Throws std::logic_error if the name is taken.
    void bind(Binding binding);

    std::span<const Binding> bindings() const { return bindings_; }
    std::size_t size() const { return bindings_.size(); }
    bool empty() const { return bindings_.empty(); }
    std::size_t count(ObjectKind kind) const;

private:
    std::vector<Binding> bindings_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

enum class FailureCategory {
    UndefinedReference,
    SyntaxError,
    OutputMismatch,
    InfeasibleConstruction,
    Redefinition,
    ArithmeticError,
};

std::string_view to_string(FailureCategory category);
std::optional<FailureCategory> parse_failure_category(std::string_view text);

/// The structural hallucination categories; a strict subset of FailureCategory.
enum class Hallucination { UndefinedReference, SyntaxError, OutputMismatch };

std::string_view to_string(Hallucination h);
std::optional<Hallucination> parse_hallucination(std::string_view text);

struct ExecutionFailure {
    int step_line = 0;
    FailureCategory category = FailureCategory::SyntaxError;
    std::string detail;
};

struct ExecutionTrace {
    std::size_t executed_steps = 0;
    std::size_t program_length = 0;
    std::optional<ExecutionFailure> failure;
    ConstructionState final_state; // state at the failure point when failed

    bool ok() const { return !failure.has_value(); }
};

/// Applies one command. On success the state gains exactly
/// `command.outputs.size()` bindings; on failure it is left untouched.
std::optional<ExecutionFailure> execute_command(ConstructionState& state, const dsl::Command& command);

/// Runs commands in order, stopping at the first failure.
ExecutionTrace execute_program(std::span<const dsl::Command> program, ConstructionState initial = {});

/// Parses and executes. Parse errors surface as a syntax_error failure with
/// zero executed steps.
ExecutionTrace execute_source(std::string_view source);

ExecutionFailure to_failure(const dsl::ParseError& error);

std::optional<Hallucination> classify_failure(const ExecutionFailure& failure);
std::optional<Hallucination> classify_failure(const dsl::ParseError& error);

} // namespace geobuild
