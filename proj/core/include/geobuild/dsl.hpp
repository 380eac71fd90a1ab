#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geobuild::dsl {

enum class TokenKind { Identifier, Number, Expression, Colon, Arrow };

struct Token {
    TokenKind kind = TokenKind::Identifier;
    std::string text;
    int line = 0;
    int column = 0;

    bool operator==(const Token&) const = default;
};

enum class ParseErrorKind { BadToken, MissingColon, MissingArrow, UnknownCommand, BadExpression };

std::string_view to_string(ParseErrorKind kind);

struct ParseError {
    int line = 0;
    ParseErrorKind kind = ParseErrorKind::BadToken;
    std::string message;
};

class ParseException : public std::runtime_error {
public:
    explicit ParseException(ParseError error)
        : std::runtime_error(error.message), error_(std::move(error)) {}

    const ParseError& error() const noexcept { return error_; }

private:
    ParseError error_;
};

/// Splits GeoDSL source into tokens. `#` starts a comment that runs to the end
/// of the line. Expressions are whitespace-free, so each whitespace-separated
/// word becomes one token; `:` and `->` always stand alone.
///
/// Throws ParseException (kind BadToken) on characters outside the grammar.
std::vector<Token> tokenize(std::string_view source);

enum class ArgKind { Name, Number, Expression };

struct Arg {
    ArgKind kind = ArgKind::Name;
    std::string text;

    bool operator==(const Arg&) const = default;
};

struct Command {
    std::string name;
    std::vector<Arg> inputs;
    std::vector<std::string> outputs;
    int source_line = 0;

    bool operator==(const Command&) const = default;
};

struct ParseResult {
    std::vector<Command> commands;
    std::optional<ParseError> error;

    bool ok() const { return !error.has_value(); }
};

ParseResult parse_program(std::string_view source);

/// Canonical single-line form, `name : in... -> out...`. Parsing the result
/// yields the same command.
std::string format_command(const Command& command);

std::span<const std::string_view> command_vocabulary();
bool is_known_command(std::string_view name);
bool is_identifier(std::string_view text);

} // namespace geobuild::dsl
