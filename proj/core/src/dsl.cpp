#include "geobuild/dsl.hpp"

#include "geobuild/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

namespace geobuild::dsl {

namespace {

constexpr std::array<std::string_view, 23> kVocabulary{
    "point",         "line",         "segment",         "ray",       "circle",
    "angle",         "const",        "intersect",       "parallel_line",
    "orthogonal_line", "midpoint",   "rotate",          "line_bisector",
    "angular_bisector", "incenter",  "circumcenter",    "incircle",
    "circumcircle",  "distance",     "sum",             "minus",
    "product",       "ratio",
};

const std::regex& number_pattern()
{
    static const std::regex re(R"(^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?(\xC2\xB0|deg|rad|r)?$)");
    return re;
}

bool is_word_char(std::string_view line, std::size_t i)
{
    const auto c = static_cast<unsigned char>(line[i]);
    if (std::isalnum(c) || c == '_' || c == '.' || c == '+' || c == '*' || c == '/' || c == '(' ||
        c == ')') {
        return true;
    }
    if (c == '-') {
        return !(i + 1 < line.size() && line[i + 1] == '>');
    }
    // UTF-8 degree sign, U+00B0.
    return c == 0xC2 && i + 1 < line.size() && static_cast<unsigned char>(line[i + 1]) == 0xB0;
}

TokenKind classify_word(const std::string& word)
{
    if (is_identifier(word)) {
        return TokenKind::Identifier;
    }
    if (std::regex_match(word, number_pattern())) {
        return TokenKind::Number;
    }
    return TokenKind::Expression;
}

void tokenize_line(std::string_view line, int line_no, std::vector<Token>& out)
{
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') {
            return;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        const int column = static_cast<int>(i) + 1;
        if (c == ':') {
            out.push_back(Token{TokenKind::Colon, ":", line_no, column});
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            out.push_back(Token{TokenKind::Arrow, "->", line_no, column});
            i += 2;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size()) {
            const char w = line[i];
            if (w == ' ' || w == '\t' || w == '\r' || w == ':' || w == '#') {
                break;
            }
            if (w == '-' && i + 1 < line.size() && line[i + 1] == '>') {
                break;
            }
            if (!is_word_char(line, i)) {
                throw ParseException(ParseError{
                    line_no, ParseErrorKind::BadToken,
                    "line " + std::to_string(line_no) + ", column " + std::to_string(i + 1) +
                        ": unexpected character '" + std::string(1, w) + "'"});
            }
            i += static_cast<unsigned char>(w) == 0xC2 ? 2 : 1;
        }
        std::string word(line.substr(start, i - start));
        out.push_back(Token{classify_word(word), std::move(word), line_no, column});
    }
}

ParseError make_error(int line, ParseErrorKind kind, const std::string& what)
{
    return ParseError{line, kind, "line " + std::to_string(line) + ": " + what};
}

Command parse_line(std::span<const Token> tokens)
{
    const int line = tokens.front().line;
    const Token& head = tokens.front();
    if (head.kind != TokenKind::Identifier) {
        throw ParseException(make_error(line, ParseErrorKind::UnknownCommand,
                                        "expected a command name, got '" + head.text + "'"));
    }
    if (tokens.size() < 2 || tokens[1].kind != TokenKind::Colon) {
        throw ParseException(make_error(line, ParseErrorKind::MissingColon,
                                        "expected ':' after '" + head.text + "'"));
    }
    const auto arrow = std::find_if(tokens.begin() + 2, tokens.end(),
                                    [](const Token& t) { return t.kind == TokenKind::Arrow; });
    if (arrow == tokens.end()) {
        throw ParseException(make_error(line, ParseErrorKind::MissingArrow,
                                        "expected '->' before the output names"));
    }
    if (!is_known_command(head.text)) {
        throw ParseException(make_error(line, ParseErrorKind::UnknownCommand,
                                        "unknown command '" + head.text + "'"));
    }

    Command cmd;
    cmd.name = head.text;
    cmd.source_line = line;

    std::span<const Token> inputs(tokens.begin() + 2, arrow);
    // `point : -- -> P` spells an empty input list.
    if (inputs.size() == 1 && inputs.front().text == "--") {
        inputs = {};
    }
    for (const Token& tok : inputs) {
        switch (tok.kind) {
        case TokenKind::Identifier:
            cmd.inputs.push_back(Arg{ArgKind::Name, tok.text});
            break;
        case TokenKind::Number:
        case TokenKind::Expression:
            try {
                eval_expression(tok.text);
            } catch (const ExpressionError& e) {
                // Division by zero is an arithmetic failure at execution time.
                if (e.kind() == ExpressionErrorKind::BadExpression) {
                    throw ParseException(
                        make_error(line, ParseErrorKind::BadExpression, e.what()));
                }
            }
            cmd.inputs.push_back(Arg{tok.kind == TokenKind::Number ? ArgKind::Number
                                                                   : ArgKind::Expression,
                                     tok.text});
            break;
        case TokenKind::Colon:
        case TokenKind::Arrow:
            throw ParseException(
                make_error(line, ParseErrorKind::BadToken, "unexpected '" + tok.text + "'"));
        }
    }

    for (auto it = arrow + 1; it != tokens.end(); ++it) {
        if (it->kind != TokenKind::Identifier) {
            throw ParseException(make_error(line, ParseErrorKind::BadToken,
                                            "output '" + it->text + "' is not a valid name"));
        }
        cmd.outputs.push_back(it->text);
    }
    if (cmd.outputs.empty()) {
        throw ParseException(
            make_error(line, ParseErrorKind::BadToken, "expected an output name after '->'"));
    }
    return cmd;
}

} // namespace

std::string_view to_string(ParseErrorKind kind)
{
    switch (kind) {
    case ParseErrorKind::BadToken: return "bad-token";
    case ParseErrorKind::MissingColon: return "missing-colon";
    case ParseErrorKind::MissingArrow: return "missing-arrow";
    case ParseErrorKind::UnknownCommand: return "unknown-command";
    case ParseErrorKind::BadExpression: return "bad-expression";
    }
    return "bad-token";
}

bool is_identifier(std::string_view text)
{
    if (text.empty()) {
        return false;
    }
    const auto first = static_cast<unsigned char>(text.front());
    if (first >= 0x80 || !(std::isalpha(first) || first == '_')) {
        return false;
    }
    return std::all_of(text.begin() + 1, text.end(), [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return u < 0x80 && (std::isalnum(u) || u == '_');
    });
}

std::span<const std::string_view> command_vocabulary() { return kVocabulary; }

bool is_known_command(std::string_view name)
{
    return std::find(kVocabulary.begin(), kVocabulary.end(), name) != kVocabulary.end();
}

std::vector<Token> tokenize(std::string_view source)
{
    std::vector<Token> tokens;
    int line_no = 1;
    std::size_t start = 0;
    while (start <= source.size()) {
        const std::size_t end = source.find('\n', start);
        const std::string_view line =
            source.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        tokenize_line(line, line_no, tokens);
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
        ++line_no;
    }
    return tokens;
}

ParseResult parse_program(std::string_view source)
{
    ParseResult result;
    std::vector<Token> tokens;
    try {
        tokens = tokenize(source);
    } catch (const ParseException& e) {
        result.error = e.error();
        return result;
    }

    auto first = tokens.begin();
    while (first != tokens.end()) {
        auto last = std::find_if(first, tokens.end(),
                                 [&](const Token& t) { return t.line != first->line; });
        try {
            result.commands.push_back(parse_line(std::span<const Token>(first, last)));
        } catch (const ParseException& e) {
            result.commands.clear();
            result.error = e.error();
            return result;
        }
        first = last;
    }
    return result;
}

std::string format_command(const Command& command)
{
    std::string out = command.name + " :";
    for (const Arg& arg : command.inputs) {
        out += ' ';
        out += arg.text;
    }
    out += " ->";
    for (const std::string& name : command.outputs) {
        out += ' ';
        out += name;
    }
    return out;
}

} // namespace geobuild::dsl
