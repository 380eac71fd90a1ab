#include "geobuild/dsl.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace geobuild;
using namespace geobuild::dsl;

TEST(Tokenizer, SplitsColonAndArrow)
{
    const auto tokens = tokenize("line:A B->l # comment\n");
    ASSERT_EQ(tokens.size(), 6u);
    EXPECT_EQ(tokens[0].kind, TokenKind::Identifier);
    EXPECT_EQ(tokens[1].kind, TokenKind::Colon);
    EXPECT_EQ(tokens[4].kind, TokenKind::Arrow);
    EXPECT_EQ(tokens[5].text, "l");
    EXPECT_EQ(tokens[5].line, 1);
}

TEST(Tokenizer, ClassifiesWords)
{
    const auto tokens = tokenize("rotate : A 180° O -> C\npoint : 100*cos(140°) -2.5 -> B");
    EXPECT_EQ(tokens[3].kind, TokenKind::Number);
    EXPECT_EQ(tokens[3].text, "180°");
    EXPECT_EQ(tokens[9].kind, TokenKind::Expression);
    EXPECT_EQ(tokens[9].line, 2);
    EXPECT_EQ(tokens[10].kind, TokenKind::Number);
}

TEST(Tokenizer, RejectsStrayCharacters)
{
    EXPECT_THROW(tokenize("point : 0 0 -> A$"), ParseException);
    EXPECT_THROW(tokenize("point : 0,0 -> A"), ParseException);
}

TEST(Parser, ParsesTangentProgram)
{
    const ParseResult r = parse_program(geobuild::testing::read_fixture("tangent_listing.gdsl"));
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.commands.size(), 13u);
    EXPECT_EQ(r.commands[2].name, "point");
    EXPECT_EQ(r.commands[2].inputs[0].kind, ArgKind::Expression);
    EXPECT_EQ(r.commands[8].name, "intersect");
    EXPECT_EQ(r.commands[8].outputs, std::vector<std::string>{"P"});
    EXPECT_EQ(r.commands[9].inputs[1], (Arg{ArgKind::Number, "180°"}));
    EXPECT_EQ(r.commands[12].source_line, 16);
}

TEST(Parser, ErrorKindsAndLines)
{
    struct Case {
        const char* source;
        ParseErrorKind kind;
        int line;
    };
    const Case cases[] = {
        {"point 0 0 -> A", ParseErrorKind::MissingColon, 1},
        {"point : 0 0 -> A\npoint : 1 1 B", ParseErrorKind::MissingArrow, 2},
        {"\n\nfrobnicate : A -> B", ParseErrorKind::UnknownCommand, 3},
        {"point : 1+ 0 -> A", ParseErrorKind::BadExpression, 1},
        {"point : 0 0 -> 3", ParseErrorKind::BadToken, 1},
        {"point : 0 0 ->", ParseErrorKind::BadToken, 1},
        {"point : 0 0 -> A%", ParseErrorKind::BadToken, 1},
        {": A -> B", ParseErrorKind::UnknownCommand, 1},
    };
    for (const Case& c : cases) {
        const ParseResult r = parse_program(c.source);
        ASSERT_FALSE(r.ok()) << c.source;
        EXPECT_EQ(r.error->kind, c.kind) << c.source;
        EXPECT_EQ(r.error->line, c.line) << c.source;
    }
}

TEST(Parser, CommentsBlankLinesAndEmptyInputs)
{
    const ParseResult r = parse_program("# header\n\n   \npoint : -- -> P  # free\npoint : -> Q\n");
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.commands.size(), 2u);
    EXPECT_TRUE(r.commands[0].inputs.empty());
    EXPECT_TRUE(r.commands[1].inputs.empty());
    EXPECT_EQ(r.commands[0].source_line, 4);
    EXPECT_TRUE(parse_program("").ok());
    EXPECT_TRUE(parse_program("").commands.empty());
}

TEST(Parser, DivisionByZeroIsLeftForExecution)
{
    const ParseResult r = parse_program("const : 1/0 -> k");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.commands[0].inputs[0].kind, ArgKind::Expression);
}

TEST(Parser, VocabularyIsClosed)
{
    EXPECT_EQ(command_vocabulary().size(), 23u);
    for (const char* name : {"point", "intersect", "angular_bisector", "circumcircle", "ratio"}) {
        EXPECT_TRUE(is_known_command(name)) << name;
    }
    EXPECT_FALSE(is_known_command("tangent"));
}

TEST(Parser, FormatRoundTripOnRandomCommands)
{
    std::mt19937 rng(7);
    const auto vocab = command_vocabulary();
    const std::vector<std::string> args = {"A", "B_1", "circle_O", "12", "-3.5", "140°", "2rad", "100*cos(40°)", "(1+2)/3"};
    for (int i = 0; i < 500; ++i) {
        std::string line = std::string(vocab[rng() % vocab.size()]) + " :";
        const int nin = static_cast<int>(rng() % 4);
        for (int k = 0; k < nin; ++k) {
            line += " " + args[rng() % args.size()];
        }
        line += " ->";
        const int nout = 1 + static_cast<int>(rng() % 2);
        for (int k = 0; k < nout; ++k) {
            line += " X" + std::to_string(k);
        }
        const ParseResult first = parse_program(line);
        ASSERT_TRUE(first.ok()) << line;
        const std::string formatted = format_command(first.commands[0]);
        const ParseResult second = parse_program(formatted);
        ASSERT_TRUE(second.ok()) << formatted;
        EXPECT_EQ(first.commands, second.commands) << line;
    }
}
