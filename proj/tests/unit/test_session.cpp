#include "geobuild/agents.hpp"
#include "geobuild/session.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace geobuild;

namespace {

Task tangent_task() { return load_tasks(geobuild::testing::fixture_path("tangent_task.jsonl"), true).tasks.at(0); }

const std::string kUndefined = "point : 0 0 -> O\nsegment : O Q -> OQ\n";
const std::string kIncomplete = "point : 0 0 -> O\npoint : 100 0 -> A\ncircle : O A -> circle_O\n";

class ThrowingAgent : public Agent {
public:
    Proposal propose(const SessionView&) override { throw TransportError("connection refused"); }
};

} // namespace

TEST(Session, ZeroBudgetIsRejected)
{
    EXPECT_THROW(Session(tangent_task(), 0), SessionError);
}

TEST(Session, InvalidTaskIsRejected)
{
    Task t = tangent_task();
    t.difficulty = 9;
    EXPECT_THROW(create_session(t), SessionError);
}

TEST(Session, SuccessAtFirstStep)
{
    Session s(tangent_task());
    const Feedback& fb = s.step(geobuild::testing::tangent_program());
    EXPECT_TRUE(fb.empty());
    EXPECT_EQ(fb.to_text(), "All checks passed.\n");
    EXPECT_EQ(s.status(), SessionStatus::Success);
    EXPECT_EQ(s.steps().size(), 1u);
    EXPECT_TRUE(s.steps()[0].hallucinations.empty());
}

TEST(Session, BudgetExhaustion)
{
    Session s(tangent_task(), 5);
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(s.status(), SessionStatus::Running);
        s.step(kIncomplete);
    }
    EXPECT_EQ(s.status(), SessionStatus::BudgetExhausted);
    EXPECT_EQ(s.steps().size(), 5u);
    EXPECT_THROW(s.step(geobuild::testing::tangent_program()), SessionError);
}

TEST(Session, TerminalSessionsAbsorb)
{
    Session s(tangent_task());
    s.step(geobuild::testing::tangent_program());
    EXPECT_THROW(s.step(geobuild::testing::tangent_program()), SessionError);
    EXPECT_THROW(s.record_transport_failure("late"), SessionError);
    EXPECT_EQ(s.steps().size(), 1u);
    EXPECT_EQ(s.status(), SessionStatus::Success);
}

TEST(Session, RecoveryAfterUndefinedReference)
{
    Session s(tangent_task());
    const Feedback& first = s.step(kUndefined);
    ASSERT_EQ(first.execution_errors.size(), 1u);
    EXPECT_NE(first.execution_errors[0].find("undefined_reference"), std::string::npos);
    s.step(geobuild::testing::tangent_program());
    EXPECT_EQ(s.status(), SessionStatus::Success);
    const auto events = hallucination_events(s.steps(), s.budget());
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].category, Hallucination::UndefinedReference);
    EXPECT_EQ(events[0].recovered_at, 2u);
    EXPECT_EQ(events[0].recovery_steps, 1u);
}

TEST(Session, UnrecoveredHallucinationCountsRemainingBudget)
{
    Session s(tangent_task(), 4);
    s.step(kIncomplete);
    s.step("point : 0 0\n");
    s.step("point : 0 0\n");
    s.step(kIncomplete);
    const auto events = hallucination_events(s.steps(), s.budget());
    ASSERT_EQ(events.size(), 2u);
    EXPECT_EQ(events[0].step, 2u);
    EXPECT_EQ(events[0].recovered_at, 4u);
    EXPECT_EQ(events[0].recovery_steps, 2u);
    EXPECT_EQ(events[1].step, 3u);
    EXPECT_EQ(events[1].recovery_steps, 1u);

    Session t(tangent_task(), 3);
    t.step(kIncomplete);
    t.step(kUndefined);
    t.step(kUndefined);
    const auto open = hallucination_events(t.steps(), t.budget());
    ASSERT_EQ(open.size(), 2u);
    EXPECT_FALSE(open[0].recovered_at);
    EXPECT_EQ(open[0].recovery_steps, 1u);
    EXPECT_EQ(open[1].recovery_steps, 0u);
}

TEST(Session, EmptyProgramIsSyntaxError)
{
    Session s(tangent_task());
    s.step("\n\n");
    ASSERT_TRUE(s.steps()[0].trace.failure);
    EXPECT_EQ(s.steps()[0].trace.failure->category, FailureCategory::SyntaxError);
    EXPECT_EQ(s.steps()[0].hallucinations, std::vector{Hallucination::SyntaxError});
    EXPECT_TRUE(s.steps()[0].image_svg.empty());
}

TEST(Session, FeedbackMatchesReport)
{
    Session s(tangent_task());
    const Feedback fb = s.step(kIncomplete);
    const StepRecord& rec = s.steps()[0];
    EXPECT_TRUE(fb.execution_errors.empty());
    EXPECT_EQ(fb.missing_objects, rec.report.missing_objects);
    std::size_t violated = 0;
    for (const auto& r : rec.report.condition_results) {
        violated += r.satisfied ? 0 : 1;
    }
    EXPECT_EQ(fb.violated_conditions.size(), violated);
    EXPECT_EQ(fb.missing_objects.size(), 6u); // B, P, C and the three segments
    const std::string text = fb.to_text();
    EXPECT_NE(text.find("Missing required objects:"), std::string::npos);
    EXPECT_NE(text.find("points P"), std::string::npos);
    EXPECT_NE(text.find("Violated conditions:"), std::string::npos);
}

TEST(Session, VisionImageOnlyOnFailure)
{
    Session v(tangent_task(), 5, true);
    v.step(kIncomplete);
    EXPECT_EQ(v.steps()[0].feedback.image, "step_1.svg");
    EXPECT_FALSE(v.steps()[0].image_svg.empty());
    v.step(geobuild::testing::tangent_program());
    EXPECT_TRUE(v.steps()[1].feedback.image.empty());

    Session plain(tangent_task(), 5, false);
    plain.step(kIncomplete);
    EXPECT_TRUE(plain.steps()[0].feedback.image.empty());
}

TEST(Session, TransportFailuresConsumeSteps)
{
    Session s(tangent_task(), 3);
    ThrowingAgent agent;
    run_session(s, agent);
    EXPECT_EQ(s.status(), SessionStatus::TransportError);
    ASSERT_EQ(s.steps().size(), 3u);
    EXPECT_TRUE(s.steps()[0].transport_failure);
    EXPECT_TRUE(s.steps()[0].hallucinations.empty());
    EXPECT_NE(s.steps()[0].feedback.execution_errors[0].find("connection refused"), std::string::npos);
}

TEST(Session, MixedTransportFailureIsBudgetExhaustion)
{
    Session s(tangent_task(), 2);
    s.step(kIncomplete);
    s.record_transport_failure("timeout");
    EXPECT_EQ(s.status(), SessionStatus::BudgetExhausted);
}

TEST(Session, ReplayIsDeterministic)
{
    const std::vector<std::string> programs = {kUndefined, kIncomplete, geobuild::testing::tangent_program()};
    const auto run = [&] {
        Session s(tangent_task(), 5, true);
        ReplayAgent agent(programs);
        run_session(s, agent);
        return session_summary_json(s).dump();
    };
    const std::string first = run();
    EXPECT_EQ(first, run());
    EXPECT_NE(first.find("\"success\""), std::string::npos);
}

TEST(Session, ReplayRunsOutOfPrograms)
{
    Session s(tangent_task(), 3);
    ReplayAgent agent({kIncomplete});
    run_session(s, agent);
    EXPECT_EQ(s.status(), SessionStatus::BudgetExhausted);
    EXPECT_EQ(s.steps()[1].hallucinations, std::vector{Hallucination::SyntaxError});
}

TEST(Session, WritesLogFiles)
{
    const auto dir = std::filesystem::temp_directory_path() / "geobuild_session_log_test";
    std::filesystem::remove_all(dir);
    Session s(tangent_task(), 5, true);
    s.step("point : 0 0\n");
    s.step(kIncomplete);
    s.step(geobuild::testing::tangent_program());
    write_session_log(s, dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "session.json"));
    EXPECT_FALSE(std::filesystem::exists(dir / "step_1.svg"));
    EXPECT_TRUE(std::filesystem::exists(dir / "step_2.svg"));
    EXPECT_TRUE(std::filesystem::exists(dir / "step_3.svg"));
    std::ifstream in(dir / "steps.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j.at("step").get<std::size_t>(), ++lines);
    }
    EXPECT_EQ(lines, 3u);
    std::ifstream summary(dir / "session.json");
    const auto j = nlohmann::json::parse(summary);
    EXPECT_EQ(j.at("status"), "success");
    EXPECT_EQ(j.at("steps"), 3);
    std::filesystem::remove_all(dir);
}
