#include "geobuild/dsl.hpp"
#include "geobuild/interpreter.hpp"
#include "geobuild/render.hpp"
#include "geobuild/verifier.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace geobuild;

constexpr const char* kTangents = R"(point : 0 0 -> O
point : 100 0 -> A
point : 100*cos(140°) 100*sin(140°) -> B
circle : O A -> circle_O
line : O A -> line_OA
line : O B -> line_OB
orthogonal_line : A line_OA -> tangent_A
orthogonal_line : B line_OB -> tangent_B
intersect : tangent_A tangent_B -> P
rotate : A 180° O -> C
segment : P A -> PA
segment : P B -> PB
segment : A C -> AC
)";

std::vector<Condition> tangent_conditions()
{
    const auto ref = [](std::string s) { return ObjectRef{{std::move(s)}, false}; };
    return {
        Condition{ConditionType::TangentLine, {ref("PA")}, {}, {}, {}},
        Condition{ConditionType::TangentLine, {ref("PB")}, {}, {}, {}},
        Condition{ConditionType::Diameter, {ref("AC")}, {}, {}, {}},
        Condition{ConditionType::AngleValue, {ref("APB")}, 40.0, {}, {}},
    };
}

void BM_Parse(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(dsl::parse_program(kTangents));
    }
}
BENCHMARK(BM_Parse);

void BM_Execute(benchmark::State& state)
{
    const auto program = dsl::parse_program(kTangents).commands;
    for (auto _ : state) {
        benchmark::DoNotOptimize(execute_program(program));
    }
}
BENCHMARK(BM_Execute);

void BM_Verify(benchmark::State& state)
{
    const ExecutionTrace trace = execute_source(kTangents);
    const RequiredObjects required{{"O", "A", "B", "P", "C"}, {{"P", "A"}, {"P", "B"}, {"A", "C"}}, {}, {"O"}, {}};
    const auto conditions = tangent_conditions();
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify(trace, required, conditions));
    }
}
BENCHMARK(BM_Verify);

void BM_Render(benchmark::State& state)
{
    const ExecutionTrace trace = execute_source(kTangents);
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_svg(trace.final_state));
    }
}
BENCHMARK(BM_Render);

} // namespace

BENCHMARK_MAIN();
