#pragma once

#include "geobuild/conditions.hpp"
#include "geobuild/interpreter.hpp"

#include <span>
#include <string>
#include <vector>

namespace geobuild {

struct Task;

/// Numerical tolerances for condition checks.
struct Tolerances {
    double angle_degrees = 0.5;     // angular residuals
    double relative = 0.01;         // metric comparisons, relative to the target
    double length_fraction = 0.005; // incidences, as a fraction of the diagram diameter
};

struct ScaleFit {
    double scale = 1.0;
    bool applicable = false;
};

struct ConditionResult {
    bool satisfied = false;
    double residual = 0.0;
    std::string reason; // empty when satisfied
};

struct VerificationReport {
    bool executable = false;
    std::vector<MissingObject> missing_objects;
    std::vector<ConditionResult> condition_results; // parallel to the task's conditions
    ScaleFit scale;
    bool success = false;
};

/// Diagonal of the bounding box of all points and circle extents; 1 when the
/// state has no extent.
double diagram_diameter(const ConstructionState& state);

std::vector<MissingObject> check_object_coverage(const ConstructionState& state,
                                                 const RequiredObjects& required);

/// Fits one global scale from distance_equals and perimeter targets as the
/// median of target/measured, taking the upper middle element for even counts.
ScaleFit fit_global_scale(const ConstructionState& state, std::span<const Condition> conditions);

ConditionResult check_condition(const ConstructionState& state, const Condition& condition,
                                const ScaleFit& scale, const Tolerances& tol = {});

/// Residual of a measured angle against a target, folding in the reflex
/// angle: min(|theta - target|, |(360 - theta) - target|).
double angle_residual(double measured_degrees, double target_degrees);

/// Coverage, scale fit and every condition on the trace's final state. A
/// condition that leaves its circle implicit uses the single required circle
/// when the task names exactly one. Success needs an executable trace.
VerificationReport verify(const ExecutionTrace& trace, const RequiredObjects& required,
                          std::span<const Condition> conditions, const Tolerances& tol = {});
VerificationReport verify_task(const ExecutionTrace& trace, const Task& task, const Tolerances& tol = {});

} // namespace geobuild
