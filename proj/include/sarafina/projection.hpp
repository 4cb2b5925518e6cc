#pragma once

#include <vector>

#include "sarafina/core.hpp"

namespace sarafina {

enum class ProjectionModel { linear, exponential };

const char* to_string(ProjectionModel model);
ProjectionModel projection_model_from_string(const std::string& text);

/// Shape of the projected-gap trajectory a policy implies.
struct ProjectionSpec {
    ProjectionModel model = ProjectionModel::linear;
    int horizon_years = 10;
    double rate = 0.5;  // per-year decay constant, exponential model only
};

void validate_projection_spec(const ProjectionSpec& spec);

/// Straight-line descent from the baseline to baseline - p_final over
/// `horizon_years`, constant at that floor afterwards. `years` must start at
/// the enactment year; offsets are taken in calendar years.
ProjectionTrajectory linear_projection(double baseline_gap, double p_final_value,
                                       int horizon_years, const std::vector<int>& years);

/// Exponential approach to the floor: floor + p_final * exp(-rate * k).
ProjectionTrajectory exponential_projection(double baseline_gap, double p_final_value,
                                            double rate, const std::vector<int>& years);

/// Checks monotone non-increase, the baseline anchor and the
/// baseline - p_final floor; names the first violating index. Returns the
/// trajectory unchanged.
ProjectionTrajectory validate_projection(ProjectionTrajectory trajectory, double baseline_gap,
                                         double p_final_value);

/// Dispatches on `spec.model`.
ProjectionTrajectory make_projection(const ProjectionSpec& spec, double baseline_gap,
                                     double p_final_value, const std::vector<int>& years);

}  // namespace sarafina
