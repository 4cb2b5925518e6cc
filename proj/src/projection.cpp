#include "sarafina/projection.hpp"

#include <cmath>
#include <sstream>

namespace sarafina {

namespace {

constexpr double kProjectionTol = 1e-9;

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void check_generator_inputs(double baseline_gap, double p_final_value,
                            const std::vector<int>& years) {
    if (!std::isfinite(baseline_gap) || baseline_gap <= 0.0 || baseline_gap > 100.0) {
        throw DomainError("baseline_gap " + fmt(baseline_gap) + " outside (0, 100]");
    }
    if (!std::isfinite(p_final_value) || p_final_value < 0.0) {
        throw DomainError("p_final " + fmt(p_final_value) + " must be non-negative");
    }
    if (p_final_value >= baseline_gap) {
        throw DomainError("p_final " + fmt(p_final_value) +
                          " must be smaller than the baseline gap " + fmt(baseline_gap));
    }
    if (years.empty()) {
        throw DomainError("projection needs at least one year");
    }
    for (std::size_t i = 1; i < years.size(); ++i) {
        if (years[i] <= years[i - 1]) {
            throw DomainError("projection years must be strictly increasing");
        }
    }
}

}  // namespace

const char* to_string(ProjectionModel model) {
    return model == ProjectionModel::linear ? "linear" : "exponential";
}

ProjectionModel projection_model_from_string(const std::string& text) {
    if (text == "linear") return ProjectionModel::linear;
    if (text == "exponential") return ProjectionModel::exponential;
    throw ConfigError("unknown projection model '" + text +
                      "' (expected linear or exponential)");
}

void validate_projection_spec(const ProjectionSpec& spec) {
    if (spec.horizon_years < 1) {
        throw DomainError("projection horizon_years must be >= 1, got " +
                          std::to_string(spec.horizon_years));
    }
    if (spec.model == ProjectionModel::exponential &&
        (!std::isfinite(spec.rate) || spec.rate <= 0.0)) {
        throw DomainError("exponential projection rate must be positive, got " + fmt(spec.rate));
    }
}

ProjectionTrajectory linear_projection(double baseline_gap, double p_final_value,
                                       int horizon_years, const std::vector<int>& years) {
    check_generator_inputs(baseline_gap, p_final_value, years);
    if (horizon_years < 1) {
        throw DomainError("horizon_years must be >= 1, got " + std::to_string(horizon_years));
    }
    const double floor = baseline_gap - p_final_value;
    ProjectionTrajectory trajectory;
    trajectory.years = years;
    trajectory.projected_gap.reserve(years.size());
    for (int year : years) {
        const int k = year - years.front();
        // The floor is assigned directly at and past the horizon so the
        // endpoint is exact.
        const double value = (k >= horizon_years)
            ? floor
            : baseline_gap - (p_final_value / static_cast<double>(horizon_years)) * k;
        trajectory.projected_gap.push_back(value < floor ? floor : value);
    }
    return trajectory;
}

ProjectionTrajectory exponential_projection(double baseline_gap, double p_final_value,
                                            double rate, const std::vector<int>& years) {
    check_generator_inputs(baseline_gap, p_final_value, years);
    if (!std::isfinite(rate) || rate <= 0.0) {
        throw DomainError("rate must be positive, got " + fmt(rate));
    }
    const double floor = baseline_gap - p_final_value;
    ProjectionTrajectory trajectory;
    trajectory.years = years;
    trajectory.projected_gap.reserve(years.size());
    for (int year : years) {
        const int k = year - years.front();
        trajectory.projected_gap.push_back(floor + p_final_value * std::exp(-rate * k));
    }
    return trajectory;
}

ProjectionTrajectory validate_projection(ProjectionTrajectory trajectory, double baseline_gap,
                                         double p_final_value) {
    if (trajectory.years.size() != trajectory.projected_gap.size()) {
        throw ValidationError("projection years and values have different lengths");
    }
    if (trajectory.years.empty()) {
        throw ValidationError("projection is empty");
    }
    const double floor = baseline_gap - p_final_value;
    if (std::fabs(trajectory.projected_gap.front() - baseline_gap) > kProjectionTol) {
        throw ValidationError("projection index 0: value " + fmt(trajectory.projected_gap[0]) +
                              " is not anchored at the baseline " + fmt(baseline_gap));
    }
    for (std::size_t i = 0; i < trajectory.projected_gap.size(); ++i) {
        const double value = trajectory.projected_gap[i];
        if (i > 0 && value > trajectory.projected_gap[i - 1] + kProjectionTol) {
            throw ValidationError("projection index " + std::to_string(i) + ": value " +
                                  fmt(value) + " rises above the previous value " +
                                  fmt(trajectory.projected_gap[i - 1]));
        }
        if (value < std::fmax(0.0, floor) - kProjectionTol) {
            throw ValidationError("projection index " + std::to_string(i) + ": value " +
                                  fmt(value) + " falls below the floor " +
                                  fmt(std::fmax(0.0, floor)));
        }
        if (value > baseline_gap + kProjectionTol) {
            throw ValidationError("projection index " + std::to_string(i) + ": value " +
                                  fmt(value) + " exceeds the baseline " + fmt(baseline_gap));
        }
    }
    return trajectory;
}

ProjectionTrajectory make_projection(const ProjectionSpec& spec, double baseline_gap,
                                     double p_final_value, const std::vector<int>& years) {
    validate_projection_spec(spec);
    if (spec.model == ProjectionModel::linear) {
        return linear_projection(baseline_gap, p_final_value, spec.horizon_years, years);
    }
    return exponential_projection(baseline_gap, p_final_value, spec.rate, years);
}

}  // namespace sarafina
