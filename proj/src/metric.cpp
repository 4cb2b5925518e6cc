#include "sarafina/metric.hpp"

#include <cmath>
#include <sstream>

namespace sarafina {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_percent(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0 || value > 100.0) {
        throw DomainError(std::string(name) + " " + fmt(value) + " outside [0, 100]");
    }
}

}  // namespace

double regret(double observed_gap, double projected_gap) {
    require_percent(observed_gap, "observed_gap");
    require_percent(projected_gap, "projected_gap");
    return std::fabs(observed_gap - projected_gap);
}

double p_final(double reduction_fraction, double baseline_gap) {
    if (!std::isfinite(reduction_fraction) || reduction_fraction < 0.0 ||
        reduction_fraction > 1.0) {
        throw DomainError("reduction_fraction " + fmt(reduction_fraction) + " outside [0, 1]");
    }
    if (!std::isfinite(baseline_gap) || baseline_gap <= 0.0 || baseline_gap > 100.0) {
        throw DomainError("baseline_gap " + fmt(baseline_gap) + " outside (0, 100]");
    }
    return reduction_fraction * baseline_gap;
}

double policy_impact(double p_final_value, double penalty_value) {
    if (!std::isfinite(penalty_value) || penalty_value < 0.0 || penalty_value > 1.0) {
        throw DomainError("penalty " + fmt(penalty_value) + " outside [0, 1]");
    }
    if (!std::isfinite(p_final_value) || p_final_value < 0.0) {
        throw DomainError("p_final " + fmt(p_final_value) + " must be non-negative");
    }
    return p_final_value * (1.0 - penalty_value);
}

double sarafina_score(double observed_gap, double policy_impact_value) {
    require_percent(observed_gap, "observed_gap");
    if (!std::isfinite(policy_impact_value) || policy_impact_value < 0.0) {
        throw DomainError("policy_impact " + fmt(policy_impact_value) + " must be non-negative");
    }
    if (policy_impact_value > observed_gap) {
        throw DomainError("policy_impact " + fmt(policy_impact_value) + " exceeds observed_gap " +
                          fmt(observed_gap) + "; cannot score below a fully closed gap");
    }
    return observed_gap - policy_impact_value;
}

void PenaltyAccumulator::add_step(double observed_gap, double projected_gap) {
    if (observed_gap < 0.0) {
        throw DomainError("observed_gap " + fmt(observed_gap) + " is negative");
    }
    double term;
    if (observed_gap == 0.0) {
        // A closed gap: no penalty when the projection agrees, maximal
        // relative miss when it does not.
        term = (regret(observed_gap, projected_gap) == 0.0) ? 0.0 : 1.0;
    } else {
        term = regret(observed_gap, projected_gap) / observed_gap;
        if (term > 1.0) term = 1.0;
        if (term < 0.0) term = 0.0;
    }
    terms_.push_back(term);
    sum_ += term;
}

double PenaltyAccumulator::value() const {
    if (terms_.empty()) return 0.0;
    double mean = sum_ / static_cast<double>(terms_.size());
    if (mean > 1.0) mean = 1.0;
    if (mean < 0.0) mean = 0.0;
    return mean;
}

namespace {

// Looks up aligned observation/projection values for one scoring year.
struct AlignedYear {
    double observed;
    double projected;
};

AlignedYear aligned_values(const GapSeries& series, const ProjectionTrajectory& projection,
                           int year) {
    const int series_idx = series.index_of(year);
    if (series_idx < 0) {
        throw AlignmentError("observation missing for year " + std::to_string(year) +
                             "; interpolate the series to annual resolution first");
    }
    const int proj_idx = projection.index_of(year);
    if (proj_idx < 0) {
        throw AlignmentError("projection does not cover year " + std::to_string(year));
    }
    return {series.observations[static_cast<std::size_t>(series_idx)].gap,
            projection.projected_gap[static_cast<std::size_t>(proj_idx)]};
}

}  // namespace

double penalty(const GapSeries& series, const ProjectionTrajectory& projection, int upto_year) {
    if (projection.years.empty()) {
        throw AlignmentError("projection is empty");
    }
    const int enactment_year = projection.years.front();
    if (upto_year < enactment_year) {
        throw AlignmentError("upto_year " + std::to_string(upto_year) +
                             " precedes the enactment year " + std::to_string(enactment_year));
    }
    PenaltyAccumulator acc;
    for (int year = enactment_year + 1; year <= upto_year; ++year) {
        const AlignedYear v = aligned_values(series, projection, year);
        acc.add_step(v.observed, v.projected);
    }
    return acc.value();
}

ScoreReport score_series(const GapSeries& series, const PolicyIntervention& policy,
                         const ProjectionTrajectory& projection, ScoreAnchor anchor) {
    validate_policy(policy);
    const GapSeries checked = validate_series(series);
    if (projection.years.empty() || projection.years.front() != policy.enactment_year) {
        throw AlignmentError("projection must start at the enactment year " +
                             std::to_string(policy.enactment_year));
    }
    if (checked.last_year() < policy.enactment_year) {
        throw AlignmentError("series ends before the enactment year " +
                             std::to_string(policy.enactment_year));
    }

    const double baseline =
        policy.baseline_gap ? *policy.baseline_gap : gap_at(checked, policy.enactment_year);
    const double p_final_value = p_final(policy.reduction_fraction, baseline);

    ScoreReport report;
    report.policy_name = policy.name;
    report.enactment_year = policy.enactment_year;
    report.reduction_fraction = policy.reduction_fraction;
    report.horizon_years = policy.horizon_years;
    report.baseline_gap = baseline;
    report.p_final = p_final_value;
    report.anchor = anchor;

    PenaltyAccumulator acc;
    for (int year = policy.enactment_year; year <= checked.last_year(); ++year) {
        const AlignedYear v = aligned_values(checked, projection, year);
        if (v.observed <= 0.0) {
            throw DomainError("observed gap " + std::to_string(v.observed) + " at year " +
                              std::to_string(year) + " is not positive; cannot score");
        }
        if (year > policy.enactment_year) {
            acc.add_step(v.observed, v.projected);
        }
        ScoreRow row;
        row.year = year;
        row.observed_gap = v.observed;
        row.projected_gap = v.projected;
        row.regret = regret(v.observed, v.projected);
        row.penalty = acc.value();
        row.policy_impact = policy_impact(p_final_value, row.penalty);
        const double minuend = (anchor == ScoreAnchor::observed) ? v.observed : baseline;
        row.sarafina_score = sarafina_score(minuend, row.policy_impact);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace sarafina
