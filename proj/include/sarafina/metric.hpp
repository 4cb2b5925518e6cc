#pragma once

#include <vector>

#include "sarafina/core.hpp"

namespace sarafina {

/// Absolute miss between observed and projected nominal gap, in points.
/// Both inputs must lie in [0, 100].
double regret(double observed_gap, double projected_gap);

/// Projected final reduction of the gap: reduction_fraction * baseline_gap.
double p_final(double reduction_fraction, double baseline_gap);

/// P_final discounted by the penalty: p_final_value * (1 - penalty_value).
double policy_impact(double p_final_value, double penalty_value);

/// Nominal gap minus the policy impact. The impact may not exceed the gap.
double sarafina_score(double observed_gap, double policy_impact_value);

/// Running cumulative relative-regret penalty. One term per year after
/// enactment: clamp(regret / observed_gap, 0, 1), with the zero-gap rule
/// (term 0 when the regret is also 0, else 1). The penalty is the arithmetic
/// mean of the accumulated terms, 0 while empty; always in [0, 1].
class PenaltyAccumulator {
  public:
    void add_step(double observed_gap, double projected_gap);
    double value() const;
    const std::vector<double>& terms() const { return terms_; }

  private:
    std::vector<double> terms_;
    double sum_ = 0.0;
};

/// Penalty over the years (enactment, upto_year], where the enactment year is
/// the first year of `projection`. The enactment year itself contributes no
/// term, so penalty(..., enactment_year) == 0.
double penalty(const GapSeries& series, const ProjectionTrajectory& projection, int upto_year);

/// Scores every year from the policy enactment through the last observed
/// year. The series must hold one observation per year in that range and the
/// projection must cover the same years. `anchor` selects the minuend of each
/// row's score: the row's observed gap (default) or the policy baseline.
ScoreReport score_series(const GapSeries& series, const PolicyIntervention& policy,
                         const ProjectionTrajectory& projection,
                         ScoreAnchor anchor = ScoreAnchor::observed);

}  // namespace sarafina
