#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sarafina/errors.hpp"

namespace sarafina {

// Tolerances used by the validators below.
inline constexpr double kShareSumTol = 1e-6;
inline constexpr double kGapConsistencyTol = 1e-9;

/// One yearly observation of asset ownership shares and the nominal gap
/// (men's share minus women's share, in percentage points).
struct GapObservation {
    int year = 0;
    double men_share = 0.0;
    double women_share = 0.0;
    double gap = 0.0;

    // Optional provenance carried through reports; never used in computation.
    std::optional<std::int64_t> sample_size;
    std::string source;
    bool synthetic = false;  // true for interpolated rows

    static GapObservation from_shares(int year, double men_share, double women_share);
    static GapObservation from_gap(int year, double gap);

    bool operator==(const GapObservation&) const = default;
};

/// An ordered yearly series of observations. Years strictly increase.
struct GapSeries {
    std::vector<GapObservation> observations;

    bool empty() const { return observations.empty(); }
    std::size_t size() const { return observations.size(); }
    int first_year() const { return observations.front().year; }
    int last_year() const { return observations.back().year; }

    // Index of the observation for `year`, or -1 when absent.
    int index_of(int year) const;

    bool operator==(const GapSeries&) const = default;
};

// Throws ValidationError naming the year and field of the first violation.
void validate_observation(const GapObservation& obs);

/// Validates every observation plus the series ordering; returns the series
/// unchanged so calls can be chained. Idempotent.
GapSeries validate_series(GapSeries series);

/// Gap stored for `year`; AlignmentError naming the year and the available
/// range when absent.
double gap_at(const GapSeries& series, int year);

/// The calendar years of a series, in order.
std::vector<int> series_years(const GapSeries& series);

/// A policy whose effect on the gap is being scored. `reduction_fraction` is
/// the fraction c of the baseline gap the policy is expected to remove.
/// `baseline_gap`, when set, overrides the default baseline (the observed gap
/// at the enactment year); used when the policy is credited against a
/// pre-enactment level.
struct PolicyIntervention {
    std::string name;
    int enactment_year = 0;
    double reduction_fraction = 0.0;
    int horizon_years = 10;
    std::optional<double> baseline_gap;
};

void validate_policy(const PolicyIntervention& policy);

/// Year-aligned projected nominal gap under a policy. Monotone
/// non-increasing, anchored at the enactment-year observation.
struct ProjectionTrajectory {
    std::vector<int> years;
    std::vector<double> projected_gap;

    std::size_t size() const { return years.size(); }
    // Index of `year` in the trajectory, or -1 when absent.
    int index_of(int year) const;
};

/// The discrete candidate reduction fractions a policy may achieve,
/// e.g. {0.02, 0.04, 0.06}. Strictly increasing, each in (0, 1].
struct ImprovementCategorySet {
    std::vector<double> fractions;

    std::size_t size() const { return fractions.size(); }
};

ImprovementCategorySet make_categories(std::vector<double> fractions);

/// Ordered (name, value) evidence vector. Names unique, values finite.
struct IndicatorVector {
    std::vector<std::pair<std::string, double>> values;

    std::size_t size() const { return values.size(); }
    std::optional<double> find(const std::string& name) const;
};

IndicatorVector make_indicators(std::vector<std::pair<std::string, double>> values);

/// One historical example: indicator evidence plus the reduction fraction the
/// policy actually realized.
struct TrainingRecord {
    IndicatorVector indicators;
    double realized_fraction = 0.0;
};

/// Which value the scored gap is measured against.
///   observed: each row scores against that year's observed gap.
///   baseline: every row scores against the policy baseline, so the score
///               moves only through the penalty (the case-study convention).
enum class ScoreAnchor { observed, baseline };

const char* to_string(ScoreAnchor anchor);
ScoreAnchor score_anchor_from_string(const std::string& text);

struct ScoreRow {
    int year = 0;
    double observed_gap = 0.0;
    double projected_gap = 0.0;
    double regret = 0.0;
    double penalty = 0.0;
    double policy_impact = 0.0;
    double sarafina_score = 0.0;

    bool operator==(const ScoreRow&) const = default;
};

struct DiagnosticFlag {
    int year = 0;
    std::string kind;
    std::string message;

    bool operator==(const DiagnosticFlag&) const = default;
};

/// Full per-year scoring output plus the run context needed to reproduce it.
struct ScoreReport {
    std::vector<ScoreRow> rows;
    std::vector<DiagnosticFlag> flags;

    std::string policy_name;
    int enactment_year = 0;
    double reduction_fraction = 0.0;
    int horizon_years = 0;
    double baseline_gap = 0.0;
    double p_final = 0.0;
    ScoreAnchor anchor = ScoreAnchor::observed;
};

}  // namespace sarafina
