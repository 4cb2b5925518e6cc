#pragma once

#include <string>
#include <vector>

#include "sarafina/core.hpp"
#include "sarafina/projection.hpp"

namespace sarafina {

/// Parses observation CSV. Accepted headers:
///   year,men_pct,women_pct   (shares given, gap derived)
///   year,gap_pct             (gap given, shares back-filled symmetrically)
/// Rows are sorted by year; duplicate years are an error.
GapSeries parse_observations(const std::string& csv_text);

/// Canonical CSV form (year,men_pct,women_pct) of a series.
std::string to_csv(const GapSeries& series);

/// Training CSV: one column per indicator plus `realized_reduction_pct`
/// (percent, e.g. 2 for a 2% category). Column names are case-sensitive.
std::vector<TrainingRecord> parse_training_csv(const std::string& csv_text);

/// Query CSV: one column per indicator, one query per row.
std::vector<IndicatorVector> parse_query_csv(const std::string& csv_text);

/// Linear annual interpolation of the gap between observed years. Observed
/// rows are preserved exactly; interpolated rows are marked synthetic. Never
/// extrapolates beyond the endpoints.
GapSeries interpolate_annual(const GapSeries& series);

/// Embedded reference datasets ("brazil", "mexico").
GapSeries builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// A ready-to-score case study: series, policy, projection shape and the
/// scoring anchor convention it was published with.
struct CaseStudy {
    std::string name;
    GapSeries series;
    PolicyIntervention policy;
    ProjectionSpec projection;
    ScoreAnchor anchor = ScoreAnchor::baseline;
};

CaseStudy case_study(const std::string& name);
std::vector<std::string> case_study_names();

/// Deterministic JSON form of a report: insertion-ordered keys, numbers
/// rounded to at most 12 significant digits, schema_version 1.
std::string emit_report(const ScoreReport& report);

/// Inverse of emit_report.
ScoreReport parse_report(const std::string& json_text);

/// Static SVG 1.1 line chart of the observed gap and the Sarafina score.
/// Exactly two polyline elements carry the data series.
std::string emit_chart(const ScoreReport& report);

// Small file helpers shared by the CLI; failures raise IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sarafina
