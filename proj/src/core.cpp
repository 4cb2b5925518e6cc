#include "sarafina/core.hpp"

#include <cmath>
#include <sstream>

namespace sarafina {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

GapObservation GapObservation::from_shares(int year, double men_share, double women_share) {
    GapObservation obs;
    obs.year = year;
    obs.men_share = men_share;
    obs.women_share = women_share;
    obs.gap = men_share - women_share;
    return obs;
}

GapObservation GapObservation::from_gap(int year, double gap) {
    GapObservation obs;
    obs.year = year;
    obs.men_share = (100.0 + gap) / 2.0;
    obs.women_share = (100.0 - gap) / 2.0;
    obs.gap = gap;
    return obs;
}

int GapSeries::index_of(int year) const {
    for (std::size_t i = 0; i < observations.size(); ++i) {
        if (observations[i].year == year) return static_cast<int>(i);
    }
    return -1;
}

void validate_observation(const GapObservation& obs) {
    const std::string where = "year " + std::to_string(obs.year) + ": ";
    if (!std::isfinite(obs.men_share) || !std::isfinite(obs.women_share) ||
        !std::isfinite(obs.gap)) {
        throw ValidationError(where + "non-finite share or gap value");
    }
    const double sum = obs.men_share + obs.women_share;
    if (std::fabs(sum - 100.0) > kShareSumTol) {
        throw ValidationError(where + "shares sum to " + fmt(sum) + ", expected 100");
    }
    if (obs.men_share < 0.0 || obs.men_share > 100.0) {
        throw ValidationError(where + "men_share " + fmt(obs.men_share) + " outside [0, 100]");
    }
    if (obs.women_share < 0.0 || obs.women_share > 100.0) {
        throw ValidationError(where + "women_share " + fmt(obs.women_share) +
                              " outside [0, 100]");
    }
    const double expected = obs.men_share - obs.women_share;
    if (std::fabs(obs.gap - expected) > kGapConsistencyTol) {
        throw ValidationError(where + "gap " + fmt(obs.gap) +
                              " does not equal men_share - women_share = " + fmt(expected));
    }
    if (obs.gap < -100.0 || obs.gap > 100.0) {
        throw ValidationError(where + "gap " + fmt(obs.gap) + " outside [-100, 100]");
    }
}

GapSeries validate_series(GapSeries series) {
    if (series.observations.empty()) {
        throw ValidationError("series is empty");
    }
    int previous_year = 0;
    bool first = true;
    for (const GapObservation& obs : series.observations) {
        validate_observation(obs);
        if (!first && obs.year <= previous_year) {
            throw ValidationError("year " + std::to_string(obs.year) +
                                  ": years must be strictly increasing (previous year " +
                                  std::to_string(previous_year) + ")");
        }
        previous_year = obs.year;
        first = false;
    }
    return series;
}

double gap_at(const GapSeries& series, int year) {
    const int idx = series.index_of(year);
    if (idx < 0) {
        std::string available = series.empty()
            ? "none"
            : std::to_string(series.first_year()) + ".." + std::to_string(series.last_year());
        throw AlignmentError("year " + std::to_string(year) +
                             " not present in series (available: " + available + ")");
    }
    return series.observations[static_cast<std::size_t>(idx)].gap;
}

std::vector<int> series_years(const GapSeries& series) {
    std::vector<int> years;
    years.reserve(series.observations.size());
    for (const GapObservation& obs : series.observations) {
        years.push_back(obs.year);
    }
    return years;
}

void validate_policy(const PolicyIntervention& policy) {
    if (policy.reduction_fraction < 0.0 || policy.reduction_fraction > 1.0) {
        throw DomainError("reduction_fraction " + fmt(policy.reduction_fraction) +
                          " outside [0, 1]");
    }
    if (policy.horizon_years < 1) {
        throw DomainError("horizon_years must be >= 1, got " +
                          std::to_string(policy.horizon_years));
    }
    if (policy.baseline_gap && (*policy.baseline_gap <= 0.0 || *policy.baseline_gap > 100.0)) {
        throw DomainError("baseline_gap " + fmt(*policy.baseline_gap) + " outside (0, 100]");
    }
}

int ProjectionTrajectory::index_of(int year) const {
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (years[i] == year) return static_cast<int>(i);
    }
    return -1;
}

ImprovementCategorySet make_categories(std::vector<double> fractions) {
    if (fractions.empty()) {
        throw ValidationError("category set is empty");
    }
    double previous = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0) || f > 1.0) {
            throw ValidationError("category fraction " + fmt(f) + " outside (0, 1]");
        }
        if (f <= previous) {
            throw ValidationError("category fractions must be distinct and strictly increasing");
        }
        previous = f;
    }
    return ImprovementCategorySet{std::move(fractions)};
}

std::optional<double> IndicatorVector::find(const std::string& name) const {
    for (const auto& [key, value] : values) {
        if (key == name) return value;
    }
    return std::nullopt;
}

IndicatorVector make_indicators(std::vector<std::pair<std::string, double>> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i].second)) {
            throw ValidationError("indicator '" + values[i].first + "' has non-finite value");
        }
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            if (values[i].first == values[j].first) {
                throw ValidationError("duplicate indicator name '" + values[i].first + "'");
            }
        }
    }
    return IndicatorVector{std::move(values)};
}

const char* to_string(ScoreAnchor anchor) {
    return anchor == ScoreAnchor::observed ? "observed" : "baseline";
}

ScoreAnchor score_anchor_from_string(const std::string& text) {
    if (text == "observed") return ScoreAnchor::observed;
    if (text == "baseline") return ScoreAnchor::baseline;
    throw ConfigError("unknown score anchor '" + text + "' (expected observed or baseline)");
}

}  // namespace sarafina
