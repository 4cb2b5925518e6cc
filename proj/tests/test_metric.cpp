#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sarafina/metric.hpp"
#include "sarafina/projection.hpp"

using namespace sarafina;

namespace {

GapSeries series_from_gaps(int first_year, const std::vector<double>& gaps) {
    GapSeries series;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        series.observations.push_back(
            GapObservation::from_gap(first_year + static_cast<int>(i), gaps[i]));
    }
    return series;
}

ProjectionTrajectory trajectory_from(int first_year, const std::vector<double>& values) {
    ProjectionTrajectory trajectory;
    for (std::size_t i = 0; i < values.size(); ++i) {
        trajectory.years.push_back(first_year + static_cast<int>(i));
        trajectory.projected_gap.push_back(values[i]);
    }
    return trajectory;
}

}  // namespace

TEST_CASE("regret is the absolute miss") {
    CHECK(regret(78.58, 78.58) == 0.0);
    CHECK(regret(70.42, 59.7) == doctest::Approx(10.72).epsilon(1e-12));
    CHECK(regret(76.0, 74.0) == 2.0);
    CHECK(regret(74.0, 76.0) == 2.0);
    CHECK_THROWS_AS(regret(-1.0, 50.0), DomainError);
    CHECK_THROWS_AS(regret(50.0, 101.0), DomainError);
}

TEST_CASE("p_final scales the baseline by the reduction fraction") {
    CHECK(p_final(0.25, 79.6) == doctest::Approx(19.9).epsilon(1e-14));
    CHECK(p_final(0.0, 79.6) == 0.0);
    CHECK(p_final(0.25, 74.0) == doctest::Approx(18.5).epsilon(1e-14));
    CHECK_THROWS_AS(p_final(1.2, 50.0), DomainError);
    CHECK_THROWS_AS(p_final(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(p_final(0.5, 120.0), DomainError);
}

TEST_CASE("policy impact discounts p_final by the penalty") {
    CHECK(policy_impact(19.9, 0.0) == 19.9);
    CHECK(policy_impact(19.9, 1.0) == 0.0);
    CHECK(policy_impact(19.9, 0.2) == doctest::Approx(15.92).epsilon(1e-12));
    CHECK_THROWS_AS(policy_impact(19.9, 1.2), DomainError);
    CHECK_THROWS_AS(policy_impact(-1.0, 0.2), DomainError);
}

TEST_CASE("sarafina score subtracts the impact from the gap") {
    CHECK(sarafina_score(79.6, 19.9) == doctest::Approx(59.7).epsilon(1e-12));
    CHECK(sarafina_score(79.6, 0.0) == 79.6);
    CHECK(sarafina_score(78.58, 18.73) == doctest::Approx(59.85).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(sarafina_score(10.0, 19.9), doctest::Contains("exceeds"), DomainError);
}

TEST_CASE("penalty is zero with no regret and at the enactment year") {
    const GapSeries series = series_from_gaps(2000, {80.0, 78.0, 76.0});
    const ProjectionTrajectory projection = trajectory_from(2000, {80.0, 78.0, 76.0});
    CHECK(penalty(series, projection, 2000) == 0.0);
    CHECK(penalty(series, projection, 2002) == 0.0);
}

TEST_CASE("penalty averages the relative regrets") {
    const GapSeries series = series_from_gaps(2000, {80.0, 78.0, 76.0});
    const ProjectionTrajectory projection = trajectory_from(2000, {80.0, 77.0, 74.0});

    const double expected = (1.0 / 78.0 + 2.0 / 76.0) / 2.0;
    CHECK(penalty(series, projection, 2002) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(penalty(series, projection, 2002) == doctest::Approx(0.0195682).epsilon(1e-5));
    // mid-window value: only the first step counts
    CHECK(penalty(series, projection, 2001) == doctest::Approx(1.0 / 78.0).epsilon(1e-15));
}

TEST_CASE("a half-gap regret on a single step yields 0.5") {
    const GapSeries series = series_from_gaps(2000, {80.0, 60.0});
    const ProjectionTrajectory projection = trajectory_from(2000, {80.0, 30.0});
    CHECK(penalty(series, projection, 2001) == 0.5);
}

TEST_CASE("closed gaps contribute no penalty unless the projection missed") {
    const GapSeries agreed = series_from_gaps(2000, {50.0, 0.0});
    CHECK(penalty(agreed, trajectory_from(2000, {50.0, 0.0}), 2001) == 0.0);
    CHECK(penalty(agreed, trajectory_from(2000, {50.0, 10.0}), 2001) == 1.0);
}

TEST_CASE("penalty terms are clamped to one") {
    // projection far above the observed band
    const GapSeries series = series_from_gaps(2000, {10.0, 10.0});
    const ProjectionTrajectory projection = trajectory_from(2000, {10.0, 90.0});
    CHECK(penalty(series, projection, 2001) == 1.0);
}

TEST_CASE("penalty reports misalignment") {
    const GapSeries series = series_from_gaps(2000, {80.0, 78.0});
    const ProjectionTrajectory projection = trajectory_from(2000, {80.0, 78.0});
    CHECK_THROWS_AS(penalty(series, projection, 1999), AlignmentError);
    CHECK_THROWS_WITH_AS(penalty(series, projection, 2005), doctest::Contains("2002"),
                         AlignmentError);

    GapSeries sparse;
    sparse.observations = {GapObservation::from_gap(2000, 80.0),
                           GapObservation::from_gap(2002, 76.0)};
    const ProjectionTrajectory covering = trajectory_from(2000, {80.0, 78.0, 76.0});
    CHECK_THROWS_AS(penalty(sparse, covering, 2002), AlignmentError);
}

TEST_CASE("negative observed gaps are rejected by the accumulator") {
    PenaltyAccumulator acc;
    CHECK_THROWS_AS(acc.add_step(-5.0, 3.0), DomainError);
}

TEST_CASE("penalty accumulator keeps terms in range and averages them") {
    PenaltyAccumulator acc;
    CHECK(acc.value() == 0.0);
    acc.add_step(80.0, 78.0);
    acc.add_step(80.0, 40.0);
    REQUIRE(acc.terms().size() == 2);
    for (double term : acc.terms()) {
        CHECK(term >= 0.0);
        CHECK(term <= 1.0);
    }
    CHECK(acc.value() == doctest::Approx((2.0 / 80.0 + 40.0 / 80.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("score series reproduces the case-study opening row") {
    // series anchored at 79.6 falling to 70.42 over nine years
    std::vector<double> gaps;
    for (int k = 0; k <= 9; ++k) {
        gaps.push_back(79.6 + (70.42 - 79.6) * static_cast<double>(k) / 9.0);
    }
    const GapSeries series = series_from_gaps(2008, gaps);
    const PolicyIntervention policy{"case", 2008, 0.25, 10, std::nullopt};
    const ProjectionTrajectory projection =
        linear_projection(79.6, p_final(0.25, 79.6), 10, series_years(series));

    const ScoreReport report = score_series(series, policy, projection);
    REQUIRE(report.rows.size() == 10);
    CHECK(report.rows.front().year == 2008);
    CHECK(report.rows.front().sarafina_score == doctest::Approx(59.7).epsilon(1e-10));
    CHECK(report.flags.empty());
}

TEST_CASE("projection equal to observations gives score = gap - p_final everywhere") {
    const std::vector<double> gaps = {70.0, 68.0, 66.5, 66.0};
    const GapSeries series = series_from_gaps(1990, gaps);
    const ProjectionTrajectory projection = trajectory_from(1990, gaps);
    const PolicyIntervention policy{"ideal", 1990, 0.3, 10, std::nullopt};

    const ScoreReport report = score_series(series, policy, projection);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].penalty == 0.0);
        CHECK(report.rows[i].sarafina_score ==
              doctest::Approx(gaps[i] - 0.3 * 70.0).epsilon(1e-12));
    }
}

TEST_CASE("null policies leave the score equal to the observed gap") {
    const std::vector<double> gaps = {70.0, 64.0, 61.0};
    const GapSeries series = series_from_gaps(1990, gaps);
    const ProjectionTrajectory projection = trajectory_from(1990, {70.0, 69.0, 68.0});
    const PolicyIntervention policy{"null", 1990, 0.0, 10, std::nullopt};

    const ScoreReport report = score_series(series, policy, projection);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].sarafina_score == gaps[i]);
    }
}

TEST_CASE("three-step derived scenario matches the hand computation") {
    const GapSeries series = series_from_gaps(2000, {80.0, 78.0, 76.0});
    const ProjectionTrajectory projection = trajectory_from(2000, {80.0, 77.0, 74.0});
    const PolicyIntervention policy{"derived", 2000, 0.25, 10, std::nullopt};

    const ScoreReport report = score_series(series, policy, projection);
    REQUIRE(report.rows.size() == 3);
    const double phi = (1.0 / 78.0 + 2.0 / 76.0) / 2.0;
    CHECK(report.rows[2].sarafina_score ==
          doctest::Approx(76.0 - 20.0 * (1.0 - phi)).epsilon(1e-14));
    CHECK(report.rows[2].sarafina_score == doctest::Approx(56.391).epsilon(1e-4));
}

TEST_CASE("baseline anchoring scores against the enactment-level gap") {
    const GapSeries series = series_from_gaps(2000, {80.0, 78.0, 76.0});
    const ProjectionTrajectory projection = trajectory_from(2000, {80.0, 77.0, 74.0});
    const PolicyIntervention policy{"anchored", 2000, 0.25, 10, std::nullopt};

    const ScoreReport report =
        score_series(series, policy, projection, ScoreAnchor::baseline);
    for (const ScoreRow& row : report.rows) {
        CHECK(row.sarafina_score == doctest::Approx(80.0 - row.policy_impact).epsilon(1e-14));
        CHECK(row.sarafina_score >= 80.0 - report.p_final - 1e-12);
        CHECK(row.sarafina_score <= 80.0 + 1e-12);
    }
    // both anchors agree on the enactment row
    const ScoreReport observed = score_series(series, policy, projection);
    CHECK(report.rows[0].sarafina_score == observed.rows[0].sarafina_score);
}

TEST_CASE("an explicit policy baseline overrides the enactment observation") {
    const GapSeries series = series_from_gaps(2000, {60.0, 59.0});
    const ProjectionTrajectory projection = trajectory_from(2000, {60.0, 59.5});
    PolicyIntervention policy{"override", 2000, 0.25, 10, 70.0};

    const ScoreReport report = score_series(series, policy, projection);
    CHECK(report.baseline_gap == 70.0);
    CHECK(report.p_final == doctest::Approx(17.5).epsilon(1e-14));
}

TEST_CASE("score series validates alignment and positivity") {
    const GapSeries series = series_from_gaps(2000, {80.0, 78.0});
    const ProjectionTrajectory projection = trajectory_from(2001, {78.0, 76.0});
    const PolicyIntervention policy{"p", 2000, 0.25, 10, std::nullopt};
    CHECK_THROWS_AS(score_series(series, policy, projection), AlignmentError);

    GapSeries with_nonpositive = series_from_gaps(2000, {80.0, 78.0});
    with_nonpositive.observations[1] = GapObservation::from_shares(2001, 50.0, 50.0);
    const ProjectionTrajectory aligned = trajectory_from(2000, {80.0, 78.0});
    CHECK_THROWS_AS(score_series(with_nonpositive, policy, aligned), DomainError);
}

TEST_CASE("score series matches the brute-force oracle on random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> baseline_dist(30.0, 95.0);
    std::uniform_real_distribution<double> fraction_dist(0.0, 0.5);
    std::uniform_real_distribution<double> wiggle(-1.5, 1.2);
    std::uniform_int_distribution<int> horizon_dist(1, 14);

    for (int instance = 0; instance < 200; ++instance) {
        const double baseline = baseline_dist(rng);
        const double fraction = fraction_dist(rng);
        std::vector<double> observed{baseline};
        for (int k = 1; k < 10; ++k) {
            double g = observed.back() + wiggle(rng);
            if (g < baseline * 0.6) g = baseline * 0.6;
            if (g > 99.0) g = 99.0;
            observed.push_back(g);
        }
        const GapSeries series = series_from_gaps(1990, observed);
        const ProjectionTrajectory projection = linear_projection(
            baseline, fraction * baseline, horizon_dist(rng), series_years(series));
        const PolicyIntervention policy{"fuzz", 1990, fraction, 10, std::nullopt};

        for (const bool anchored : {false, true}) {
            const ScoreReport report = score_series(
                series, policy, projection,
                anchored ? ScoreAnchor::baseline : ScoreAnchor::observed);
            const std::vector<oracle::ScoreRow> expected = oracle::score_rows(
                observed, projection.projected_gap, fraction, baseline, anchored);
            REQUIRE(report.rows.size() == expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) {
                CHECK(std::fabs(report.rows[i].regret - expected[i].regret) < 1e-12);
                CHECK(std::fabs(report.rows[i].penalty - expected[i].penalty) < 1e-12);
                CHECK(std::fabs(report.rows[i].policy_impact - expected[i].impact) < 1e-12);
                CHECK(std::fabs(report.rows[i].sarafina_score - expected[i].score) < 1e-12);

                const ScoreRow& row = report.rows[i];
                CHECK(row.penalty >= 0.0);
                CHECK(row.penalty <= 1.0);
                CHECK(row.policy_impact >= 0.0);
                CHECK(row.policy_impact <= report.p_final + 1e-12);
                if (!anchored) {
                    CHECK(row.sarafina_score >= row.observed_gap - report.p_final - 1e-12);
                    CHECK(row.sarafina_score <= row.observed_gap + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("shifting every calendar year leaves all values unchanged") {
    const std::vector<double> gaps = {82.0, 80.5, 79.9, 77.0, 75.5};
    const GapSeries series = series_from_gaps(2000, gaps);
    const GapSeries shifted = series_from_gaps(2137, gaps);
    const PolicyIntervention policy{"p", 2000, 0.2, 6, std::nullopt};
    const PolicyIntervention shifted_policy{"p", 2137, 0.2, 6, std::nullopt};
    const ProjectionTrajectory projection =
        linear_projection(82.0, p_final(0.2, 82.0), 6, series_years(series));
    const ProjectionTrajectory shifted_projection =
        linear_projection(82.0, p_final(0.2, 82.0), 6, series_years(shifted));

    const ScoreReport a = score_series(series, policy, projection);
    const ScoreReport b = score_series(shifted, shifted_policy, shifted_projection);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].regret == b.rows[i].regret);
        CHECK(a.rows[i].penalty == b.rows[i].penalty);
        CHECK(a.rows[i].policy_impact == b.rows[i].policy_impact);
        CHECK(a.rows[i].sarafina_score == b.rows[i].sarafina_score);
    }
}

TEST_CASE("constant gap with a strictly falling projection accumulates penalty") {
    std::vector<double> observed(8, 70.0);
    std::vector<double> projected;
    for (int k = 0; k < 8; ++k) projected.push_back(70.0 - 2.5 * k);
    const GapSeries series = series_from_gaps(2000, observed);
    const ProjectionTrajectory projection = trajectory_from(2000, projected);

    double previous = -1.0;
    for (int year = 2000; year <= 2007; ++year) {
        const double phi = penalty(series, projection, year);
        CHECK(phi >= previous);
        CHECK(phi >= 0.0);
        CHECK(phi <= 1.0);
        previous = phi;
    }
}
