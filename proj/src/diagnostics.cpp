#include "sarafina/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "sarafina/metric.hpp"

namespace sarafina {

std::uint64_t SplitMix64::next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double GaussianSampler::next() {
    // Irwin-Hall(12): the sum of 12 U[0,1) draws has mean 6 and variance 1.
    double sum = 0.0;
    for (int i = 0; i < 12; ++i) {
        sum += static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    return sum - 6.0;
}

namespace {

// Rebuilds an observation around a shifted gap, keeping it inside (0, 100].
GapObservation with_gap(const GapObservation& original, double new_gap) {
    if (new_gap > 100.0) new_gap = 100.0;
    if (new_gap < 1e-12) new_gap = 1e-12;
    GapObservation obs = GapObservation::from_gap(original.year, new_gap);
    obs.sample_size = original.sample_size;
    obs.source = original.source;
    obs.synthetic = original.synthetic;
    return obs;
}

double final_score(const GapSeries& series, const PolicyIntervention& policy,
                   const ProjectionTrajectory& projection, ScoreAnchor anchor) {
    const ScoreReport report = score_series(series, policy, projection, anchor);
    return report.rows.back().sarafina_score;
}

}  // namespace

ResiliencyResult resiliency(const GapSeries& series, const PolicyIntervention& policy,
                            const ProjectionTrajectory& projection, double delta,
                            ScoreAnchor anchor) {
    if (delta < 0.0 || !std::isfinite(delta)) {
        throw DomainError("perturbation delta must be non-negative");
    }
    const double base = final_score(series, policy, projection, anchor);

    ResiliencyResult result;
    for (std::size_t i = 0; i < series.observations.size(); ++i) {
        double worst = 0.0;
        for (const double sign : {+1.0, -1.0}) {
            GapSeries perturbed = series;
            perturbed.observations[i] =
                with_gap(series.observations[i], series.observations[i].gap + sign * delta);
            const double shifted = final_score(perturbed, policy, projection, anchor);
            const double change = std::fabs(shifted - base);
            if (change > worst) worst = change;
        }
        result.per_year.push_back({series.observations[i].year, worst});
        if (worst > result.overall_max) result.overall_max = worst;
    }
    return result;
}

ConsistencyResult consistency(const GapSeries& series, const PolicyIntervention& policy,
                              const ProjectionTrajectory& projection,
                              const DiagnosticsConfig& config, ScoreAnchor anchor) {
    if (config.trials < 100) {
        throw DomainError("consistency needs at least 100 trials, got " +
                          std::to_string(config.trials));
    }
    if (config.noise_sigma < 0.0 || !std::isfinite(config.noise_sigma)) {
        throw DomainError("noise sigma must be non-negative");
    }

    ConsistencyResult result;
    result.trials = config.trials;
    result.noiseless = final_score(series, policy, projection, anchor);

    SplitMix64 seeder(config.seed);
    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(config.trials));
    for (int t = 0; t < config.trials; ++t) {
        GaussianSampler noise(seeder.next());
        GapSeries perturbed = series;
        for (std::size_t i = 0; i < perturbed.observations.size(); ++i) {
            const double shifted =
                series.observations[i].gap + config.noise_sigma * noise.next();
            perturbed.observations[i] = with_gap(series.observations[i], shifted);
        }
        scores.push_back(final_score(perturbed, policy, projection, anchor));
    }

    // Bit-identical replicates (e.g. sigma = 0) must report their common
    // value and a zero spread exactly; naive summation would smear both.
    bool all_identical = true;
    for (double s : scores) {
        if (s != scores.front()) {
            all_identical = false;
            break;
        }
    }
    if (all_identical) {
        result.mean = scores.front();
        result.stddev = 0.0;
        return result;
    }

    double sum = 0.0;
    for (double s : scores) sum += s;
    result.mean = sum / static_cast<double>(scores.size());
    double sq = 0.0;
    for (double s : scores) sq += (s - result.mean) * (s - result.mean);
    result.stddev = scores.size() > 1
        ? std::sqrt(sq / static_cast<double>(scores.size() - 1))
        : 0.0;
    return result;
}

std::vector<DiagnosticFlag> manipulation_flags(const ScoreReport& report, double threshold) {
    if (report.rows.size() < 2) {
        throw ValidationError("manipulation check needs at least 2 score rows");
    }
    if (threshold <= 0.0 || !std::isfinite(threshold)) {
        throw DomainError("manipulation threshold must be positive");
    }
    std::vector<DiagnosticFlag> flags;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const double jump = report.rows[i].sarafina_score - report.rows[i - 1].sarafina_score;
        if (jump > threshold) {
            DiagnosticFlag flag;
            flag.year = report.rows[i].year;
            flag.kind = "sharp_increase";
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "score rose %.4f points over the previous year (threshold %.4f)", jump,
                          threshold);
            flag.message = buf;
            flags.push_back(flag);
        }
    }
    return flags;
}

ConvergenceResult convergence_check(const ScoreReport& report, int window, double tol) {
    if (window < 1) {
        throw DomainError("convergence window must be >= 1");
    }
    if (tol <= 0.0 || !std::isfinite(tol)) {
        throw DomainError("convergence tolerance must be positive");
    }
    if (report.rows.size() < static_cast<std::size_t>(window) + 1) {
        throw ValidationError("convergence check needs at least window + 1 = " +
                              std::to_string(window + 1) + " score rows, got " +
                              std::to_string(report.rows.size()));
    }

    std::vector<double> running_mean;
    running_mean.reserve(report.rows.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        sum += report.rows[i].sarafina_score;
        running_mean.push_back(sum / static_cast<double>(i + 1));
    }

    const double drift = std::fabs(running_mean.back() -
                                   running_mean[running_mean.size() - 1 -
                                                static_cast<std::size_t>(window)]);
    ConvergenceResult result;
    result.converged = drift < tol;
    result.limiting_estimate = running_mean.back();
    return result;
}

}  // namespace sarafina
