#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sarafina/core.hpp"

namespace sarafina {

/// Knobs for the diagnostics suite. All magnitudes must be positive;
/// consistency runs additionally require trials >= 100.
struct DiagnosticsConfig {
    double perturbation_delta = 1.0;       // points added/removed per resiliency probe
    double noise_sigma = 0.5;              // Gaussian noise scale, points
    int trials = 1000;                     // Monte Carlo replicates
    std::uint64_t seed = 0;                // master seed
    double manipulation_threshold = 1.0;   // flagged score rise, points per year
    int convergence_window = 3;            // years of running-mean drift examined
    double convergence_tol = 0.25;         // accepted drift, points
};

/// SplitMix64 stream used to derive independent per-replicate sub-seeds.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
};

/// Standard-normal draws that are bit-stable across platforms: mt19937_64
/// uniforms combined with the Irwin-Hall(12) transform (sum of twelve
/// uniforms minus 6). No libm calls, so results depend only on the engine.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}
    double next();

  private:
    std::mt19937_64 engine_;
};

struct ResiliencyRow {
    int year = 0;
    double max_change = 0.0;  // |final score shift| over the +/- delta probes
};

struct ResiliencyResult {
    std::vector<ResiliencyRow> per_year;
    double overall_max = 0.0;
};

/// Re-scores the series once per year with only that year's gap shifted by
/// +delta and -delta (clamped to (0, 100]) and reports the largest shift of
/// the final-year score.
ResiliencyResult resiliency(const GapSeries& series, const PolicyIntervention& policy,
                            const ProjectionTrajectory& projection, double delta,
                            ScoreAnchor anchor = ScoreAnchor::observed);

struct ConsistencyResult {
    double mean = 0.0;       // mean final-year score over the replicates
    double stddev = 0.0;     // sample standard deviation (n-1)
    double noiseless = 0.0;  // final-year score of the unperturbed run
    int trials = 0;
};

/// Monte Carlo noise study: every replicate adds independent zero-mean
/// Gaussian noise (sigma = config.noise_sigma) to each observed gap and
/// re-scores. Deterministic for a fixed seed.
ConsistencyResult consistency(const GapSeries& series, const PolicyIntervention& policy,
                              const ProjectionTrajectory& projection,
                              const DiagnosticsConfig& config,
                              ScoreAnchor anchor = ScoreAnchor::observed);

/// Flags every year whose score rose more than `threshold` points over the
/// previous year. Needs at least 2 rows.
std::vector<DiagnosticFlag> manipulation_flags(const ScoreReport& report, double threshold);

struct ConvergenceResult {
    bool converged = false;
    double limiting_estimate = 0.0;  // final running mean of the score
};

/// Converged when the running mean of the score moves less than `tol` across
/// the last `window` years. Needs at least window + 1 rows.
ConvergenceResult convergence_check(const ScoreReport& report, int window, double tol);

}  // namespace sarafina
