#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sarafina/core.hpp"

namespace sarafina {

/// Per-indicator cut points splitting the real line into bins. A value lands
/// in the bin equal to the number of cut points <= it, so values outside the
/// training range fall into the nearest end bin.
struct BinScheme {
    // (indicator name, sorted cut points), in training-column order.
    std::vector<std::pair<std::string, std::vector<double>>> cuts;

    std::size_t indicator_count() const { return cuts.size(); }
    int index_of(const std::string& name) const;
    // Number of bins for the indicator at position `idx` (cuts + 1).
    int bin_count(std::size_t idx) const;
    int bin_of(std::size_t idx, double value) const;
};

/// Quantile cut points per indicator. Cut j (j = 1..B-1) is the training
/// value at sorted position floor(j*N/B), the first element of the upper
/// chunk, no interpolation. Duplicate cuts and cuts at the column minimum are
/// dropped, so a constant column collapses to a single bin.
BinScheme build_bins(const std::vector<TrainingRecord>& training, int bins_per_indicator);

/// Fitted naive-Bayes model over improvement categories.
struct LikelihoodModel {
    ImprovementCategorySet categories;
    std::vector<double> priors;  // aligned with categories.fractions
    BinScheme bins;
    // likelihoods[indicator][bin][category]
    std::vector<std::vector<std::vector<double>>> likelihoods;
    double smoothing = 1.0;
    std::vector<std::string> warnings;  // fit-time advisories, e.g. collinear indicators
};

/// Smoothed priors and per-(indicator, bin, category) likelihoods.
/// priors = (count_i + a) / (N + a*|C|); likelihoods analogously with the
/// effective bin count of each indicator. With `uniform_priors` the priors
/// are 1/|C| instead of the smoothed empirical counts.
LikelihoodModel fit(const std::vector<TrainingRecord>& training,
                    const ImprovementCategorySet& categories, const BinScheme& bins,
                    double smoothing = 1.0, bool uniform_priors = false);

/// Posterior probability per category (aligned with the model's category
/// order), normalized to sum 1. Accumulated in log space.
std::vector<double> posterior(const LikelihoodModel& model, const IndicatorVector& indicators);

/// Index of the maximum posterior; exact ties resolve to the smallest
/// category fraction.
std::size_t argmax_category(const std::vector<double>& posterior_probabilities);

/// The category fraction maximizing the posterior.
double estimate_category(const LikelihoodModel& model, const IndicatorVector& indicators);

/// Projected final gap reduction for a chosen category.
double estimate_p_final(double category_fraction, double baseline_gap);

/// The default proxy-indicator schema shipped with the tool. The estimator
/// accepts any indicator set; this is only a starting point.
const std::vector<std::string>& default_indicator_names();

/// Deterministic seeded train/holdout split; returns the fraction of held-out
/// records whose argmax category matches the realized one.
double holdout_accuracy(const std::vector<TrainingRecord>& training,
                        const ImprovementCategorySet& categories, int bins_per_indicator,
                        double smoothing, double holdout_fraction, std::uint64_t seed);

}  // namespace sarafina
