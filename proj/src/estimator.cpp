#include "sarafina/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sarafina/metric.hpp"

namespace sarafina {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Index of `fraction` in the category set, matched within 1e-12 so values
// arriving via different parse paths still land on their category.
int category_index(const ImprovementCategorySet& categories, double fraction) {
    for (std::size_t i = 0; i < categories.fractions.size(); ++i) {
        if (std::fabs(categories.fractions[i] - fraction) <= 1e-12) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

void check_training_indicators(const std::vector<TrainingRecord>& training) {
    if (training.empty()) {
        throw ValidationError("training set is empty");
    }
    const IndicatorVector& first = training.front().indicators;
    for (std::size_t r = 1; r < training.size(); ++r) {
        const IndicatorVector& iv = training[r].indicators;
        if (iv.size() != first.size()) {
            throw ValidationError("training record " + std::to_string(r) +
                                  " has a different indicator count");
        }
        for (const auto& [name, value] : first.values) {
            (void)value;
            if (!iv.find(name)) {
                throw ValidationError("training record " + std::to_string(r) +
                                      " is missing indicator '" + name + "'");
            }
        }
    }
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;  // constant column, correlation undefined
    return cov / std::sqrt(va * vb);
}

}  // namespace

int BinScheme::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i].first == name) return static_cast<int>(i);
    }
    return -1;
}

int BinScheme::bin_count(std::size_t idx) const {
    return static_cast<int>(cuts[idx].second.size()) + 1;
}

int BinScheme::bin_of(std::size_t idx, double value) const {
    const std::vector<double>& c = cuts[idx].second;
    return static_cast<int>(std::upper_bound(c.begin(), c.end(), value) - c.begin());
}

BinScheme build_bins(const std::vector<TrainingRecord>& training, int bins_per_indicator) {
    if (training.empty()) {
        throw ValidationError("training set is empty");
    }
    if (bins_per_indicator < 2) {
        throw DomainError("bins_per_indicator must be >= 2, got " +
                          std::to_string(bins_per_indicator));
    }
    check_training_indicators(training);

    BinScheme scheme;
    for (const auto& [name, unused] : training.front().indicators.values) {
        (void)unused;
        std::vector<double> column;
        column.reserve(training.size());
        for (const TrainingRecord& record : training) {
            column.push_back(*record.indicators.find(name));
        }
        std::sort(column.begin(), column.end());
        const std::size_t n = column.size();

        std::vector<double> cuts;
        for (int j = 1; j < bins_per_indicator; ++j) {
            std::size_t idx = (static_cast<std::size_t>(j) * n) /
                              static_cast<std::size_t>(bins_per_indicator);
            if (idx >= n) idx = n - 1;
            cuts.push_back(column[idx]);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        // A cut at the column minimum would leave an empty bottom bin.
        while (!cuts.empty() && cuts.front() <= column.front()) {
            cuts.erase(cuts.begin());
        }
        scheme.cuts.emplace_back(name, std::move(cuts));
    }
    return scheme;
}

LikelihoodModel fit(const std::vector<TrainingRecord>& training,
                    const ImprovementCategorySet& categories, const BinScheme& bins,
                    double smoothing, bool uniform_priors) {
    if (training.empty()) {
        throw ValidationError("training set is empty");
    }
    if (!(smoothing > 0.0) || !std::isfinite(smoothing)) {
        throw DomainError("smoothing must be positive, got " + fmt(smoothing));
    }
    check_training_indicators(training);

    const std::size_t category_count = categories.size();
    const std::size_t indicator_count = bins.indicator_count();

    std::vector<double> class_counts(category_count, 0.0);
    // bin_counts[indicator][bin][category]
    std::vector<std::vector<std::vector<double>>> bin_counts(indicator_count);
    for (std::size_t i = 0; i < indicator_count; ++i) {
        bin_counts[i].assign(static_cast<std::size_t>(bins.bin_count(i)),
                             std::vector<double>(category_count, 0.0));
    }

    for (std::size_t r = 0; r < training.size(); ++r) {
        const TrainingRecord& record = training[r];
        const int cat = category_index(categories, record.realized_fraction);
        if (cat < 0) {
            throw ValidationError("training record " + std::to_string(r) +
                                  ": realized fraction " + fmt(record.realized_fraction) +
                                  " is not a member of the category set");
        }
        class_counts[static_cast<std::size_t>(cat)] += 1.0;
        for (std::size_t i = 0; i < indicator_count; ++i) {
            const std::string& name = bins.cuts[i].first;
            const auto value = record.indicators.find(name);
            if (!value) {
                throw ValidationError("training record " + std::to_string(r) +
                                      " is missing indicator '" + name + "'");
            }
            const int b = bins.bin_of(i, *value);
            bin_counts[i][static_cast<std::size_t>(b)][static_cast<std::size_t>(cat)] += 1.0;
        }
    }

    LikelihoodModel model;
    model.categories = categories;
    model.bins = bins;
    model.smoothing = smoothing;

    const double total = static_cast<double>(training.size());
    model.priors.resize(category_count);
    for (std::size_t c = 0; c < category_count; ++c) {
        model.priors[c] = uniform_priors
            ? 1.0 / static_cast<double>(category_count)
            : (class_counts[c] + smoothing) /
                  (total + smoothing * static_cast<double>(category_count));
    }

    model.likelihoods.resize(indicator_count);
    for (std::size_t i = 0; i < indicator_count; ++i) {
        const double effective_bins = static_cast<double>(bins.bin_count(i));
        model.likelihoods[i].assign(static_cast<std::size_t>(bins.bin_count(i)),
                                    std::vector<double>(category_count, 0.0));
        for (std::size_t b = 0; b < model.likelihoods[i].size(); ++b) {
            for (std::size_t c = 0; c < category_count; ++c) {
                model.likelihoods[i][b][c] = (bin_counts[i][b][c] + smoothing) /
                                             (class_counts[c] + smoothing * effective_bins);
            }
        }
    }

    // The factorization treats indicators as independent evidence; flag pairs
    // that move in lockstep so users can prune them.
    for (std::size_t i = 0; i < indicator_count; ++i) {
        for (std::size_t j = i + 1; j < indicator_count; ++j) {
            std::vector<double> col_i, col_j;
            col_i.reserve(training.size());
            col_j.reserve(training.size());
            for (const TrainingRecord& record : training) {
                col_i.push_back(*record.indicators.find(bins.cuts[i].first));
                col_j.push_back(*record.indicators.find(bins.cuts[j].first));
            }
            const double r = pearson(col_i, col_j);
            if (std::fabs(r) > 0.95) {
                model.warnings.push_back("indicators '" + bins.cuts[i].first + "' and '" +
                                         bins.cuts[j].first + "' are strongly correlated (r=" +
                                         fmt(r) + "); the independence assumption is strained");
            }
        }
    }
    return model;
}

std::vector<double> posterior(const LikelihoodModel& model, const IndicatorVector& indicators) {
    const std::size_t category_count = model.categories.size();
    if (category_count == 0 || model.priors.size() != category_count) {
        throw ValidationError("model has no categories");
    }
    if (indicators.size() != model.bins.indicator_count()) {
        throw ValidationError("query has " + std::to_string(indicators.size()) +
                              " indicators, model expects " +
                              std::to_string(model.bins.indicator_count()));
    }
    for (const auto& [name, value] : indicators.values) {
        (void)value;
        if (model.bins.index_of(name) < 0) {
            throw ValidationError("unknown indicator '" + name + "'");
        }
    }

    std::vector<double> log_scores(category_count);
    for (std::size_t c = 0; c < category_count; ++c) {
        double ls = std::log(model.priors[c]);
        // Iterate in the model's indicator order so query ordering is
        // irrelevant to the result.
        for (std::size_t i = 0; i < model.bins.indicator_count(); ++i) {
            const double value = *indicators.find(model.bins.cuts[i].first);
            const int b = model.bins.bin_of(i, value);
            ls += std::log(model.likelihoods[i][static_cast<std::size_t>(b)][c]);
        }
        log_scores[c] = ls;
    }

    const double max_ls = *std::max_element(log_scores.begin(), log_scores.end());
    double denom = 0.0;
    std::vector<double> probabilities(category_count);
    for (std::size_t c = 0; c < category_count; ++c) {
        probabilities[c] = std::exp(log_scores[c] - max_ls);
        denom += probabilities[c];
    }
    for (double& p : probabilities) p /= denom;
    return probabilities;
}

std::size_t argmax_category(const std::vector<double>& posterior_probabilities) {
    if (posterior_probabilities.empty()) {
        throw ValidationError("empty posterior");
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < posterior_probabilities.size(); ++c) {
        // Strict comparison: ties stay on the earlier (smaller) category.
        if (posterior_probabilities[c] > posterior_probabilities[best]) best = c;
    }
    return best;
}

double estimate_category(const LikelihoodModel& model, const IndicatorVector& indicators) {
    const std::vector<double> probabilities = posterior(model, indicators);
    return model.categories.fractions[argmax_category(probabilities)];
}

double estimate_p_final(double category_fraction, double baseline_gap) {
    if (!(category_fraction > 0.0) || category_fraction > 1.0) {
        throw DomainError("category fraction " + fmt(category_fraction) + " outside (0, 1]");
    }
    return p_final(category_fraction, baseline_gap);
}

const std::vector<std::string>& default_indicator_names() {
    static const std::vector<std::string> names = {
        "economic_gdp",
        "higher_education_gender_ratio",
        "birth_rate",
        "domestic_violence_incidence_investigation_ratio",
        "judicial_effectiveness",
    };
    return names;
}

double holdout_accuracy(const std::vector<TrainingRecord>& training,
                        const ImprovementCategorySet& categories, int bins_per_indicator,
                        double smoothing, double holdout_fraction, std::uint64_t seed) {
    if (!(holdout_fraction > 0.0) || holdout_fraction >= 1.0) {
        throw DomainError("holdout_fraction must be in (0, 1), got " + fmt(holdout_fraction));
    }
    if (training.size() < 2) {
        throw ValidationError("holdout evaluation needs at least 2 records");
    }

    std::vector<std::size_t> order(training.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 engine(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(engine() % (i + 1));
        std::swap(order[i], order[j]);
    }

    std::size_t holdout_count =
        static_cast<std::size_t>(holdout_fraction * static_cast<double>(training.size()));
    if (holdout_count == 0) holdout_count = 1;
    if (holdout_count >= training.size()) holdout_count = training.size() - 1;

    std::vector<TrainingRecord> train_part, test_part;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < holdout_count) {
            test_part.push_back(training[order[i]]);
        } else {
            train_part.push_back(training[order[i]]);
        }
    }

    const BinScheme bins = build_bins(train_part, bins_per_indicator);
    const LikelihoodModel model = fit(train_part, categories, bins, smoothing);

    std::size_t hits = 0;
    for (const TrainingRecord& record : test_part) {
        const double predicted = estimate_category(model, record.indicators);
        if (std::fabs(predicted - record.realized_fraction) <= 1e-12) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test_part.size());
}

}  // namespace sarafina
