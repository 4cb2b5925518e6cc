// sarafina: gender-asset-gap scoring CLI.
//
// Subcommands: score | project | estimate | diagnose | datasets | report.
// Exit codes: 0 success, 1 validation/domain errors, 2 I/O errors,
// 3 configuration errors (bad flags, bad config file, unknown names).

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sarafina/data_io.hpp"
#include "sarafina/diagnostics.hpp"
#include "sarafina/estimator.hpp"
#include "sarafina/metric.hpp"
#include "sarafina/projection.hpp"

namespace {

using namespace sarafina;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// config file: flat `section.key = value` lines, '#' comments, flags win

std::map<std::string, std::string> load_config(const std::string& path) {
    std::map<std::string, std::string> config;
    if (path.empty()) return config;
    const std::string text = read_file(path);
    std::size_t line_number = 0;
    std::string line;
    std::istringstream stream(text);
    while (std::getline(stream, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const std::size_t b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const std::size_t e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_number) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(path + ":" + std::to_string(line_number) + ": empty key");
        }
        config[key] = value;
    }
    return config;
}

template <typename T>
void apply_config(const std::map<std::string, std::string>& config, const std::string& key,
                  T& target) {
    const auto it = config.find(key);
    if (it == config.end()) return;
    std::istringstream stream(it->second);
    T value;
    if constexpr (std::is_same_v<T, std::string>) {
        value = it->second;
    } else {
        if (!(stream >> value)) {
            throw ConfigError("config key '" + key + "': cannot parse '" + it->second + "'");
        }
    }
    target = value;
}

void apply_config_flag(const std::map<std::string, std::string>& config, const std::string& key,
                       bool& target) {
    const auto it = config.find(key);
    if (it == config.end()) return;
    if (it->second == "true" || it->second == "1") {
        target = true;
    } else if (it->second == "false" || it->second == "0") {
        target = false;
    } else {
        throw ConfigError("config key '" + key + "': expected true/false");
    }
}

// the --config value must be known before the main parse
std::string prescan_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

// ---------------------------------------------------------------------------
// shared option bundles

struct OutputOpts {
    std::string format = "table";
    std::string output_path;
    std::string svg_path;
};

struct PolicyOpts {
    int enactment = 0;
    bool enactment_given = false;
    double reduction = -1.0;  // <0 means "not set"
    std::optional<double> baseline;
    int horizon = 10;
    bool horizon_given = false;
    std::string model;  // empty means "not set"
    double rate = 0.5;
    bool rate_given = false;
    std::string anchor;
    std::string name;
};

void add_output_options(CLI::App* cmd, OutputOpts& opts, bool with_svg = true) {
    static std::string config_path_doc;  // loaded by the argv prescan
    cmd->add_option("--config", config_path_doc, "Flat key = value configuration file");
    cmd->add_option("--format", opts.format, "Output format for standard output")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    cmd->add_option("--output", opts.output_path, "Write the JSON document to this path");
    if (with_svg) {
        cmd->add_option("--svg", opts.svg_path, "Write an SVG chart to this path");
    }
}

std::string format_double(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// ---------------------------------------------------------------------------
// score assembly shared by `score` and `diagnose`

struct ScoringSetup {
    GapSeries series;
    PolicyIntervention policy;
    ProjectionSpec projection_spec;
    ProjectionTrajectory projection;
    ScoreAnchor anchor = ScoreAnchor::observed;
};

struct SourceOpts {
    std::string dataset;
    std::string input_path;
    bool interpolate = false;
};

struct EstimateOpts {
    std::string train_path;
    std::string query_path;
    std::string categories = "2,4,6";
    double alpha = 1.0;
    int bins = 3;
    bool uniform_priors = false;
};

ImprovementCategorySet parse_category_list(const std::string& text) {
    std::vector<double> fractions;
    std::string token;
    std::istringstream stream(text);
    while (std::getline(stream, token, ',')) {
        if (token.empty()) continue;
        char* end = nullptr;
        const double pct = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) {
            throw ConfigError("--categories: '" + token + "' is not a number");
        }
        fractions.push_back(pct / 100.0);
    }
    if (fractions.empty()) {
        throw ConfigError("--categories: no values given");
    }
    return make_categories(std::move(fractions));
}

double estimate_reduction_from_csvs(const EstimateOpts& opts) {
    if (opts.train_path.empty() || opts.query_path.empty()) {
        throw ConfigError("--estimate needs both --train and --query");
    }
    const std::vector<TrainingRecord> training = parse_training_csv(read_file(opts.train_path));
    const std::vector<IndicatorVector> queries = parse_query_csv(read_file(opts.query_path));
    if (queries.size() != 1) {
        throw ConfigError("scoring with --estimate needs exactly one query row, got " +
                          std::to_string(queries.size()));
    }
    const ImprovementCategorySet categories = parse_category_list(opts.categories);
    const BinScheme bins = build_bins(training, opts.bins);
    const LikelihoodModel model =
        fit(training, categories, bins, opts.alpha, opts.uniform_priors);
    for (const std::string& warning : model.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    return estimate_category(model, queries[0]);
}

ScoringSetup build_scoring_setup(const SourceOpts& source, const PolicyOpts& policy_opts,
                                 const EstimateOpts& estimate_opts, bool estimate_mode) {
    if (source.dataset.empty() == source.input_path.empty()) {
        throw ConfigError("exactly one observation source is required: --dataset or --input");
    }
    if (estimate_mode && policy_opts.reduction >= 0.0) {
        throw ConfigError("--reduction and --estimate are mutually exclusive");
    }

    ScoringSetup setup;
    bool have_policy_defaults = false;

    if (!source.dataset.empty()) {
        bool is_case_study = false;
        for (const std::string& name : case_study_names()) {
            if (name == source.dataset) is_case_study = true;
        }
        if (is_case_study) {
            const CaseStudy preset = case_study(source.dataset);
            setup.series = preset.series;
            setup.policy = preset.policy;
            setup.projection_spec = preset.projection;
            setup.anchor = preset.anchor;
            have_policy_defaults = true;
        } else {
            setup.series = builtin(source.dataset);
        }
    } else {
        setup.series = parse_observations(read_file(source.input_path));
    }

    if (source.interpolate) {
        setup.series = interpolate_annual(setup.series);
    }

    // flags override preset/config values
    if (policy_opts.enactment_given) setup.policy.enactment_year = policy_opts.enactment;
    if (!have_policy_defaults && !policy_opts.enactment_given) {
        throw ConfigError("--enactment is required for this observation source");
    }
    if (estimate_mode) {
        setup.policy.reduction_fraction = estimate_reduction_from_csvs(estimate_opts);
    } else if (policy_opts.reduction >= 0.0) {
        setup.policy.reduction_fraction = policy_opts.reduction;
    } else if (!have_policy_defaults) {
        throw ConfigError("a policy is required: --reduction or --estimate");
    }
    if (policy_opts.baseline) setup.policy.baseline_gap = policy_opts.baseline;
    if (policy_opts.horizon_given) {
        setup.policy.horizon_years = policy_opts.horizon;
        setup.projection_spec.horizon_years = policy_opts.horizon;
    }
    if (!policy_opts.model.empty()) {
        setup.projection_spec.model = projection_model_from_string(policy_opts.model);
    }
    if (policy_opts.rate_given) setup.projection_spec.rate = policy_opts.rate;
    if (!policy_opts.anchor.empty()) {
        setup.anchor = score_anchor_from_string(policy_opts.anchor);
    }
    if (!policy_opts.name.empty()) {
        setup.policy.name = policy_opts.name;
    } else if (setup.policy.name.empty()) {
        setup.policy.name = source.dataset.empty() ? source.input_path : source.dataset;
    }

    // projection anchored at the observed enactment-year gap
    const double anchor_gap = gap_at(setup.series, setup.policy.enactment_year);
    const double policy_baseline =
        setup.policy.baseline_gap ? *setup.policy.baseline_gap : anchor_gap;
    const double p_final_value = p_final(setup.policy.reduction_fraction, policy_baseline);

    std::vector<int> years;
    for (int y = setup.policy.enactment_year; y <= setup.series.last_year(); ++y) {
        years.push_back(y);
    }
    setup.projection = make_projection(setup.projection_spec, anchor_gap, p_final_value, years);
    return setup;
}

void print_score_table(const ScoreReport& report) {
    std::printf("policy: %s  enactment: %d  reduction: %s  baseline: %s  p_final: %s  anchor: %s\n",
                report.policy_name.c_str(), report.enactment_year,
                format_double(report.reduction_fraction, 4).c_str(),
                format_double(report.baseline_gap, 4).c_str(),
                format_double(report.p_final, 4).c_str(), to_string(report.anchor));
    std::printf("%6s %13s %14s %9s %10s %14s %15s\n", "year", "observed_gap", "projected_gap",
                "regret", "penalty", "policy_impact", "sarafina_score");
    for (const ScoreRow& row : report.rows) {
        std::printf("%6d %13.4f %14.4f %9.4f %10.6f %14.4f %15.4f\n", row.year,
                    row.observed_gap, row.projected_gap, row.regret, row.penalty,
                    row.policy_impact, row.sarafina_score);
    }
    for (const DiagnosticFlag& flag : report.flags) {
        std::printf("flag %d [%s]: %s\n", flag.year, flag.kind.c_str(), flag.message.c_str());
    }
}

void write_requested_outputs(const ScoreReport& report, const OutputOpts& output) {
    if (output.format == "json") {
        std::fputs(emit_report(report).c_str(), stdout);
    } else {
        print_score_table(report);
    }
    if (!output.output_path.empty()) {
        write_file(output.output_path, emit_report(report));
    }
    if (!output.svg_path.empty()) {
        write_file(output.svg_path, emit_chart(report));
    }
}

// ---------------------------------------------------------------------------
// subcommand bodies

int run_score(const SourceOpts& source, const PolicyOpts& policy, const EstimateOpts& estimate,
              bool estimate_mode, const OutputOpts& output) {
    const ScoringSetup setup = build_scoring_setup(source, policy, estimate, estimate_mode);
    const ScoreReport report =
        score_series(setup.series, setup.policy, setup.projection, setup.anchor);
    write_requested_outputs(report, output);
    return 0;
}

int run_project(double baseline, double reduction, double p_final_flag, int horizon,
                const std::string& model, double rate, int start_year, int span,
                const OutputOpts& output) {
    if ((reduction >= 0.0) == (p_final_flag >= 0.0)) {
        throw ConfigError("exactly one of --reduction or --p-final is required");
    }
    const double target =
        (p_final_flag >= 0.0) ? p_final_flag : p_final(reduction, baseline);
    ProjectionSpec spec;
    spec.model = projection_model_from_string(model);
    spec.horizon_years = horizon;
    spec.rate = rate;
    if (span <= 0) span = horizon + 1;
    std::vector<int> years;
    for (int y = start_year; y < start_year + span; ++y) years.push_back(y);
    const ProjectionTrajectory trajectory = make_projection(spec, baseline, target, years);

    ordered_json doc;
    doc["schema_version"] = 1;
    doc["model"] = model;
    doc["baseline_gap"] = baseline;
    doc["p_final"] = target;
    doc["horizon_years"] = horizon;
    if (spec.model == ProjectionModel::exponential) doc["rate"] = rate;
    doc["years"] = trajectory.years;
    doc["projected_gap"] = trajectory.projected_gap;
    if (output.format == "json") {
        std::fputs((doc.dump(2) + "\n").c_str(), stdout);
    } else {
        std::printf("%6s %14s\n", "year", "projected_gap");
        for (std::size_t i = 0; i < trajectory.size(); ++i) {
            std::printf("%6d %14.4f\n", trajectory.years[i], trajectory.projected_gap[i]);
        }
    }
    if (!output.output_path.empty()) {
        write_file(output.output_path, doc.dump(2) + "\n");
    }
    return 0;
}

int run_estimate(const EstimateOpts& opts, double baseline, double holdout,
                 std::uint64_t seed, const OutputOpts& output) {
    if (opts.train_path.empty()) {
        throw ConfigError("--train is required");
    }
    const std::vector<TrainingRecord> training = parse_training_csv(read_file(opts.train_path));
    const ImprovementCategorySet categories = parse_category_list(opts.categories);

    if (holdout > 0.0) {
        const double accuracy =
            holdout_accuracy(training, categories, opts.bins, opts.alpha, holdout, seed);
        if (output.format == "json") {
            ordered_json doc;
            doc["schema_version"] = 1;
            doc["holdout_fraction"] = holdout;
            doc["seed"] = seed;
            doc["accuracy"] = accuracy;
            std::fputs((doc.dump(2) + "\n").c_str(), stdout);
        } else {
            std::printf("holdout accuracy: %.4f (fraction %.2f, seed %llu)\n", accuracy,
                        holdout, static_cast<unsigned long long>(seed));
        }
        return 0;
    }

    if (opts.query_path.empty()) {
        throw ConfigError("--query is required (or use --holdout)");
    }
    const std::vector<IndicatorVector> queries = parse_query_csv(read_file(opts.query_path));
    const BinScheme bins = build_bins(training, opts.bins);
    const LikelihoodModel model =
        fit(training, categories, bins, opts.alpha, opts.uniform_priors);
    for (const std::string& warning : model.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }

    ordered_json doc;
    doc["schema_version"] = 1;
    ordered_json category_pcts = ordered_json::array();
    for (double f : categories.fractions) category_pcts.push_back(f * 100.0);
    doc["categories_pct"] = category_pcts;
    doc["priors"] = model.priors;
    ordered_json results = ordered_json::array();

    if (output.format == "table") {
        std::printf("%6s %14s", "query", "category_pct");
        for (double f : categories.fractions) {
            std::printf(" %11s", ("p(" + format_double(f * 100.0, 0) + "%)").c_str());
        }
        if (baseline > 0.0) std::printf(" %10s", "p_final");
        std::printf("\n");
    }
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const std::vector<double> probabilities = posterior(model, queries[q]);
        const double category = categories.fractions[argmax_category(probabilities)];
        ordered_json entry;
        entry["category_pct"] = category * 100.0;
        entry["posterior"] = probabilities;
        if (baseline > 0.0) entry["p_final"] = estimate_p_final(category, baseline);
        results.push_back(entry);
        if (output.format == "table") {
            std::printf("%6zu %14s", q + 1, format_double(category * 100.0, 2).c_str());
            for (double p : probabilities) std::printf(" %11.6f", p);
            if (baseline > 0.0) {
                std::printf(" %10.4f", estimate_p_final(category, baseline));
            }
            std::printf("\n");
        }
    }
    doc["estimates"] = results;
    if (!model.warnings.empty()) doc["warnings"] = model.warnings;
    const std::string json = doc.dump(2) + "\n";
    if (output.format == "json") std::fputs(json.c_str(), stdout);
    if (!output.output_path.empty()) write_file(output.output_path, json);
    return 0;
}

int run_diagnose(const SourceOpts& source, const PolicyOpts& policy,
                 const DiagnosticsConfig& config, const OutputOpts& output) {
    const ScoringSetup setup =
        build_scoring_setup(source, policy, EstimateOpts{}, false);
    const ScoreReport report =
        score_series(setup.series, setup.policy, setup.projection, setup.anchor);

    const ResiliencyResult res = resiliency(setup.series, setup.policy, setup.projection,
                                            config.perturbation_delta, setup.anchor);
    const ConsistencyResult cons =
        consistency(setup.series, setup.policy, setup.projection, config, setup.anchor);
    const std::vector<DiagnosticFlag> flags =
        manipulation_flags(report, config.manipulation_threshold);
    const ConvergenceResult conv =
        convergence_check(report, config.convergence_window, config.convergence_tol);

    ordered_json doc;
    doc["schema_version"] = 1;
    ordered_json resiliency_json;
    resiliency_json["delta"] = config.perturbation_delta;
    ordered_json per_year = ordered_json::array();
    for (const ResiliencyRow& row : res.per_year) {
        ordered_json r;
        r["year"] = row.year;
        r["max_change"] = row.max_change;
        per_year.push_back(r);
    }
    resiliency_json["per_year"] = per_year;
    resiliency_json["overall_max"] = res.overall_max;
    doc["resiliency"] = resiliency_json;

    ordered_json consistency_json;
    consistency_json["sigma"] = config.noise_sigma;
    consistency_json["trials"] = config.trials;
    consistency_json["seed"] = config.seed;
    consistency_json["mean"] = cons.mean;
    consistency_json["stddev"] = cons.stddev;
    consistency_json["noiseless"] = cons.noiseless;
    doc["consistency"] = consistency_json;

    ordered_json manipulation_json;
    manipulation_json["threshold"] = config.manipulation_threshold;
    ordered_json flag_array = ordered_json::array();
    for (const DiagnosticFlag& flag : flags) {
        ordered_json f;
        f["year"] = flag.year;
        f["kind"] = flag.kind;
        f["message"] = flag.message;
        flag_array.push_back(f);
    }
    manipulation_json["flags"] = flag_array;
    doc["manipulation"] = manipulation_json;

    ordered_json convergence_json;
    convergence_json["window"] = config.convergence_window;
    convergence_json["tol"] = config.convergence_tol;
    convergence_json["converged"] = conv.converged;
    convergence_json["limiting_estimate"] = conv.limiting_estimate;
    doc["convergence"] = convergence_json;

    if (output.format == "json") {
        std::fputs((doc.dump(2) + "\n").c_str(), stdout);
    } else {
        std::printf("resiliency (delta %.4f): overall max final-score change %.6f\n",
                    config.perturbation_delta, res.overall_max);
        for (const ResiliencyRow& row : res.per_year) {
            std::printf("  %d: %.6f\n", row.year, row.max_change);
        }
        std::printf("consistency (sigma %.4f, trials %d, seed %llu):\n", config.noise_sigma,
                    config.trials, static_cast<unsigned long long>(config.seed));
        std::printf("  mean %.6f  stddev %.6f  noiseless %.6f\n", cons.mean, cons.stddev,
                    cons.noiseless);
        std::printf("manipulation (threshold %.4f/yr): %zu flag(s)\n",
                    config.manipulation_threshold, flags.size());
        for (const DiagnosticFlag& flag : flags) {
            std::printf("  %d: %s\n", flag.year, flag.message.c_str());
        }
        std::printf("convergence (window %d, tol %.4f): %s, limiting estimate %.6f\n",
                    config.convergence_window, config.convergence_tol,
                    conv.converged ? "converged" : "not converged", conv.limiting_estimate);
    }
    if (!output.output_path.empty()) {
        write_file(output.output_path, doc.dump(2) + "\n");
    }
    if (!output.svg_path.empty()) {
        write_file(output.svg_path, emit_chart(report));
    }
    return 0;
}

int run_datasets(const OutputOpts& output) {
    if (output.format == "json") {
        ordered_json doc;
        doc["schema_version"] = 1;
        ordered_json sets = ordered_json::array();
        for (const std::string& name : builtin_names()) {
            const GapSeries series = builtin(name);
            ordered_json entry;
            entry["name"] = name;
            ordered_json rows = ordered_json::array();
            for (const GapObservation& obs : series.observations) {
                ordered_json row;
                row["year"] = obs.year;
                row["men_pct"] = obs.men_share;
                row["women_pct"] = obs.women_share;
                row["gap_pct"] = obs.gap;
                if (obs.sample_size) row["sample_size"] = *obs.sample_size;
                if (!obs.source.empty()) row["source"] = obs.source;
                rows.push_back(row);
            }
            entry["rows"] = rows;
            sets.push_back(entry);
        }
        doc["datasets"] = sets;
        doc["case_studies"] = case_study_names();
        std::fputs((doc.dump(2) + "\n").c_str(), stdout);
        return 0;
    }
    for (const std::string& name : builtin_names()) {
        const GapSeries series = builtin(name);
        std::printf("%s:\n", name.c_str());
        std::printf("  %6s %9s %10s %9s %12s  %s\n", "year", "men_pct", "women_pct", "gap_pct",
                    "sample_size", "source");
        for (const GapObservation& obs : series.observations) {
            std::printf("  %6d %9.2f %10.2f %9.2f %12s  %s\n", obs.year, obs.men_share,
                        obs.women_share, obs.gap,
                        obs.sample_size ? std::to_string(*obs.sample_size).c_str() : "-",
                        obs.source.c_str());
        }
    }
    std::printf("case studies:\n");
    for (const std::string& name : case_study_names()) {
        const CaseStudy preset = case_study(name);
        std::printf("  %s: enactment %d, reduction %.2f, %s projection (horizon %d), %s anchor\n",
                    name.c_str(), preset.policy.enactment_year,
                    preset.policy.reduction_fraction, to_string(preset.projection.model),
                    preset.projection.horizon_years, to_string(preset.anchor));
    }
    return 0;
}

int run_report(const std::string& input_path, const OutputOpts& output) {
    if (input_path.empty()) {
        throw ConfigError("--input is required");
    }
    const ScoreReport report = parse_report(read_file(input_path));
    write_requested_outputs(report, output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sarafina score toolkit: gender-asset-gap scoring, projection, "
                 "policy-impact estimation and diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Flat key = value configuration file")
        ->expected(1);

    try {
        const std::map<std::string, std::string> config =
            load_config(prescan_config_path(argc, argv));

        // score ---------------------------------------------------------
        SourceOpts score_source;
        PolicyOpts score_policy;
        EstimateOpts score_estimate;
        OutputOpts score_output;
        bool score_estimate_mode = false;
        std::uint64_t seed = 0;
        apply_config(config, "source.dataset", score_source.dataset);
        apply_config(config, "source.input", score_source.input_path);
        apply_config_flag(config, "source.interpolate", score_source.interpolate);
        if (config.count("policy.enactment")) {
            apply_config(config, "policy.enactment", score_policy.enactment);
            score_policy.enactment_given = true;
        }
        apply_config(config, "policy.reduction", score_policy.reduction);
        apply_config(config, "policy.anchor", score_policy.anchor);
        apply_config(config, "policy.name", score_policy.name);
        if (config.count("policy.baseline")) {
            double b = 0.0;
            apply_config(config, "policy.baseline", b);
            score_policy.baseline = b;
        }
        apply_config(config, "projection.model", score_policy.model);
        if (config.count("projection.horizon_years")) {
            apply_config(config, "projection.horizon_years", score_policy.horizon);
            score_policy.horizon_given = true;
        }
        if (config.count("projection.rate")) {
            apply_config(config, "projection.rate", score_policy.rate);
            score_policy.rate_given = true;
        }
        apply_config(config, "output.format", score_output.format);

        DiagnosticsConfig diag_config;
        apply_config(config, "diagnostics.delta", diag_config.perturbation_delta);
        apply_config(config, "diagnostics.sigma", diag_config.noise_sigma);
        apply_config(config, "diagnostics.trials", diag_config.trials);
        apply_config(config, "diagnostics.seed", diag_config.seed);
        apply_config(config, "diagnostics.manipulation_threshold",
                     diag_config.manipulation_threshold);
        apply_config(config, "diagnostics.window", diag_config.convergence_window);
        apply_config(config, "diagnostics.tol", diag_config.convergence_tol);

        const auto add_source_options = [](CLI::App* cmd, SourceOpts& opts) {
            cmd->add_option("--dataset", opts.dataset,
                            "Built-in dataset or case-study preset name");
            cmd->add_option("--input", opts.input_path, "Observation CSV path");
            cmd->add_flag("--interpolate", opts.interpolate,
                          "Interpolate the series to annual resolution before scoring");
        };
        const auto add_policy_options = [](CLI::App* cmd, PolicyOpts& opts) {
            cmd->add_option("--enactment", opts.enactment, "Policy enactment year")
                ->each([&opts](const std::string&) { opts.enactment_given = true; });
            cmd->add_option("--reduction", opts.reduction,
                            "Expected reduction fraction of the baseline gap, in [0,1]");
            cmd->add_option("--baseline", opts.baseline,
                            "Pre-policy baseline gap override (points)");
            cmd->add_option("--horizon", opts.horizon,
                            "Projection horizon in years (default 10)")
                ->each([&opts](const std::string&) { opts.horizon_given = true; });
            cmd->add_option("--model", opts.model,
                            "Projection model: linear (default) or exponential");
            cmd->add_option("--rate", opts.rate,
                            "Exponential projection decay rate (default 0.5)")
                ->each([&opts](const std::string&) { opts.rate_given = true; });
            cmd->add_option("--anchor", opts.anchor,
                            "Score anchor: observed (per-year gap) or baseline");
            cmd->add_option("--name", opts.name, "Policy label used in reports");
        };
        const auto add_estimate_options = [](CLI::App* cmd, EstimateOpts& opts) {
            cmd->add_option("--train", opts.train_path, "Training CSV path");
            cmd->add_option("--query", opts.query_path, "Query CSV path");
            cmd->add_option("--categories", opts.categories,
                            "Improvement categories in percent, comma separated")
                ->capture_default_str();
            cmd->add_option("--alpha", opts.alpha, "Laplace smoothing strength")
                ->capture_default_str();
            cmd->add_option("--bins", opts.bins, "Quantile bins per indicator")
                ->capture_default_str();
            cmd->add_flag("--uniform-priors", opts.uniform_priors,
                          "Use uniform category priors instead of smoothed counts");
        };

        CLI::App* score_cmd =
            app.add_subcommand("score", "Compute the Sarafina score series for a policy");
        add_source_options(score_cmd, score_source);
        add_policy_options(score_cmd, score_policy);
        score_cmd->add_flag("--estimate", score_estimate_mode,
                            "Estimate the reduction from proxy indicators (needs --train/--query)");
        add_estimate_options(score_cmd, score_estimate);
        add_output_options(score_cmd, score_output);
        score_cmd->add_option("--seed", seed, "Random seed (reserved for diagnostics)");
        score_cmd->callback([&]() {
            run_score(score_source, score_policy, score_estimate, score_estimate_mode,
                      score_output);
        });

        // project -------------------------------------------------------
        double project_baseline = 0.0, project_reduction = -1.0, project_p_final = -1.0;
        int project_horizon = 10, project_start = 0, project_span = 0;
        std::string project_model = "linear";
        double project_rate = 0.5;
        OutputOpts project_output;
        apply_config(config, "projection.model", project_model);
        apply_config(config, "projection.horizon_years", project_horizon);
        apply_config(config, "projection.rate", project_rate);

        CLI::App* project_cmd =
            app.add_subcommand("project", "Generate a projected-gap trajectory");
        project_cmd->add_option("--baseline", project_baseline, "Baseline gap (points)")
            ->required();
        project_cmd->add_option("--reduction", project_reduction,
                                "Reduction fraction of the baseline, in [0,1]");
        project_cmd->add_option("--p-final", project_p_final,
                                "Final reduction in points (alternative to --reduction)");
        project_cmd->add_option("--horizon", project_horizon, "Projection horizon in years")
            ->capture_default_str();
        project_cmd->add_option("--model", project_model, "linear or exponential")
            ->capture_default_str();
        project_cmd->add_option("--rate", project_rate, "Exponential decay rate")
            ->capture_default_str();
        project_cmd->add_option("--start-year", project_start, "First projected year")
            ->capture_default_str();
        project_cmd->add_option("--span", project_span,
                                "Number of years to emit (default horizon + 1)");
        add_output_options(project_cmd, project_output, false);
        project_cmd->callback([&]() {
            run_project(project_baseline, project_reduction, project_p_final, project_horizon,
                        project_model, project_rate, project_start, project_span,
                        project_output);
        });

        // estimate ------------------------------------------------------
        EstimateOpts estimate_opts;
        double estimate_baseline = -1.0, estimate_holdout = -1.0;
        OutputOpts estimate_output;
        CLI::App* estimate_cmd = app.add_subcommand(
            "estimate", "Estimate the improvement category from proxy indicators");
        add_estimate_options(estimate_cmd, estimate_opts);
        estimate_cmd->add_option("--baseline", estimate_baseline,
                                 "Baseline gap; adds a p_final column");
        estimate_cmd->add_option("--holdout", estimate_holdout,
                                 "Holdout fraction for an accuracy report instead of estimates");
        estimate_cmd->add_option("--seed", seed, "Seed for the holdout split")
            ->capture_default_str();
        add_output_options(estimate_cmd, estimate_output, false);
        estimate_cmd->callback([&]() {
            run_estimate(estimate_opts, estimate_baseline, estimate_holdout, seed,
                         estimate_output);
        });

        // diagnose ------------------------------------------------------
        SourceOpts diag_source = score_source;
        PolicyOpts diag_policy = score_policy;
        OutputOpts diag_output;
        apply_config(config, "output.format", diag_output.format);
        CLI::App* diagnose_cmd = app.add_subcommand(
            "diagnose", "Run resiliency, consistency, manipulation and convergence checks");
        add_source_options(diagnose_cmd, diag_source);
        add_policy_options(diagnose_cmd, diag_policy);
        diagnose_cmd->add_option("--delta", diag_config.perturbation_delta,
                                 "Resiliency perturbation in points")
            ->capture_default_str();
        diagnose_cmd->add_option("--sigma", diag_config.noise_sigma,
                                 "Consistency noise sigma in points")
            ->capture_default_str();
        diagnose_cmd->add_option("--trials", diag_config.trials, "Monte Carlo replicates")
            ->capture_default_str();
        diagnose_cmd->add_option("--seed", diag_config.seed, "Monte Carlo master seed")
            ->capture_default_str();
        diagnose_cmd->add_option("--threshold", diag_config.manipulation_threshold,
                                 "Manipulation flag threshold, points per year")
            ->capture_default_str();
        diagnose_cmd->add_option("--window", diag_config.convergence_window,
                                 "Convergence window in years")
            ->capture_default_str();
        diagnose_cmd->add_option("--tol", diag_config.convergence_tol,
                                 "Convergence tolerance in points")
            ->capture_default_str();
        add_output_options(diagnose_cmd, diag_output);
        diagnose_cmd->callback(
            [&]() { run_diagnose(diag_source, diag_policy, diag_config, diag_output); });

        // datasets ------------------------------------------------------
        OutputOpts datasets_output;
        CLI::App* datasets_cmd =
            app.add_subcommand("datasets", "List built-in datasets and case-study presets");
        add_output_options(datasets_cmd, datasets_output, false);
        datasets_cmd->callback([&]() { run_datasets(datasets_output); });

        // report --------------------------------------------------------
        std::string report_input;
        OutputOpts report_output;
        CLI::App* report_cmd =
            app.add_subcommand("report", "Re-render a stored JSON score report");
        report_cmd->add_option("--input", report_input, "JSON report path")->required();
        add_output_options(report_cmd, report_output);
        report_cmd->callback([&]() { run_report(report_input, report_output); });

        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
