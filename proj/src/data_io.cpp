#include "sarafina/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sarafina {

namespace {

// ---------------------------------------------------------------------------
// number formatting

// Rounds through a 12-significant-digit decimal so serialized numbers are
// short, deterministic and re-parse to the same double.
double round_sig12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

std::string format_sig12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// CSV plumbing

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(trim(current));
    return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) lines.push_back(current);
    // Drop trailing blank lines only; interior blanks are caught below.
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

double parse_number(const std::string& cell, std::size_t line_number, const std::string& column) {
    const std::string t = trim(cell);
    if (t.empty()) {
        throw ValidationError("line " + std::to_string(line_number) + ", column '" + column +
                              "': empty cell");
    }
    char* end = nullptr;
    const double value = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(value)) {
        throw ValidationError("line " + std::to_string(line_number) + ", column '" + column +
                              "': '" + t + "' is not a number");
    }
    return value;
}

int parse_year(const std::string& cell, std::size_t line_number) {
    const double value = parse_number(cell, line_number, "year");
    const int year = static_cast<int>(value);
    if (static_cast<double>(year) != value) {
        throw ValidationError("line " + std::to_string(line_number) + ", column 'year': '" +
                              trim(cell) + "' is not an integer year");
    }
    return year;
}

}  // namespace

GapSeries parse_observations(const std::string& csv_text) {
    const std::vector<std::string> lines = split_lines(csv_text);
    if (lines.empty()) {
        throw ValidationError("CSV is empty");
    }
    const std::vector<std::string> header = split_line(lines[0]);
    bool shares_form;
    if (header == std::vector<std::string>{"year", "men_pct", "women_pct"}) {
        shares_form = true;
    } else if (header == std::vector<std::string>{"year", "gap_pct"}) {
        shares_form = false;
    } else {
        throw ValidationError(
            "unrecognized header '" + trim(lines[0]) +
            "' (expected 'year,men_pct,women_pct' or 'year,gap_pct')");
    }

    GapSeries series;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_number = i + 1;
        const std::vector<std::string> fields = split_line(lines[i]);
        if (fields.size() != header.size()) {
            throw ValidationError("line " + std::to_string(line_number) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        const int year = parse_year(fields[0], line_number);
        GapObservation obs;
        if (shares_form) {
            obs = GapObservation::from_shares(year,
                                              parse_number(fields[1], line_number, "men_pct"),
                                              parse_number(fields[2], line_number, "women_pct"));
        } else {
            obs = GapObservation::from_gap(year, parse_number(fields[1], line_number, "gap_pct"));
        }
        try {
            validate_observation(obs);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_number) + ": " + e.what());
        }
        for (const GapObservation& existing : series.observations) {
            if (existing.year == year) {
                throw ValidationError("line " + std::to_string(line_number) +
                                      ": duplicate year " + std::to_string(year));
            }
        }
        series.observations.push_back(obs);
    }
    std::sort(series.observations.begin(), series.observations.end(),
              [](const GapObservation& a, const GapObservation& b) { return a.year < b.year; });
    return validate_series(std::move(series));
}

std::string to_csv(const GapSeries& series) {
    std::string out = "year,men_pct,women_pct\n";
    for (const GapObservation& obs : series.observations) {
        out += std::to_string(obs.year) + "," + format_sig12(obs.men_share) + "," +
               format_sig12(obs.women_share) + "\n";
    }
    return out;
}

namespace {

struct ParsedTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

ParsedTable parse_numeric_table(const std::string& csv_text) {
    const std::vector<std::string> lines = split_lines(csv_text);
    if (lines.empty()) {
        throw ValidationError("CSV is empty");
    }
    ParsedTable table;
    table.columns = split_line(lines[0]);
    for (const std::string& name : table.columns) {
        if (name.empty()) {
            throw ValidationError("CSV header has an empty column name");
        }
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_number = i + 1;
        const std::vector<std::string> fields = split_line(lines[i]);
        if (fields.size() != table.columns.size()) {
            throw ValidationError("line " + std::to_string(line_number) + ": expected " +
                                  std::to_string(table.columns.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            row.push_back(parse_number(fields[c], line_number, table.columns[c]));
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) {
        throw ValidationError("CSV has a header but no data rows");
    }
    return table;
}

}  // namespace

std::vector<TrainingRecord> parse_training_csv(const std::string& csv_text) {
    const ParsedTable table = parse_numeric_table(csv_text);
    const auto label_it =
        std::find(table.columns.begin(), table.columns.end(), "realized_reduction_pct");
    if (label_it == table.columns.end()) {
        throw ValidationError("training CSV is missing the 'realized_reduction_pct' column");
    }
    const std::size_t label_idx =
        static_cast<std::size_t>(label_it - table.columns.begin());
    if (table.columns.size() < 2) {
        throw ValidationError("training CSV needs at least one indicator column");
    }

    std::vector<TrainingRecord> records;
    for (const std::vector<double>& row : table.rows) {
        TrainingRecord record;
        std::vector<std::pair<std::string, double>> values;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c == label_idx) continue;
            values.emplace_back(table.columns[c], row[c]);
        }
        record.indicators = make_indicators(std::move(values));
        record.realized_fraction = row[label_idx] / 100.0;
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<IndicatorVector> parse_query_csv(const std::string& csv_text) {
    const ParsedTable table = parse_numeric_table(csv_text);
    std::vector<IndicatorVector> queries;
    for (const std::vector<double>& row : table.rows) {
        std::vector<std::pair<std::string, double>> values;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            values.emplace_back(table.columns[c], row[c]);
        }
        queries.push_back(make_indicators(std::move(values)));
    }
    return queries;
}

GapSeries interpolate_annual(const GapSeries& series) {
    const GapSeries checked = validate_series(series);
    if (checked.size() < 2) {
        throw ValidationError("interpolation needs at least 2 observations");
    }
    GapSeries result;
    for (std::size_t i = 0; i + 1 < checked.observations.size(); ++i) {
        const GapObservation& a = checked.observations[i];
        const GapObservation& b = checked.observations[i + 1];
        result.observations.push_back(a);
        for (int year = a.year + 1; year < b.year; ++year) {
            // Multiply before dividing so integer-valued segments stay exact.
            const double gap =
                a.gap + (b.gap - a.gap) * static_cast<double>(year - a.year) /
                            static_cast<double>(b.year - a.year);
            GapObservation filler = GapObservation::from_gap(year, gap);
            filler.synthetic = true;
            filler.source = "interpolated";
            result.observations.push_back(filler);
        }
    }
    result.observations.push_back(checked.observations.back());
    return validate_series(std::move(result));
}

namespace {

GapObservation tagged(GapObservation obs, std::int64_t sample_size, const char* source) {
    obs.sample_size = sample_size;
    obs.source = source;
    return obs;
}

}  // namespace

GapSeries builtin(const std::string& name) {
    if (name == "brazil") {
        GapSeries series;
        series.observations = {
            tagged(GapObservation::from_shares(2000, 89.0, 11.0), 39904, "deere-leon-2003"),
            tagged(GapObservation::from_shares(2006, 89.8, 10.2), 2779, "araujo-2024"),
            tagged(GapObservation::from_shares(2017, 85.2, 14.8), 2779, "araujo-2024"),
        };
        return validate_series(std::move(series));
    }
    if (name == "mexico") {
        GapSeries series;
        series.observations = {
            tagged(GapObservation::from_shares(1984, 87.0, 13.0), 225, "hamilton-2002"),
            tagged(GapObservation::from_shares(1996, 78.0, 22.0), 77, "hamilton-2002"),
            tagged(GapObservation::from_shares(2002, 77.6, 22.4), 2900000, "araujo-2024"),
        };
        return validate_series(std::move(series));
    }
    std::string names;
    for (const std::string& n : builtin_names()) {
        if (!names.empty()) names += ", ";
        names += n;
    }
    throw ConfigError("unknown dataset '" + name + "' (available: " + names + ")");
}

std::vector<std::string> builtin_names() { return {"brazil", "mexico"}; }

CaseStudy case_study(const std::string& name) {
    if (name == "brazil-case-study") {
        // Espaco Feminista, founded 2008. The 2006 survey value (gap 79.6) is
        // carried to the enactment year; the 2017 anchor 70.42 continues the
        // published 1.02-point yearly drift of that decade.
        GapSeries anchors;
        GapObservation start = GapObservation::from_gap(2008, 79.6);
        start.sample_size = 2779;
        start.source = "survey-2006-carried";
        GapObservation end = GapObservation::from_gap(2017, 70.42);
        end.source = "decade-drift";
        anchors.observations = {start, end};
        CaseStudy preset;
        preset.name = name;
        preset.series = interpolate_annual(anchors);
        preset.policy = PolicyIntervention{name, 2008, 0.25, 10, std::nullopt};
        preset.projection = ProjectionSpec{};
        preset.anchor = ScoreAnchor::baseline;
        return preset;
    }
    if (name == "mexico-case-study") {
        // 1992 constitutional revision. The observed table is interpolated to
        // annual resolution; the policy is credited against the last
        // pre-enactment level (1984, gap 74).
        CaseStudy preset;
        preset.name = name;
        preset.series = interpolate_annual(builtin("mexico"));
        preset.policy = PolicyIntervention{name, 1992, 0.25, 10, 74.0};
        preset.projection = ProjectionSpec{};
        preset.anchor = ScoreAnchor::baseline;
        return preset;
    }
    std::string names;
    for (const std::string& n : case_study_names()) {
        if (!names.empty()) names += ", ";
        names += n;
    }
    throw ConfigError("unknown case study '" + name + "' (available: " + names + ")");
}

std::vector<std::string> case_study_names() {
    return {"brazil-case-study", "mexico-case-study"};
}

// ---------------------------------------------------------------------------
// JSON report

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

std::string emit_report(const ScoreReport& report) {
    ordered_json doc;
    doc["schema_version"] = 1;
    ordered_json policy;
    policy["name"] = report.policy_name;
    policy["enactment_year"] = report.enactment_year;
    policy["reduction_fraction"] = round_sig12(report.reduction_fraction);
    policy["horizon_years"] = report.horizon_years;
    policy["baseline_gap"] = round_sig12(report.baseline_gap);
    policy["p_final"] = round_sig12(report.p_final);
    doc["policy"] = policy;
    doc["score_anchor"] = to_string(report.anchor);

    ordered_json rows = ordered_json::array();
    for (const ScoreRow& row : report.rows) {
        ordered_json r;
        r["year"] = row.year;
        r["observed_gap"] = round_sig12(row.observed_gap);
        r["projected_gap"] = round_sig12(row.projected_gap);
        r["regret"] = round_sig12(row.regret);
        r["penalty"] = round_sig12(row.penalty);
        r["policy_impact"] = round_sig12(row.policy_impact);
        r["sarafina_score"] = round_sig12(row.sarafina_score);
        rows.push_back(r);
    }
    doc["rows"] = rows;

    ordered_json flags = ordered_json::array();
    for (const DiagnosticFlag& flag : report.flags) {
        ordered_json f;
        f["year"] = flag.year;
        f["kind"] = flag.kind;
        f["message"] = flag.message;
        flags.push_back(f);
    }
    doc["flags"] = flags;
    return doc.dump(2) + "\n";
}

ScoreReport parse_report(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1) {
        throw ValidationError("unsupported report schema_version");
    }
    ScoreReport report;
    const ordered_json& policy = doc.at("policy");
    report.policy_name = policy.at("name").get<std::string>();
    report.enactment_year = policy.at("enactment_year").get<int>();
    report.reduction_fraction = policy.at("reduction_fraction").get<double>();
    report.horizon_years = policy.at("horizon_years").get<int>();
    report.baseline_gap = policy.at("baseline_gap").get<double>();
    report.p_final = policy.at("p_final").get<double>();
    report.anchor = score_anchor_from_string(doc.at("score_anchor").get<std::string>());
    for (const ordered_json& r : doc.at("rows")) {
        ScoreRow row;
        row.year = r.at("year").get<int>();
        row.observed_gap = r.at("observed_gap").get<double>();
        row.projected_gap = r.at("projected_gap").get<double>();
        row.regret = r.at("regret").get<double>();
        row.penalty = r.at("penalty").get<double>();
        row.policy_impact = r.at("policy_impact").get<double>();
        row.sarafina_score = r.at("sarafina_score").get<double>();
        report.rows.push_back(row);
    }
    for (const ordered_json& f : doc.at("flags")) {
        DiagnosticFlag flag;
        flag.year = f.at("year").get<int>();
        flag.kind = f.at("kind").get<std::string>();
        flag.message = f.at("message").get<std::string>();
        report.flags.push_back(flag);
    }
    return report;
}

// ---------------------------------------------------------------------------
// SVG chart

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

std::string emit_chart(const ScoreReport& report) {
    if (report.rows.size() < 2) {
        throw ValidationError("chart needs at least 2 score rows");
    }

    const double width = 860.0, height = 520.0;
    const double left = 70.0, right = 30.0, top = 46.0, bottom = 64.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const int year_min = report.rows.front().year;
    const int year_max = report.rows.back().year;
    double v_min = report.rows.front().observed_gap;
    double v_max = v_min;
    for (const ScoreRow& row : report.rows) {
        v_min = std::min({v_min, row.observed_gap, row.sarafina_score});
        v_max = std::max({v_max, row.observed_gap, row.sarafina_score});
    }
    double pad = (v_max - v_min) * 0.08;
    if (pad == 0.0) pad = 1.0;
    v_min -= pad;
    v_max += pad;

    const auto x_of = [&](double year) {
        if (year_max == year_min) return left + plot_w / 2.0;
        return left + (year - year_min) / double(year_max - year_min) * plot_w;
    };
    const auto y_of = [&](double value) {
        return top + (v_max - value) / (v_max - v_min) * plot_h;
    };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + px(width) +
           "\" height=\"" + px(height) + "\" viewBox=\"0 0 " + px(width) + " " + px(height) +
           "\">\n";
    svg += "  <title>" + xml_escape(report.policy_name.empty() ? "Sarafina score"
                                                               : report.policy_name) +
           "</title>\n";

    // horizontal gridlines + y tick labels
    const int y_ticks = 5;
    for (int t = 0; t <= y_ticks; ++t) {
        const double value = v_min + (v_max - v_min) * t / double(y_ticks);
        const double y = y_of(value);
        svg += "  <line x1=\"" + px(left) + "\" y1=\"" + px(y) + "\" x2=\"" +
               px(left + plot_w) + "\" y2=\"" + px(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "  <text x=\"" + px(left - 8) + "\" y=\"" + px(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               tick_label(value) + "</text>\n";
    }

    // x tick labels (thin out long ranges)
    const int n_years = year_max - year_min + 1;
    const int x_step = n_years <= 12 ? 1 : (n_years + 11) / 12;
    for (int year = year_min; year <= year_max; year += x_step) {
        const double x = x_of(year);
        svg += "  <line x1=\"" + px(x) + "\" y1=\"" + px(top + plot_h) + "\" x2=\"" + px(x) +
               "\" y2=\"" + px(top + plot_h + 5) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        svg += "  <text x=\"" + px(x) + "\" y=\"" + px(top + plot_h + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               std::to_string(year) + "</text>\n";
    }

    // axes
    svg += "  <line x1=\"" + px(left) + "\" y1=\"" + px(top) + "\" x2=\"" + px(left) +
           "\" y2=\"" + px(top + plot_h) + "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
    svg += "  <line x1=\"" + px(left) + "\" y1=\"" + px(top + plot_h) + "\" x2=\"" +
           px(left + plot_w) + "\" y2=\"" + px(top + plot_h) +
           "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";

    // axis titles
    svg += "  <text x=\"" + px(left + plot_w / 2) + "\" y=\"" + px(height - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">Year</text>\n";
    svg += "  <text x=\"18\" y=\"" + px(top + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " +
           px(top + plot_h / 2) + ")\">Percent (points)</text>\n";

    // data series: exactly two polylines
    const char* observed_color = "#1f77b4";
    const char* score_color = "#d62728";
    std::string observed_points, score_points;
    for (const ScoreRow& row : report.rows) {
        const std::string x = px(x_of(row.year));
        observed_points += x + "," + px(y_of(row.observed_gap)) + " ";
        score_points += x + "," + px(y_of(row.sarafina_score)) + " ";
    }
    if (!observed_points.empty()) observed_points.pop_back();
    if (!score_points.empty()) score_points.pop_back();
    svg += "  <polyline fill=\"none\" stroke=\"" + std::string(observed_color) +
           "\" stroke-width=\"2\" points=\"" + observed_points + "\"/>\n";
    svg += "  <polyline fill=\"none\" stroke=\"" + std::string(score_color) +
           "\" stroke-width=\"2\" points=\"" + score_points + "\"/>\n";

    // legend
    const double legend_x = left + 12.0, legend_y = top + 10.0;
    svg += "  <line x1=\"" + px(legend_x) + "\" y1=\"" + px(legend_y) + "\" x2=\"" +
           px(legend_x + 26) + "\" y2=\"" + px(legend_y) + "\" stroke=\"" + observed_color +
           "\" stroke-width=\"2\"/>\n";
    svg += "  <text x=\"" + px(legend_x + 32) + "\" y=\"" + px(legend_y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">Observed nominal gap</text>\n";
    svg += "  <line x1=\"" + px(legend_x) + "\" y1=\"" + px(legend_y + 18) + "\" x2=\"" +
           px(legend_x + 26) + "\" y2=\"" + px(legend_y + 18) + "\" stroke=\"" + score_color +
           "\" stroke-width=\"2\"/>\n";
    svg += "  <text x=\"" + px(legend_x + 32) + "\" y=\"" + px(legend_y + 22) +
           "\" font-family=\"sans-serif\" font-size=\"12\">Sarafina score</text>\n";

    svg += "</svg>\n";
    return svg;
}

// ---------------------------------------------------------------------------
// files

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed while reading '" + path + "'");
    }
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

}  // namespace sarafina
