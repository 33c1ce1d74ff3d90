#include "potus/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace potus {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string format3(const Rational& r) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", r.to_double());
    return buf;
}

/// Paper-table row label: "Policies - Interests".
std::string row_label(Dimension d) {
    const std::string_view name = dimension_name(d);
    std::string out;
    for (const char c : name) {
        if (c == '-')
            out += " - ";
        else
            out.push_back(c);
    }
    return out;
}

std::string score_cell(LikertScore s) {
    return s.render() + "/5";
}

} // namespace

ReportFormat report_format_from_name(std::string_view name) {
    if (name == "markdown" || name == "md")
        return ReportFormat::Markdown;
    if (name == "csv")
        return ReportFormat::Csv;
    if (name == "json")
        return ReportFormat::Json;
    throw Error("unknown report format '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Comparison tables
// ---------------------------------------------------------------------------

ComparisonTable ComparisonTable::from_run(const RunRecord& record) {
    if (record.status != RunStatus::Ok || !record.parsed)
        throw IncompleteAssessmentError("run " + record.debate_id + " x " +
                                        record.model.model_id + " has no complete assessments (" +
                                        record.error + ")");
    ComparisonTable t;
    t.debate_id = record.debate_id;
    t.model_id = record.model.model_id;
    t.assessments = record.parsed->assessments;
    return t;
}

std::string render_comparison(const ComparisonTable& table, ReportFormat format) {
    if (table.assessments.size() < 2)
        throw IncompleteAssessmentError("comparison table for " + table.debate_id +
                                        " needs at least 2 candidates, got " +
                                        std::to_string(table.assessments.size()));

    switch (format) {
    case ReportFormat::Markdown: {
        std::string out;
        out += "### " + table.debate_id + " LLM-POTUS Scores " + table.model_id + " Comparison\n\n";
        out += "| Aspect |";
        for (const auto& a : table.assessments)
            out += " " + a.candidate.display_name + " |";
        out += "\n|---|";
        for (std::size_t i = 0; i < table.assessments.size(); ++i)
            out += "---|";
        out += "\n";
        for (const Dimension d : kDimensions) {
            out += "| " + row_label(d) + " |";
            for (const auto& a : table.assessments)
                out += " " + score_cell(a.assessment(d).score) + " |";
            out += "\n";
        }
        out += "| **Average Score** |";
        for (const auto& a : table.assessments)
            out += " **" + format_cents(a.potus_score_cents) + "** |";
        out += "\n";
        if (table.weights) {
            out += "| **Weighted Score** |";
            for (const auto& a : table.assessments)
                out += " **" +
                       format_cents(compute_weighted_score_cents(a.scores(), *table.weights)) +
                       "** |";
            out += "\n";
        }
        return out;
    }
    case ReportFormat::Csv: {
        std::string out = "debate_id,model,candidate,dimension,score\n";
        for (const auto& a : table.assessments) {
            for (const Dimension d : kDimensions)
                out += table.debate_id + "," + table.model_id + "," + a.candidate.display_name +
                       "," + std::string(dimension_name(d)) + "," +
                       a.assessment(d).score.render() + "\n";
            out += table.debate_id + "," + table.model_id + "," + a.candidate.display_name +
                   ",llm_potus," + format_cents(a.potus_score_cents) + "\n";
            if (table.weights)
                out += table.debate_id + "," + table.model_id + "," + a.candidate.display_name +
                       ",weighted," +
                       format_cents(compute_weighted_score_cents(a.scores(), *table.weights)) +
                       "\n";
        }
        return out;
    }
    case ReportFormat::Json: {
        json candidates = json::array();
        for (const auto& a : table.assessments) {
            json scores;
            for (const Dimension d : kDimensions)
                scores[std::string(dimension_name(d))] = a.assessment(d).score.render();
            json c = {{"name", a.candidate.display_name},
                      {"party", std::string(party_name(a.candidate.party))},
                      {"scores", scores},
                      {"llm_potus", format_cents(a.potus_score_cents)}};
            if (table.weights)
                c["weighted"] =
                    format_cents(compute_weighted_score_cents(a.scores(), *table.weights));
            candidates.push_back(c);
        }
        const json j = {{"debate_id", table.debate_id},
                        {"model", table.model_id},
                        {"candidates", candidates}};
        return j.dump(2) + "\n";
    }
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

namespace {

struct SummaryRow {
    int year = 0;
    std::string debate_id;
    std::string model_id;
    std::string candidate;
    std::string potus; // empty for failed cells
    std::string status;
};

std::vector<SummaryRow> summary_rows(std::span<const RunRecord> records) {
    std::vector<const RunRecord*> sorted;
    for (const auto& r : records)
        if (r.trial == 0)
            sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
        if (a->cycle_year != b->cycle_year)
            return a->cycle_year < b->cycle_year;
        if (a->model.model_id != b->model.model_id)
            return a->model.model_id < b->model.model_id;
        return a->debate_id < b->debate_id;
    });

    std::vector<SummaryRow> rows;
    for (const RunRecord* r : sorted) {
        if (r->status == RunStatus::Ok && r->parsed) {
            for (const auto& a : r->parsed->assessments)
                rows.push_back({r->cycle_year, r->debate_id, r->model.model_id,
                                a.candidate.display_name, format_cents(a.potus_score_cents),
                                std::string(run_status_name(r->status))});
        } else {
            rows.push_back({r->cycle_year, r->debate_id, r->model.model_id, "-", "",
                            std::string(run_status_name(r->status))});
        }
    }
    return rows;
}

} // namespace

std::string render_summary(std::span<const RunRecord> records, ReportFormat format) {
    const auto rows = summary_rows(records);
    switch (format) {
    case ReportFormat::Markdown: {
        std::string out = "### LLM-POTUS Score Summary\n\n";
        out += "| Year | Debate | Model | Candidate | LLM-POTUS | Status |\n";
        out += "|---|---|---|---|---|---|\n";
        for (const auto& r : rows)
            out += "| " + std::to_string(r.year) + " | " + r.debate_id + " | " + r.model_id +
                   " | " + r.candidate + " | " + r.potus + " | " + r.status + " |\n";
        return out;
    }
    case ReportFormat::Csv: {
        std::string out = "year,debate_id,model,candidate,llm_potus,status\n";
        for (const auto& r : rows)
            out += std::to_string(r.year) + "," + r.debate_id + "," + r.model_id + "," +
                   r.candidate + "," + r.potus + "," + r.status + "\n";
        return out;
    }
    case ReportFormat::Json: {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"year", r.year},
                           {"debate_id", r.debate_id},
                           {"model", r.model_id},
                           {"candidate", r.candidate},
                           {"llm_potus", r.potus},
                           {"status", r.status}});
        return arr.dump(2) + "\n";
    }
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// Agreement
// ---------------------------------------------------------------------------

std::string render_agreement(const AgreementReport& report, ReportFormat format) {
    switch (format) {
    case ReportFormat::Markdown: {
        std::string out = "### Inter-model agreement\n";
        for (const auto& debate : report.debates) {
            out += "\n#### " + debate.debate_id + "\n\n";
            out += "Models compared:";
            for (const auto& m : debate.models_compared)
                out += " " + m;
            out += "\n";
            if (!debate.models_missing.empty()) {
                out += "Coverage gaps (no usable record):";
                for (const auto& m : debate.models_missing)
                    out += " " + m;
                out += "\n";
            }
            for (const auto& c : debate.candidates) {
                out += "\n**" + c.display_name + "**\n\n";
                if (c.potus_by_model.size() < 2) {
                    out += "Covered by fewer than two models; no agreement computed.\n";
                    continue;
                }
                out += "| Dimension |";
                for (const auto& [model, score] : c.dimensions[0].score_by_model)
                    out += " " + model + " |";
                out += " MAD | Exact |\n|---|";
                for (std::size_t i = 0; i < c.dimensions[0].score_by_model.size() + 2; ++i)
                    out += "---|";
                out += "\n";
                for (const Dimension d : kDimensions) {
                    const auto& da = c.dimensions[static_cast<std::size_t>(d)];
                    out += "| " + row_label(d) + " |";
                    for (const auto& [model, score] : da.score_by_model)
                        out += " " + score_cell(score) + " |";
                    out += " " + format3(da.mad) + " | " + format3(da.exact_rate) + " |\n";
                }
                out += "\nOverall MAD " + format3(c.mad) + ", exact agreement " +
                       format3(c.exact_rate) + ", LLM-POTUS spread " +
                       format_cents(c.potus_spread_cents) + " (";
                bool first = true;
                for (const auto& [model, cents] : c.potus_by_model) {
                    if (!first)
                        out += ", ";
                    out += model + " " + format_cents(cents);
                    first = false;
                }
                out += ").\n";
            }
        }
        return out;
    }
    case ReportFormat::Csv: {
        std::string out = "debate_id,candidate,dimension,model,score,mad,exact_rate,spread\n";
        for (const auto& debate : report.debates) {
            for (const auto& c : debate.candidates) {
                if (c.potus_by_model.size() < 2)
                    continue;
                for (const Dimension d : kDimensions) {
                    const auto& da = c.dimensions[static_cast<std::size_t>(d)];
                    for (const auto& [model, score] : da.score_by_model)
                        out += debate.debate_id + "," + c.display_name + "," +
                               std::string(dimension_name(d)) + "," + model + "," +
                               score.render() + "," + format3(da.mad) + "," +
                               format3(da.exact_rate) + ",\n";
                }
                out += debate.debate_id + "," + c.display_name + ",overall,,," + format3(c.mad) +
                       "," + format3(c.exact_rate) + "," + format_cents(c.potus_spread_cents) +
                       "\n";
            }
        }
        return out;
    }
    case ReportFormat::Json: {
        json debates = json::array();
        for (const auto& debate : report.debates) {
            json candidates = json::array();
            for (const auto& c : debate.candidates) {
                json dims;
                for (const Dimension d : kDimensions) {
                    const auto& da = c.dimensions[static_cast<std::size_t>(d)];
                    json scores;
                    for (const auto& [model, score] : da.score_by_model)
                        scores[model] = score.render();
                    dims[std::string(dimension_name(d))] = {
                        {"scores", scores},
                        {"mad", format3(da.mad)},
                        {"exact_rate", format3(da.exact_rate)}};
                }
                json potus;
                for (const auto& [model, cents] : c.potus_by_model)
                    potus[model] = format_cents(cents);
                candidates.push_back({{"name", c.display_name},
                                      {"dimensions", dims},
                                      {"mad", format3(c.mad)},
                                      {"exact_rate", format3(c.exact_rate)},
                                      {"llm_potus", potus},
                                      {"spread", format_cents(c.potus_spread_cents)}});
            }
            debates.push_back({{"debate_id", debate.debate_id},
                               {"models_compared", debate.models_compared},
                               {"models_missing", debate.models_missing},
                               {"candidates", candidates}});
        }
        return json{{"debates", debates}}.dump(2) + "\n";
    }
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// Fixture verification
// ---------------------------------------------------------------------------

FixtureVerification verify_fixtures(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir))
        throw FixtureMissingError("fixture directory " + dir.string() + " does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    if (files.empty())
        throw FixtureMissingError("no .txt fixtures in " + dir.string());
    std::sort(files.begin(), files.end());

    FixtureVerification v;
    std::set<std::string> debates_seen;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();

        FixtureResult result;
        std::vector<CandidateRef> roster;
        std::string body;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            const std::string line =
                nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
            pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
            const std::string t = trim(line);
            if (t.rfind("#:", 0) == 0) {
                // header line "#: key: value"
                const std::string rest = trim(t.substr(2));
                const auto colon = rest.find(':');
                if (colon == std::string::npos)
                    throw FixtureMissingError(file.string() + ": malformed header '" + t + "'");
                const std::string key = trim(rest.substr(0, colon));
                const std::string value = trim(rest.substr(colon + 1));
                if (key == "debate") {
                    result.debate_id = value;
                } else if (key == "model") {
                    result.model_id = value;
                } else if (key == "year") {
                    result.year = std::stoi(value);
                } else if (key == "candidate") {
                    // "Display Name | Party | LABEL"
                    std::vector<std::string> parts;
                    std::size_t p = 0;
                    while (true) {
                        const auto bar = value.find('|', p);
                        parts.push_back(trim(std::string_view(value).substr(
                            p, bar == std::string::npos ? std::string::npos : bar - p)));
                        if (bar == std::string::npos)
                            break;
                        p = bar + 1;
                    }
                    if (parts.size() != 3)
                        throw FixtureMissingError(file.string() + ": malformed candidate '" +
                                                  value + "'");
                    roster.push_back({parts[0], party_from_name(parts[1]), parts[2]});
                }
            } else {
                body += line;
                body += '\n';
            }
        }
        if (result.debate_id.empty() || result.model_id.empty() || roster.size() < 2)
            throw FixtureMissingError(file.string() +
                                      ": fixture needs debate, model and >=2 candidate headers");

        result.parsed = parse_judge_text(body, roster);
        debates_seen.insert(result.debate_id);

        for (const auto& a : result.parsed.assessments) {
            const auto printed = result.parsed.printed_average_cents.find(
                a.candidate.display_name);
            const std::string recomputed = format_cents(a.potus_score_cents);
            if (printed == result.parsed.printed_average_cents.end()) {
                v.mismatches.push_back({result.debate_id, result.model_id,
                                        a.candidate.display_name, "(missing)", recomputed});
            } else if (printed->second != a.potus_score_cents) {
                v.mismatches.push_back({result.debate_id, result.model_id,
                                        a.candidate.display_name, format_cents(printed->second),
                                        recomputed});
            }
        }
        v.results.push_back(std::move(result));
    }
    v.debates = static_cast<int>(debates_seen.size());
    return v;
}

std::string render_verification(const FixtureVerification& v) {
    std::string out = std::to_string(v.debates) + " debates, " +
                      std::to_string(v.results.size()) + " result sets, " +
                      std::to_string(v.mismatches.size()) + " mismatches\n";
    for (const auto& m : v.mismatches)
        out += "MISMATCH " + m.debate_id + " " + m.model_id + " " + m.candidate + ": printed " +
               m.printed + ", recomputed " + m.recomputed + "\n";
    return out;
}

} // namespace potus
