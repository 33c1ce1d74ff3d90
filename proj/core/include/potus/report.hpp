#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potus/orchestrator.hpp"
#include "potus/rubric.hpp"

namespace potus {

class IncompleteAssessmentError : public Error {
public:
    using Error::Error;
};

class FixtureMissingError : public Error {
public:
    using Error::Error;
};

enum class ReportFormat { Markdown, Csv, Json };

ReportFormat report_format_from_name(std::string_view name);

// ---------------------------------------------------------------------------
// Comparison tables
// ---------------------------------------------------------------------------

/// One debate x model score table. Footer averages are recomputed from the
/// dimension scores, never copied from the source document.
struct ComparisonTable {
    std::string debate_id;
    std::string model_id;
    std::vector<CandidateAssessment> assessments; // roster order
    std::optional<DimensionWeights> weights;      // adds a weighted footer row

    static ComparisonTable from_run(const RunRecord& record);
};

/// Rows in canonical dimension order, scores as "4/5" / "4.5/5", averages at
/// exactly two decimals. Throws IncompleteAssessmentError below 2 candidates.
std::string render_comparison(const ComparisonTable& table, ReportFormat format);

// ---------------------------------------------------------------------------
// Multi-cycle summary and agreement
// ---------------------------------------------------------------------------

/// All runs in one document, sorted by cycle year ascending then model id.
std::string render_summary(std::span<const RunRecord> records, ReportFormat format);

std::string render_agreement(const AgreementReport& report, ReportFormat format);

// ---------------------------------------------------------------------------
// Fixture verification
// ---------------------------------------------------------------------------

/// A parsed golden fixture: one published result set (debate x judge model).
struct FixtureResult {
    std::string debate_id;
    std::string model_id;
    int year = 0;
    ParsedJudgeOutput parsed;
};

struct FixtureMismatch {
    std::string debate_id;
    std::string model_id;
    std::string candidate;
    std::string printed;    // what the fixture claims
    std::string recomputed; // what the dimension scores actually average to
};

struct FixtureVerification {
    std::vector<FixtureResult> results;
    std::vector<FixtureMismatch> mismatches;
    int debates = 0;

    [[nodiscard]] bool ok() const { return mismatches.empty(); }
};

/// Reads every .txt fixture under dir (header lines `# key: value`, then a
/// judge-grammar body), reparses it, and checks each candidate's printed
/// average against the recomputed one.
FixtureVerification verify_fixtures(const std::filesystem::path& dir);

/// "4 debates, 8 result sets, 0 mismatches" plus one line per mismatch.
std::string render_verification(const FixtureVerification& v);

} // namespace potus
