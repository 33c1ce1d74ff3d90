#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "potus/rubric.hpp"
#include "potus/transcript.hpp"

namespace potus {

class TooFewCandidatesError : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class MissingCandidateError : public Error {
public:
    using Error::Error;
};

class AmbiguousCandidateMatchError : public Error {
public:
    using Error::Error;
};

/// A score token that exists but fails Likert validation; carries the line.
class MalformedScoreError : public Error {
public:
    using Error::Error;
};

class EmptyLexiconError : public Error {
public:
    using Error::Error;
};

enum class ScoringMode { SingleScore, PerGroupBreakdown };

std::string_view scoring_mode_name(ScoringMode m);
ScoringMode scoring_mode_from_name(std::string_view name);

// ---------------------------------------------------------------------------
// Prompt building
// ---------------------------------------------------------------------------

/// A versioned prompt template with {{transcript}}, {{candidates}} and
/// {{mode}} placeholders split into system and user parts.
struct PromptTemplate {
    std::string version;
    std::string system_text;
    std::string user_text;

    static PromptTemplate load(const std::filesystem::path& path);
    /// Compiled-in copy of the v1 template, for callers without a data dir.
    static const PromptTemplate& builtin();
};

struct PromptSpec {
    std::string system_text;
    std::string user_text;
    std::string template_version;
    std::string render_hash; // sha256 over version + rendered bytes
};

/// Renders the rubric prompt. The transcript goes in as raw_text, untouched.
PromptSpec build_prompt(const Transcript& t, ScoringMode mode,
                        const PromptTemplate& tmpl = PromptTemplate::builtin());

// ---------------------------------------------------------------------------
// Judge responses
// ---------------------------------------------------------------------------

struct JudgeModelSpec {
    std::string provider_id;
    std::string model_id;
    double temperature = 0.0;
    int max_output_tokens = 4096;
    /// Offline backend only: per-model lexicon override.
    std::string lexicon_path;

    bool operator==(const JudgeModelSpec&) const = default;
};

struct RawJudgeResponse {
    std::string text;
    JudgeModelSpec model;
    std::int64_t latency_ms = 0;
    bool from_cache = false;
    int attempts = 1; // network attempts; 0 on cache hit
};

struct ParsedJudgeOutput {
    std::vector<CandidateAssessment> assessments; // roster order
    /// Averages the judge itself printed ("LLM-POTUS Score: 4.17"), by
    /// display name, in hundredths. Reports recompute and only use these
    /// for consistency checks.
    std::map<std::string, std::int64_t> printed_average_cents;
    std::string unparsed_remainder;
};

/// Extracts per-candidate dimension scores and evidence bullets from judge
/// output. Tolerates markdown decoration, "X / 5" spacing, and prose around
/// the grammar; candidates are matched by case-insensitive name containment.
ParsedJudgeOutput parse_judge_text(std::string_view text, std::span<const CandidateRef> roster);
ParsedJudgeOutput parse_judge_response(const RawJudgeResponse& raw,
                                       std::span<const CandidateRef> roster);

/// Emits assessments in exactly the grammar parse_judge_text understands.
std::string render_assessments(std::span<const CandidateAssessment> assessments);

// ---------------------------------------------------------------------------
// Offline judge
// ---------------------------------------------------------------------------

/// Keyword lexicon for the deterministic offline judge: per dimension a
/// keyword list and a saturation count at which the score reaches 5.
struct OfflineLexicon {
    struct Entry {
        std::vector<std::string> keywords;
        int saturation = 6;
    };
    std::map<Dimension, Entry> by_dimension;

    void validate() const;
    static OfflineLexicon parse(std::string_view text);
    static OfflineLexicon load(const std::filesystem::path& path);
    static OfflineLexicon builtin();
};

/// Deterministic test double: per candidate and dimension,
/// score = half-step-rounded (1 + 4 * min(1, hits / saturation)) where hits
/// counts case-insensitive whole-word lexicon matches in that candidate's
/// turns only. Output is in the judge grammar.
RawJudgeResponse offline_judge(const Transcript& t, const OfflineLexicon& lexicon,
                               const JudgeModelSpec& model = {"offline", "offline-lexicon"});

} // namespace potus
