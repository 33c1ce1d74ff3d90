#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "potus/candidate.hpp"
#include "potus/errors.hpp"

namespace potus {

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class NoRecognizedSpeakersError : public Error {
public:
    using Error::Error;
};

/// Strict mode only: an unlisted speaker label appeared.
class UnknownLabelError : public Error {
public:
    UnknownLabelError(std::string label, int line_number)
        : Error("unknown speaker label '" + label + "' at line " + std::to_string(line_number)),
          label(std::move(label)), line_number(line_number) {}

    std::string label;
    int line_number;
};

class MetaError : public Error {
public:
    using Error::Error;
};

enum class Role { Candidate, Moderator, Other };

std::string_view role_name(Role r);

struct DebateMeta {
    std::string debate_id;
    int cycle_year = 0;
    std::vector<CandidateRef> candidates;
    std::vector<std::string> moderators; // speaker labels
    std::string source;

    /// Enforces the invariants: year in [1960, 2100], candidates non-empty
    /// with pairwise-distinct uppercase labels.
    void validate() const;

    [[nodiscard]] Role role_of(std::string_view speaker_label) const;
    [[nodiscard]] const CandidateRef* candidate_by_label(std::string_view speaker_label) const;
};

struct Turn {
    int index = 0;
    std::string speaker_label;
    Role role = Role::Other;
    std::string text;
    std::vector<std::string> annotations; // stage directions, e.g. "APPLAUSE"

    bool operator==(const Turn&) const = default;
};

/// A parsed debate. raw_text is the byte-exact original document and is what
/// judges receive; turns exist for metadata, statistics, and the offline judge.
struct Transcript {
    DebateMeta meta;
    std::vector<Turn> turns;
    std::string raw_text;

    [[nodiscard]] std::vector<const Turn*> turns_of(std::string_view speaker_label) const;
};

struct ParseOptions {
    /// Error on speaker labels absent from the meta instead of mapping them
    /// to Role::Other.
    bool strict = false;
};

/// Splits raw into speaker turns by `LABEL:` lines (longest-prefix match on
/// the label grammar); lines without a label continue the previous turn;
/// all-caps tokens in () or [] are stripped into annotations. raw_text is
/// preserved byte-for-byte regardless of what parsing does.
Transcript parse_transcript(std::string_view raw, const DebateMeta& meta, ParseOptions opts = {});

/// The normalized one-line-per-turn form; parse(render(t)) == t.turns.
std::string render_transcript(const Transcript& t);

struct SpeakerStat {
    std::string speaker_label;
    Role role = Role::Other;
    int turns = 0;
    std::int64_t words = 0;
    double share = 0.0;
};

/// Per-speaker turn/word counts in first-appearance order; shares sum to 1.
std::vector<SpeakerStat> speaker_stats(const Transcript& t);

/// CSV with header "speaker,turns,words,share".
std::string speaker_stats_csv(const std::vector<SpeakerStat>& stats);

/// Sidecar metadata: `key = value` lines with repeatable `candidate` and
/// `moderator` keys, candidate values "Display Name | Party | LABEL".
DebateMeta parse_debate_meta(std::string_view text);
DebateMeta load_debate_meta(const std::filesystem::path& path);

/// Loads `<file>.txt` plus its sidecar (default `<file>.meta`).
Transcript load_transcript_file(const std::filesystem::path& txt_path,
                                std::optional<std::filesystem::path> meta_path = std::nullopt,
                                ParseOptions opts = {});

} // namespace potus
