#include "potus/judge.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "potus/sha256.hpp"

namespace potus {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string fold_letters(std::string_view s) {
    std::string out;
    for (const char c : s)
        if (std::isalpha(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

/// Drops markdown decoration characters so "**Persona-Identity Score: 4 / 5**"
/// and "#### Persona-Identity Score: 4/5" parse the same way.
std::string strip_decoration(std::string_view line) {
    std::string out;
    out.reserve(line.size());
    for (const char c : line)
        if (c != '#' && c != '*' && c != '_' && c != '`')
            out.push_back(c);
    return trim(out);
}

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

/// Case-sensitive needle-in-haystack with non-alphanumeric boundaries on
/// both sides; both inputs expected pre-lowercased.
bool contains_word(std::string_view hay, std::string_view needle) {
    if (needle.empty())
        return false;
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || !is_alnum(hay[pos - 1]);
        const std::size_t end = pos + needle.size();
        const bool right_ok = end == hay.size() || !is_alnum(hay[end]);
        if (left_ok && right_ok)
            return true;
        ++pos;
    }
    return false;
}

/// Finds "X/5" or "X / 5"; returns the score text before the slash.
std::optional<std::string> find_score_over_five(std::string_view line) {
    for (std::size_t slash = 0; slash < line.size(); ++slash) {
        if (line[slash] != '/')
            continue;
        std::size_t r = slash + 1;
        while (r < line.size() && line[r] == ' ')
            ++r;
        if (r >= line.size() || line[r] != '5')
            continue;
        if (r + 1 < line.size() && is_alnum(line[r + 1]))
            continue;
        std::size_t l = slash;
        while (l > 0 && line[l - 1] == ' ')
            --l;
        std::size_t start = l;
        while (start > 0 && (std::isdigit(static_cast<unsigned char>(line[start - 1])) ||
                             line[start - 1] == '.'))
            --start;
        if (start == l)
            continue;
        return std::string(line.substr(start, l - start));
    }
    return std::nullopt;
}

/// Last decimal number in the line, e.g. the "4.00" of
/// "LLM-POTUS Score: (4 + 4 + 4) / 3 = 4.00".
std::optional<std::string> last_number(std::string_view line) {
    std::size_t end = line.size();
    while (end > 0) {
        if (!std::isdigit(static_cast<unsigned char>(line[end - 1]))) {
            --end;
            continue;
        }
        std::size_t start = end;
        while (start > 0 && (std::isdigit(static_cast<unsigned char>(line[start - 1])) ||
                             line[start - 1] == '.'))
            --start;
        return std::string(line.substr(start, end - start));
    }
    return std::nullopt;
}

bool ends_like_sentence(std::string_view s) {
    if (s.empty())
        return false;
    const char c = s.back();
    return c == '.' || c == '!' || c == '?' || c == ';' || c == ',';
}

std::optional<Dimension> find_dimension_mention(std::string_view folded_line) {
    for (const Dimension d : kDimensions)
        if (folded_line.find(fold_letters(dimension_name(d))) != std::string::npos)
            return d;
    return std::nullopt;
}

class CandidateMatcher {
public:
    explicit CandidateMatcher(std::span<const CandidateRef> roster) {
        for (const auto& c : roster)
            entries_.push_back({lower(c.display_name), lower(c.surname())});
    }

    [[nodiscard]] std::vector<std::size_t> match(std::string_view line_lower) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (contains_word(line_lower, entries_[i].full) ||
                contains_word(line_lower, entries_[i].surname))
                out.push_back(i);
        return out;
    }

    /// True when two matched entries cannot be told apart (shared surname).
    [[nodiscard]] bool shares_surname(const std::vector<std::size_t>& matched) const {
        for (std::size_t i = 0; i < matched.size(); ++i)
            for (std::size_t j = i + 1; j < matched.size(); ++j)
                if (entries_[matched[i]].surname == entries_[matched[j]].surname)
                    return true;
        return false;
    }

private:
    struct Entry {
        std::string full;
        std::string surname;
    };
    std::vector<Entry> entries_;
};

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

constexpr std::string_view kSingleScoreInstruction =
    "Give exactly one score line per dimension for each candidate.";

constexpr std::string_view kBreakdownInstruction =
    "Under each dimension heading, first give one score line per audience group, "
    "formatted \"- Voters: X/5\", \"- Businesses: X/5\", \"- Donors: X/5\", "
    "\"- Politicians: X/5\", before the evidence bullets. The dimension score is "
    "the average of the four group scores, rounded to the nearest half point.";

} // namespace

std::string_view scoring_mode_name(ScoringMode m) {
    return m == ScoringMode::SingleScore ? "single_score" : "per_group_breakdown";
}

ScoringMode scoring_mode_from_name(std::string_view name) {
    const std::string f = fold_letters(name);
    if (f == "singlescore" || f == "single")
        return ScoringMode::SingleScore;
    if (f == "pergroupbreakdown" || f == "breakdown" || f == "pergroup")
        return ScoringMode::PerGroupBreakdown;
    throw Error("unknown scoring mode '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Prompt template
// ---------------------------------------------------------------------------

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw TemplateError("cannot open template " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    PromptTemplate tmpl;
    std::string* target = nullptr;
    std::size_t pos = 0;
    bool first_content_line = true;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line =
            nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        const std::string t = trim(line);
        if (first_content_line && !t.empty()) {
            if (t.rfind("version:", 0) != 0)
                throw TemplateError(path.string() + ": first line must be 'version: <id>'");
            tmpl.version = trim(t.substr(8));
            first_content_line = false;
        } else if (t == "--- system ---") {
            target = &tmpl.system_text;
        } else if (t == "--- user ---") {
            target = &tmpl.user_text;
        } else if (target != nullptr) {
            target->append(line);
            target->push_back('\n');
        }
        if (nl == std::string::npos)
            break;
        pos = nl + 1;
    }
    if (tmpl.version.empty() || tmpl.system_text.empty() || tmpl.user_text.empty())
        throw TemplateError(path.string() + ": template needs a version, a system and a user part");
    return tmpl;
}

const PromptTemplate& PromptTemplate::builtin() {
    static const PromptTemplate tmpl = [] {
        PromptTemplate t;
        t.version = "rubric_v1";
        t.system_text = R"(You are an impartial judge of presidential debate performances. You evaluate
how well each candidate's Policies, Persona, and Perspective align with the
Interests, Identity, and Ideologies of four audience groups: voters,
businesses, donors, and politicians.

Score each candidate on three dimensions:
1. Policies-Interests Alignment: how well the candidate's proposed policies
   resonate with the interests of the electorate.
2. Persona-Identity Alignment: how effectively the candidate's personal brand
   and image align with the identity of their target voters.
3. Perspective-Ideologies Alignment: how closely the candidate's worldview and
   ideological stance match those of their supporters.

Each dimension receives a Likert score from 1 to 5; half points are allowed:
1: Poor alignment
2: Fair alignment
3: Moderate alignment
4: Good alignment
5: Strong alignment

{{mode}}

Format your answer for every candidate exactly like this, with no prose
between a candidate's heading and their final score line:

### <Candidate Name>

#### Policies-Interests Score: <X>/5
- <topic>: <one-sentence justification>

#### Persona-Identity Score: <X>/5
- <topic>: <one-sentence justification>

#### Perspective-Ideologies Score: <X>/5
- <topic>: <one-sentence justification>

LLM-POTUS Score: <average of the three dimension scores, two decimals>
)";
        t.user_text = R"(Candidates:
{{candidates}}

Here is the complete, unedited debate transcript:

{{transcript}}
)";
        return t;
    }();
    return tmpl;
}

PromptSpec build_prompt(const Transcript& t, ScoringMode mode, const PromptTemplate& tmpl) {
    if (t.meta.candidates.size() < 2)
        throw TooFewCandidatesError("debate " + t.meta.debate_id + " lists " +
                                    std::to_string(t.meta.candidates.size()) +
                                    " candidate(s); need at least 2");

    std::string candidates_block;
    for (const auto& c : t.meta.candidates) {
        candidates_block += "- " + c.display_name + " (" + std::string(party_name(c.party)) +
                            "), transcript label " + c.speaker_label + "\n";
    }
    if (!candidates_block.empty())
        candidates_block.pop_back();

    const std::string_view mode_text =
        mode == ScoringMode::SingleScore ? kSingleScoreInstruction : kBreakdownInstruction;

    const auto substitute = [&](std::string s) {
        s = replace_all(std::move(s), "{{mode}}", mode_text);
        s = replace_all(std::move(s), "{{candidates}}", candidates_block);
        s = replace_all(std::move(s), "{{transcript}}", t.raw_text);
        return s;
    };

    PromptSpec spec;
    spec.template_version = tmpl.version;
    spec.system_text = substitute(tmpl.system_text);
    spec.user_text = substitute(tmpl.user_text);

    for (const Dimension d : kDimensions)
        if (spec.system_text.find(dimension_name(d)) == std::string::npos)
            throw TemplateError("template " + tmpl.version + " does not name dimension " +
                                std::string(dimension_name(d)));
    for (const std::string_view anchor :
         {"Poor alignment", "Fair alignment", "Moderate alignment", "Good alignment",
          "Strong alignment"})
        if (spec.system_text.find(anchor) == std::string::npos)
            throw TemplateError("template " + tmpl.version + " is missing the Likert anchor '" +
                                std::string(anchor) + "'");

    std::string hashed;
    hashed += spec.template_version;
    hashed.push_back('\n');
    hashed += spec.system_text;
    hashed.push_back('\0');
    hashed += spec.user_text;
    spec.render_hash = Sha256::hex(hashed);
    return spec;
}

// ---------------------------------------------------------------------------
// Response parsing
// ---------------------------------------------------------------------------

namespace {

struct Section {
    std::optional<LikertScore> score;
    std::vector<EvidenceBullet> evidence;
    std::map<AudienceGroup, LikertScore> group_scores;
};

struct Block {
    bool seen = false;
    std::array<Section, 3> sections;
    std::optional<std::int64_t> printed_average;
};

LikertScore parse_score_checked(const std::string& text, int line_no, const std::string& line) {
    try {
        return LikertScore::parse(text);
    } catch (const OutOfRangeError& e) {
        throw MalformedScoreError("line " + std::to_string(line_no) + " ('" + line +
                                  "'): " + e.what());
    } catch (const NotHalfStepError& e) {
        throw MalformedScoreError("line " + std::to_string(line_no) + " ('" + line +
                                  "'): " + e.what());
    }
}

} // namespace

ParsedJudgeOutput parse_judge_text(std::string_view text, std::span<const CandidateRef> roster) {
    if (roster.empty())
        throw Error("parse_judge_text: empty roster");

    const CandidateMatcher matcher(roster);
    std::vector<Block> blocks(roster.size());
    std::optional<std::size_t> current_cand;
    std::optional<Dimension> current_dim;
    ParsedJudgeOutput out;

    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw_line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        // Bullet markers are recognized before markdown stripping; "* " is a
        // bullet while "**bold**" is decoration.
        const std::string trimmed = trim(raw_line);
        bool bullet = false;
        std::string_view content = trimmed;
        for (const std::string_view marker : {"- ", "+ ", "* ", "\xE2\x80\xA2 "}) {
            if (content.substr(0, marker.size()) == marker) {
                bullet = true;
                content = content.substr(marker.size());
                break;
            }
        }

        const std::string stripped = strip_decoration(content);
        if (stripped.empty())
            continue;
        const std::string low = lower(stripped);
        const std::string folded = fold_letters(stripped);

        const auto to_remainder = [&] {
            out.unparsed_remainder += trimmed;
            out.unparsed_remainder += '\n';
        };

        // Printed LLM-POTUS / average lines terminate the dimension section.
        if (folded.find("llmpotus") != std::string::npos ||
            folded.find("averagescore") != std::string::npos) {
            const auto eq = stripped.rfind('=');
            const std::string tail = eq == std::string::npos ? stripped : stripped.substr(eq + 1);
            std::optional<std::int64_t> cents;
            if (const auto num = last_number(tail)) {
                try {
                    cents = Rational::parse(*num).round_cents();
                } catch (const Error&) {
                    cents = std::nullopt;
                }
            }
            const auto matched = matcher.match(low);
            std::optional<std::size_t> target = current_cand;
            if (matched.size() == 1)
                target = matched[0];
            if (cents && target) {
                blocks[*target].printed_average = *cents;
                blocks[*target].seen = true;
            } else {
                to_remainder();
            }
            current_dim.reset();
            continue;
        }

        const auto dim = find_dimension_mention(folded);

        // Dimension score lines, optionally naming the candidate inline.
        if (dim && !bullet) {
            const auto matched = matcher.match(low);
            if (matched.size() == 1) {
                current_cand = matched[0];
                blocks[*current_cand].seen = true;
            }
            if (!current_cand) {
                to_remainder();
                continue;
            }
            current_dim = dim;
            auto& section = blocks[*current_cand].sections[static_cast<std::size_t>(*dim)];
            if (const auto score_text = find_score_over_five(stripped)) {
                const LikertScore score = parse_score_checked(*score_text, line_no, stripped);
                if (!section.score)
                    section.score = score;
            }
            // A heading without a score is legal in breakdown mode; the
            // group lines below will supply it.
            continue;
        }

        if (bullet) {
            std::string topic = stripped;
            std::string justification;
            if (const auto colon = stripped.find(':'); colon != std::string::npos) {
                topic = trim(std::string_view(stripped).substr(0, colon));
                justification = trim(std::string_view(stripped).substr(colon + 1));
            }
            // A bulleted dimension score still counts as a score line.
            if (dim && find_score_over_five(stripped) && current_cand) {
                const auto score_text = find_score_over_five(stripped);
                const LikertScore score = parse_score_checked(*score_text, line_no, stripped);
                current_dim = dim;
                auto& section = blocks[*current_cand].sections[static_cast<std::size_t>(*dim)];
                if (!section.score)
                    section.score = score;
                continue;
            }
            if (current_cand && current_dim) {
                auto& section =
                    blocks[*current_cand].sections[static_cast<std::size_t>(*current_dim)];
                const auto group = audience_group_from_name(topic);
                if (group) {
                    if (const auto score_text = find_score_over_five(justification)) {
                        const LikertScore score =
                            parse_score_checked(*score_text, line_no, stripped);
                        section.group_scores.insert({*group, score});
                        continue;
                    }
                }
                if (!topic.empty()) {
                    section.evidence.push_back({topic, justification});
                    continue;
                }
            }
            to_remainder();
            continue;
        }

        // Candidate headings: short non-sentence lines naming exactly one
        // roster member.
        const auto matched = matcher.match(low);
        if (!matched.empty() && stripped.size() <= 64 && !ends_like_sentence(stripped)) {
            if (matched.size() > 1 && matcher.shares_surname(matched))
                throw AmbiguousCandidateMatchError("line " + std::to_string(line_no) + " ('" +
                                                   stripped +
                                                   "') matches more than one candidate");
            if (matched.size() == 1) {
                current_cand = matched[0];
                blocks[*current_cand].seen = true;
                current_dim.reset();
                continue;
            }
        }
        to_remainder();
    }

    for (std::size_t i = 0; i < roster.size(); ++i) {
        if (!blocks[i].seen)
            throw MissingCandidateError("no assessment block found for candidate " +
                                        roster[i].display_name);
        std::vector<DimensionAssessment> assessments;
        for (const Dimension d : kDimensions) {
            auto& section = blocks[i].sections[static_cast<std::size_t>(d)];
            std::optional<LikertScore> score = section.score;
            if (!score && section.group_scores.size() == kAudienceGroups.size()) {
                // derive the dimension score: group mean rounded to the
                // nearest half point, halves away from zero
                int sum_hp = 0;
                for (const auto& [g, s] : section.group_scores)
                    sum_hp += s.half_points();
                score = LikertScore::from_half_points(
                    static_cast<int>((2 * sum_hp + 4) / 8));
            }
            if (score)
                assessments.push_back(
                    {d, *score, std::move(section.evidence), std::move(section.group_scores)});
        }
        try {
            out.assessments.push_back(
                CandidateAssessment::make(roster[i], std::move(assessments)));
        } catch (const MissingDimensionError& e) {
            throw MissingDimensionError(std::string(e.what()) + " in judge response");
        }
        if (blocks[i].printed_average)
            out.printed_average_cents[roster[i].display_name] = *blocks[i].printed_average;
    }
    return out;
}

ParsedJudgeOutput parse_judge_response(const RawJudgeResponse& raw,
                                       std::span<const CandidateRef> roster) {
    return parse_judge_text(raw.text, roster);
}

std::string render_assessments(std::span<const CandidateAssessment> assessments) {
    std::string out;
    for (const auto& ca : assessments) {
        out += "### " + ca.candidate.display_name + "\n\n";
        for (const Dimension d : kDimensions) {
            const auto& a = ca.assessment(d);
            out += "#### " + std::string(dimension_name(d)) +
                   " Score: " + a.score.render() + "/5\n";
            for (const AudienceGroup g : kAudienceGroups) {
                const auto it = a.group_scores.find(g);
                if (it != a.group_scores.end())
                    out += "- " + std::string(audience_group_name(g)) + ": " +
                           it->second.render() + "/5\n";
            }
            for (const auto& bullet : a.evidence) {
                out += "- " + bullet.topic;
                if (!bullet.justification.empty())
                    out += ": " + bullet.justification;
                out += '\n';
            }
            out += '\n';
        }
        out += "LLM-POTUS Score: " + format_cents(ca.potus_score_cents) + "\n\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Offline judge
// ---------------------------------------------------------------------------

void OfflineLexicon::validate() const {
    for (const Dimension d : kDimensions) {
        const auto it = by_dimension.find(d);
        if (it == by_dimension.end() || it->second.keywords.empty())
            throw EmptyLexiconError("lexicon has no keywords for dimension " +
                                    std::string(dimension_name(d)));
        if (it->second.saturation < 1)
            throw EmptyLexiconError("lexicon saturation must be >= 1 for dimension " +
                                    std::string(dimension_name(d)));
    }
}

OfflineLexicon OfflineLexicon::parse(std::string_view text) {
    OfflineLexicon lex;
    std::optional<Dimension> current;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line = trim(nl == std::string_view::npos
                                          ? text.substr(pos)
                                          : text.substr(pos, nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        if (line.front() == '[' && line.back() == ']') {
            const auto dim = dimension_from_name(line.substr(1, line.size() - 2));
            if (!dim)
                throw EmptyLexiconError("line " + std::to_string(line_no) +
                                        ": unknown dimension section '" + line + "'");
            current = dim;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || !current)
            throw EmptyLexiconError("line " + std::to_string(line_no) +
                                    ": expected '[Dimension]' or 'key = value', got '" + line +
                                    "'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        auto& entry = lex.by_dimension[*current];
        if (key == "saturation") {
            entry.saturation = std::stoi(value);
        } else if (key == "keywords") {
            std::size_t p = 0;
            while (p <= value.size()) {
                const auto comma = value.find(',', p);
                const std::string kw = trim(std::string_view(value).substr(
                    p, comma == std::string::npos ? std::string::npos : comma - p));
                if (!kw.empty())
                    entry.keywords.push_back(lower(kw));
                if (comma == std::string::npos)
                    break;
                p = comma + 1;
            }
        } else {
            throw EmptyLexiconError("line " + std::to_string(line_no) + ": unknown key '" + key +
                                    "'");
        }
    }
    lex.validate();
    return lex;
}

OfflineLexicon OfflineLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw EmptyLexiconError("cannot open lexicon " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

OfflineLexicon OfflineLexicon::builtin() {
    OfflineLexicon lex;
    lex.by_dimension[Dimension::PoliciesInterests] = {
        {"healthcare", "taxes", "jobs", "economy", "immigration", "climate", "education"}, 6};
    lex.by_dimension[Dimension::PersonaIdentity] = {
        {"leader", "experience", "fight", "family", "community", "record"}, 6};
    lex.by_dimension[Dimension::PerspectiveIdeologies] = {
        {"freedom", "government", "rights", "america", "future", "values"}, 6};
    return lex;
}

namespace {

int count_word_hits(const std::string& haystack_lower, const std::string& needle_lower) {
    if (needle_lower.empty())
        return 0;
    int hits = 0;
    std::size_t pos = 0;
    while ((pos = haystack_lower.find(needle_lower, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_alnum(haystack_lower[pos - 1]);
        const std::size_t end = pos + needle_lower.size();
        const bool right_ok = end == haystack_lower.size() || !is_alnum(haystack_lower[end]);
        if (left_ok && right_ok) {
            ++hits;
            pos = end;
        } else {
            ++pos;
        }
    }
    return hits;
}

} // namespace

RawJudgeResponse offline_judge(const Transcript& t, const OfflineLexicon& lexicon,
                               const JudgeModelSpec& model) {
    lexicon.validate();

    std::vector<CandidateAssessment> assessments;
    for (const auto& candidate : t.meta.candidates) {
        std::string spoken;
        for (const Turn* turn : t.turns_of(candidate.speaker_label)) {
            spoken += turn->text;
            spoken += '\n';
        }
        const std::string spoken_lower = lower(spoken);

        std::vector<DimensionAssessment> dims;
        for (const Dimension d : kDimensions) {
            const auto& entry = lexicon.by_dimension.at(d);
            int total_hits = 0;
            std::vector<EvidenceBullet> evidence;
            for (const auto& kw : entry.keywords) {
                const int hits = count_word_hits(spoken_lower, kw);
                if (hits > 0) {
                    total_hits += hits;
                    evidence.push_back(
                        {kw, "mentioned " + std::to_string(hits) + " time(s)"});
                }
            }
            const int clamped = std::min(total_hits, entry.saturation);
            // score = 1 + 4 * clamped / saturation, rounded to the nearest
            // half point: half_points = round(2 + 8 * clamped / saturation)
            const int s = entry.saturation;
            const int hp = (2 * (2 * s + 8 * clamped) + s) / (2 * s);
            dims.push_back({d, LikertScore::from_half_points(hp), std::move(evidence), {}});
        }
        assessments.push_back(CandidateAssessment::make(candidate, std::move(dims)));
    }

    RawJudgeResponse resp;
    resp.text = render_assessments(assessments);
    resp.model = model;
    resp.latency_ms = 0;
    resp.from_cache = false;
    resp.attempts = 1;
    return resp;
}

} // namespace potus
