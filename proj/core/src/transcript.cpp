#include "potus/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

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

std::string to_upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

/// Replaces invalid UTF-8 sequences with U+FFFD. Turn text goes through this;
/// raw_text never does.
std::string utf8_lossy(std::string_view in) {
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        const auto c = static_cast<unsigned char>(in[i]);
        std::size_t len = 0;
        if (c < 0x80)
            len = 1;
        else if ((c & 0xE0) == 0xC0)
            len = 2;
        else if ((c & 0xF0) == 0xE0)
            len = 3;
        else if ((c & 0xF8) == 0xF0)
            len = 4;
        if (len == 0 || i + len > in.size()) {
            out += kReplacement;
            ++i;
            continue;
        }
        bool valid = true;
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(in[i + k]) & 0xC0) != 0x80)
                valid = false;
        if (!valid) {
            out += kReplacement;
            ++i;
            continue;
        }
        out.append(in.substr(i, len));
        i += len;
    }
    return out;
}

/// Matches `^[A-Z][A-Z .'\-]{1,30}:` against a trimmed line. Returns the
/// label (trimmed, without the colon) and the offset just past the colon.
std::optional<std::pair<std::string, std::size_t>> match_speaker_label(std::string_view line) {
    if (line.empty() || line[0] < 'A' || line[0] > 'Z')
        return std::nullopt;
    const auto in_class = [](char c) {
        return (c >= 'A' && c <= 'Z') || c == ' ' || c == '.' || c == '\'' || c == '-';
    };
    std::size_t i = 1;
    while (i < line.size() && i <= 31 && in_class(line[i]))
        ++i;
    if (i < 2 || i > 31 || i >= line.size() || line[i] != ':')
        return std::nullopt;
    return std::make_pair(trim(line.substr(0, i)), i + 1);
}

bool is_annotation_token(std::string_view inner) {
    if (inner.empty())
        return false;
    bool has_letter = false;
    for (const char c : inner) {
        if (c >= 'A' && c <= 'Z') {
            has_letter = true;
        } else if (c != ' ' && c != '-' && c != '.' && c != '!' && c != ',') {
            return false;
        }
    }
    return has_letter;
}

/// Strips all-caps () / [] stage directions out of a line; returns the
/// remaining speech with runs of spaces collapsed.
std::string strip_annotations(std::string_view line, std::vector<std::string>& annotations) {
    std::string kept;
    kept.reserve(line.size());
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '(' || c == '[') {
            const char close = c == '(' ? ')' : ']';
            const auto end = line.find(close, i + 1);
            if (end != std::string_view::npos) {
                const std::string inner = trim(line.substr(i + 1, end - i - 1));
                if (is_annotation_token(inner)) {
                    annotations.push_back(inner);
                    i = end + 1;
                    continue;
                }
            }
        }
        kept.push_back(c);
        ++i;
    }
    // collapse doubled spaces left behind by removals
    std::string out;
    out.reserve(kept.size());
    bool prev_space = false;
    for (const char c : kept) {
        const bool space = c == ' ' || c == '\t';
        if (space && prev_space)
            continue;
        out.push_back(space ? ' ' : c);
        prev_space = space;
    }
    return trim(out);
}

std::int64_t count_words(std::string_view text) {
    std::int64_t n = 0;
    bool in_word = false;
    for (const char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word)
            ++n;
        in_word = !space;
    }
    return n;
}

} // namespace

std::string_view role_name(Role r) {
    switch (r) {
    case Role::Candidate: return "Candidate";
    case Role::Moderator: return "Moderator";
    case Role::Other: return "Other";
    }
    return "Other";
}

void DebateMeta::validate() const {
    if (debate_id.empty())
        throw MetaError("debate_id is empty");
    if (cycle_year < 1960 || cycle_year > 2100)
        throw MetaError("cycle_year " + std::to_string(cycle_year) + " outside [1960, 2100]");
    if (candidates.empty())
        throw MetaError("no candidates listed for debate " + debate_id);
    std::set<std::string> labels;
    for (const auto& c : candidates) {
        if (c.speaker_label.empty())
            throw MetaError("candidate " + c.display_name + " has an empty speaker label");
        if (to_upper(c.speaker_label) != c.speaker_label)
            throw MetaError("candidate label '" + c.speaker_label + "' is not uppercase");
        if (!labels.insert(c.speaker_label).second)
            throw MetaError("duplicate candidate label '" + c.speaker_label + "'");
    }
}

Role DebateMeta::role_of(std::string_view speaker_label) const {
    if (candidate_by_label(speaker_label) != nullptr)
        return Role::Candidate;
    for (const auto& m : moderators)
        if (m == speaker_label)
            return Role::Moderator;
    return Role::Other;
}

const CandidateRef* DebateMeta::candidate_by_label(std::string_view speaker_label) const {
    for (const auto& c : candidates)
        if (c.speaker_label == speaker_label)
            return &c;
    return nullptr;
}

std::vector<const Turn*> Transcript::turns_of(std::string_view speaker_label) const {
    std::vector<const Turn*> out;
    for (const auto& t : turns)
        if (t.speaker_label == speaker_label)
            out.push_back(&t);
    return out;
}

Transcript parse_transcript(std::string_view raw, const DebateMeta& meta, ParseOptions opts) {
    if (raw.empty())
        throw EmptyInputError("transcript input is empty");
    meta.validate();

    Transcript out;
    out.meta = meta;
    out.raw_text = std::string(raw);

    const std::string decoded = utf8_lossy(raw);

    std::vector<std::string> pending_annotations; // annotation lines before the first turn
    Turn* current = nullptr;

    std::size_t pos = 0;
    int line_number = 0;
    while (pos <= decoded.size()) {
        const auto nl = decoded.find('\n', pos);
        const std::string_view line_raw =
            nl == std::string::npos ? std::string_view(decoded).substr(pos)
                                    : std::string_view(decoded).substr(pos, nl - pos);
        ++line_number;
        const std::string line = trim(line_raw);
        if (!line.empty()) {
            std::vector<std::string> annotations;
            std::string text;
            std::string label;
            bool starts_turn = false;
            if (const auto m = match_speaker_label(line)) {
                starts_turn = true;
                label = m->first;
                text = strip_annotations(std::string_view(line).substr(m->second), annotations);
            } else {
                text = strip_annotations(line, annotations);
            }

            if (starts_turn) {
                const Role role = meta.role_of(label);
                if (opts.strict && role == Role::Other)
                    throw UnknownLabelError(label, line_number);
                Turn turn;
                turn.index = static_cast<int>(out.turns.size());
                turn.speaker_label = label;
                turn.role = role;
                turn.text = text;
                turn.annotations = std::move(pending_annotations);
                pending_annotations.clear();
                turn.annotations.insert(turn.annotations.end(), annotations.begin(),
                                        annotations.end());
                out.turns.push_back(std::move(turn));
                current = &out.turns.back();
            } else if (current != nullptr) {
                // continuation of the previous turn
                current->annotations.insert(current->annotations.end(), annotations.begin(),
                                            annotations.end());
                if (!text.empty()) {
                    if (!current->text.empty())
                        current->text += ' ';
                    current->text += text;
                }
            } else {
                // annotation or prose before any speaker; keep the stage
                // directions and attach them to the first turn
                pending_annotations.insert(pending_annotations.end(), annotations.begin(),
                                           annotations.end());
            }
        }
        if (nl == std::string::npos)
            break;
        pos = nl + 1;
    }

    // A turn whose text stayed empty (label line followed only by stage
    // directions) folds its annotations into the previous turn.
    std::vector<Turn> kept;
    kept.reserve(out.turns.size());
    std::vector<std::string> orphaned;
    for (auto& turn : out.turns) {
        if (turn.text.empty()) {
            if (!kept.empty()) {
                kept.back().annotations.insert(kept.back().annotations.end(),
                                               turn.annotations.begin(), turn.annotations.end());
            } else {
                orphaned.insert(orphaned.end(), turn.annotations.begin(), turn.annotations.end());
            }
            continue;
        }
        turn.annotations.insert(turn.annotations.begin(), orphaned.begin(), orphaned.end());
        orphaned.clear();
        turn.index = static_cast<int>(kept.size());
        kept.push_back(std::move(turn));
    }
    out.turns = std::move(kept);

    if (out.turns.empty())
        throw NoRecognizedSpeakersError("no speaker turns found in debate " + meta.debate_id);
    const bool any_known = std::any_of(out.turns.begin(), out.turns.end(),
                                       [](const Turn& t) { return t.role != Role::Other; });
    if (!any_known)
        throw NoRecognizedSpeakersError("no turn matched a listed speaker label in debate " +
                                        meta.debate_id);
    return out;
}

std::string render_transcript(const Transcript& t) {
    std::string out;
    for (const auto& turn : t.turns) {
        out += turn.speaker_label;
        out += ": ";
        out += turn.text;
        for (const auto& a : turn.annotations) {
            out += " (";
            out += a;
            out += ')';
        }
        out += '\n';
    }
    return out;
}

std::vector<SpeakerStat> speaker_stats(const Transcript& t) {
    if (t.turns.empty())
        throw EmptyInputError("transcript has no turns");
    std::vector<SpeakerStat> stats;
    std::int64_t total_words = 0;
    for (const auto& turn : t.turns) {
        auto it = std::find_if(stats.begin(), stats.end(), [&](const SpeakerStat& s) {
            return s.speaker_label == turn.speaker_label;
        });
        if (it == stats.end()) {
            stats.push_back({turn.speaker_label, turn.role, 0, 0, 0.0});
            it = std::prev(stats.end());
        }
        it->turns += 1;
        it->words += count_words(turn.text);
    }
    for (const auto& s : stats)
        total_words += s.words;
    for (auto& s : stats)
        s.share = total_words == 0 ? 0.0
                                   : static_cast<double>(s.words) / static_cast<double>(total_words);
    return stats;
}

std::string speaker_stats_csv(const std::vector<SpeakerStat>& stats) {
    std::string out = "speaker,turns,words,share\n";
    for (const auto& s : stats) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%d,%lld,%.6f\n", s.speaker_label.c_str(), s.turns,
                      static_cast<long long>(s.words), s.share);
        out += buf;
    }
    return out;
}

DebateMeta parse_debate_meta(std::string_view text) {
    DebateMeta meta;
    std::size_t pos = 0;
    int line_number = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line = trim(nl == std::string_view::npos
                                          ? text.substr(pos)
                                          : text.substr(pos, nl - pos));
        ++line_number;
        if (!line.empty() && line[0] != '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw MetaError("line " + std::to_string(line_number) +
                                ": expected 'key = value', got '" + line + "'");
            const std::string key = trim(std::string_view(line).substr(0, eq));
            const std::string value = trim(std::string_view(line).substr(eq + 1));
            if (key == "debate_id") {
                meta.debate_id = value;
            } else if (key == "year") {
                try {
                    meta.cycle_year = std::stoi(value);
                } catch (const std::exception&) {
                    throw MetaError("line " + std::to_string(line_number) + ": bad year '" +
                                    value + "'");
                }
            } else if (key == "source") {
                meta.source = value;
            } else if (key == "candidate") {
                // Display Name | Party | LABEL
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
                if (parts.size() != 3 || parts[0].empty() || parts[2].empty())
                    throw MetaError("line " + std::to_string(line_number) +
                                    ": candidate needs 'Name | Party | LABEL'");
                meta.candidates.push_back(
                    {parts[0], party_from_name(parts[1]), to_upper(parts[2])});
            } else if (key == "moderator") {
                meta.moderators.push_back(to_upper(value));
            } else {
                throw MetaError("line " + std::to_string(line_number) + ": unknown key '" + key +
                                "'");
            }
        }
        if (nl == std::string_view::npos)
            break;
        pos = nl + 1;
    }
    meta.validate();
    return meta;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

DebateMeta load_debate_meta(const std::filesystem::path& path) {
    try {
        return parse_debate_meta(read_file(path));
    } catch (const MetaError& e) {
        throw MetaError(path.string() + ": " + e.what());
    }
}

Transcript load_transcript_file(const std::filesystem::path& txt_path,
                                std::optional<std::filesystem::path> meta_path,
                                ParseOptions opts) {
    std::filesystem::path mp = meta_path.value_or(
        std::filesystem::path(txt_path).replace_extension(".meta"));
    const DebateMeta meta = load_debate_meta(mp);
    return parse_transcript(read_file(txt_path), meta, opts);
}

} // namespace potus
