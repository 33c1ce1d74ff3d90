#include "potus/rubric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace potus {

namespace {

std::string fold(std::string_view s) {
    // Lowercase and drop everything but letters, so "Policies - Interests",
    // "policies-interests" and "Policies-Interests" compare equal.
    std::string out;
    out.reserve(s.size());
    for (const char c : s)
        if (std::isalpha(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

} // namespace

std::string_view party_name(Party p) {
    switch (p) {
    case Party::Democratic: return "Democratic";
    case Party::Republican: return "Republican";
    case Party::Other: return "Other";
    }
    return "Other";
}

Party party_from_name(std::string_view name) {
    const std::string f = fold(name);
    if (f == "democratic" || f == "democrat")
        return Party::Democratic;
    if (f == "republican")
        return Party::Republican;
    return Party::Other;
}

std::string CandidateRef::surname() const {
    const auto pos = display_name.find_last_of(" \t");
    return pos == std::string::npos ? display_name : display_name.substr(pos + 1);
}

std::string_view dimension_name(Dimension d) {
    switch (d) {
    case Dimension::PoliciesInterests: return "Policies-Interests";
    case Dimension::PersonaIdentity: return "Persona-Identity";
    case Dimension::PerspectiveIdeologies: return "Perspective-Ideologies";
    }
    return "";
}

std::string_view dimension_config_key(Dimension d) {
    switch (d) {
    case Dimension::PoliciesInterests: return "policies_interests";
    case Dimension::PersonaIdentity: return "persona_identity";
    case Dimension::PerspectiveIdeologies: return "perspective_ideologies";
    }
    return "";
}

std::optional<Dimension> dimension_from_name(std::string_view name) {
    const std::string f = fold(name);
    for (const Dimension d : kDimensions) {
        if (f == fold(dimension_name(d)) || f == fold(dimension_config_key(d)))
            return d;
    }
    return std::nullopt;
}

std::string_view audience_group_name(AudienceGroup g) {
    switch (g) {
    case AudienceGroup::Voters: return "Voters";
    case AudienceGroup::Businesses: return "Businesses";
    case AudienceGroup::Donors: return "Donors";
    case AudienceGroup::Politicians: return "Politicians";
    }
    return "";
}

std::optional<AudienceGroup> audience_group_from_name(std::string_view name) {
    const std::string f = fold(name);
    for (const AudienceGroup g : kAudienceGroups)
        if (f == fold(audience_group_name(g)))
            return g;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// LikertScore
// ---------------------------------------------------------------------------

LikertScore LikertScore::from_half_points(int hp) {
    if (hp < 2 || hp > 10)
        throw OutOfRangeError("Likert score " + std::to_string(hp / 2.0) + " outside [1, 5]");
    return LikertScore(hp);
}

LikertScore LikertScore::from_value(double v) {
    return validate_likert(v);
}

LikertScore LikertScore::parse(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1])))
        --e;
    const std::string_view t = text.substr(b, e - b);
    if (t.empty())
        throw NotHalfStepError("empty score text");

    std::string whole, frac;
    bool seen_dot = false;
    for (const char c : t) {
        if (c == '.') {
            if (seen_dot)
                throw NotHalfStepError("malformed score '" + std::string(t) + "'");
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            (seen_dot ? frac : whole).push_back(c);
        } else {
            throw NotHalfStepError("malformed score '" + std::string(t) + "'");
        }
    }
    if (whole.empty() || whole.size() > 2)
        throw NotHalfStepError("malformed score '" + std::string(t) + "'");

    const int whole_v = std::stoi(whole);
    int hp = whole_v * 2;
    if (frac == "" || frac == "0" || frac == "00") {
        // whole score
    } else if (frac == "5" || frac == "50") {
        hp += 1;
    } else {
        throw NotHalfStepError("score '" + std::string(t) + "' is not a half step");
    }
    if (whole_v < 1 || hp < 2 || hp > 10)
        throw OutOfRangeError("score '" + std::string(t) + "' outside [1, 5]");
    return LikertScore(hp);
}

LikertScore validate_likert(double x) {
    if (x < 1.0 || x > 5.0)
        throw OutOfRangeError("Likert score " + std::to_string(x) + " outside [1, 5]");
    const double doubled = x * 2.0;
    const double rounded = std::nearbyint(doubled);
    if (doubled != rounded)
        throw NotHalfStepError("Likert score " + std::to_string(x) + " is not a half step");
    return LikertScore::from_half_points(static_cast<int>(rounded));
}

std::string LikertScore::render() const {
    std::string out = std::to_string(half_points_ / 2);
    if (half_points_ % 2 != 0)
        out += ".5";
    return out;
}

std::string likert_label(LikertScore s) {
    static constexpr std::array<std::string_view, 5> kAnchors = {"Poor", "Fair", "Moderate",
                                                                 "Good", "Strong"};
    const int hp = s.half_points();
    if (hp % 2 == 0)
        return std::string(kAnchors[hp / 2 - 1]) + " alignment";
    const auto lower = kAnchors[(hp - 1) / 2 - 1];
    const auto upper = kAnchors[(hp + 1) / 2 - 1];
    return "between " + std::string(lower) + " and " + std::string(upper) + " alignment";
}

// ---------------------------------------------------------------------------
// Score algebra
// ---------------------------------------------------------------------------

DimensionScores DimensionScores::from_list(
    std::span<const std::pair<Dimension, LikertScore>> items) {
    std::array<std::optional<LikertScore>, 3> slots;
    for (const auto& [dim, score] : items) {
        auto& slot = slots[static_cast<std::size_t>(dim)];
        if (slot.has_value())
            throw DuplicateDimensionError("dimension " + std::string(dimension_name(dim)) +
                                          " supplied more than once");
        slot = score;
    }
    for (const Dimension d : kDimensions)
        if (!slots[static_cast<std::size_t>(d)].has_value())
            throw MissingDimensionError("dimension " + std::string(dimension_name(d)) +
                                        " missing");
    return {*slots[0], *slots[1], *slots[2]};
}

std::int64_t compute_potus_score_cents(const DimensionScores& scores) {
    Rational sum{0, 1};
    for (const Dimension d : kDimensions)
        sum = sum + scores.at(d).rational();
    return (sum / Rational{3}).round_cents();
}

DimensionWeights::DimensionWeights(Rational policies, Rational persona, Rational perspective)
    : weights_{policies, persona, perspective} {
    Rational sum{0, 1};
    for (const auto& w : weights_) {
        if (w < Rational{0})
            throw InvalidWeightsError("dimension weight " + w.str() + " is negative");
        sum = sum + w;
    }
    if (!(sum == Rational{1}))
        throw InvalidWeightsError("dimension weights sum to " + sum.str() + ", expected 1");
}

std::int64_t compute_weighted_score_cents(const DimensionScores& scores,
                                          const DimensionWeights& weights) {
    Rational sum{0, 1};
    for (const Dimension d : kDimensions)
        sum = sum + weights.weight(d) * scores.at(d).rational();
    return sum.round_cents();
}

CandidateAssessment CandidateAssessment::make(CandidateRef candidate,
                                              std::vector<DimensionAssessment> assessments) {
    std::array<std::optional<DimensionAssessment>, 3> slots;
    for (auto& a : assessments) {
        auto& slot = slots[static_cast<std::size_t>(a.dimension)];
        if (slot.has_value())
            throw DuplicateDimensionError("candidate " + candidate.display_name + ": dimension " +
                                          std::string(dimension_name(a.dimension)) + " duplicated");
        slot = std::move(a);
    }
    for (const Dimension d : kDimensions)
        if (!slots[static_cast<std::size_t>(d)].has_value())
            throw MissingDimensionError("candidate " + candidate.display_name + ": dimension " +
                                        std::string(dimension_name(d)) + " missing");

    CandidateAssessment out;
    out.candidate = std::move(candidate);
    out.assessments = {std::move(*slots[0]), std::move(*slots[1]), std::move(*slots[2])};
    out.potus_score_cents = compute_potus_score_cents(out.scores());
    return out;
}

DimensionScores CandidateAssessment::scores() const {
    return {assessments[0].score, assessments[1].score, assessments[2].score};
}

} // namespace potus
