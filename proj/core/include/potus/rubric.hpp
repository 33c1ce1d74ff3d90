#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "potus/candidate.hpp"
#include "potus/errors.hpp"
#include "potus/rational.hpp"

namespace potus {

// ---------------------------------------------------------------------------
// Dimensions and audience groups
// ---------------------------------------------------------------------------

/// The three alignment dimensions, in canonical report order.
enum class Dimension { PoliciesInterests, PersonaIdentity, PerspectiveIdeologies };

inline constexpr std::array<Dimension, 3> kDimensions = {
    Dimension::PoliciesInterests, Dimension::PersonaIdentity, Dimension::PerspectiveIdeologies};

std::string_view dimension_name(Dimension d);       // "Policies-Interests"
std::string_view dimension_config_key(Dimension d); // "policies_interests"
/// Tolerant lookup: case-insensitive, accepts "Policies - Interests" spacing.
std::optional<Dimension> dimension_from_name(std::string_view name);

enum class AudienceGroup { Voters, Businesses, Donors, Politicians };

inline constexpr std::array<AudienceGroup, 4> kAudienceGroups = {
    AudienceGroup::Voters, AudienceGroup::Businesses, AudienceGroup::Donors,
    AudienceGroup::Politicians};

std::string_view audience_group_name(AudienceGroup g);
std::optional<AudienceGroup> audience_group_from_name(std::string_view name);

// ---------------------------------------------------------------------------
// Likert scale
// ---------------------------------------------------------------------------

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

class NotHalfStepError : public Error {
public:
    using Error::Error;
};

/// A 1-5 alignment score in half steps. Stored as half points (2..10) so
/// score arithmetic never touches floating point.
class LikertScore {
public:
    static LikertScore from_half_points(int hp);
    static LikertScore from_value(double v); // same checks as validate_likert
    /// Exact parse of decimal text: "4", "4.5", "4.50". "4.25" is NotHalfStep.
    static LikertScore parse(std::string_view text);

    [[nodiscard]] int half_points() const { return half_points_; }
    [[nodiscard]] double value() const { return half_points_ / 2.0; }
    [[nodiscard]] bool is_integer() const { return half_points_ % 2 == 0; }
    [[nodiscard]] Rational rational() const { return {half_points_, 2}; }

    /// "4" for whole scores, "4.5" for half scores.
    [[nodiscard]] std::string render() const;

    auto operator<=>(const LikertScore&) const = default;

private:
    explicit LikertScore(int hp) : half_points_(hp) {}
    int half_points_ = 2;
};

/// Throws OutOfRangeError / NotHalfStepError for anything outside the scale.
LikertScore validate_likert(double x);

/// "Moderate alignment" for whole scores, "between Good and Strong alignment"
/// for half scores.
std::string likert_label(LikertScore s);

// ---------------------------------------------------------------------------
// Assessments
// ---------------------------------------------------------------------------

struct EvidenceBullet {
    std::string topic;
    std::string justification;

    bool operator==(const EvidenceBullet&) const = default;
};

struct DimensionAssessment {
    Dimension dimension = Dimension::PoliciesInterests;
    LikertScore score = LikertScore::from_half_points(2);
    std::vector<EvidenceBullet> evidence;
    /// Present only in per-group breakdown mode.
    std::map<AudienceGroup, LikertScore> group_scores;

    bool operator==(const DimensionAssessment&) const = default;
};

class MissingDimensionError : public Error {
public:
    using Error::Error;
};

class DuplicateDimensionError : public Error {
public:
    using Error::Error;
};

/// Exactly one score per dimension, canonical order.
class DimensionScores {
public:
    DimensionScores(LikertScore policies, LikertScore persona, LikertScore perspective)
        : scores_{policies, persona, perspective} {}

    /// Validates exactly-once coverage of all three dimensions.
    static DimensionScores from_list(std::span<const std::pair<Dimension, LikertScore>> items);

    [[nodiscard]] LikertScore at(Dimension d) const {
        return scores_[static_cast<std::size_t>(d)];
    }

    bool operator==(const DimensionScores&) const = default;

private:
    std::array<LikertScore, 3> scores_;
};

/// Simple average of the three dimension scores, exact until the final
/// 2-decimal rounding (halves away from zero). Returns hundredths: 417 = 4.17.
std::int64_t compute_potus_score_cents(const DimensionScores& scores);

class InvalidWeightsError : public Error {
public:
    using Error::Error;
};

/// Non-negative per-dimension weights summing to exactly 1.
class DimensionWeights {
public:
    DimensionWeights(Rational policies, Rational persona, Rational perspective);

    static DimensionWeights uniform() {
        return {{1, 3}, {1, 3}, {1, 3}};
    }

    [[nodiscard]] const Rational& weight(Dimension d) const {
        return weights_[static_cast<std::size_t>(d)];
    }

private:
    std::array<Rational, 3> weights_;
};

/// Weighted mean at 2 decimals; uniform weights reproduce
/// compute_potus_score_cents exactly.
std::int64_t compute_weighted_score_cents(const DimensionScores& scores,
                                          const DimensionWeights& weights);

/// One candidate's three dimension assessments plus the derived score.
/// The score is always recomputed from the dimension scores, never trusted
/// from whatever document the assessments came from.
struct CandidateAssessment {
    CandidateRef candidate;
    std::array<DimensionAssessment, 3> assessments; // canonical dimension order
    std::int64_t potus_score_cents = 0;

    /// Validates all three dimensions present exactly once and computes the score.
    static CandidateAssessment make(CandidateRef candidate,
                                    std::vector<DimensionAssessment> assessments);

    [[nodiscard]] const DimensionAssessment& assessment(Dimension d) const {
        return assessments[static_cast<std::size_t>(d)];
    }
    [[nodiscard]] DimensionScores scores() const;

    bool operator==(const CandidateAssessment&) const = default;
};

} // namespace potus
