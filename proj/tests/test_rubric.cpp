#include <doctest.h>

#include "potus/rational.hpp"
#include "potus/rubric.hpp"

using namespace potus;

namespace {

DimensionScores triple(double p, double pe, double pi) {
    return {LikertScore::from_value(p), LikertScore::from_value(pe),
            LikertScore::from_value(pi)};
}

} // namespace

TEST_CASE("rational arithmetic and parsing") {
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-1, -3) == Rational(1, 3));
    CHECK(Rational(1, 2) * Rational(2, 3) == Rational(1, 3));
    CHECK(Rational(1) - Rational(2, 3) == Rational(1, 3));
    CHECK(Rational::parse("1/3") == Rational(1, 3));
    CHECK(Rational::parse("0.25") == Rational(1, 4));
    CHECK(Rational::parse("4.17") == Rational(417, 100));
    CHECK(Rational::parse("3") == Rational(3));
    CHECK_THROWS_AS(Rational::parse("x"), Error);
    CHECK_THROWS_AS(Rational(1, 0), Error);
}

TEST_CASE("round_cents rounds halves away from zero") {
    CHECK(Rational(25, 6).round_cents() == 417);  // 4.1666...
    CHECK(Rational(23, 6).round_cents() == 383);  // 3.8333...
    CHECK(Rational(7, 2).round_cents() == 350);
    CHECK(Rational(1, 800).round_cents() == 0);   // 0.00125
    CHECK(Rational(1, 8).round_cents() == 13);    // 0.125 -> 0.13
    CHECK(Rational(-1, 8).round_cents() == -13);
    CHECK(format_cents(417) == "4.17");
    CHECK(format_cents(400) == "4.00");
    CHECK(format_cents(5) == "0.05");
}

TEST_CASE("likert validation accepts half steps in [1,5]") {
    CHECK(validate_likert(4.5).half_points() == 9);
    CHECK(validate_likert(1.0).half_points() == 2);
    CHECK(validate_likert(5.0).half_points() == 10);
    CHECK_THROWS_AS(validate_likert(5.5), OutOfRangeError);
    CHECK_THROWS_AS(validate_likert(0.5), OutOfRangeError);
    CHECK_THROWS_AS(validate_likert(4.25), NotHalfStepError);
}

TEST_CASE("likert parse handles decimal text exactly") {
    CHECK(LikertScore::parse("4").half_points() == 8);
    CHECK(LikertScore::parse("4.5").half_points() == 9);
    CHECK(LikertScore::parse("4.50").half_points() == 9);
    CHECK(LikertScore::parse("4.0").half_points() == 8);
    CHECK(LikertScore::parse(" 3 ").half_points() == 6);
    CHECK_THROWS_AS(LikertScore::parse("4.25"), NotHalfStepError);
    CHECK_THROWS_AS(LikertScore::parse("5.5"), OutOfRangeError);
    CHECK_THROWS_AS(LikertScore::parse("0.5"), OutOfRangeError);
    CHECK_THROWS_AS(LikertScore::parse("banana"), NotHalfStepError);
    CHECK(LikertScore::parse("4").render() == "4");
    CHECK(LikertScore::parse("4.5").render() == "4.5");
}

TEST_CASE("likert labels") {
    CHECK(likert_label(LikertScore::parse("1")) == "Poor alignment");
    CHECK(likert_label(LikertScore::parse("3")) == "Moderate alignment");
    CHECK(likert_label(LikertScore::parse("5")) == "Strong alignment");
    CHECK(likert_label(LikertScore::parse("4.5")) == "between Good and Strong alignment");
    CHECK(likert_label(LikertScore::parse("1.5")) == "between Poor and Fair alignment");
}

TEST_CASE("potus score matches the published examples") {
    CHECK(compute_potus_score_cents(triple(3, 5, 4)) == 400);
    CHECK(compute_potus_score_cents(triple(4.5, 4, 4)) == 417);
    CHECK(compute_potus_score_cents(triple(4, 3.5, 4)) == 383);
    CHECK(compute_potus_score_cents(triple(5, 5, 5)) == 500);
    CHECK(compute_potus_score_cents(triple(1, 1, 1)) == 100);
}

TEST_CASE("potus score reproduces every published table average") {
    // (policies, persona, perspective) -> printed 2dp average,
    // both candidates of all eight result sets
    const struct {
        double p, pe, pi;
        const char* avg;
    } rows[] = {
        {4, 4, 4, "4.00"},     {3, 5, 4, "4.00"},   // 2024 gpt4o
        {4, 4, 4, "4.00"},     {3, 4, 4, "3.67"},   // 2024 claude3
        {4.5, 4, 4, "4.17"},   {3.5, 3.5, 3.5, "3.50"}, // 2020 gpt4o
        {4, 3, 4, "3.67"},     {3, 4, 4, "3.67"},   // 2020 claude3
        {4.5, 4, 4.5, "4.33"}, {4, 3.5, 4, "3.83"}, // 2016 gpt4o
        {4.5, 4, 4, "4.17"},   {4, 4, 4, "4.00"},   // 2016 claude3
        {4.5, 4, 4.5, "4.33"}, {4, 3.5, 4, "3.83"}, // 2012 gpt4o
        {4, 4, 5, "4.33"},     {4, 4, 4, "4.00"},   // 2012 claude3
    };
    for (const auto& row : rows)
        CHECK(format_cents(compute_potus_score_cents(triple(row.p, row.pe, row.pi))) == row.avg);
}

TEST_CASE("dimension scores require exactly one score per dimension") {
    const LikertScore four = LikertScore::parse("4");
    std::vector<std::pair<Dimension, LikertScore>> two = {
        {Dimension::PoliciesInterests, four}, {Dimension::PersonaIdentity, four}};
    CHECK_THROWS_AS(DimensionScores::from_list(two), MissingDimensionError);

    std::vector<std::pair<Dimension, LikertScore>> dup = {
        {Dimension::PoliciesInterests, four},
        {Dimension::PoliciesInterests, four},
        {Dimension::PersonaIdentity, four}};
    CHECK_THROWS_AS(DimensionScores::from_list(dup), DuplicateDimensionError);

    std::vector<std::pair<Dimension, LikertScore>> ok = {
        {Dimension::PerspectiveIdeologies, LikertScore::parse("5")},
        {Dimension::PoliciesInterests, LikertScore::parse("3")},
        {Dimension::PersonaIdentity, four}};
    CHECK(compute_potus_score_cents(DimensionScores::from_list(ok)) == 400);
}

TEST_CASE("weighted score: uniform weights reduce to the simple average") {
    const auto scores = triple(3, 5, 4);
    CHECK(compute_weighted_score_cents(scores, DimensionWeights::uniform()) == 400);
    CHECK(compute_weighted_score_cents(triple(3, 5, 4),
                                       DimensionWeights({1, 1}, {0, 1}, {0, 1})) == 300);
    // constant scores are invariant under any valid weights
    CHECK(compute_weighted_score_cents(triple(4, 4, 4),
                                       DimensionWeights({7, 10}, {1, 5}, {1, 10})) == 400);
}

TEST_CASE("weights validate on construction") {
    CHECK_THROWS_AS(DimensionWeights({1, 2}, {1, 2}, {1, 2}), InvalidWeightsError);
    CHECK_THROWS_AS(DimensionWeights({-1, 3}, {1, 3}, {1, 1}), InvalidWeightsError);
    CHECK_NOTHROW(DimensionWeights({1, 3}, {1, 3}, {1, 3}));
    CHECK_NOTHROW(DimensionWeights({1, 2}, {3, 10}, {1, 5}));
}

TEST_CASE("score algebra properties over all half-step triples") {
    std::vector<LikertScore> all;
    for (int hp = 2; hp <= 10; ++hp)
        all.push_back(LikertScore::from_half_points(hp));

    const auto uniform = DimensionWeights::uniform();
    for (const auto a : all) {
        for (const auto b : all) {
            for (const auto c : all) {
                const DimensionScores s{a, b, c};
                const auto cents = compute_potus_score_cents(s);
                // bounds
                CHECK(cents >= 100);
                CHECK(cents <= 500);
                // permutation invariance
                CHECK(cents == compute_potus_score_cents({b, c, a}));
                CHECK(cents == compute_potus_score_cents({c, a, b}));
                CHECK(cents == compute_potus_score_cents({b, a, c}));
                // uniform weights equal the simple average
                CHECK(cents == compute_weighted_score_cents(s, uniform));
            }
        }
    }
}

TEST_CASE("monotonicity: raising one dimension raises the pre-rounding mean") {
    for (int hp = 2; hp < 10; ++hp) {
        const auto low = LikertScore::from_half_points(hp);
        const auto high = LikertScore::from_half_points(hp + 1);
        const auto fixed = LikertScore::parse("3");
        const Rational before =
            (low.rational() + fixed.rational() + fixed.rational()) / Rational(3);
        const Rational after =
            (high.rational() + fixed.rational() + fixed.rational()) / Rational(3);
        CHECK(before < after);
    }
}

TEST_CASE("candidate assessment recomputes its score") {
    CandidateRef ref{"Joe Biden", Party::Democratic, "BIDEN"};
    std::vector<DimensionAssessment> dims = {
        {Dimension::PoliciesInterests, LikertScore::parse("4.5"), {{"Healthcare", "expanded"}}, {}},
        {Dimension::PersonaIdentity, LikertScore::parse("4"), {}, {}},
        {Dimension::PerspectiveIdeologies, LikertScore::parse("4"), {}, {}},
    };
    const auto ca = CandidateAssessment::make(ref, dims);
    CHECK(ca.potus_score_cents == 417);
    CHECK(ca.assessment(Dimension::PoliciesInterests).evidence.size() == 1);

    dims.pop_back();
    CHECK_THROWS_AS(CandidateAssessment::make(ref, dims), MissingDimensionError);

    dims.push_back({Dimension::PersonaIdentity, LikertScore::parse("2"), {}, {}});
    CHECK_THROWS_AS(CandidateAssessment::make(ref, dims), DuplicateDimensionError);
}

TEST_CASE("dimension and audience group name lookups are tolerant") {
    CHECK(dimension_from_name("Policies-Interests") == Dimension::PoliciesInterests);
    CHECK(dimension_from_name("policies - interests") == Dimension::PoliciesInterests);
    CHECK(dimension_from_name("PERSONA-IDENTITY") == Dimension::PersonaIdentity);
    CHECK(dimension_from_name("perspective_ideologies") == Dimension::PerspectiveIdeologies);
    CHECK(!dimension_from_name("integrity").has_value());
    CHECK(audience_group_from_name("Voters") == AudienceGroup::Voters);
    CHECK(audience_group_from_name("politicians") == AudienceGroup::Politicians);
    CHECK(!audience_group_from_name("senators").has_value());
}
