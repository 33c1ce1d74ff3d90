#include <doctest.h>

#include <random>

#include "potus/judge.hpp"
#include "support/test_util.hpp"

using namespace potus;

namespace {

DebateMeta toy_meta() {
    DebateMeta meta;
    meta.debate_id = "toy";
    meta.cycle_year = 2020;
    meta.candidates = {{"Joe Biden", Party::Democratic, "BIDEN"},
                       {"Donald Trump", Party::Republican, "TRUMP"}};
    meta.moderators = {"WALLACE"};
    return meta;
}

Transcript toy_transcript(const std::string& body) {
    return parse_transcript(body, toy_meta());
}

const std::vector<CandidateRef> kRoster = {{"Joe Biden", Party::Democratic, "BIDEN"},
                                           {"Donald Trump", Party::Republican, "TRUMP"}};

} // namespace

TEST_CASE("build_prompt is deterministic and content-sensitive") {
    const Transcript t = toy_transcript("BIDEN: Healthcare for all.\nTRUMP: Lower taxes.\n");
    const auto a = build_prompt(t, ScoringMode::SingleScore);
    const auto b = build_prompt(t, ScoringMode::SingleScore);
    CHECK(a.render_hash == b.render_hash);
    CHECK(a.render_hash.size() == 64);

    const Transcript t2 = toy_transcript("BIDEN: Healthcare for all.\nTRUMP: Lower taxes!\n");
    const auto c = build_prompt(t2, ScoringMode::SingleScore);
    CHECK(a.render_hash != c.render_hash);

    const auto d = build_prompt(t, ScoringMode::PerGroupBreakdown);
    CHECK(a.render_hash != d.render_hash);
}

TEST_CASE("build_prompt embeds the rubric and the verbatim transcript") {
    const Transcript t = toy_transcript("BIDEN: Healthcare.\nTRUMP: Taxes.\n");
    const auto p = build_prompt(t, ScoringMode::SingleScore);
    CHECK(p.system_text.find("Persona-Identity") != std::string::npos);
    CHECK(p.system_text.find("Policies-Interests") != std::string::npos);
    CHECK(p.system_text.find("Perspective-Ideologies") != std::string::npos);
    CHECK(p.system_text.find("voters,") != std::string::npos);
    CHECK(p.system_text.find("businesses, donors, and politicians") != std::string::npos);
    for (const char* anchor : {"Poor alignment", "Fair alignment", "Moderate alignment",
                               "Good alignment", "Strong alignment"})
        CHECK(p.system_text.find(anchor) != std::string::npos);
    CHECK(p.user_text.find(t.raw_text) != std::string::npos);
    CHECK(p.user_text.find("Joe Biden") != std::string::npos);
    CHECK(p.user_text.find("{{") == std::string::npos);
    CHECK(p.system_text.find("{{") == std::string::npos);
    CHECK(p.template_version == "rubric_v1");
}

TEST_CASE("build_prompt rejects rosters below two candidates") {
    DebateMeta meta = toy_meta();
    meta.candidates.resize(1);
    const Transcript t = parse_transcript("BIDEN: Hello there.\n", meta);
    CHECK_THROWS_AS(build_prompt(t, ScoringMode::SingleScore), TooFewCandidatesError);
}

TEST_CASE("template files load and render identically to the shipped copy") {
    const auto tmpl = PromptTemplate::load(POTUS_DATA_DIR "/templates/rubric_v1.txt");
    CHECK(tmpl.version == "rubric_v1");
    const Transcript t = toy_transcript("BIDEN: Healthcare.\nTRUMP: Taxes.\n");
    const auto p = build_prompt(t, ScoringMode::SingleScore, tmpl);
    CHECK(p.system_text.find("Persona-Identity") != std::string::npos);
    CHECK(p.render_hash.size() == 64);
}

TEST_CASE("parse recovers scores from the published heading style") {
    const std::string body = R"(### Joe Biden

#### Policies-Interests Score: 4.5/5
- Healthcare: Expanded coverage promises.

#### Persona-Identity Score: 4/5
- Empathy: Personal stories.

#### Perspective-Ideologies Score: 4/5
- Science: Evidence-driven plans.

LLM-POTUS Score: 4.17

### Donald Trump

#### Policies-Interests Score: 3.5/5
- Taxes: Cuts for corporations.

#### Persona-Identity Score: 3.5/5
- Outsider: Anti-establishment.

#### Perspective-Ideologies Score: 3.5/5
- Nationalism: America First.

LLM-POTUS Score: 3.50
)";
    const auto out = parse_judge_text(body, kRoster);
    REQUIRE(out.assessments.size() == 2);
    CHECK(out.assessments[0].candidate.display_name == "Joe Biden");
    CHECK(out.assessments[0].assessment(Dimension::PoliciesInterests).score.render() == "4.5");
    CHECK(out.assessments[0].potus_score_cents == 417);
    CHECK(out.assessments[1].potus_score_cents == 350);
    CHECK(out.printed_average_cents.at("Joe Biden") == 417);
    CHECK(out.printed_average_cents.at("Donald Trump") == 350);
    CHECK(out.assessments[0].assessment(Dimension::PoliciesInterests).evidence.at(0).topic ==
          "Healthcare");
}

TEST_CASE("parse tolerates markdown decoration and spaced fractions") {
    const std::string body =
        "**Joe Biden**\n"
        "**Policies-Interests Score: 4 / 5**\n"
        "* Healthcare: defended the law.\n"
        "__Persona-Identity Score: 3.5/5__\n"
        "#### Perspective - Ideologies Score: 4/5\n"
        "\n"
        "# Donald Trump\n"
        "Policies - Interests Score: 3 / 5\n"
        "Persona-Identity Score: 5/5\n"
        "Perspective-Ideologies Score: 4/5\n";
    const auto out = parse_judge_text(body, kRoster);
    REQUIRE(out.assessments.size() == 2);
    CHECK(out.assessments[0].assessment(Dimension::PoliciesInterests).score.render() == "4");
    CHECK(out.assessments[0].assessment(Dimension::PersonaIdentity).score.render() == "3.5");
    CHECK(out.assessments[0].assessment(Dimension::PoliciesInterests).evidence.size() == 1);
    CHECK(out.assessments[1].assessment(Dimension::PersonaIdentity).score.render() == "5");
    CHECK(out.assessments[1].potus_score_cents == 400); // (3+5+4)/3
}

TEST_CASE("parse reports the documented error taxonomy") {
    SUBCASE("missing dimension") {
        const std::string body = "### Joe Biden\n"
                                 "Policies-Interests Score: 4/5\n"
                                 "Persona-Identity Score: 4/5\n"
                                 "### Donald Trump\n"
                                 "Policies-Interests Score: 3/5\n"
                                 "Persona-Identity Score: 4/5\n"
                                 "Perspective-Ideologies Score: 4/5\n";
        CHECK_THROWS_AS(parse_judge_text(body, kRoster), MissingDimensionError);
    }
    SUBCASE("missing candidate") {
        const std::string body = "### Joe Biden\n"
                                 "Policies-Interests Score: 4/5\n"
                                 "Persona-Identity Score: 4/5\n"
                                 "Perspective-Ideologies Score: 4/5\n";
        CHECK_THROWS_AS(parse_judge_text(body, kRoster), MissingCandidateError);
    }
    SUBCASE("malformed score wraps the validation failure with context") {
        const std::string body = "### Joe Biden\n"
                                 "Policies-Interests Score: 4.25/5\n";
        try {
            parse_judge_text(body, kRoster);
            FAIL("expected MalformedScoreError");
        } catch (const MalformedScoreError& e) {
            CHECK(std::string(e.what()).find("4.25") != std::string::npos);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
        CHECK_THROWS_AS(
            parse_judge_text("### Joe Biden\nPolicies-Interests Score: 6/5\n", kRoster),
            MalformedScoreError);
    }
    SUBCASE("ambiguous candidate match") {
        const std::vector<CandidateRef> clintons = {
            {"Hillary Clinton", Party::Democratic, "H CLINTON"},
            {"Bill Clinton", Party::Democratic, "B CLINTON"}};
        const std::string body = "### Clinton\nPolicies-Interests Score: 4/5\n";
        CHECK_THROWS_AS(parse_judge_text(body, clintons), AmbiguousCandidateMatchError);
    }
    SUBCASE("empty roster") {
        CHECK_THROWS_AS(parse_judge_text("anything", {}), Error);
    }
}

TEST_CASE("prose mentioning both candidates stays in the remainder") {
    const std::string body =
        "Overall, Joe Biden and Donald Trump both played to their bases.\n"
        "### Joe Biden\n"
        "Policies-Interests Score: 4/5\n"
        "Persona-Identity Score: 4/5\n"
        "Perspective-Ideologies Score: 4/5\n"
        "### Donald Trump\n"
        "Policies-Interests Score: 3/5\n"
        "Persona-Identity Score: 4/5\n"
        "Perspective-Ideologies Score: 4/5\n"
        "That concludes the analysis.\n";
    const auto out = parse_judge_text(body, kRoster);
    REQUIRE(out.assessments.size() == 2);
    CHECK(out.unparsed_remainder.find("played to their bases") != std::string::npos);
    CHECK(out.unparsed_remainder.find("concludes the analysis") != std::string::npos);
}

TEST_CASE("render-to-grammar then parse recovers everything") {
    std::vector<CandidateAssessment> assessments;
    std::vector<DimensionAssessment> biden_dims = {
        {Dimension::PoliciesInterests,
         LikertScore::parse("4.5"),
         {{"Healthcare", "Expanded the program"}, {"Jobs", "Infrastructure plan"}},
         {}},
        {Dimension::PersonaIdentity, LikertScore::parse("4"), {{"Empathy", "Personal stories"}}, {}},
        {Dimension::PerspectiveIdeologies, LikertScore::parse("4"), {}, {}},
    };
    assessments.push_back(CandidateAssessment::make(kRoster[0], biden_dims));
    std::vector<DimensionAssessment> trump_dims = {
        {Dimension::PoliciesInterests, LikertScore::parse("3"), {{"Taxes", "Across-the-board cuts"}}, {}},
        {Dimension::PersonaIdentity, LikertScore::parse("5"), {}, {}},
        {Dimension::PerspectiveIdeologies, LikertScore::parse("4"), {{"Nationalism", "America First"}}, {}},
    };
    assessments.push_back(CandidateAssessment::make(kRoster[1], trump_dims));

    const std::string rendered = render_assessments(assessments);
    const auto parsed = parse_judge_text(rendered, kRoster);
    REQUIRE(parsed.assessments.size() == 2);
    CHECK(parsed.assessments[0] == assessments[0]);
    CHECK(parsed.assessments[1] == assessments[1]);
    CHECK(parsed.printed_average_cents.at("Joe Biden") == assessments[0].potus_score_cents);
}

TEST_CASE("per-group breakdown parses and derives dimension scores") {
    const std::string body = R"(### Joe Biden

#### Policies-Interests Score: 4/5
- Voters: 4/5
- Businesses: 3.5/5
- Donors: 4/5
- Politicians: 4.5/5
- Healthcare: strong coverage message

#### Persona-Identity
- Voters: 4/5
- Businesses: 4/5
- Donors: 4/5
- Politicians: 5/5

#### Perspective-Ideologies Score: 4/5

LLM-POTUS Score: 4.00

### Donald Trump

#### Policies-Interests Score: 3/5
#### Persona-Identity Score: 4/5
#### Perspective-Ideologies Score: 4/5
)";
    const auto out = parse_judge_text(body, kRoster);
    const auto& biden = out.assessments[0];
    CHECK(biden.assessment(Dimension::PoliciesInterests).score.render() == "4");
    CHECK(biden.assessment(Dimension::PoliciesInterests).group_scores.size() == 4);
    CHECK(biden.assessment(Dimension::PoliciesInterests)
              .group_scores.at(AudienceGroup::Businesses)
              .render() == "3.5");
    // (4+4+4+5)/4 = 4.25 -> nearest half step 4.5
    CHECK(biden.assessment(Dimension::PersonaIdentity).score.render() == "4.5");
    CHECK(biden.assessment(Dimension::PoliciesInterests).evidence.size() == 1);
}

TEST_CASE("offline judge hits the stated formula") {
    OfflineLexicon lex;
    lex.by_dimension[Dimension::PoliciesInterests] = {{"healthcare"}, 6};
    lex.by_dimension[Dimension::PersonaIdentity] = {{"leader"}, 6};
    lex.by_dimension[Dimension::PerspectiveIdeologies] = {{"freedom"}, 6};

    SUBCASE("zero hits floors at 1, saturation ceils at 5") {
        const Transcript zero = toy_transcript("BIDEN: Nothing relevant here at all.\n"
                                               "TRUMP: Same, nothing to count.\n");
        const auto parsed = parse_judge_response(offline_judge(zero, lex),
                                                 zero.meta.candidates);
        for (const auto& a : parsed.assessments)
            for (const Dimension d : kDimensions)
                CHECK(a.assessment(d).score.render() == "1");

        const Transcript full = toy_transcript(
            "BIDEN: healthcare healthcare healthcare healthcare healthcare healthcare "
            "leader leader leader leader leader leader "
            "freedom freedom freedom freedom freedom freedom\n"
            "TRUMP: healthcare healthcare healthcare healthcare healthcare healthcare "
            "leader leader leader leader leader leader "
            "freedom freedom freedom freedom freedom freedom\n");
        const auto full_parsed = parse_judge_response(offline_judge(full, lex),
                                                      full.meta.candidates);
        for (const auto& a : full_parsed.assessments)
            for (const Dimension d : kDimensions)
                CHECK(a.assessment(d).score.render() == "5");
    }

    SUBCASE("three hits at saturation six score 3.0") {
        // 1 + 4 * (3/6) = 3.0; hits count in the candidate's turns only
        const Transcript t = toy_transcript(
            "BIDEN: healthcare today, healthcare tomorrow, healthcare forever.\n"
            "TRUMP: I will not say that word.\n");
        const auto parsed = parse_judge_response(offline_judge(t, lex), t.meta.candidates);
        CHECK(parsed.assessments[0].assessment(Dimension::PoliciesInterests).score.render() ==
              "3");
        CHECK(parsed.assessments[1].assessment(Dimension::PoliciesInterests).score.render() ==
              "1");
    }

    SUBCASE("word-boundary matching, not substrings") {
        const Transcript t = toy_transcript(
            "BIDEN: healthcares is not a hit but healthcare is.\n"
            "TRUMP: nothing.\n");
        const auto parsed = parse_judge_response(offline_judge(t, lex), t.meta.candidates);
        // one hit at saturation 6: 1 + 4/6 = 1.67 -> 1.5
        CHECK(parsed.assessments[0].assessment(Dimension::PoliciesInterests).score.render() ==
              "1.5");
    }
}

TEST_CASE("offline judge is byte-deterministic") {
    const Transcript t = toy_transcript("BIDEN: healthcare and jobs and freedom.\n"
                                        "TRUMP: taxes and leader and america.\n");
    const auto a = offline_judge(t, OfflineLexicon::builtin());
    const auto b = offline_judge(t, OfflineLexicon::builtin());
    CHECK(a.text == b.text);
    CHECK(!a.from_cache);
    const auto parsed = parse_judge_response(a, t.meta.candidates);
    CHECK(parsed.assessments.size() == 2);
}

TEST_CASE("lexicon validation and parsing") {
    CHECK_THROWS_AS(offline_judge(toy_transcript("BIDEN: x y z\nTRUMP: a b c\n"),
                                  OfflineLexicon{}),
                    EmptyLexiconError);

    const auto lex = OfflineLexicon::parse("[Policies-Interests]\n"
                                           "saturation = 4\n"
                                           "keywords = healthcare, taxes\n"
                                           "[Persona-Identity]\n"
                                           "keywords = leader\n"
                                           "[Perspective-Ideologies]\n"
                                           "keywords = freedom, rights\n");
    CHECK(lex.by_dimension.at(Dimension::PoliciesInterests).saturation == 4);
    CHECK(lex.by_dimension.at(Dimension::PoliciesInterests).keywords.size() == 2);
    CHECK(lex.by_dimension.at(Dimension::PersonaIdentity).saturation == 6); // default

    CHECK_THROWS_AS(OfflineLexicon::parse("[NotADimension]\nkeywords = x\n"), EmptyLexiconError);
    CHECK_NOTHROW(OfflineLexicon::load(POTUS_DATA_DIR "/lexicon/default.lex"));
    CHECK_NOTHROW(OfflineLexicon::load(POTUS_DATA_DIR "/lexicon/alt.lex"));
}

TEST_CASE("inline-attributed score lines work without any headings") {
    const std::string body =
        "Biden's Policies-Interests Score: 4/5\n"
        "Biden's Persona-Identity Score: 4.5/5\n"
        "Biden's Perspective-Ideologies Score: 4/5\n"
        "Trump's Policies-Interests Score: 3/5\n"
        "Trump's Persona-Identity Score: 5/5\n"
        "Trump's Perspective-Ideologies Score: 4/5\n";
    const auto out = parse_judge_text(body, kRoster);
    REQUIRE(out.assessments.size() == 2);
    CHECK(out.assessments[0].assessment(Dimension::PersonaIdentity).score.render() == "4.5");
    CHECK(out.assessments[1].potus_score_cents == 400);
}

TEST_CASE("a reopened candidate block keeps the first score and gathers evidence") {
    const std::string body =
        "### Joe Biden\n"
        "Policies-Interests Score: 4/5\n"
        "- Healthcare: first mention.\n"
        "Persona-Identity Score: 4/5\n"
        "Perspective-Ideologies Score: 4/5\n"
        "### Donald Trump\n"
        "Policies-Interests Score: 3/5\n"
        "Persona-Identity Score: 4/5\n"
        "Perspective-Ideologies Score: 4/5\n"
        "### Joe Biden\n"
        "Policies-Interests Score: 2/5\n"
        "- Economy: afterthought bullet.\n";
    const auto out = parse_judge_text(body, kRoster);
    const auto& policies = out.assessments[0].assessment(Dimension::PoliciesInterests);
    CHECK(policies.score.render() == "4"); // first reading wins
    REQUIRE(policies.evidence.size() == 2);
    CHECK(policies.evidence[1].topic == "Economy");
}

TEST_CASE("random garbage input either parses or throws a typed error") {
    std::mt19937 rng(0xBADF00D);
    const std::string alphabet =
        "abcdefghijKLMNOP #:*-/.5\n### Score LLM-POTUS Policies-Interests Trump Biden ()[]|";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 400);
    for (int round = 0; round < 300; ++round) {
        std::string text;
        const int n = len(rng);
        for (int i = 0; i < n; ++i)
            text.push_back(alphabet[pick(rng)]);
        try {
            const auto out = parse_judge_text(text, kRoster);
            CHECK(out.assessments.size() == kRoster.size());
        } catch (const Error&) {
            // typed failures are fine; crashes and foreign exceptions are not
        }
    }
}

TEST_CASE("randomized render/parse round trips never lose scores") {
    std::mt19937 rng(20240910);
    std::uniform_int_distribution<int> hp(2, 10);
    std::uniform_int_distribution<int> bullet_count(0, 4);
    const std::vector<std::string> topics = {"Healthcare", "Economy", "Trade",
                                             "Climate", "Security"};
    const std::vector<std::string> phrases = {
        "made a detailed case", "kept it vague", "promised reform",
        "cited past record", "appealed to the base"};

    for (int round = 0; round < 200; ++round) {
        std::vector<CandidateAssessment> set;
        for (const auto& ref : kRoster) {
            std::vector<DimensionAssessment> dims;
            for (const Dimension d : kDimensions) {
                DimensionAssessment da;
                da.dimension = d;
                da.score = LikertScore::from_half_points(hp(rng));
                const int n = bullet_count(rng);
                for (int i = 0; i < n; ++i)
                    da.evidence.push_back({topics[static_cast<std::size_t>(rng() % topics.size())],
                                           phrases[static_cast<std::size_t>(rng() % phrases.size())]});
                dims.push_back(std::move(da));
            }
            set.push_back(CandidateAssessment::make(ref, std::move(dims)));
        }
        const auto parsed = parse_judge_text(render_assessments(set), kRoster);
        REQUIRE(parsed.assessments.size() == set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            CHECK(parsed.assessments[i].scores() == set[i].scores());
            for (const Dimension d : kDimensions)
                CHECK(parsed.assessments[i].assessment(d).evidence.size() ==
                      set[i].assessment(d).evidence.size());
        }
    }
}
