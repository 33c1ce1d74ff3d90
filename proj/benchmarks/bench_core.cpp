#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "potus/judge.hpp"
#include "potus/report.hpp"
#include "potus/sha256.hpp"
#include "potus/transcript.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kCorpusTxt = read_file(POTUS_DATA_DIR "/corpus/2016-09-26.txt");
const potus::DebateMeta kMeta =
    potus::load_debate_meta(POTUS_DATA_DIR "/corpus/2016-09-26.meta");
const std::string kFixture = [] {
    // strip the "#:" header lines; keep the judge-grammar body
    const std::string raw = read_file(POTUS_DATA_DIR "/fixtures/results/2016_claude3.txt");
    std::string body;
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("#:", 0) != 0)
            body += line + "\n";
    return body;
}();
const std::vector<potus::CandidateRef> kRoster = {
    {"Hillary Clinton", potus::Party::Democratic, "CLINTON"},
    {"Donald Trump", potus::Party::Republican, "TRUMP"}};

void BM_ParseTranscript(benchmark::State& state) {
    for (auto _ : state) {
        auto t = potus::parse_transcript(kCorpusTxt, kMeta);
        benchmark::DoNotOptimize(t);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(kCorpusTxt.size()));
}
BENCHMARK(BM_ParseTranscript);

void BM_SpeakerStats(benchmark::State& state) {
    const auto t = potus::parse_transcript(kCorpusTxt, kMeta);
    for (auto _ : state) {
        auto stats = potus::speaker_stats(t);
        benchmark::DoNotOptimize(stats);
    }
}
BENCHMARK(BM_SpeakerStats);

void BM_BuildPrompt(benchmark::State& state) {
    const auto t = potus::parse_transcript(kCorpusTxt, kMeta);
    for (auto _ : state) {
        auto p = potus::build_prompt(t, potus::ScoringMode::SingleScore);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_BuildPrompt);

void BM_ParseJudgeResponse(benchmark::State& state) {
    for (auto _ : state) {
        auto parsed = potus::parse_judge_text(kFixture, kRoster);
        benchmark::DoNotOptimize(parsed);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(kFixture.size()));
}
BENCHMARK(BM_ParseJudgeResponse);

void BM_OfflineJudge(benchmark::State& state) {
    const auto t = potus::parse_transcript(kCorpusTxt, kMeta);
    const auto lexicon = potus::OfflineLexicon::builtin();
    for (auto _ : state) {
        auto r = potus::offline_judge(t, lexicon);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_OfflineJudge);

void BM_ComputePotusScore(benchmark::State& state) {
    const potus::DimensionScores scores{potus::LikertScore::from_value(4.5),
                                        potus::LikertScore::from_value(4),
                                        potus::LikertScore::from_value(4)};
    for (auto _ : state) {
        auto cents = potus::compute_potus_score_cents(scores);
        benchmark::DoNotOptimize(cents);
    }
}
BENCHMARK(BM_ComputePotusScore);

void BM_Sha256_64KiB(benchmark::State& state) {
    const std::string data(64 * 1024, 'x');
    for (auto _ : state) {
        auto hex = potus::Sha256::hex(data);
        benchmark::DoNotOptimize(hex);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_Sha256_64KiB);

} // namespace

BENCHMARK_MAIN();
