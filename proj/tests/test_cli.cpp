#include <doctest.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "potus/judge.hpp"
#include "potus/transcript.hpp"
#include "support/test_util.hpp"

using potus::testing::TempDir;
using potus::testing::read_file;
using potus::testing::write_file;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr merged
};

RunResult run(const std::string& args) {
    const std::string cmd = "cd " POTUS_REPO_DIR " && " POTUS_CLI_PATH " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t n = 0;
    while ((n = ::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), n);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

/// Config whose state dirs live in a scratch dir; corpus and data are the
/// repo's own.
std::string scratch_config(const TempDir& tmp) {
    nlohmann::json j = {
        {"corpus_dir", POTUS_REPO_DIR "/data/corpus"},
        {"cache_dir", (tmp.path() / "cache").string()},
        {"runs_dir", (tmp.path() / "runs").string()},
        {"fixtures_dir", POTUS_REPO_DIR "/data/fixtures/results"},
        {"template", POTUS_REPO_DIR "/data/templates/rubric_v1.txt"},
        {"lexicon", POTUS_REPO_DIR "/data/lexicon/default.lex"},
        {"parallelism", 2},
        {"models",
         {{{"provider_id", "offline"},
           {"model_id", "lexicon-default"},
           {"lexicon", POTUS_REPO_DIR "/data/lexicon/default.lex"}},
          {{"provider_id", "offline"},
           {"model_id", "lexicon-alt"},
           {"lexicon", POTUS_REPO_DIR "/data/lexicon/alt.lex"}}}}};
    const auto path = tmp.path() / "config.json";
    write_file(path, j.dump(2));
    return path.string();
}

} // namespace

TEST_CASE("ingest prints a summary and exits 0") {
    const auto r = run("ingest data/corpus/2016-09-26.txt");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("debate:     2016-09-26") != std::string::npos);
    CHECK(r.output.find("turns:") != std::string::npos);
    CHECK(r.output.find("speaker,turns,words,share") != std::string::npos);
}

TEST_CASE("ingest --csv emits only the contract CSV") {
    const auto r = run("ingest data/corpus/2016-09-26.txt --csv");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("speaker,turns,words,share\n", 0) == 0);
}

TEST_CASE("ingest diagnoses an empty file with nonzero exit") {
    TempDir tmp;
    write_file(tmp.path() / "empty.txt", "");
    write_file(tmp.path() / "empty.meta", "debate_id = e\nyear = 2000\n"
                                          "candidate = A B | Other | AB\n");
    const auto r = run("ingest " + (tmp.path() / "empty.txt").string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("empty") != std::string::npos);
}

TEST_CASE("ingest --strict names the unknown label and line") {
    const auto r = run("ingest " POTUS_REPO_DIR
                       "/tests/data/transcripts/05_unknown_speaker.txt --strict");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("AUDIENCE") != std::string::npos);
    CHECK(r.output.find("line 2") != std::string::npos);
}

TEST_CASE("score --offline matches the committed golden stdout") {
    TempDir tmp;
    const auto cfg = scratch_config(tmp);
    const auto r = run("--config " + cfg + " score --offline");
    CHECK(r.exit_code == 0);
    const std::string golden = read_file(POTUS_REPO_DIR "/tests/golden/score_offline.md");
    CHECK(r.output == golden);

    // run records landed in the scratch runs dir
    CHECK(std::filesystem::exists(tmp.path() / "runs" / "2016-09-26" /
                                  "lexicon-default.json"));
}

TEST_CASE("score --offline twice is byte-identical") {
    TempDir tmp_a, tmp_b;
    const auto a = run("--config " + scratch_config(tmp_a) + " score --offline");
    const auto b = run("--config " + scratch_config(tmp_b) + " score --offline");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("score rejects unknown model ids with exit 2 naming valid ids") {
    TempDir tmp;
    const auto r = run("--config " + scratch_config(tmp) + " score --offline --model nope");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("unknown model id 'nope'") != std::string::npos);
    CHECK(r.output.find("lexicon-default") != std::string::npos);
}

TEST_CASE("report --agreement works from stored records, fails with one model") {
    TempDir tmp;
    const auto cfg = scratch_config(tmp);
    REQUIRE(run("--config " + cfg + " score --offline").exit_code == 0);

    const auto both = run("--config " + cfg + " report --agreement");
    CHECK(both.exit_code == 0);
    CHECK(both.output.find("Inter-model agreement") != std::string::npos);

    const auto summary = run("--config " + cfg + " report --summary");
    CHECK(summary.exit_code == 0);
    CHECK(summary.output.find("| 2016 |") != std::string::npos);

    // wipe runs, rescore only one model: agreement must fail loudly
    std::filesystem::remove_all(tmp.path() / "runs");
    REQUIRE(run("--config " + cfg + " score --offline --model lexicon-default").exit_code == 0);
    const auto one = run("--config " + cfg + " report --agreement");
    CHECK(one.exit_code == 1);
    CHECK(one.output.find("two models") != std::string::npos);
}

TEST_CASE("report without a runs directory exits 1") {
    TempDir tmp;
    const auto r = run("--config " + scratch_config(tmp) + " report --summary");
    CHECK(r.exit_code == 1);
}

TEST_CASE("verify-fixtures passes on the shipped set") {
    TempDir tmp;
    const auto r = run("--config " + scratch_config(tmp) + " verify-fixtures");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("4 debates, 8 result sets, 0 mismatches") != std::string::npos);
}

TEST_CASE("cache --clear then --stats reports zero entries") {
    TempDir tmp;
    const auto cfg = scratch_config(tmp);
    const auto cleared = run("--config " + cfg + " cache --clear --stats");
    CHECK(cleared.exit_code == 0);
    CHECK(cleared.output.find("entries: 0") != std::string::npos);
}

TEST_CASE("score against a provider caches responses and marks warm reruns") {
    // loopback chat-completions endpoint standing in for a remote provider
    const auto canned = potus::offline_judge(
        potus::load_transcript_file(POTUS_REPO_DIR "/data/corpus/2016-09-26.txt"),
        potus::OfflineLexicon::builtin());

    std::atomic<int> hits{0};
    httplib::Server server;
    server.Post("/v1/chat/completions",
                [&](const httplib::Request&, httplib::Response& res) {
                    hits.fetch_add(1);
                    res.set_content(potus::testing::openai_body(canned.text),
                                    "application/json");
                });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    ::setenv("POTUS_CLI_LIVE_KEY", "sk-cli-test", 1);

    TempDir tmp;
    nlohmann::json j = {
        {"corpus_dir", POTUS_REPO_DIR "/data/corpus"},
        {"cache_dir", (tmp.path() / "cache").string()},
        {"runs_dir", (tmp.path() / "runs").string()},
        {"template", POTUS_REPO_DIR "/data/templates/rubric_v1.txt"},
        {"parallelism", 1},
        {"providers",
         {{{"provider_id", "loopback"},
           {"base_url", "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"},
           {"auth_env_var", "POTUS_CLI_LIVE_KEY"},
           {"wire_style", "openai_chat"},
           {"requests_per_minute", 600},
           {"max_retries", 1}}}},
        {"models", {{{"provider_id", "loopback"}, {"model_id", "canned-judge"}}}}};
    const auto cfg = (tmp.path() / "live.json").string();
    write_file(cfg, j.dump(2));

    const auto cold = run("--config " + cfg + " score --debate 2016-09-26");
    CHECK(cold.exit_code == 0);
    CHECK(cold.output.find(": ok\n") != std::string::npos);
    CHECK(cold.output.find("(cached)") == std::string::npos);
    const int cold_hits = hits.load();
    CHECK(cold_hits == 1);

    const auto warm = run("--config " + cfg + " score --debate 2016-09-26");
    CHECK(warm.exit_code == 0);
    CHECK(warm.output.find(": ok (cached)") != std::string::npos);
    CHECK(hits.load() == cold_hits); // served from disk cache, not the network

    // identical tables either way; only the cache marker differs
    const auto strip_markers = [](std::string s) {
        const std::string needle = " (cached)";
        for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle))
            s.erase(pos, needle.size());
        return s;
    };
    CHECK(strip_markers(warm.output) == cold.output);

    server.stop();
    server_thread.join();
    ::unsetenv("POTUS_CLI_LIVE_KEY");
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("").exit_code == 2);
    TempDir tmp;
    write_file(tmp.path() / "bad.json", "{ nope");
    CHECK(run("--config " + (tmp.path() / "bad.json").string() + " verify-fixtures").exit_code ==
          2);
}

TEST_CASE("score --format csv emits one merged CSV document") {
    TempDir tmp;
    const auto r =
        run("--config " + scratch_config(tmp) + " --format csv score --offline --no-save");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("debate_id,model,candidate,dimension,score\n", 0) == 0);
    // exactly one header line
    CHECK(r.output.find("debate_id,model", 1) == std::string::npos);
    CHECK(r.output.find("2016-09-26,lexicon-default,Hillary Clinton,llm_potus,") !=
          std::string::npos);
}

TEST_CASE("score rejects an unknown --mode with exit 2") {
    TempDir tmp;
    const auto r = run("--config " + scratch_config(tmp) + " score --offline --mode sideways");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("scoring mode") != std::string::npos);
}

TEST_CASE("score --format json emits a machine-readable cell array") {
    TempDir tmp;
    const auto r =
        run("--config " + scratch_config(tmp) + " --format json score --offline --no-save");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    REQUIRE(j.is_array());
    CHECK(j.size() == 4); // 2 debates x 2 models
    CHECK(j[0].at("status") == "ok");
    CHECK(j[0].at("table").at("candidates").size() == 2);
}
