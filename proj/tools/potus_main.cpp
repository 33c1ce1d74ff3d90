// potus: evaluate presidential-debate transcripts with LLM judges and
// compare the resulting LLM-POTUS Scores across models.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "potus/config.hpp"
#include "potus/llm_client.hpp"
#include "potus/orchestrator.hpp"
#include "potus/report.hpp"
#include "potus/transcript.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
    std::string config_path;
    std::string format = "markdown";
};

potus::AppConfig load_config(const GlobalOptions& g) {
    if (!g.config_path.empty())
        return potus::AppConfig::load(g.config_path);
    if (std::filesystem::exists("potus.json"))
        return potus::AppConfig::load("potus.json");
    return {};
}

std::vector<potus::Transcript> load_corpus(const potus::AppConfig& cfg,
                                           const std::vector<std::string>& debate_filter) {
    if (!std::filesystem::exists(cfg.corpus_dir))
        throw potus::Error("corpus directory " + cfg.corpus_dir.string() + " does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(cfg.corpus_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<potus::Transcript> debates;
    for (const auto& file : files) {
        potus::Transcript t = potus::load_transcript_file(file);
        if (!debate_filter.empty() &&
            std::find(debate_filter.begin(), debate_filter.end(), t.meta.debate_id) ==
                debate_filter.end())
            continue;
        debates.push_back(std::move(t));
    }
    if (debates.empty()) {
        std::string msg = "no transcripts selected from " + cfg.corpus_dir.string();
        if (!debate_filter.empty()) {
            msg += " matching:";
            for (const auto& d : debate_filter)
                msg += " " + d;
        }
        throw potus::Error(msg);
    }
    return debates;
}

int cmd_ingest(const GlobalOptions& g, const std::string& path, bool csv, bool strict) {
    (void)g;
    potus::ParseOptions opts;
    opts.strict = strict;
    const potus::Transcript t = potus::load_transcript_file(path, std::nullopt, opts);
    const auto stats = potus::speaker_stats(t);

    if (csv) {
        std::cout << potus::speaker_stats_csv(stats);
        return kExitOk;
    }

    std::int64_t words = 0;
    for (const auto& s : stats)
        words += s.words;
    std::cout << "debate:     " << t.meta.debate_id << " (" << t.meta.cycle_year << ")\n";
    std::cout << "candidates:";
    for (const auto& c : t.meta.candidates)
        std::cout << " " << c.display_name << " [" << c.speaker_label << "]";
    std::cout << "\n";
    std::cout << "turns:      " << t.turns.size() << "\n";
    std::cout << "words:      " << words << "\n";
    std::cout << "bytes:      " << t.raw_text.size() << " (preserved verbatim for judges)\n\n";
    std::cout << potus::speaker_stats_csv(stats);
    return kExitOk;
}

int cmd_score(const GlobalOptions& g, const std::vector<std::string>& debate_filter,
              const std::vector<std::string>& model_filter, bool offline, int trials,
              const std::string& mode_name, bool no_save) {
    potus::AppConfig cfg = load_config(g);
    const auto debates = load_corpus(cfg, debate_filter);

    potus::MatrixOptions options;
    try {
        options.mode = mode_name.empty() ? cfg.mode : potus::scoring_mode_from_name(mode_name);
    } catch (const potus::Error& e) {
        throw potus::ConfigError(e.what());
    }
    options.parallelism = cfg.parallelism;
    options.trials = trials;

    potus::PromptTemplate tmpl;
    if (!cfg.template_path.empty()) {
        tmpl = potus::PromptTemplate::load(cfg.template_path);
        options.prompt_template = &tmpl;
    }

    // resolve models
    std::vector<potus::JudgeModelSpec> models = cfg.models;
    if (models.empty() && offline)
        models.push_back({"offline", "offline-lexicon", 0.0, 4096, cfg.lexicon_path});
    if (!model_filter.empty()) {
        std::vector<potus::JudgeModelSpec> selected;
        for (const auto& id : model_filter) {
            const auto it = std::find_if(models.begin(), models.end(),
                                         [&](const auto& m) { return m.model_id == id; });
            if (it == models.end()) {
                std::string valid;
                for (const auto& m : models)
                    valid += " " + m.model_id;
                throw potus::ConfigError("unknown model id '" + id + "'; configured models:" +
                                         (valid.empty() ? " (none)" : valid));
            }
            selected.push_back(*it);
        }
        models = std::move(selected);
    }
    if (models.empty())
        throw potus::ConfigError("no models configured; add models to the config or use --offline");

    // build the backend
    std::unique_ptr<potus::JudgeBackend> backend;
    if (offline) {
        potus::OfflineLexicon lexicon = cfg.lexicon_path.empty()
                                            ? potus::OfflineLexicon::builtin()
                                            : potus::OfflineLexicon::load(cfg.lexicon_path);
        backend = std::make_unique<potus::OfflineBackend>(std::move(lexicon));
    } else {
        auto cache = std::make_shared<potus::ResponseCache>(cfg.cache_dir);
        auto transport = std::make_shared<potus::HttplibTransport>();
        std::map<std::string, std::shared_ptr<potus::LlmClient>> clients;
        for (const auto& m : models) {
            if (m.provider_id == "offline" || clients.count(m.provider_id))
                continue;
            const potus::ProviderConfig* provider = cfg.provider(m.provider_id);
            if (provider == nullptr)
                throw potus::ConfigError("model " + m.model_id + " references unknown provider '" +
                                         m.provider_id + "'");
            clients[m.provider_id] =
                std::make_shared<potus::LlmClient>(*provider, transport, cache);
        }
        backend = std::make_unique<potus::ClientBackend>(std::move(clients));
    }

    const auto records = potus::run_matrix(debates, models, *backend, options);

    if (!no_save)
        for (const auto& r : records)
            potus::save_run_record(cfg.runs_dir, r);

    const potus::ReportFormat fmt = potus::report_format_from_name(g.format);
    std::size_t failed = 0;
    if (fmt == potus::ReportFormat::Json) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& r : records) {
            nlohmann::json cell = {{"debate_id", r.debate_id},
                                   {"model", r.model.model_id},
                                   {"trial", r.trial},
                                   {"status", std::string(run_status_name(r.status))},
                                   {"cached", r.raw.from_cache}};
            if (r.status == potus::RunStatus::Ok) {
                potus::ComparisonTable table = potus::ComparisonTable::from_run(r);
                table.weights = cfg.weights;
                cell["table"] = nlohmann::json::parse(potus::render_comparison(table, fmt));
            } else {
                ++failed;
                cell["error"] = r.error;
            }
            cells.push_back(std::move(cell));
        }
        std::cout << cells.dump(2) << "\n";
    } else if (fmt == potus::ReportFormat::Csv) {
        // one merged CSV document; failures go to stderr
        std::string rows;
        for (const auto& r : records) {
            if (r.status != potus::RunStatus::Ok) {
                ++failed;
                std::cerr << "cell " << r.debate_id << " x " << r.model.model_id << ": "
                          << run_status_name(r.status) << " — " << r.error << "\n";
                continue;
            }
            potus::ComparisonTable table = potus::ComparisonTable::from_run(r);
            table.weights = cfg.weights;
            std::string csv = potus::render_comparison(table, fmt);
            rows += csv.substr(csv.find('\n') + 1); // drop the per-table header
        }
        std::cout << "debate_id,model,candidate,dimension,score\n" << rows;
    } else {
        for (const auto& r : records) {
            const std::string marker = r.raw.from_cache ? " (cached)" : "";
            if (r.status == potus::RunStatus::Ok) {
                potus::ComparisonTable table = potus::ComparisonTable::from_run(r);
                table.weights = cfg.weights;
                std::cout << "cell " << r.debate_id << " x " << r.model.model_id << ": ok"
                          << marker << "\n";
                std::cout << potus::render_comparison(table, fmt) << "\n";
            } else {
                ++failed;
                std::cout << "cell " << r.debate_id << " x " << r.model.model_id << ": "
                          << run_status_name(r.status) << marker << " — " << r.error << "\n\n";
            }
        }
    }

    if (failed == records.size()) {
        std::cerr << "error: all " << records.size() << " cells failed\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_report(const GlobalOptions& g, bool agreement, bool summary,
               const std::vector<std::string>& debate_filter) {
    const potus::AppConfig cfg = load_config(g);
    auto records = potus::load_run_records(cfg.runs_dir);
    if (!debate_filter.empty()) {
        records.erase(std::remove_if(records.begin(), records.end(),
                                     [&](const potus::RunRecord& r) {
                                         return std::find(debate_filter.begin(),
                                                          debate_filter.end(),
                                                          r.debate_id) == debate_filter.end();
                                     }),
                      records.end());
    }
    if (records.empty())
        throw potus::Error("no run records matching the filter under " + cfg.runs_dir.string());

    const potus::ReportFormat fmt = potus::report_format_from_name(g.format);
    if (!agreement && !summary)
        summary = true;
    if (summary)
        std::cout << potus::render_summary(records, fmt);
    if (agreement)
        std::cout << potus::render_agreement(potus::compute_agreement(records), fmt);
    return kExitOk;
}

int cmd_verify_fixtures(const GlobalOptions& g) {
    const potus::AppConfig cfg = load_config(g);
    const auto verification = potus::verify_fixtures(cfg.fixtures_dir);
    std::cout << potus::render_verification(verification);
    return verification.ok() ? kExitOk : kExitFailure;
}

int cmd_cache(const GlobalOptions& g, bool stats, bool clear) {
    const potus::AppConfig cfg = load_config(g);
    potus::ResponseCache cache(cfg.cache_dir);
    if (clear) {
        cache.clear();
        std::cout << "cache cleared: " << cfg.cache_dir.string() << "\n";
    }
    if (stats || !clear) {
        const auto s = cache.stats();
        std::cout << "entries: " << s.entries << "\n";
        std::cout << "bytes:   " << s.bytes << "\n";
        for (const auto& [provider, count] : s.per_provider)
            std::cout << "  " << provider << ": " << count << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LLM judge pipeline for presidential debate transcripts"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config_path, "Config file (JSON); default ./potus.json if present");
    app.add_option("--format", g.format, "Output format: markdown, csv, json")
        ->check(CLI::IsMember({"markdown", "md", "csv", "json"}));

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse a transcript and print speaker stats");
    std::string ingest_path;
    bool ingest_csv = false, ingest_strict = false;
    ingest->add_option("path", ingest_path, "Transcript .txt (sidecar .meta expected)")
        ->required();
    ingest->add_flag("--csv", ingest_csv, "Print only the stats CSV");
    ingest->add_flag("--strict", ingest_strict, "Error on speaker labels missing from the meta");

    // score
    auto* score = app.add_subcommand("score", "Judge debates and print comparison tables");
    std::vector<std::string> score_debates, score_models;
    bool score_offline = false, score_no_save = false;
    int score_trials = 1;
    std::string score_mode;
    score->add_option("--debate", score_debates, "Debate id filter (repeatable)");
    score->add_option("--model", score_models, "Model id filter (repeatable)");
    score->add_flag("--offline", score_offline, "Use the deterministic offline lexicon judge");
    score->add_option("--trials", score_trials, "Trials per cell")->check(CLI::PositiveNumber);
    score->add_option("--mode", score_mode, "single_score or per_group_breakdown");
    score->add_flag("--no-save", score_no_save, "Do not write run records");

    // report
    auto* report = app.add_subcommand("report", "Render reports from stored run records");
    bool report_agreement = false, report_summary = false;
    std::vector<std::string> report_debates;
    report->add_flag("--agreement", report_agreement, "Inter-model agreement report");
    report->add_flag("--summary", report_summary, "Multi-cycle summary");
    report->add_option("--debate", report_debates, "Debate id filter (repeatable)");

    // verify-fixtures
    auto* verify = app.add_subcommand("verify-fixtures",
                                      "Recompute averages for the shipped golden result sets");

    // cache
    auto* cache = app.add_subcommand("cache", "Inspect or clear the response cache");
    bool cache_stats = false, cache_clear = false;
    cache->add_flag("--stats", cache_stats, "Print entry counts and sizes");
    cache->add_flag("--clear", cache_clear, "Delete all cache entries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(ingest))
            return cmd_ingest(g, ingest_path, ingest_csv, ingest_strict);
        if (app.got_subcommand(score))
            return cmd_score(g, score_debates, score_models, score_offline, score_trials,
                             score_mode, score_no_save);
        if (app.got_subcommand(report))
            return cmd_report(g, report_agreement, report_summary, report_debates);
        if (app.got_subcommand(verify))
            return cmd_verify_fixtures(g);
        if (app.got_subcommand(cache))
            return cmd_cache(g, cache_stats, cache_clear);
    } catch (const potus::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const potus::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
