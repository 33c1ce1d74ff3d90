#include "potus/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace potus {

namespace {

using nlohmann::json;

json model_to_json(const JudgeModelSpec& m) {
    json j = {{"provider_id", m.provider_id},
              {"model_id", m.model_id},
              {"temperature", m.temperature},
              {"max_output_tokens", m.max_output_tokens}};
    if (!m.lexicon_path.empty())
        j["lexicon"] = m.lexicon_path;
    return j;
}

JudgeModelSpec model_from_json(const json& j) {
    JudgeModelSpec m;
    m.provider_id = j.value("provider_id", "");
    m.model_id = j.at("model_id").get<std::string>();
    m.temperature = j.value("temperature", 0.0);
    m.max_output_tokens = j.value("max_output_tokens", 4096);
    m.lexicon_path = j.value("lexicon", "");
    return m;
}

json candidate_to_json(const CandidateRef& c) {
    return {{"display_name", c.display_name},
            {"party", std::string(party_name(c.party))},
            {"speaker_label", c.speaker_label}};
}

CandidateRef candidate_from_json(const json& j) {
    return {j.at("display_name").get<std::string>(),
            party_from_name(j.value("party", "Other")),
            j.at("speaker_label").get<std::string>()};
}

json assessment_to_json(const CandidateAssessment& a) {
    json dims = json::array();
    for (const Dimension d : kDimensions) {
        const auto& da = a.assessment(d);
        json bullets = json::array();
        for (const auto& b : da.evidence)
            bullets.push_back({{"topic", b.topic}, {"justification", b.justification}});
        json dim = {{"dimension", std::string(dimension_name(d))},
                    {"score", da.score.render()},
                    {"evidence", bullets}};
        if (!da.group_scores.empty()) {
            json groups;
            for (const auto& [g, s] : da.group_scores)
                groups[std::string(audience_group_name(g))] = s.render();
            dim["group_scores"] = groups;
        }
        dims.push_back(dim);
    }
    return {{"candidate", candidate_to_json(a.candidate)},
            {"dimensions", dims},
            {"llm_potus", format_cents(a.potus_score_cents)}};
}

CandidateAssessment assessment_from_json(const json& j) {
    std::vector<DimensionAssessment> dims;
    for (const auto& dj : j.at("dimensions")) {
        DimensionAssessment da;
        const auto dim = dimension_from_name(dj.at("dimension").get<std::string>());
        if (!dim)
            throw Error("unknown dimension in run record: " +
                        dj.at("dimension").get<std::string>());
        da.dimension = *dim;
        da.score = LikertScore::parse(dj.at("score").get<std::string>());
        for (const auto& bj : dj.value("evidence", json::array()))
            da.evidence.push_back(
                {bj.at("topic").get<std::string>(), bj.value("justification", "")});
        if (dj.contains("group_scores")) {
            for (const auto& [name, value] : dj.at("group_scores").items()) {
                const auto g = audience_group_from_name(name);
                if (g)
                    da.group_scores.insert({*g, LikertScore::parse(value.get<std::string>())});
            }
        }
        dims.push_back(std::move(da));
    }
    return CandidateAssessment::make(candidate_from_json(j.at("candidate")), std::move(dims));
}

} // namespace

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

ClientBackend::ClientBackend(std::map<std::string, std::shared_ptr<LlmClient>> clients_by_provider)
    : clients_(std::move(clients_by_provider)) {}

RawJudgeResponse ClientBackend::judge(const Transcript&, const PromptSpec& prompt,
                                      const JudgeModelSpec& model, std::string_view trial_salt) {
    const auto it = clients_.find(model.provider_id);
    if (it == clients_.end())
        throw Error("no client configured for provider '" + model.provider_id + "'");
    return it->second->complete(prompt, model, trial_salt);
}

OfflineBackend::OfflineBackend(OfflineLexicon default_lexicon)
    : default_lexicon_(std::move(default_lexicon)) {}

RawJudgeResponse OfflineBackend::judge(const Transcript& t, const PromptSpec&,
                                       const JudgeModelSpec& model, std::string_view) {
    if (!model.lexicon_path.empty())
        return offline_judge(t, OfflineLexicon::load(model.lexicon_path), model);
    return offline_judge(t, default_lexicon_, model);
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

std::string_view run_status_name(RunStatus s) {
    switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::ParseFailed: return "parse_failed";
    case RunStatus::BackendFailed: return "backend_failed";
    }
    return "backend_failed";
}

RunStatus run_status_from_name(std::string_view name) {
    if (name == "ok")
        return RunStatus::Ok;
    if (name == "parse_failed")
        return RunStatus::ParseFailed;
    return RunStatus::BackendFailed;
}

std::string run_record_to_json(const RunRecord& r) {
    json j;
    j["debate_id"] = r.debate_id;
    j["cycle_year"] = r.cycle_year;
    j["model"] = model_to_json(r.model);
    j["trial"] = r.trial;
    j["prompt_hash"] = r.prompt_hash;
    j["status"] = std::string(run_status_name(r.status));
    j["started_at"] = r.started_at;
    j["finished_at"] = r.finished_at;
    if (!r.error.empty())
        j["error"] = r.error;
    j["raw"] = {{"text", r.raw.text},
                {"latency_ms", r.raw.latency_ms},
                {"from_cache", r.raw.from_cache},
                {"attempts", r.raw.attempts}};
    json roster = json::array();
    for (const auto& c : r.roster)
        roster.push_back(candidate_to_json(c));
    j["roster"] = roster;
    if (r.parsed) {
        json assessments = json::array();
        for (const auto& a : r.parsed->assessments)
            assessments.push_back(assessment_to_json(a));
        json printed = json::object();
        for (const auto& [name, cents] : r.parsed->printed_average_cents)
            printed[name] = format_cents(cents);
        j["parsed"] = {{"assessments", assessments},
                       {"printed_averages", printed},
                       {"unparsed_remainder", r.parsed->unparsed_remainder}};
    }
    return j.dump(2) + "\n";
}

RunRecord run_record_from_json(const std::string& text) {
    const json j = json::parse(text);
    RunRecord r;
    r.debate_id = j.at("debate_id").get<std::string>();
    r.cycle_year = j.value("cycle_year", 0);
    r.model = model_from_json(j.at("model"));
    r.trial = j.value("trial", 0);
    r.prompt_hash = j.value("prompt_hash", "");
    r.status = run_status_from_name(j.value("status", "backend_failed"));
    r.started_at = j.value("started_at", "");
    r.finished_at = j.value("finished_at", "");
    r.error = j.value("error", "");
    if (j.contains("raw")) {
        const auto& raw = j.at("raw");
        r.raw.text = raw.value("text", "");
        r.raw.latency_ms = raw.value("latency_ms", std::int64_t{0});
        r.raw.from_cache = raw.value("from_cache", false);
        r.raw.attempts = raw.value("attempts", 0);
        r.raw.model = r.model;
    }
    for (const auto& cj : j.value("roster", json::array()))
        r.roster.push_back(candidate_from_json(cj));
    if (j.contains("parsed")) {
        ParsedJudgeOutput parsed;
        for (const auto& aj : j.at("parsed").at("assessments"))
            parsed.assessments.push_back(assessment_from_json(aj));
        if (j.at("parsed").contains("printed_averages")) {
            for (const auto& [name, value] : j.at("parsed").at("printed_averages").items())
                parsed.printed_average_cents[name] =
                    Rational::parse(value.get<std::string>()).round_cents();
        }
        parsed.unparsed_remainder = j.at("parsed").value("unparsed_remainder", "");
        r.parsed = std::move(parsed);
    }
    return r;
}

std::filesystem::path run_record_path(const std::filesystem::path& runs_dir, const RunRecord& r) {
    std::string name = r.model.model_id;
    for (auto& c : name)
        if (c == '/' || c == ':' || c == ' ')
            c = '_';
    if (r.trial > 0)
        name += "__t" + std::to_string(r.trial);
    return runs_dir / r.debate_id / (name + ".json");
}

void save_run_record(const std::filesystem::path& runs_dir, const RunRecord& r) {
    const auto path = run_record_path(runs_dir, r);
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write run record " + path.string());
    out << run_record_to_json(r);
}

std::vector<RunRecord> load_run_records(const std::filesystem::path& runs_dir) {
    if (!std::filesystem::exists(runs_dir))
        throw Error("runs directory " + runs_dir.string() + " does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(runs_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> records;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
            records.push_back(run_record_from_json(ss.str()));
        } catch (const std::exception& e) {
            throw Error("cannot read run record " + file.string() + ": " + e.what());
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Matrix execution
// ---------------------------------------------------------------------------

std::vector<RunRecord> run_matrix(std::span<const Transcript> debates,
                                  std::span<const JudgeModelSpec> models, JudgeBackend& backend,
                                  const MatrixOptions& options) {
    if (debates.empty())
        throw Error("run_matrix: no debates");
    if (models.empty())
        throw Error("run_matrix: no models");
    const int trials = std::max(1, options.trials);

    // deterministic cell order: (debate_id, model_id, trial)
    std::vector<std::size_t> debate_order(debates.size());
    for (std::size_t i = 0; i < debates.size(); ++i)
        debate_order[i] = i;
    std::sort(debate_order.begin(), debate_order.end(), [&](std::size_t a, std::size_t b) {
        return debates[a].meta.debate_id < debates[b].meta.debate_id;
    });
    std::vector<std::size_t> model_order(models.size());
    for (std::size_t i = 0; i < models.size(); ++i)
        model_order[i] = i;
    std::sort(model_order.begin(), model_order.end(), [&](std::size_t a, std::size_t b) {
        return models[a].model_id < models[b].model_id;
    });

    struct Cell {
        std::size_t debate;
        std::size_t model;
        int trial;
    };
    std::vector<Cell> cells;
    for (const std::size_t d : debate_order)
        for (const std::size_t m : model_order)
            for (int t = 0; t < trials; ++t)
                cells.push_back({d, m, t});

    // one prompt per debate, shared across models
    const PromptTemplate& tmpl =
        options.prompt_template != nullptr ? *options.prompt_template : PromptTemplate::builtin();
    std::vector<std::optional<PromptSpec>> prompts(debates.size());
    std::vector<std::string> prompt_errors(debates.size());
    for (std::size_t i = 0; i < debates.size(); ++i) {
        try {
            prompts[i] = build_prompt(debates[i], options.mode, tmpl);
        } catch (const std::exception& e) {
            prompt_errors[i] = e.what();
        }
    }

    std::vector<RunRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(options.parallelism,
                                                  static_cast<int>(cells.size())));

    const auto run_cell = [&](std::size_t index) {
        const Cell& cell = cells[index];
        const Transcript& debate = debates[cell.debate];
        RunRecord rec;
        rec.debate_id = debate.meta.debate_id;
        rec.cycle_year = debate.meta.cycle_year;
        rec.model = models[cell.model];
        rec.trial = cell.trial;
        rec.roster = debate.meta.candidates;
        rec.started_at = iso8601_now();

        if (!prompts[cell.debate]) {
            rec.status = RunStatus::BackendFailed;
            rec.error = prompt_errors[cell.debate];
            rec.finished_at = iso8601_now();
            records[index] = std::move(rec);
            return;
        }
        const PromptSpec& prompt = *prompts[cell.debate];
        rec.prompt_hash = prompt.render_hash;
        const std::string salt = cell.trial > 0 ? std::to_string(cell.trial) : std::string{};

        try {
            rec.raw = backend.judge(debate, prompt, rec.model, salt);
        } catch (const std::exception& e) {
            rec.status = RunStatus::BackendFailed;
            rec.error = e.what();
            rec.finished_at = iso8601_now();
            records[index] = std::move(rec);
            return;
        }
        try {
            rec.parsed = parse_judge_response(rec.raw, debate.meta.candidates);
            rec.status = RunStatus::Ok;
        } catch (const std::exception& e) {
            rec.status = RunStatus::ParseFailed;
            rec.error = e.what();
        }
        rec.finished_at = iso8601_now();
        records[index] = std::move(rec);
    };

    if (workers == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            run_cell(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size())
                        return;
                    run_cell(i);
                }
            });
        }
        for (auto& t : pool)
            t.join();
    }
    return records;
}

// ---------------------------------------------------------------------------
// Agreement
// ---------------------------------------------------------------------------

AgreementReport compute_agreement(std::span<const RunRecord> records) {
    // debate -> model -> candidate assessments (trial 0, status Ok)
    std::map<std::string, std::map<std::string, const RunRecord*>> ok_by_debate;
    std::map<std::string, std::set<std::string>> failed_by_debate;
    for (const auto& r : records) {
        if (r.trial != 0)
            continue;
        if (r.status == RunStatus::Ok && r.parsed)
            ok_by_debate[r.debate_id][r.model.model_id] = &r;
        else
            failed_by_debate[r.debate_id].insert(r.model.model_id);
    }

    AgreementReport report;
    bool any_pair = false;

    for (const auto& [debate_id, by_model] : ok_by_debate) {
        DebateAgreement da;
        da.debate_id = debate_id;
        for (const auto& [model_id, rec] : by_model)
            da.models_compared.push_back(model_id);
        if (const auto it = failed_by_debate.find(debate_id); it != failed_by_debate.end())
            da.models_missing.assign(it->second.begin(), it->second.end());

        // candidate display names in roster order of the first record
        const RunRecord* first = by_model.begin()->second;
        for (const auto& candidate : first->roster) {
            CandidateAgreement ca;
            ca.display_name = candidate.display_name;

            // collect each model's assessment of this candidate
            std::vector<std::pair<std::string, const CandidateAssessment*>> per_model;
            for (const auto& [model_id, rec] : by_model) {
                for (const auto& a : rec->parsed->assessments)
                    if (a.candidate.display_name == candidate.display_name)
                        per_model.emplace_back(model_id, &a);
            }
            if (per_model.size() < 2) {
                da.candidates.push_back(std::move(ca));
                continue;
            }
            any_pair = true;

            const auto n_pairs = static_cast<std::int64_t>(
                per_model.size() * (per_model.size() - 1) / 2);
            Rational mad_sum{0, 1};
            Rational rate_sum{0, 1};
            for (const Dimension d : kDimensions) {
                DimensionAgreement dim_agree;
                Rational pair_abs_sum{0, 1};
                std::int64_t equal_pairs = 0;
                for (const auto& [model_id, a] : per_model)
                    dim_agree.score_by_model.insert({model_id, a->assessment(d).score});
                for (std::size_t i = 0; i < per_model.size(); ++i) {
                    for (std::size_t j = i + 1; j < per_model.size(); ++j) {
                        const int hp_a = per_model[i].second->assessment(d).score.half_points();
                        const int hp_b = per_model[j].second->assessment(d).score.half_points();
                        pair_abs_sum = pair_abs_sum + Rational(std::abs(hp_a - hp_b), 2);
                        if (hp_a == hp_b)
                            ++equal_pairs;
                    }
                }
                dim_agree.mad = pair_abs_sum / Rational(n_pairs);
                dim_agree.exact_rate = Rational(equal_pairs, n_pairs);
                mad_sum = mad_sum + dim_agree.mad;
                rate_sum = rate_sum + dim_agree.exact_rate;
                ca.dimensions[static_cast<std::size_t>(d)] = std::move(dim_agree);
            }
            ca.mad = mad_sum / Rational(3);
            ca.exact_rate = rate_sum / Rational(3);

            std::int64_t max_potus = 0, min_potus = 0;
            bool first_potus = true;
            for (const auto& [model_id, a] : per_model) {
                ca.potus_by_model[model_id] = a->potus_score_cents;
                if (first_potus) {
                    max_potus = min_potus = a->potus_score_cents;
                    first_potus = false;
                } else {
                    max_potus = std::max(max_potus, a->potus_score_cents);
                    min_potus = std::min(min_potus, a->potus_score_cents);
                }
            }
            ca.potus_spread_cents = max_potus - min_potus;
            da.candidates.push_back(std::move(ca));
        }
        report.debates.push_back(std::move(da));
    }

    if (!any_pair)
        throw InsufficientModelsError(
            "agreement needs at least two models with Ok records for a shared debate and candidate");
    return report;
}

} // namespace potus
