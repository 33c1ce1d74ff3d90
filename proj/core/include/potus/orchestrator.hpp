#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "potus/judge.hpp"
#include "potus/llm_client.hpp"
#include "potus/rational.hpp"

namespace potus {

class InsufficientModelsError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Judge backends
// ---------------------------------------------------------------------------

/// The completion contract the orchestrator drives: remote chat-completion
/// clients and the offline lexicon judge both implement it.
class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    virtual RawJudgeResponse judge(const Transcript& t, const PromptSpec& prompt,
                                   const JudgeModelSpec& model, std::string_view trial_salt) = 0;
};

/// Routes each model to its provider's LlmClient.
class ClientBackend final : public JudgeBackend {
public:
    explicit ClientBackend(std::map<std::string, std::shared_ptr<LlmClient>> clients_by_provider);

    RawJudgeResponse judge(const Transcript& t, const PromptSpec& prompt,
                           const JudgeModelSpec& model, std::string_view trial_salt) override;

private:
    std::map<std::string, std::shared_ptr<LlmClient>> clients_;
};

/// Deterministic offline backend; per-model lexicon overrides are honored.
class OfflineBackend final : public JudgeBackend {
public:
    explicit OfflineBackend(OfflineLexicon default_lexicon = OfflineLexicon::builtin());

    RawJudgeResponse judge(const Transcript& t, const PromptSpec& prompt,
                           const JudgeModelSpec& model, std::string_view trial_salt) override;

private:
    OfflineLexicon default_lexicon_;
};

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

enum class RunStatus { Ok, ParseFailed, BackendFailed };

std::string_view run_status_name(RunStatus s);
RunStatus run_status_from_name(std::string_view name);

/// One (debate x judge model x trial) evaluation with full provenance.
struct RunRecord {
    std::string debate_id;
    int cycle_year = 0;
    JudgeModelSpec model;
    int trial = 0;
    std::string prompt_hash;
    RawJudgeResponse raw;
    std::optional<ParsedJudgeOutput> parsed;
    std::string started_at;
    std::string finished_at;
    RunStatus status = RunStatus::BackendFailed;
    std::string error;
    std::vector<CandidateRef> roster; // the roster the parse ran against
};

std::string run_record_to_json(const RunRecord& r);
RunRecord run_record_from_json(const std::string& text);

/// runs/<debate_id>/<model_id>.json, "<model_id>__t<k>.json" for trial k > 0.
std::filesystem::path run_record_path(const std::filesystem::path& runs_dir, const RunRecord& r);
void save_run_record(const std::filesystem::path& runs_dir, const RunRecord& r);
std::vector<RunRecord> load_run_records(const std::filesystem::path& runs_dir);

// ---------------------------------------------------------------------------
// Matrix execution
// ---------------------------------------------------------------------------

struct MatrixOptions {
    ScoringMode mode = ScoringMode::SingleScore;
    int parallelism = 4;
    int trials = 1;
    const PromptTemplate* prompt_template = nullptr; // builtin when null
};

/// Runs every (debate, model, trial) cell. Failures never abort the matrix;
/// they become ParseFailed/BackendFailed records. Results are ordered by
/// (debate_id, model_id, trial) no matter how cells interleave.
std::vector<RunRecord> run_matrix(std::span<const Transcript> debates,
                                  std::span<const JudgeModelSpec> models, JudgeBackend& backend,
                                  const MatrixOptions& options = {});

// ---------------------------------------------------------------------------
// Agreement
// ---------------------------------------------------------------------------

struct DimensionAgreement {
    std::map<std::string, LikertScore> score_by_model;
    Rational mad{0, 1};        // mean |a-b| over model pairs
    Rational exact_rate{0, 1}; // fraction of pairs with equal half-step scores
};

struct CandidateAgreement {
    std::string display_name;
    std::array<DimensionAgreement, 3> dimensions; // canonical order
    Rational mad{0, 1};                           // mean of per-dimension MADs
    Rational exact_rate{0, 1};
    std::map<std::string, std::int64_t> potus_by_model; // cents
    std::int64_t potus_spread_cents = 0;                // max - min
};

struct DebateAgreement {
    std::string debate_id;
    std::vector<CandidateAgreement> candidates;
    std::vector<std::string> models_compared;
    std::vector<std::string> models_missing; // coverage gaps, never dropped silently
};

struct AgreementReport {
    std::vector<DebateAgreement> debates;
};

/// Cross-model agreement over the Ok records (trial 0). Requires at least
/// one (debate, candidate) covered by two or more models.
AgreementReport compute_agreement(std::span<const RunRecord> records);

} // namespace potus
