#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "potus/judge.hpp"
#include "potus/llm_client.hpp"
#include "potus/rubric.hpp"

namespace potus {

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Application configuration: provider/model matrix plus directories.
/// Secrets never appear here, only the names of environment variables.
struct AppConfig {
    std::vector<ProviderConfig> providers;
    std::vector<JudgeModelSpec> models;
    std::filesystem::path corpus_dir = "data/corpus";
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path runs_dir = "runs";
    std::filesystem::path fixtures_dir = "data/fixtures/results";
    std::string template_path; // empty: compiled-in template
    std::string lexicon_path;  // empty: compiled-in lexicon
    ScoringMode mode = ScoringMode::SingleScore;
    int parallelism = 4;
    std::optional<DimensionWeights> weights;

    static AppConfig load(const std::filesystem::path& path);
    static AppConfig parse(const std::string& text);

    /// Every model's provider resolves ("offline" is always available) and
    /// parallelism >= 1.
    void validate() const;

    [[nodiscard]] const ProviderConfig* provider(const std::string& provider_id) const;
    [[nodiscard]] const JudgeModelSpec* model(const std::string& model_id) const;
};

} // namespace potus
