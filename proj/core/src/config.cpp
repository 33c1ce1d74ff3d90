#include "potus/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace potus {

namespace {

using nlohmann::json;

Rational weight_from_json(const json& j) {
    if (j.is_string())
        return Rational::parse(j.get<std::string>());
    if (j.is_number_integer())
        return Rational{j.get<std::int64_t>()};
    throw ConfigError("weights must be strings like \"1/3\" or \"0.25\" (floats lose exactness)");
}

} // namespace

AppConfig AppConfig::parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    AppConfig cfg;
    try {
        if (j.contains("corpus_dir"))
            cfg.corpus_dir = j.at("corpus_dir").get<std::string>();
        if (j.contains("cache_dir"))
            cfg.cache_dir = j.at("cache_dir").get<std::string>();
        if (j.contains("runs_dir"))
            cfg.runs_dir = j.at("runs_dir").get<std::string>();
        if (j.contains("fixtures_dir"))
            cfg.fixtures_dir = j.at("fixtures_dir").get<std::string>();
        cfg.template_path = j.value("template", "");
        cfg.lexicon_path = j.value("lexicon", "");
        if (j.contains("mode"))
            cfg.mode = scoring_mode_from_name(j.at("mode").get<std::string>());
        cfg.parallelism = j.value("parallelism", 4);

        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            cfg.weights = DimensionWeights(
                weight_from_json(w.at("policies_interests")),
                weight_from_json(w.at("persona_identity")),
                weight_from_json(w.at("perspective_ideologies")));
        }

        for (const auto& pj : j.value("providers", json::array())) {
            ProviderConfig p;
            p.provider_id = pj.at("provider_id").get<std::string>();
            p.base_url = pj.at("base_url").get<std::string>();
            p.auth_env_var = pj.value("auth_env_var", "");
            p.wire_style = wire_style_from_name(pj.value("wire_style", "openai_chat"));
            p.requests_per_minute = pj.value("requests_per_minute", 60);
            p.max_retries = pj.value("max_retries", 3);
            p.timeout_ms = pj.value("timeout_ms", 120000);
            p.backoff_base_ms = pj.value("backoff_base_ms", 500);
            cfg.providers.push_back(std::move(p));
        }

        for (const auto& mj : j.value("models", json::array())) {
            JudgeModelSpec m;
            m.provider_id = mj.at("provider_id").get<std::string>();
            m.model_id = mj.at("model_id").get<std::string>();
            m.temperature = mj.value("temperature", 0.0);
            m.max_output_tokens = mj.value("max_output_tokens", 4096);
            m.lexicon_path = mj.value("lexicon", "");
            cfg.models.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void AppConfig::validate() const {
    if (parallelism < 1)
        throw ConfigError("parallelism must be >= 1");
    for (const auto& p : providers) {
        try {
            p.validate();
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
    }
    for (const auto& m : models) {
        if (m.model_id.empty())
            throw ConfigError("a model entry has an empty model_id");
        if (m.max_output_tokens <= 0)
            throw ConfigError("model " + m.model_id + ": max_output_tokens must be > 0");
        if (m.temperature < 0)
            throw ConfigError("model " + m.model_id + ": temperature must be >= 0");
        if (m.provider_id != "offline" && provider(m.provider_id) == nullptr)
            throw ConfigError("model " + m.model_id + " references unknown provider '" +
                              m.provider_id + "'");
    }
}

const ProviderConfig* AppConfig::provider(const std::string& provider_id) const {
    for (const auto& p : providers)
        if (p.provider_id == provider_id)
            return &p;
    return nullptr;
}

const JudgeModelSpec* AppConfig::model(const std::string& model_id) const {
    for (const auto& m : models)
        if (m.model_id == model_id)
            return &m;
    return nullptr;
}

} // namespace potus
