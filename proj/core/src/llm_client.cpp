#include "potus/llm_client.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "potus/sha256.hpp"

namespace potus {

namespace {

using nlohmann::json;

std::string excerpt_of(const std::string& body, std::size_t limit = 200) {
    if (body.size() <= limit)
        return body;
    return body.substr(0, limit) + "...";
}

} // namespace

std::string_view wire_style_name(WireStyle w) {
    return w == WireStyle::OpenAiChat ? "openai_chat" : "anthropic_messages";
}

WireStyle wire_style_from_name(std::string_view name) {
    if (name == "openai_chat")
        return WireStyle::OpenAiChat;
    if (name == "anthropic_messages")
        return WireStyle::AnthropicMessages;
    throw Error("unknown wire style '" + std::string(name) + "'");
}

void ProviderConfig::validate() const {
    if (provider_id.empty())
        throw Error("provider_id is empty");
    if (base_url.find("://") == std::string::npos)
        throw Error("provider " + provider_id + ": base_url '" + base_url + "' is not absolute");
    if (requests_per_minute < 1)
        throw Error("provider " + provider_id + ": requests_per_minute must be >= 1");
    if (max_retries < 0)
        throw Error("provider " + provider_id + ": max_retries must be >= 0");
}

// ---------------------------------------------------------------------------
// Cache keys
// ---------------------------------------------------------------------------

std::string format_temperature(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", t);
    std::string s = buf;
    while (!s.empty() && s.back() == '0')
        s.pop_back();
    if (!s.empty() && s.back() == '.')
        s.pop_back();
    return s;
}

std::string canonical_cache_tuple(const PromptSpec& p, const JudgeModelSpec& m, WireStyle w,
                                  std::string_view trial_salt) {
    std::string out;
    out += wire_style_name(w);
    out += '\n';
    out += m.model_id;
    out += '\n';
    out += format_temperature(m.temperature);
    out += '\n';
    out += std::to_string(m.max_output_tokens);
    out += '\n';
    out += p.render_hash;
    out += '\n';
    out += p.template_version;
    out += '\n';
    if (!trial_salt.empty()) {
        out += "trial:";
        out += trial_salt;
        out += '\n';
    }
    return out;
}

CacheKey cache_key(const PromptSpec& p, const JudgeModelSpec& m, WireStyle w,
                   std::string_view trial_salt) {
    return {Sha256::hex(canonical_cache_tuple(p, m, w, trial_salt))};
}

// ---------------------------------------------------------------------------
// Transport and clocks
// ---------------------------------------------------------------------------

HttpResponse HttplibTransport::post(const HttpRequest& req) {
    const auto scheme_end = req.url.find("://");
    if (scheme_end == std::string::npos)
        return {0, "", "invalid url '" + req.url + "'"};
    const std::string scheme = req.url.substr(0, scheme_end);
    const auto path_start = req.url.find('/', scheme_end + 3);
    const std::string host_port = path_start == std::string::npos
                                      ? req.url.substr(scheme_end + 3)
                                      : req.url.substr(scheme_end + 3, path_start - scheme_end - 3);
    const std::string path = path_start == std::string::npos ? "/" : req.url.substr(path_start);

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https")
        return {0, "", "built without TLS support; cannot reach " + req.url};
#endif

    httplib::Client client((scheme + "://" + host_port).c_str());
    client.set_connection_timeout(req.timeout_ms / 1000, (req.timeout_ms % 1000) * 1000);
    client.set_read_timeout(req.timeout_ms / 1000, (req.timeout_ms % 1000) * 1000);
    client.set_write_timeout(req.timeout_ms / 1000, (req.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    for (const auto& [k, v] : req.headers)
        headers.emplace(k, v);

    const auto result = client.Post(path, headers, req.body, "application/json");
    if (!result)
        return {0, "", httplib::to_string(result.error())};
    return {result->status, result->body, ""};
}

std::chrono::milliseconds SystemClock::now() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
}

std::chrono::milliseconds VirtualClock::now() {
    std::lock_guard lock(mutex_);
    return now_;
}

void VirtualClock::sleep_for(std::chrono::milliseconds d) {
    advance(d);
}

void VirtualClock::advance(std::chrono::milliseconds d) {
    std::lock_guard lock(mutex_);
    now_ += d;
}

RateLimiter::RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock)
    : rpm_(requests_per_minute), clock_(std::move(clock)) {
    if (rpm_ < 1)
        throw Error("requests_per_minute must be >= 1");
}

void RateLimiter::acquire() {
    constexpr auto kWindow = std::chrono::milliseconds(60000);
    while (true) {
        std::chrono::milliseconds wait{0};
        {
            std::lock_guard lock(mutex_);
            const auto now = clock_->now();
            while (!sent_.empty() && now - sent_.front() >= kWindow)
                sent_.pop_front();
            if (static_cast<int>(sent_.size()) < rpm_) {
                sent_.push_back(now);
                return;
            }
            wait = sent_.front() + kWindow - now;
        }
        clock_->sleep_for(wait);
    }
}

// ---------------------------------------------------------------------------
// Response cache
// ---------------------------------------------------------------------------

ResponseCache::ResponseCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path ResponseCache::entry_path(std::string_view provider_id,
                                                const CacheKey& key) const {
    return root_ / provider_id / key.digest.substr(0, 2) / (key.digest + ".json");
}

std::optional<CacheEntry> ResponseCache::get(std::string_view provider_id,
                                             const CacheKey& key) const {
    const auto path = entry_path(provider_id, key);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    json j;
    try {
        in >> j;
        CacheEntry entry;
        entry.digest = j.at("digest").get<std::string>();
        entry.response_text = j.at("response_text").get<std::string>();
        entry.created_at = j.value("created_at", "");
        const auto& m = j.at("model");
        entry.model.provider_id = m.value("provider_id", "");
        entry.model.model_id = m.value("model_id", "");
        entry.model.temperature = m.value("temperature", 0.0);
        entry.model.max_output_tokens = m.value("max_output_tokens", 0);
        return entry;
    } catch (const json::exception&) {
        return std::nullopt; // unreadable entry behaves like a miss
    }
}

void ResponseCache::put(std::string_view provider_id, const CacheEntry& entry) {
    const auto path = entry_path(provider_id, CacheKey{entry.digest});
    std::filesystem::create_directories(path.parent_path());

    json j;
    j["digest"] = entry.digest;
    j["response_text"] = entry.response_text;
    j["created_at"] = entry.created_at;
    j["model"] = {{"provider_id", entry.model.provider_id},
                  {"model_id", entry.model.model_id},
                  {"temperature", entry.model.temperature},
                  {"max_output_tokens", entry.model.max_output_tokens}};

    static std::atomic<unsigned> counter{0};
    const auto tmp = path.parent_path() /
                     (entry.digest + ".tmp" + std::to_string(counter.fetch_add(1)));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw Error("cannot write cache entry " + tmp.string());
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

ResponseCache::Stats ResponseCache::stats() const {
    Stats s;
    if (!std::filesystem::exists(root_))
        return s;
    for (const auto& provider_dir : std::filesystem::directory_iterator(root_)) {
        if (!provider_dir.is_directory())
            continue;
        const std::string provider = provider_dir.path().filename().string();
        for (const auto& entry :
             std::filesystem::recursive_directory_iterator(provider_dir.path())) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                ++s.entries;
                s.bytes += entry.file_size();
                ++s.per_provider[provider];
            }
        }
    }
    return s;
}

void ResponseCache::clear() {
    if (!std::filesystem::exists(root_))
        return;
    for (const auto& child : std::filesystem::directory_iterator(root_))
        std::filesystem::remove_all(child.path());
}

// ---------------------------------------------------------------------------
// Wire formats
// ---------------------------------------------------------------------------

std::string build_wire_request(const PromptSpec& p, const JudgeModelSpec& m, WireStyle w) {
    json j;
    switch (w) {
    case WireStyle::OpenAiChat:
        j = {{"model", m.model_id},
             {"temperature", m.temperature},
             {"max_tokens", m.max_output_tokens},
             {"messages",
              {{{"role", "system"}, {"content", p.system_text}},
               {{"role", "user"}, {"content", p.user_text}}}}};
        break;
    case WireStyle::AnthropicMessages:
        j = {{"model", m.model_id},
             {"temperature", m.temperature},
             {"max_tokens", m.max_output_tokens},
             {"system", p.system_text},
             {"messages", {{{"role", "user"}, {"content", p.user_text}}}}};
        break;
    }
    return j.dump();
}

std::string extract_wire_response(WireStyle w, const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw ProviderError(200, "unparseable response body: " + excerpt_of(body));
    }
    try {
        std::string text;
        switch (w) {
        case WireStyle::OpenAiChat:
            text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            break;
        case WireStyle::AnthropicMessages: {
            for (const auto& block : j.at("content")) {
                if (block.value("type", "text") == "text")
                    text += block.at("text").get<std::string>();
            }
            break;
        }
        }
        if (text.empty())
            throw ResponseEmptyError("provider returned an empty completion");
        return text;
    } catch (const json::exception&) {
        throw ProviderError(200, "unexpected response shape: " + excerpt_of(body));
    }
}

namespace {

std::vector<std::pair<std::string, std::string>> auth_headers(const ProviderConfig& cfg,
                                                              const std::string& api_key) {
    switch (cfg.wire_style) {
    case WireStyle::OpenAiChat:
        return {{"Authorization", "Bearer " + api_key}};
    case WireStyle::AnthropicMessages:
        return {{"x-api-key", api_key}, {"anthropic-version", "2023-06-01"}};
    }
    return {};
}

bool retryable(const HttpResponse& resp) {
    return resp.status == 0 || resp.status == 408 || resp.status == 429 || resp.status >= 500;
}

} // namespace

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

LlmClient::LlmClient(ProviderConfig cfg, std::shared_ptr<HttpTransport> transport,
                     std::shared_ptr<ResponseCache> cache, std::shared_ptr<Clock> clock,
                     unsigned jitter_seed)
    : config_(std::move(cfg)), transport_(std::move(transport)), cache_(std::move(cache)),
      clock_(clock), limiter_(config_.requests_per_minute, clock), rng_(jitter_seed) {
    config_.validate();
}

RawJudgeResponse LlmClient::complete(const PromptSpec& p, const JudgeModelSpec& m,
                                     std::string_view trial_salt) {
    const CacheKey key = cache_key(p, m, config_.wire_style, trial_salt);

    if (cache_) {
        if (const auto hit = cache_->get(config_.provider_id, key)) {
            RawJudgeResponse resp;
            resp.text = hit->response_text;
            resp.model = m;
            resp.latency_ms = 0;
            resp.from_cache = true;
            resp.attempts = 0;
            return resp;
        }
    }

    const char* api_key = config_.auth_env_var.empty()
                              ? ""
                              : std::getenv(config_.auth_env_var.c_str());
    if (api_key == nullptr || api_key[0] == '\0')
        throw AuthMissingError("environment variable " + config_.auth_env_var +
                               " is not set (needed for provider " + config_.provider_id + ")");

    HttpRequest req;
    req.url = config_.base_url;
    req.headers = auth_headers(config_, api_key);
    req.body = build_wire_request(p, m, config_.wire_style);
    req.timeout_ms = config_.timeout_ms;

    const int max_attempts = config_.max_retries + 1;
    HttpResponse last;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        limiter_.acquire();
        const auto t0 = clock_->now();
        last = transport_->post(req);
        const auto latency = clock_->now() - t0;

        if (last.status == 200) {
            const std::string text = extract_wire_response(config_.wire_style, last.body);
            if (cache_) {
                CacheEntry entry;
                entry.digest = key.digest;
                entry.response_text = text;
                entry.created_at = iso8601_now();
                entry.model = m;
                cache_->put(config_.provider_id, entry);
            }
            RawJudgeResponse resp;
            resp.text = text;
            resp.model = m;
            resp.latency_ms = latency.count();
            resp.from_cache = false;
            resp.attempts = attempt;
            return resp;
        }

        if (!retryable(last))
            throw ProviderError(last.status, excerpt_of(last.body));

        if (attempt == max_attempts)
            break;

        std::chrono::milliseconds delay{
            static_cast<std::int64_t>(config_.backoff_base_ms) << (attempt - 1)};
        {
            std::lock_guard lock(rng_mutex_);
            std::uniform_int_distribution<int> jitter(0, config_.backoff_base_ms);
            delay += std::chrono::milliseconds(jitter(rng_));
        }
        clock_->sleep_for(std::min(delay, std::chrono::milliseconds(60000)));
    }

    if (last.status == 429)
        throw RateLimitExhaustedError("provider " + config_.provider_id + " kept returning 429 " +
                                      "after " + std::to_string(max_attempts) + " attempts");
    if (last.status == 0)
        throw TimeoutError("provider " + config_.provider_id + " unreachable after " +
                           std::to_string(max_attempts) + " attempts: " + last.error);
    throw ProviderError(last.status, excerpt_of(last.body));
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace potus
