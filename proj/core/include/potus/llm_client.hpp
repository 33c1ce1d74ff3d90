#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "potus/judge.hpp"

namespace potus {

class AuthMissingError : public Error {
public:
    using Error::Error;
};

class RateLimitExhaustedError : public Error {
public:
    using Error::Error;
};

class ProviderError : public Error {
public:
    ProviderError(int status, const std::string& excerpt)
        : Error("provider returned HTTP " + std::to_string(status) + ": " + excerpt),
          status(status) {}
    int status;
};

class TimeoutError : public Error {
public:
    using Error::Error;
};

class ResponseEmptyError : public Error {
public:
    using Error::Error;
};

enum class WireStyle { OpenAiChat, AnthropicMessages };

std::string_view wire_style_name(WireStyle w);
WireStyle wire_style_from_name(std::string_view name);

struct ProviderConfig {
    std::string provider_id;
    std::string base_url; // full chat-completion endpoint URL
    std::string auth_env_var;
    WireStyle wire_style = WireStyle::OpenAiChat;
    int requests_per_minute = 60;
    int max_retries = 3;
    int timeout_ms = 120000;
    int backoff_base_ms = 500;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Cache keys
// ---------------------------------------------------------------------------

struct CacheKey {
    std::string digest; // 64 lowercase hex chars

    bool operator==(const CacheKey&) const = default;
};

/// Decimal rendering with no trailing zeros: 0 -> "0", 0.70 -> "0.7".
std::string format_temperature(double t);

/// The canonical byte string the cache key hashes: newline-joined
/// wire_style, model_id, temperature, max_output_tokens, render_hash,
/// template_version, each line terminated, plus a "trial:<salt>" line when a
/// trial salt is set.
std::string canonical_cache_tuple(const PromptSpec& p, const JudgeModelSpec& m, WireStyle w,
                                  std::string_view trial_salt = {});

CacheKey cache_key(const PromptSpec& p, const JudgeModelSpec& m, WireStyle w,
                   std::string_view trial_salt = {});

// ---------------------------------------------------------------------------
// Transport and clock seams
// ---------------------------------------------------------------------------

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    int timeout_ms = 120000;
};

/// status 0 means the request never produced an HTTP status (connect failure,
/// timeout); error then says why.
struct HttpResponse {
    int status = 0;
    std::string body;
    std::string error;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const HttpRequest& req) = 0;
};

/// cpp-httplib backed transport; https requires OpenSSL support at build time.
class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post(const HttpRequest& req) override;
};

class Clock {
public:
    virtual ~Clock() = default;
    virtual std::chrono::milliseconds now() = 0;
    virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class SystemClock final : public Clock {
public:
    std::chrono::milliseconds now() override;
    void sleep_for(std::chrono::milliseconds d) override;
};

/// Manually advanced clock; sleep_for just moves time forward.
class VirtualClock final : public Clock {
public:
    std::chrono::milliseconds now() override;
    void sleep_for(std::chrono::milliseconds d) override;
    void advance(std::chrono::milliseconds d);

private:
    std::mutex mutex_;
    std::chrono::milliseconds now_{0};
};

/// Sliding-window limiter: at most requests_per_minute sends in any
/// 60-second window. acquire() blocks (through the clock) until a slot
/// frees up, then records the send.
class RateLimiter {
public:
    RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock);

    void acquire();

private:
    int rpm_;
    std::shared_ptr<Clock> clock_;
    std::mutex mutex_;
    std::deque<std::chrono::milliseconds> sent_;
};

// ---------------------------------------------------------------------------
// Response cache
// ---------------------------------------------------------------------------

struct CacheEntry {
    std::string digest;
    std::string response_text;
    std::string created_at; // ISO 8601 UTC
    JudgeModelSpec model;
};

/// One JSON file per entry under <root>/<provider>/<first 2 hex>/<digest>.json.
/// Writes are write-temp-then-rename.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path root);

    [[nodiscard]] std::optional<CacheEntry> get(std::string_view provider_id,
                                                const CacheKey& key) const;
    void put(std::string_view provider_id, const CacheEntry& entry);

    struct Stats {
        std::size_t entries = 0;
        std::uintmax_t bytes = 0;
        std::map<std::string, std::size_t> per_provider;
    };
    [[nodiscard]] Stats stats() const;
    void clear();

    [[nodiscard]] const std::filesystem::path& root() const { return root_; }

private:
    [[nodiscard]] std::filesystem::path entry_path(std::string_view provider_id,
                                                   const CacheKey& key) const;
    std::filesystem::path root_;
};

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

/// Serialized request body for the given wire style.
std::string build_wire_request(const PromptSpec& p, const JudgeModelSpec& m, WireStyle w);

/// Completion text out of a wire response body; throws ProviderError on an
/// unexpected shape and ResponseEmptyError on empty content.
std::string extract_wire_response(WireStyle w, const std::string& body);

/// One logical client per provider: owns that provider's rate limiting and
/// cache namespace. Thread-safe.
class LlmClient {
public:
    LlmClient(ProviderConfig cfg, std::shared_ptr<HttpTransport> transport,
              std::shared_ptr<ResponseCache> cache,
              std::shared_ptr<Clock> clock = std::make_shared<SystemClock>(),
              unsigned jitter_seed = 0x5eed);

    /// Cache-first completion with retry/backoff on 429, 5xx and transport
    /// failures. Cached results return with from_cache=true, attempts=0 and
    /// no network traffic.
    RawJudgeResponse complete(const PromptSpec& p, const JudgeModelSpec& m,
                              std::string_view trial_salt = {});

    [[nodiscard]] const ProviderConfig& config() const { return config_; }

private:
    ProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<ResponseCache> cache_;
    std::shared_ptr<Clock> clock_;
    RateLimiter limiter_;
    std::mutex rng_mutex_;
    std::mt19937 rng_;
};

/// "2026-08-08T12:34:56Z" for the current system time.
std::string iso8601_now();

} // namespace potus
