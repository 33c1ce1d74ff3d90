#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace potus {

/// Incremental SHA-256 (FIPS 180-4). Used for prompt render hashes and
/// response cache keys; verified against the published test vectors.
class Sha256 {
public:
    Sha256();

    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    /// Finalizes and returns the digest; the hasher must not be reused.
    std::array<std::uint8_t, 32> digest();

    /// Lowercase 64-char hex digest of a single buffer.
    static std::string hex(std::string_view data);

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::uint64_t total_len_ = 0;
    std::size_t buffer_len_ = 0;
};

} // namespace potus
