#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace egv::integrity {

/// Values double as the algorithm ID byte on the wire.
enum class HashAlg : std::uint8_t {
    Sha512 = 0x01,
    Sha1 = 0x02,
};

std::size_t digest_size(HashAlg alg) noexcept;
std::string_view name(HashAlg alg) noexcept;

/// nullopt for an unknown ID byte.
std::optional<HashAlg> alg_from_id(std::uint8_t id) noexcept;

/// Accepts "sha512"/"sha-512" and "sha1"/"sha-1", case-insensitive.
std::optional<HashAlg> alg_from_name(std::string_view text) noexcept;

struct Digest {
    HashAlg algorithm = HashAlg::Sha512;
    std::vector<std::uint8_t> bytes;

    std::string hex() const;

    friend bool operator==(const Digest&, const Digest&) = default;
};

enum class Verdict { Ok, Mismatch };

Digest digest(std::span<const std::uint8_t> data, HashAlg alg = HashAlg::Sha512);

/// Constant-time over the digest length. A digest of the wrong length for its
/// algorithm is a mismatch.
Verdict verify(std::span<const std::uint8_t> data, const Digest& expected);

std::string to_hex(std::span<const std::uint8_t> bytes);

} // namespace egv::integrity
