#include "egv/integrity.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <openssl/crypto.h>
#include <openssl/sha.h>

namespace egv::integrity {

std::size_t digest_size(HashAlg alg) noexcept {
    switch (alg) {
    case HashAlg::Sha512:
        return SHA512_DIGEST_LENGTH;
    case HashAlg::Sha1:
        return SHA_DIGEST_LENGTH;
    }
    return 0;
}

std::string_view name(HashAlg alg) noexcept {
    switch (alg) {
    case HashAlg::Sha512:
        return "SHA-512";
    case HashAlg::Sha1:
        return "SHA-1";
    }
    return "unknown";
}

std::optional<HashAlg> alg_from_id(std::uint8_t id) noexcept {
    switch (id) {
    case 0x01:
        return HashAlg::Sha512;
    case 0x02:
        return HashAlg::Sha1;
    default:
        return std::nullopt;
    }
}

std::optional<HashAlg> alg_from_name(std::string_view text) noexcept {
    std::string lowered;
    for (char c : text) {
        if (c != '-') {
            lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (lowered == "sha512") {
        return HashAlg::Sha512;
    }
    if (lowered == "sha1") {
        return HashAlg::Sha1;
    }
    return std::nullopt;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0F]);
    }
    return out;
}

std::string Digest::hex() const { return to_hex(bytes); }

Digest digest(std::span<const std::uint8_t> data, HashAlg alg) {
    Digest out;
    out.algorithm = alg;
    out.bytes.resize(digest_size(alg));
    switch (alg) {
    case HashAlg::Sha512:
        SHA512(data.data(), data.size(), out.bytes.data());
        break;
    case HashAlg::Sha1:
        SHA1(data.data(), data.size(), out.bytes.data());
        break;
    default:
        throw std::invalid_argument("unknown hash algorithm");
    }
    return out;
}

Verdict verify(std::span<const std::uint8_t> data, const Digest& expected) {
    if (expected.bytes.size() != digest_size(expected.algorithm)) {
        return Verdict::Mismatch;
    }
    const Digest actual = digest(data, expected.algorithm);
    return CRYPTO_memcmp(actual.bytes.data(), expected.bytes.data(), actual.bytes.size()) == 0
               ? Verdict::Ok
               : Verdict::Mismatch;
}

} // namespace egv::integrity
