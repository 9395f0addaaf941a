#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "egv/cipher.hpp"
#include "egv/integrity.hpp"

namespace egv::envelope {

// Wire layout, multi-byte integers big-endian:
//
//   magic "EGV1"      4
//   version           1   (0x01)
//   hash_alg          1   (integrity::HashAlg ID)
//   block_bits        1   (cipher block length L, 1..64)
//   cipher_pad_bits   1   (< block_bits)
//   original_len      8
//   huffman header    self-delimiting, see huffman::serialize_header
//   payload_len       8
//   payload           payload_len
//   digest            digest_size(hash_alg), over every preceding byte

inline constexpr std::array<std::uint8_t, 4> kMagic{'E', 'G', 'V', '1'};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kFixedPrefix = 16;  // magic through original_len

struct Envelope {
    std::uint8_t version = kVersion;
    integrity::HashAlg hash_alg = integrity::HashAlg::Sha512;
    std::uint8_t block_bits = cipher::kDefaultBlockBits;
    std::uint8_t cipher_pad_bits = 0;
    std::uint64_t original_len = 0;
    std::vector<std::uint8_t> huffman_header;
    std::vector<std::uint8_t> payload;
    integrity::Digest digest;

    friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// Writes the fields as they are; the digest is not recomputed.
std::vector<std::uint8_t> encode(const Envelope& env);

/// Structural parse only, the digest is not checked. Throws FormatError on
/// bad magic, version, algorithm, cipher fields, truncation or trailing bytes,
/// and BadHeader when the embedded Huffman header is malformed.
Envelope decode(std::span<const std::uint8_t> bytes);

/// Checks the digest at the tail against everything before it, reading only
/// the fixed prefix to learn the algorithm. Throws FormatError if even that
/// much cannot be read.
integrity::Verdict verify(std::span<const std::uint8_t> bytes);

/// compress -> encrypt -> assemble -> digest. Throws EmptyInput.
std::vector<std::uint8_t> pack(std::span<const std::uint8_t> data,
                               const cipher::CipherConfig& cfg,
                               integrity::HashAlg alg = integrity::HashAlg::Sha512);

/// Verifies the digest before anything else (IntegrityError), then decodes,
/// decrypts and decompresses.
std::vector<std::uint8_t> unpack(std::span<const std::uint8_t> bytes);

} // namespace egv::envelope
