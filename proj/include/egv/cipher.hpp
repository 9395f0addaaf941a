#pragma once

#include <cstdint>
#include <vector>

#include "egv/bitstream.hpp"

namespace egv::cipher {

// Keyless recursive positional modulo-2 substitution over fixed-size bit
// blocks. Each block is transformed independently (no chaining). This is a
// faithful reproduction of a weak scheme: it has fixed points and no
// diffusion across blocks, so it offers no confidentiality by modern
// standards.

inline constexpr unsigned kMinBlockBits = 1;
inline constexpr unsigned kMaxBlockBits = 64;
inline constexpr unsigned kDefaultBlockBits = 8;

class CipherConfig {
public:
    /// Throws std::invalid_argument unless 1 <= block_bits <= 64.
    explicit CipherConfig(unsigned block_bits = kDefaultBlockBits);

    unsigned block_bits() const noexcept { return block_bits_; }

    friend bool operator==(const CipherConfig&, const CipherConfig&) = default;

private:
    unsigned block_bits_;
};

struct CipherStream {
    std::vector<std::uint8_t> bytes;
    unsigned cipher_pad_bits = 0;  // zero bits added to complete the final block
    unsigned plain_pad_bits = 0;   // byte fill of the plaintext, restored on decrypt

    friend bool operator==(const CipherStream&, const CipherStream&) = default;
};

// Word-level forms. `block` holds the L-bit block as an integer whose most
// significant bit is s0; the result uses the same convention with t0 first.
std::uint64_t encrypt_word(std::uint64_t block, unsigned block_bits) noexcept;
std::uint64_t decrypt_word(std::uint64_t block, unsigned block_bits) noexcept;

/// Throws BlockLengthMismatch unless s.size() == block_bits.
BitString encrypt_block(const BitString& s, const CipherConfig& cfg);
BitString decrypt_block(const BitString& t, const CipherConfig& cfg);

CipherStream encrypt_stream(const PaddedBytes& data, const CipherConfig& cfg);

/// Throws BadCipherPad if the recovered block padding is non-zero, and
/// FormatError if the stream length cannot hold whole blocks.
PaddedBytes decrypt_stream(const CipherStream& cs, const CipherConfig& cfg);

} // namespace egv::cipher
