#include "egv/cipher.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "egv/errors.hpp"

namespace egv::cipher {

namespace {

void check_length(const BitString& bits, const CipherConfig& cfg) {
    if (bits.size() != cfg.block_bits()) {
        throw BlockLengthMismatch("block has " + std::to_string(bits.size()) +
                                  " bits, configured length is " +
                                  std::to_string(cfg.block_bits()));
    }
}

} // namespace

CipherConfig::CipherConfig(unsigned block_bits) : block_bits_(block_bits) {
    if (block_bits < kMinBlockBits || block_bits > kMaxBlockBits) {
        throw std::invalid_argument("block length must be in [1,64], got " +
                                    std::to_string(block_bits));
    }
}

// Step P emits t_P = D mod 2, then halves D rounding up. Output bit t_P lands
// at position P from the most significant end.
std::uint64_t encrypt_word(std::uint64_t block, unsigned block_bits) noexcept {
    std::uint64_t value = block;
    std::uint64_t target = 0;
    for (unsigned p = 0; p < block_bits; ++p) {
        const std::uint64_t bit = value & 1u;
        target = (target << 1) | bit;
        value = (value >> 1) + bit;  // (D+1)/2 for odd D without overflow
    }
    return target;
}

// Scans t_{L-1} down to t_0: a 0 selects the T-th even number (2T), a 1 the
// T-th odd number (2T-1). The result is reduced modulo 2^L, which maps the
// all-zero target (T = 2^L) back to the all-zero source.
std::uint64_t decrypt_word(std::uint64_t block, unsigned block_bits) noexcept {
    std::uint64_t value = 1;
    for (unsigned p = 0; p < block_bits; ++p) {
        const std::uint64_t bit = (block >> p) & 1u;  // t_{L-1-p}
        value = bit ? 2 * value - 1 : 2 * value;
    }
    if (block_bits < 64) {
        value &= (std::uint64_t{1} << block_bits) - 1;
    }
    return value;
}

BitString encrypt_block(const BitString& s, const CipherConfig& cfg) {
    check_length(s, cfg);
    const unsigned l = cfg.block_bits();
    return BitString::from_uint(encrypt_word(s.read_uint(0, l), l), l);
}

BitString decrypt_block(const BitString& t, const CipherConfig& cfg) {
    check_length(t, cfg);
    const unsigned l = cfg.block_bits();
    return BitString::from_uint(decrypt_word(t.read_uint(0, l), l), l);
}

CipherStream encrypt_stream(const PaddedBytes& data, const CipherConfig& cfg) {
    const BitString plain = unpack_bits(data);
    const std::size_t l = cfg.block_bits();
    const std::size_t blocks = (plain.size() + l - 1) / l;

    CipherStream out;
    out.cipher_pad_bits = static_cast<unsigned>(blocks * l - plain.size());
    out.plain_pad_bits = data.pad_bits;

    BitString cipher;
    cipher.reserve_bits(blocks * l);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t offset = b * l;
        const std::size_t avail = std::min(l, plain.size() - offset);
        // Short final block: zero-fill on the right.
        const std::uint64_t word = plain.read_uint(offset, avail) << (l - avail);
        cipher.append_uint(encrypt_word(word, cfg.block_bits()), l);
    }
    out.bytes = pack_bits(cipher).bytes;
    return out;
}

PaddedBytes decrypt_stream(const CipherStream& cs, const CipherConfig& cfg) {
    const std::size_t l = cfg.block_bits();
    if (cs.cipher_pad_bits >= l) {
        throw FormatError("cipher pad " + std::to_string(cs.cipher_pad_bits) +
                          " not below block length " + std::to_string(l));
    }
    if (cs.plain_pad_bits > 7) {
        throw FormatError("plaintext pad must be in [0,7]");
    }

    // The ciphertext bit count N satisfies ceil(N/8) = len(bytes) and
    // N - cipher_pad = 8m - plain_pad for some byte count m, which pins N to
    // one residue mod 8 inside the last byte.
    std::size_t cipher_bits = 0;
    if (cs.bytes.empty()) {
        if (cs.cipher_pad_bits != 0 || cs.plain_pad_bits != 0) {
            throw FormatError("pad counts declared on an empty stream");
        }
    } else {
        const std::size_t residue = (cs.cipher_pad_bits + 8 - cs.plain_pad_bits) % 8;
        const std::size_t fill = (8 - residue) % 8;
        cipher_bits = cs.bytes.size() * 8 - fill;
        if (cipher_bits % l != 0 || cipher_bits < cs.cipher_pad_bits + 1) {
            throw FormatError("ciphertext of " + std::to_string(cs.bytes.size()) +
                              " bytes does not hold whole " + std::to_string(l) + "-bit blocks");
        }
    }

    PaddedBytes stored{cs.bytes, static_cast<unsigned>(cs.bytes.size() * 8 - cipher_bits)};
    BitString cipher;
    try {
        cipher = unpack_bits(stored);
    } catch (const NonZeroPad&) {
        throw FormatError("ciphertext byte fill is not zero");
    }

    BitString plain;
    plain.reserve_bits(cipher_bits);
    for (std::size_t offset = 0; offset < cipher_bits; offset += l) {
        plain.append_uint(decrypt_word(cipher.read_uint(offset, l), cfg.block_bits()), l);
    }
    const std::size_t logical = cipher_bits - cs.cipher_pad_bits;
    if (cs.cipher_pad_bits != 0 && plain.read_uint(logical, cs.cipher_pad_bits) != 0) {
        throw BadCipherPad("recovered block padding is not zero");
    }
    return pack_bits(plain.slice(0, logical));
}

} // namespace egv::cipher
