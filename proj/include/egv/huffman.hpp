#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "egv/bitstream.hpp"

namespace egv::huffman {

/// Occurrence count per byte value; zero means the symbol is absent.
struct FreqTable {
    std::array<std::uint64_t, 256> counts{};

    std::size_t symbol_count() const noexcept;
    std::uint64_t total() const noexcept;

    friend bool operator==(const FreqTable&, const FreqTable&) = default;
};

struct CodeEntry {
    std::uint8_t symbol = 0;
    BitString code;

    friend bool operator==(const CodeEntry&, const CodeEntry&) = default;
};

/// Per-symbol prefix codes. Codebooks produced by build_codebook are canonical
/// (ordered by code length, then symbol value); codebooks read back from a
/// header keep the order they were stored in.
struct Codebook {
    std::vector<CodeEntry> entries;

    /// Sum of count(s) * len(code(s)) over the table.
    std::uint64_t cost(const FreqTable& freq) const;

    friend bool operator==(const Codebook&, const Codebook&) = default;
};

struct CompressedBlob {
    Codebook codebook;
    PaddedBytes payload;
    std::uint64_t original_len = 0;

    friend bool operator==(const CompressedBlob&, const CompressedBlob&) = default;
};

struct ParsedHeader {
    Codebook codebook;
    unsigned pad_bits = 0;
    std::size_t consumed = 0;  // bytes of input taken by the header
};

inline constexpr std::uint8_t kHeaderSentinel = 0x24;  // '$', written twice

/// Throws EmptyInput when `data` is empty.
FreqTable build_frequency_table(std::span<const std::uint8_t> data);

/// Optimal code lengths for `freq`, indexed by symbol (0 for absent symbols).
/// A lone symbol gets length 1.
std::array<std::uint8_t, 256> code_lengths(const FreqTable& freq);

/// Canonical codebook over the optimal lengths. Throws std::invalid_argument
/// on an empty table.
Codebook build_codebook(const FreqTable& freq);

CompressedBlob compress(std::span<const std::uint8_t> data);

/// Throws CorruptPayload when the payload does not decode to exactly
/// original_len symbols with no bits left over.
std::vector<std::uint8_t> decompress(const CompressedBlob& blob);

/// Layout: entry count (u16 BE), then per entry symbol, code length, and the
/// code bits packed MSB-first into ceil(len/8) bytes; then "$$"; then the
/// pad byte.
std::vector<std::uint8_t> serialize_header(const Codebook& codebook, unsigned pad_bits);

/// Reads a header from the front of `bytes`; trailing bytes are left alone.
/// Throws BadHeader on truncation, a missing sentinel, bad lengths, duplicate
/// symbols, non-zero fill bits, or codes that are not prefix-free.
ParsedHeader parse_header(std::span<const std::uint8_t> bytes);

/// Entropy of the symbol distribution in bits per symbol.
double entropy_bits(const FreqTable& freq);

} // namespace egv::huffman
