#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace egv::bench {

inline constexpr std::array<std::size_t, 7> kReferenceSizes{1190,  2384,  8336, 11177,
                                                            22358, 37266, 81990};
inline constexpr std::uint64_t kDefaultSeed = 2011;

struct BenchRow {
    std::size_t original_size = 0;
    std::size_t compressed_size = 0;  // Huffman header + payload
    double percentage = 0.0;          // 100 * compressed / original, rounded to 2 decimals
};

/// Exactly `size` bytes of synthetic pipe-delimited dump text. For one seed
/// the corpora are prefixes of a single stream, so a larger corpus extends a
/// smaller one.
std::string generate_corpus(std::size_t size, std::uint64_t seed = kDefaultSeed);

BenchRow measure(std::span<const std::uint8_t> data);

std::vector<BenchRow> run(std::span<const std::size_t> sizes, std::uint64_t seed = kDefaultSeed);

/// Three labelled rows with one column per corpus.
std::string format_table(std::span<const BenchRow> rows);

/// Header line, then one tab-separated line per corpus.
std::string format_tsv(std::span<const BenchRow> rows);

} // namespace egv::bench
