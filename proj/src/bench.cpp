#include "egv/bench.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "egv/dbtext.hpp"
#include "egv/huffman.hpp"

namespace egv::bench {

namespace {

constexpr std::array<const char*, 12> kDistricts{
    "KOLKATA", "HOWRAH",  "NADIA",   "HOOGHLY", "BANKURA",    "PURULIA",
    "MALDA",   "BIRBHUM", "BURDWAN", "MIDNAPUR", "DARJEELING", "JALPAIGURI"};

constexpr std::array<const char*, 10> kSurnames{"BANERJEE", "MUKHERJEE", "DUTTA", "MANDAL",
                                                "KARFORMA", "SAMANTA",   "GHOSH", "BOSE",
                                                "SARKAR",   "CHATTERJEE"};

// Uniform draws via modulo keep output identical across standard libraries;
// the bias is irrelevant for corpus synthesis.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t n) { return rng_() % n; }

    void digits(std::string& out, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(static_cast<char>('0' + below(10)));
        }
    }

    void letters(std::string& out, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(static_cast<char>('A' + below(26)));
        }
    }

private:
    std::mt19937_64 rng_;
};

dbtext::TableDump schema() {
    dbtext::TableDump t;
    t.database_name = "E-GOV";
    t.table_name = "CITIZEN";
    t.schema = {
        {"SSN_ID", "BIGINT(14)", "NO", ""},
        {"PASSPORT_CODE", "VARCHAR(20)", "NO", ""},
        {"MOBILE", "BIGINT(10)", "NO", ""},
        {"SURNAME", "VARCHAR(32)", "NO", ""},
        {"DISTRICT", "VARCHAR(32)", "NO", ""},
        {"REF_NO", "CHAR(10)", "YES", "NULL"},
    };
    return t;
}

std::string row(Draw& draw) {
    std::string line = "| WB1911";
    draw.digits(line, 8);
    line.push_back('|');
    draw.letters(line, 6);
    draw.digits(line, 8);
    line += "|94";
    draw.digits(line, 8);
    line.push_back('|');
    line += kSurnames[draw.below(kSurnames.size())];
    line.push_back('|');
    line += kDistricts[draw.below(kDistricts.size())];
    line.push_back('|');
    for (int i = 0; i < 10; ++i) {
        const auto k = draw.below(36);
        line.push_back(static_cast<char>(k < 10 ? '0' + k : 'A' + (k - 10)));
    }
    line.push_back('\n');
    return line;
}

} // namespace

std::string generate_corpus(std::size_t size, std::uint64_t seed) {
    std::string text = dbtext::export_dump(schema());
    Draw draw(seed);
    while (text.size() < size) {
        text += row(draw);
    }
    text.resize(size);
    return text;
}

BenchRow measure(std::span<const std::uint8_t> data) {
    const auto blob = huffman::compress(data);
    BenchRow r;
    r.original_size = data.size();
    r.compressed_size = huffman::serialize_header(blob.codebook, blob.payload.pad_bits).size() +
                        blob.payload.bytes.size();
    r.percentage = std::round(10000.0 * static_cast<double>(r.compressed_size) /
                              static_cast<double>(r.original_size)) /
                   100.0;
    return r;
}

std::vector<BenchRow> run(std::span<const std::size_t> sizes, std::uint64_t seed) {
    std::vector<BenchRow> rows;
    rows.reserve(sizes.size());
    for (auto size : sizes) {
        const std::string corpus = generate_corpus(size, seed);
        rows.push_back(measure({reinterpret_cast<const std::uint8_t*>(corpus.data()), corpus.size()}));
    }
    return rows;
}

std::string format_table(std::span<const BenchRow> rows) {
    std::string original = "Original Size(byte)";
    std::string compressed = "Compressed Size(byte)";
    std::string percentage = "Percentage";
    char cell[32];
    for (const auto& r : rows) {
        original += '\t' + std::to_string(r.original_size);
        compressed += '\t' + std::to_string(r.compressed_size);
        std::snprintf(cell, sizeof cell, "\t%.2f", r.percentage);
        percentage += cell;
    }
    return original + '\n' + compressed + '\n' + percentage + '\n';
}

std::string format_tsv(std::span<const BenchRow> rows) {
    std::string out = "original\tcompressed\tpercentage\n";
    char line[96];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%zu\t%zu\t%.2f\n", r.original_size, r.compressed_size,
                      r.percentage);
        out += line;
    }
    return out;
}

} // namespace egv::bench
