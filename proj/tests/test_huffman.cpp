#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "egv/errors.hpp"
#include "egv/huffman.hpp"
#include "fixture_util.hpp"
#include "oracles.hpp"

namespace hf = egv::huffman;
using egv::BitString;

namespace {

hf::FreqTable table_of(const std::map<char, std::uint64_t>& counts) {
    hf::FreqTable f;
    for (auto [sym, n] : counts) {
        f.counts[static_cast<std::uint8_t>(sym)] = n;
    }
    return f;
}

std::string code_of(const hf::Codebook& book, char sym) {
    for (const auto& e : book.entries) {
        if (e.symbol == static_cast<std::uint8_t>(sym)) {
            return e.code.to_string();
        }
    }
    return "?";
}

// Kraft sum scaled by 2^max_len, exact for lengths up to 63.
bool kraft_is_one(const hf::Codebook& book) {
    long double sum = 0;
    for (const auto& e : book.entries) {
        sum += std::ldexp(1.0L, -static_cast<int>(e.code.size()));
    }
    return std::fabs(sum - 1.0L) < 1e-15L;
}

bool prefix_free(const hf::Codebook& book) {
    for (const auto& a : book.entries) {
        for (const auto& b : book.entries) {
            if (&a != &b && a.code.size() <= b.code.size() &&
                b.code.slice(0, a.code.size()) == a.code) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

} // namespace

TEST_SUITE("huffman") {

TEST_CASE("build_frequency_table") {
    const auto f = hf::build_frequency_table(bytes_of("aab"));
    CHECK(f.counts['a'] == 2);
    CHECK(f.counts['b'] == 1);
    CHECK(f.symbol_count() == 2);
    CHECK(f.total() == 3);

    const auto g = hf::build_frequency_table(bytes_of("aaaa"));
    CHECK(g.counts['a'] == 4);
    CHECK(g.symbol_count() == 1);

    CHECK_THROWS_AS(hf::build_frequency_table({}), egv::EmptyInput);
}

TEST_CASE("build_codebook examples") {
    const auto two = hf::build_codebook(table_of({{'a', 2}, {'b', 1}}));
    REQUIRE(two.entries.size() == 2);
    CHECK(code_of(two, 'a') == "0");
    CHECK(code_of(two, 'b') == "1");

    const auto four_table = table_of({{'a', 5}, {'b', 2}, {'c', 1}, {'d', 1}});
    const auto four = hf::build_codebook(four_table);
    CHECK(code_of(four, 'a').size() == 1);
    CHECK(code_of(four, 'b').size() == 2);
    CHECK(code_of(four, 'c').size() == 3);
    CHECK(code_of(four, 'd').size() == 3);
    CHECK(four.cost(four_table) == 15);
    CHECK(egv::test::oracle_min_prefix_cost({5, 2, 1, 1}) == 15);
    // canonical: 0, 10, 110, 111
    CHECK(code_of(four, 'a') == "0");
    CHECK(code_of(four, 'b') == "10");
    CHECK(code_of(four, 'c') == "110");
    CHECK(code_of(four, 'd') == "111");

    const auto one = hf::build_codebook(table_of({{'a', 4}}));
    REQUIRE(one.entries.size() == 1);
    CHECK(code_of(one, 'a') == "0");

    CHECK_THROWS_AS(hf::build_codebook(hf::FreqTable{}), std::invalid_argument);
}

TEST_CASE("compress examples") {
    const auto aab = hf::compress(bytes_of("aab"));
    CHECK(aab.original_len == 3);
    CHECK(aab.payload.bytes == std::vector<std::uint8_t>{0x20});  // 001 then 5 zero bits
    CHECK(aab.payload.pad_bits == 5);

    const auto aaaa = hf::compress(bytes_of("aaaa"));
    CHECK(aaaa.payload.bytes == std::vector<std::uint8_t>{0x00});
    CHECK(aaaa.payload.pad_bits == 4);

    CHECK_THROWS_AS(hf::compress({}), egv::EmptyInput);
}

TEST_CASE("decompress round trip and corruption") {
    const auto aab = hf::compress(bytes_of("aab"));
    CHECK(hf::decompress(aab) == bytes_of("aab"));
    CHECK(hf::decompress(hf::compress(bytes_of("aaaa"))) == bytes_of("aaaa"));

    SUBCASE("payload truncated by one byte") {
        auto text = egv::test::read_bytes(egv::test::fixture_path("E-GOV.txt"));
        auto blob = hf::compress(text);
        blob.payload.bytes.pop_back();
        CHECK_THROWS_AS(hf::decompress(blob), egv::CorruptPayload);
    }
    SUBCASE("fewer symbols declared than encoded") {
        auto blob = aab;
        blob.original_len = 2;
        CHECK_THROWS_AS(hf::decompress(blob), egv::CorruptPayload);
    }
    SUBCASE("more symbols declared than encoded") {
        auto blob = aab;
        blob.original_len = 4;
        CHECK_THROWS_AS(hf::decompress(blob), egv::CorruptPayload);
    }
    SUBCASE("bit with no code in a one-symbol book") {
        auto blob = hf::compress(bytes_of("aaaa"));
        blob.payload.bytes[0] = 0x40;  // 0100
        CHECK_THROWS_AS(hf::decompress(blob), egv::CorruptPayload);
    }
    SUBCASE("set pad bit") {
        auto blob = aab;
        blob.payload.bytes[0] |= 0x01;
        CHECK_THROWS_AS(hf::decompress(blob), egv::CorruptPayload);
    }
}

TEST_CASE("E-GOV sample dump text round trip") {
    const auto text = egv::test::read_bytes(egv::test::fixture_path("E-GOV.txt"));
    CHECK(hf::decompress(hf::compress(text)) == text);
}

TEST_CASE("serialize_header layout") {
    const auto two = hf::build_codebook(table_of({{'a', 2}, {'b', 1}}));
    CHECK(hf::serialize_header(two, 5) ==
          std::vector<std::uint8_t>{0x00, 0x02, 0x61, 0x01, 0x00, 0x62, 0x01, 0x80, 0x24, 0x24, 0x05});

    const auto one = hf::build_codebook(table_of({{'a', 4}}));
    CHECK(hf::serialize_header(one, 4) ==
          std::vector<std::uint8_t>{0x00, 0x01, 0x61, 0x01, 0x00, 0x24, 0x24, 0x04});

    CHECK_THROWS_AS(hf::serialize_header(hf::Codebook{}, 0), std::invalid_argument);
    CHECK_THROWS_AS(hf::serialize_header(one, 8), std::invalid_argument);
}

TEST_CASE("parse_header") {
    const std::vector<std::uint8_t> good{0x00, 0x02, 0x61, 0x01, 0x00, 0x62,
                                         0x01, 0x80, 0x24, 0x24, 0x05};
    const auto parsed = hf::parse_header(good);
    CHECK(parsed.pad_bits == 5);
    CHECK(parsed.consumed == good.size());
    REQUIRE(parsed.codebook.entries.size() == 2);
    CHECK(code_of(parsed.codebook, 'a') == "0");
    CHECK(code_of(parsed.codebook, 'b') == "1");

    SUBCASE("trailing bytes are left for the caller") {
        auto longer = good;
        longer.push_back(0xEE);
        CHECK(hf::parse_header(longer).consumed == good.size());
    }
    SUBCASE("broken sentinel") {
        auto bad = good;
        bad[9] = 0x25;
        CHECK_THROWS_AS(hf::parse_header(bad), egv::BadHeader);
    }
    SUBCASE("prefix violation a=0 b=01") {
        const std::vector<std::uint8_t> bad{0x00, 0x02, 0x61, 0x01, 0x00, 0x62,
                                            0x02, 0x40, 0x24, 0x24, 0x00};
        CHECK_THROWS_AS(hf::parse_header(bad), egv::BadHeader);
    }
    SUBCASE("count larger than entries present") {
        auto bad = good;
        bad[1] = 0x03;
        CHECK_THROWS_AS(hf::parse_header(bad), egv::BadHeader);
    }
    SUBCASE("count smaller than entries present") {
        auto bad = good;
        bad[1] = 0x01;
        CHECK_THROWS_AS(hf::parse_header(bad), egv::BadHeader);
    }
    SUBCASE("zero count") {
        CHECK_THROWS_AS(hf::parse_header(std::vector<std::uint8_t>{0, 0, 0x24, 0x24, 0}),
                        egv::BadHeader);
    }
    SUBCASE("duplicate symbol") {
        auto bad = good;
        bad[5] = 0x61;
        CHECK_THROWS_AS(hf::parse_header(bad), egv::BadHeader);
    }
    SUBCASE("non-zero fill after code bits") {
        auto bad = good;
        bad[4] = 0x01;
        CHECK_THROWS_AS(hf::parse_header(bad), egv::BadHeader);
    }
    SUBCASE("pad value out of range") {
        auto bad = good;
        bad[10] = 0x08;
        CHECK_THROWS_AS(hf::parse_header(bad), egv::BadHeader);
    }
    SUBCASE("every truncation is rejected") {
        for (std::size_t n = 0; n < good.size(); ++n) {
            CHECK_THROWS_AS(hf::parse_header(std::span(good).first(n)), egv::BadHeader);
        }
    }
}

TEST_CASE("optimality against the exhaustive prefix-code oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        hf::FreqTable freq;
        std::vector<std::uint64_t> counts;
        std::vector<std::uint8_t> symbols(256);
        for (int i = 0; i < 256; ++i) {
            symbols[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
        }
        std::shuffle(symbols.begin(), symbols.end(), rng);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t c = 1 + rng() % 20;
            freq.counts[symbols[i]] = c;
            counts.push_back(c);
        }
        const auto book = hf::build_codebook(freq);
        REQUIRE(book.cost(freq) == egv::test::oracle_min_prefix_cost(counts));
    }
}

TEST_CASE("codebook invariants") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        hf::FreqTable freq;
        const std::size_t n = 2 + rng() % 255;
        for (std::size_t i = 0; i < n; ++i) {
            freq.counts[rng() % 256] = 1 + rng() % 1000;
        }
        if (freq.symbol_count() < 2) {
            continue;
        }
        const auto book = hf::build_codebook(freq);
        CHECK(book.entries.size() == freq.symbol_count());
        CHECK(prefix_free(book));
        CHECK(kraft_is_one(book));
        for (std::size_t i = 1; i < book.entries.size(); ++i) {
            const auto& prev = book.entries[i - 1];
            const auto& cur = book.entries[i];
            const bool ordered = prev.code.size() < cur.code.size() ||
                                 (prev.code.size() == cur.code.size() && prev.symbol < cur.symbol);
            CHECK(ordered);
        }
    }
}

TEST_CASE("codes longer than a machine word") {
    // Fibonacci weights force a maximally skewed tree.
    hf::FreqTable freq;
    std::uint64_t a = 1, b = 1;
    for (int s = 0; s < 90; ++s) {
        freq.counts[static_cast<std::size_t>(s)] = a;
        const std::uint64_t next = a + b;
        a = b;
        b = next;
    }
    const auto book = hf::build_codebook(freq);
    std::size_t longest = 0;
    for (const auto& e : book.entries) {
        longest = std::max(longest, e.code.size());
    }
    CHECK(longest == 89);
    CHECK(prefix_free(book));

    const auto header = hf::serialize_header(book, 3);
    const auto parsed = hf::parse_header(header);
    CHECK(parsed.codebook == book);
    CHECK(parsed.pad_bits == 3);

    // Encode a few rare symbols by hand and decode them back.
    const std::vector<std::uint8_t> message{0, 1, 2, 89, 0, 45};
    BitString bits;
    for (auto sym : message) {
        for (const auto& e : book.entries) {
            if (e.symbol == sym) {
                bits.append(e.code);
            }
        }
    }
    hf::CompressedBlob blob{book, egv::pack_bits(bits), message.size()};
    CHECK(hf::decompress(blob) == message);
}

TEST_CASE("entropy bound") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const unsigned alphabet = 2 + static_cast<unsigned>(rng() % 255);
        const auto data = egv::test::random_bytes(rng, 1 + rng() % 4096, alphabet);
        const auto freq = hf::build_frequency_table(data);
        if (freq.symbol_count() < 2) {
            continue;
        }
        const auto blob = hf::compress(data);
        const double h = hf::entropy_bits(freq);
        const double avg = static_cast<double>(blob.payload.bit_length()) /
                           static_cast<double>(data.size());
        CHECK(h <= avg + 1e-9);
        CHECK(avg < h + 1.0);
    }
}

TEST_CASE("header round trip and determinism") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 300; ++trial) {
        const auto data =
            egv::test::random_bytes(rng, 1 + rng() % 2048, 1 + static_cast<unsigned>(rng() % 256));
        const auto blob = hf::compress(data);
        const unsigned pad = static_cast<unsigned>(rng() % 8);
        const auto parsed = hf::parse_header(hf::serialize_header(blob.codebook, pad));
        CHECK(parsed.codebook == blob.codebook);
        CHECK(parsed.pad_bits == pad);
        CHECK(hf::compress(data) == blob);
        CHECK(hf::decompress(blob) == data);
    }
}

}
