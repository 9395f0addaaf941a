#include <random>
#include <set>

#include "doctest.h"
#include "egv/cipher.hpp"
#include "egv/errors.hpp"
#include "oracles.hpp"

namespace cp = egv::cipher;
using egv::BitString;
using egv::PaddedBytes;

namespace {

BitString enc(std::string_view bits) {
    return cp::encrypt_block(BitString::from_string(bits),
                             cp::CipherConfig(static_cast<unsigned>(bits.size())));
}

BitString dec(std::string_view bits) {
    return cp::decrypt_block(BitString::from_string(bits),
                             cp::CipherConfig(static_cast<unsigned>(bits.size())));
}

} // namespace

TEST_SUITE("cipher") {

TEST_CASE("config bounds") {
    CHECK(cp::CipherConfig().block_bits() == 8);
    CHECK_NOTHROW(cp::CipherConfig(1));
    CHECK_NOTHROW(cp::CipherConfig(64));
    CHECK_THROWS_AS(cp::CipherConfig(0), std::invalid_argument);
    CHECK_THROWS_AS(cp::CipherConfig(65), std::invalid_argument);
}

TEST_CASE("block examples") {
    CHECK(enc("01100011").to_string() == "10111001");
    CHECK(enc("00000000").to_string() == "00000000");
    CHECK(enc("0101").to_string() == "1101");
    CHECK(enc("1").to_string() == "1");

    CHECK(dec("10111001").to_string() == "01100011");
    CHECK(dec("00000000").to_string() == "00000000");
    CHECK(dec("1101").to_string() == "0101");
}

TEST_CASE("block length mismatch") {
    const cp::CipherConfig cfg(8);
    CHECK_THROWS_AS(cp::encrypt_block(BitString::from_string("0101"), cfg), egv::BlockLengthMismatch);
    CHECK_THROWS_AS(cp::decrypt_block(BitString::from_string("010101010"), cfg),
                    egv::BlockLengthMismatch);
}

TEST_CASE("matches the literal trace and round trips for every block up to 12 bits") {
    for (unsigned l = 1; l <= 12; ++l) {
        std::set<std::uint64_t> images;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << l); ++v) {
            const auto expected = egv::test::oracle_encrypt(egv::test::bits_of(v, l));
            const std::uint64_t t = cp::encrypt_word(v, l);
            REQUIRE(egv::test::bits_of(t, l) == expected);
            REQUIRE(egv::test::oracle_decrypt(expected) == egv::test::bits_of(v, l));
            REQUIRE(cp::decrypt_word(t, l) == v);
            images.insert(t);
        }
        CHECK(images.size() == (std::size_t{1} << l));
        CHECK(cp::encrypt_word(0, l) == 0);
    }
}

TEST_CASE("random round trip on wide blocks") {
    std::mt19937_64 rng(21);
    for (unsigned l : {16u, 32u, 64u}) {
        const std::uint64_t mask = l == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << l) - 1;
        for (int i = 0; i < 10'000; ++i) {
            const std::uint64_t v = rng() & mask;
            const std::uint64_t t = cp::encrypt_word(v, l);
            REQUIRE(t <= mask);
            REQUIRE(cp::decrypt_word(t, l) == v);
        }
        CHECK(cp::encrypt_word(0, l) == 0);
        CHECK(cp::decrypt_word(0, l) == 0);
        CHECK(cp::decrypt_word(cp::encrypt_word(mask, l), l) == mask);
    }
}

TEST_CASE("stream examples") {
    const auto one = cp::encrypt_stream(PaddedBytes{{0x63}, 0}, cp::CipherConfig(8));
    CHECK(one.bytes == std::vector<std::uint8_t>{0xB9});
    CHECK(one.cipher_pad_bits == 0);
    CHECK(cp::decrypt_stream(one, cp::CipherConfig(8)) == PaddedBytes{{0x63}, 0});

    const auto empty = cp::encrypt_stream(PaddedBytes{}, cp::CipherConfig(8));
    CHECK(empty.bytes.empty());
    CHECK(empty.cipher_pad_bits == 0);
    CHECK(cp::decrypt_stream(empty, cp::CipherConfig(8)) == PaddedBytes{});

    // 1010 1011 | 1100 (+4 pad): blocks 0xAB -> 0xAA and 0xC0 -> 0x02
    const PaddedBytes twelve{{0xAB, 0xC0}, 4};
    const auto two = cp::encrypt_stream(twelve, cp::CipherConfig(8));
    CHECK(two.bytes == std::vector<std::uint8_t>{0xAA, 0x02});
    CHECK(two.cipher_pad_bits == 4);
    CHECK(cp::decrypt_stream(two, cp::CipherConfig(8)) == twelve);

    SUBCASE("flipped bit lands in the pad region") {
        auto bad = two;
        bad.bytes[1] ^= 0x80;  // 10000010 decrypts to 10111111
        CHECK_THROWS_AS(cp::decrypt_stream(bad, cp::CipherConfig(8)), egv::BadCipherPad);
    }
    SUBCASE("flipped bit that leaves the pad region zero goes unnoticed") {
        auto bad = two;
        bad.bytes[1] ^= 0x01;  // 00000011 decrypts to 01000000
        CHECK(cp::decrypt_stream(bad, cp::CipherConfig(8)) == PaddedBytes{{0xAB, 0x40}, 4});
    }
}

TEST_CASE("stream framing errors") {
    const auto cs = cp::encrypt_stream(PaddedBytes{{0xAB, 0xC0}, 4}, cp::CipherConfig(8));
    auto bad = cs;
    bad.cipher_pad_bits = 8;
    CHECK_THROWS_AS(cp::decrypt_stream(bad, cp::CipherConfig(8)), egv::FormatError);

    // With 5-bit blocks a stray byte cannot line up with the block grid. At
    // L=8 it would be one more valid block.
    const auto cs5 = cp::encrypt_stream(PaddedBytes{{0xAB, 0xC0}, 4}, cp::CipherConfig(5));
    auto bad5 = cs5;
    bad5.bytes.push_back(0);
    CHECK_THROWS_AS(cp::decrypt_stream(bad5, cp::CipherConfig(5)), egv::FormatError);
    bad5 = cs5;
    bad5.bytes.pop_back();
    CHECK_THROWS_AS(cp::decrypt_stream(bad5, cp::CipherConfig(5)), egv::FormatError);
}

TEST_CASE("stream round trip across block lengths") {
    std::mt19937_64 rng(22);
    for (unsigned l : {1u, 5u, 8u, 13u, 64u}) {
        const cp::CipherConfig cfg(l);
        for (int trial = 0; trial < 300; ++trial) {
            BitString bits;
            const std::size_t len = rng() % 600;
            for (std::size_t i = 0; i < len; ++i) {
                bits.push_back(rng() & 1u);
            }
            const auto plain = egv::pack_bits(bits);
            const auto cs = cp::encrypt_stream(plain, cfg);
            REQUIRE(cs.cipher_pad_bits < l);
            REQUIRE((len + cs.cipher_pad_bits) % l == 0);
            REQUIRE(cs.bytes.size() == (len + cs.cipher_pad_bits + 7) / 8);
            REQUIRE(cp::decrypt_stream(cs, cfg) == plain);
        }
    }
}

}
