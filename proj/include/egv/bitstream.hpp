#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace egv {

/// An ordered sequence of bits with an explicit length.
///
/// Storage is packed most-significant-bit first, so bit 0 is the top bit of
/// the first byte. Bits past length() inside the last byte are kept zero.
class BitString {
public:
    BitString() = default;

    /// Parses a string of '0' and '1' characters; anything else throws
    /// std::invalid_argument.
    static BitString from_string(std::string_view bits);

    /// The low `count` bits of `value`, most significant first. count <= 64.
    static BitString from_uint(std::uint64_t value, std::size_t count);

    std::size_t size() const noexcept { return length_; }
    bool empty() const noexcept { return length_ == 0; }

    /// Throws std::out_of_range when index >= size().
    bool at(std::size_t index) const;
    bool operator[](std::size_t index) const noexcept {
        return (bytes_[index >> 3] >> (7 - (index & 7))) & 1u;
    }

    void set(std::size_t index, bool bit);
    void push_back(bool bit);
    void append(const BitString& other);

    /// Appends the low `count` bits of `value`, most significant first.
    void append_uint(std::uint64_t value, std::size_t count);

    /// Reads `count` (<= 64) bits starting at `offset` as an unsigned integer.
    std::uint64_t read_uint(std::size_t offset, std::size_t count) const;

    BitString slice(std::size_t offset, std::size_t count) const;

    void reserve_bits(std::size_t bits) { bytes_.reserve((bits + 7) / 8); }

    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

    std::string to_string() const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t length_ = 0;
};

/// Whole bytes plus the count of zero fill bits at the end of the last byte.
struct PaddedBytes {
    std::vector<std::uint8_t> bytes;
    unsigned pad_bits = 0;

    std::size_t bit_length() const noexcept { return bytes.size() * 8 - pad_bits; }

    friend bool operator==(const PaddedBytes&, const PaddedBytes&) = default;
};

PaddedBytes pack_bits(const BitString& bits);

/// Throws NonZeroPad if any declared pad bit is set, std::invalid_argument if
/// pad_bits is outside [0,7] or exceeds the available bits.
BitString unpack_bits(const PaddedBytes& padded);

/// Sequential MSB-first reader over a byte span holding `bit_length` bits.
class BitReader {
public:
    BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_length) noexcept
        : bytes_(bytes), bit_length_(bit_length) {}

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bit_length_ - pos_; }

    /// Caller checks remaining() first.
    bool next() noexcept {
        bool bit = (bytes_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return bit;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t bit_length_;
    std::size_t pos_ = 0;
};

} // namespace egv
