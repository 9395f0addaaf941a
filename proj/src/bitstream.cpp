#include "egv/bitstream.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "egv/errors.hpp"

namespace egv {

BitString BitString::from_string(std::string_view bits) {
    BitString out;
    out.reserve_bits(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bit string may only contain '0' and '1'");
        }
        out.push_back(c == '1');
    }
    return out;
}

BitString BitString::from_uint(std::uint64_t value, std::size_t count) {
    BitString out;
    out.append_uint(value, count);
    return out;
}

bool BitString::at(std::size_t index) const {
    if (index >= length_) {
        throw std::out_of_range("bit index " + std::to_string(index) + " beyond length " +
                                std::to_string(length_));
    }
    return (*this)[index];
}

void BitString::set(std::size_t index, bool bit) {
    if (index >= length_) {
        throw std::out_of_range("bit index " + std::to_string(index) + " beyond length " +
                                std::to_string(length_));
    }
    const std::uint8_t mask = static_cast<std::uint8_t>(0x80u >> (index & 7));
    if (bit) {
        bytes_[index >> 3] |= mask;
    } else {
        bytes_[index >> 3] &= static_cast<std::uint8_t>(~mask);
    }
}

void BitString::push_back(bool bit) {
    if ((length_ & 7) == 0) {
        bytes_.push_back(0);
    }
    if (bit) {
        bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (length_ & 7));
    }
    ++length_;
}

void BitString::append_uint(std::uint64_t value, std::size_t count) {
    if (count > 64) {
        throw std::invalid_argument("append_uint supports at most 64 bits");
    }
    if (count < 64) {
        value &= (std::uint64_t{1} << count) - 1;
    }
    while (count > 0) {
        std::size_t free = (8 - (length_ & 7)) & 7;
        if (free == 0) {
            bytes_.push_back(0);
            free = 8;
        }
        const std::size_t take = std::min(free, count);
        const auto chunk = static_cast<unsigned>((value >> (count - take)) & ((1u << take) - 1));
        bytes_.back() |= static_cast<std::uint8_t>(chunk << (free - take));
        length_ += take;
        count -= take;
    }
}

void BitString::append(const BitString& other) {
    const std::size_t whole = other.length_ / 8;
    for (std::size_t i = 0; i < whole; ++i) {
        append_uint(other.bytes_[i], 8);
    }
    const std::size_t tail = other.length_ & 7;
    if (tail != 0) {
        append_uint(static_cast<std::uint64_t>(other.bytes_[whole]) >> (8 - tail), tail);
    }
}

std::uint64_t BitString::read_uint(std::size_t offset, std::size_t count) const {
    if (count > 64) {
        throw std::invalid_argument("read_uint supports at most 64 bits");
    }
    if (offset > length_ || count > length_ - offset) {
        throw std::out_of_range("read_uint past end of bit string");
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        value = (value << 1) | static_cast<std::uint64_t>((*this)[offset + i]);
    }
    return value;
}

BitString BitString::slice(std::size_t offset, std::size_t count) const {
    if (offset > length_ || count > length_ - offset) {
        throw std::out_of_range("slice past end of bit string");
    }
    BitString out;
    out.reserve_bits(count);
    std::size_t i = 0;
    for (; i + 64 <= count; i += 64) {
        out.append_uint(read_uint(offset + i, 64), 64);
    }
    out.append_uint(read_uint(offset + i, count - i), count - i);
    return out;
}

std::string BitString::to_string() const {
    std::string out;
    out.reserve(length_);
    for (std::size_t i = 0; i < length_; ++i) {
        out.push_back((*this)[i] ? '1' : '0');
    }
    return out;
}

PaddedBytes pack_bits(const BitString& bits) {
    PaddedBytes out;
    out.bytes.assign(bits.bytes().begin(), bits.bytes().end());
    out.pad_bits = static_cast<unsigned>((8 - bits.size() % 8) % 8);
    return out;
}

BitString unpack_bits(const PaddedBytes& padded) {
    if (padded.pad_bits > 7) {
        throw std::invalid_argument("pad_bits must be in [0,7]");
    }
    if (padded.bytes.empty()) {
        if (padded.pad_bits != 0) {
            throw std::invalid_argument("pad_bits declared on an empty buffer");
        }
        return {};
    }
    const std::uint8_t pad_mask = static_cast<std::uint8_t>((1u << padded.pad_bits) - 1);
    if ((padded.bytes.back() & pad_mask) != 0) {
        throw NonZeroPad("declared pad bits are not zero");
    }
    BitString out;
    out.reserve_bits(padded.bit_length());
    const std::size_t whole = padded.bytes.size() - 1;
    for (std::size_t i = 0; i < whole; ++i) {
        out.append_uint(padded.bytes[i], 8);
    }
    const std::size_t tail = 8 - padded.pad_bits;
    out.append_uint(static_cast<std::uint64_t>(padded.bytes.back()) >> padded.pad_bits, tail);
    return out;
}

} // namespace egv
