#include "egv/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "egv/errors.hpp"

namespace egv::huffman {

namespace {

// Binary trie over a codebook. Child value 0 means "no child" (the root is
// never a child), a negative value -(symbol + 1) marks a leaf.
class DecodeTrie {
public:
    explicit DecodeTrie(const Codebook& codebook) {
        nodes_.push_back({0, 0});
        for (const auto& entry : codebook.entries) {
            insert(entry);
        }
    }

    // Returns false if the codes are not prefix-free.
    bool ok() const noexcept { return ok_; }

    std::vector<std::uint8_t> decode(BitReader reader, std::uint64_t symbols) const {
        std::vector<std::uint8_t> out;
        out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(symbols, reader.remaining())));
        for (std::uint64_t i = 0; i < symbols; ++i) {
            std::int32_t node = 0;
            for (;;) {
                if (reader.remaining() == 0) {
                    throw CorruptPayload("payload ended after " + std::to_string(i) + " of " +
                                         std::to_string(symbols) + " symbols");
                }
                const std::int32_t child = nodes_[static_cast<std::size_t>(node)][reader.next()];
                if (child == 0) {
                    throw CorruptPayload("bit sequence matches no code at bit " +
                                         std::to_string(reader.position()));
                }
                if (child < 0) {
                    out.push_back(static_cast<std::uint8_t>(-child - 1));
                    break;
                }
                node = child;
            }
        }
        if (reader.remaining() != 0) {
            throw CorruptPayload(std::to_string(reader.remaining()) +
                                 " bits left after the last symbol");
        }
        return out;
    }

private:
    void insert(const CodeEntry& entry) {
        std::int32_t node = 0;
        const std::size_t len = entry.code.size();
        for (std::size_t i = 0; i < len; ++i) {
            auto& slot = nodes_[static_cast<std::size_t>(node)][entry.code[i]];
            if (slot < 0) {  // an existing code is a prefix of this one
                ok_ = false;
                return;
            }
            if (i + 1 == len) {
                if (slot != 0) {  // this code is a prefix of (or equal to) another
                    ok_ = false;
                    return;
                }
                slot = -static_cast<std::int32_t>(entry.symbol) - 1;
                return;
            }
            if (slot == 0) {
                slot = static_cast<std::int32_t>(nodes_.size());
                nodes_.push_back({0, 0});  // invalidates `slot`
            }
            node = nodes_[static_cast<std::size_t>(node)][entry.code[i]];
        }
    }

    std::vector<std::array<std::int32_t, 2>> nodes_;
    bool ok_ = true;
};

// Adds one to a code viewed as an unsigned binary number of fixed width.
void increment(BitString& code) {
    for (std::size_t i = code.size(); i-- > 0;) {
        if (!code[i]) {
            code.set(i, true);
            return;
        }
        code.set(i, false);
    }
    throw std::logic_error("canonical code overflow");
}

} // namespace

std::size_t FreqTable::symbol_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c != 0; }));
}

std::uint64_t FreqTable::total() const noexcept {
    std::uint64_t sum = 0;
    for (auto c : counts) {
        sum += c;
    }
    return sum;
}

std::uint64_t Codebook::cost(const FreqTable& freq) const {
    std::uint64_t sum = 0;
    for (const auto& entry : entries) {
        sum += freq.counts[entry.symbol] * entry.code.size();
    }
    return sum;
}

FreqTable build_frequency_table(std::span<const std::uint8_t> data) {
    if (data.empty()) {
        throw EmptyInput();
    }
    FreqTable freq;
    for (auto byte : data) {
        ++freq.counts[byte];
    }
    return freq;
}

std::array<std::uint8_t, 256> code_lengths(const FreqTable& freq) {
    struct Node {
        std::uint64_t weight;
        std::int32_t parent;
    };
    // Heap key is (weight, id). Leaves use their symbol as id and merged nodes
    // continue from 256, so ties resolve the same way on every run.
    using Key = std::pair<std::uint64_t, std::int32_t>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;

    std::vector<Node> nodes(256, Node{0, -1});
    for (std::int32_t s = 0; s < 256; ++s) {
        if (freq.counts[static_cast<std::size_t>(s)] != 0) {
            nodes[static_cast<std::size_t>(s)].weight = freq.counts[static_cast<std::size_t>(s)];
            heap.emplace(freq.counts[static_cast<std::size_t>(s)], s);
        }
    }

    std::array<std::uint8_t, 256> lengths{};
    if (heap.empty()) {
        return lengths;
    }
    if (heap.size() == 1) {
        lengths[static_cast<std::size_t>(heap.top().second)] = 1;
        return lengths;
    }

    while (heap.size() > 1) {
        const Key a = heap.top();
        heap.pop();
        const Key b = heap.top();
        heap.pop();
        const auto id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(Node{a.first + b.first, -1});
        nodes[static_cast<std::size_t>(a.second)].parent = id;
        nodes[static_cast<std::size_t>(b.second)].parent = id;
        heap.emplace(a.first + b.first, id);
    }

    for (std::size_t s = 0; s < 256; ++s) {
        if (freq.counts[s] == 0) {
            continue;
        }
        unsigned depth = 0;
        for (std::int32_t n = nodes[s].parent; n != -1; n = nodes[static_cast<std::size_t>(n)].parent) {
            ++depth;
        }
        lengths[s] = static_cast<std::uint8_t>(depth);
    }
    return lengths;
}

Codebook build_codebook(const FreqTable& freq) {
    const auto lengths = code_lengths(freq);

    std::vector<std::uint8_t> order;
    for (unsigned s = 0; s < 256; ++s) {
        if (lengths[s] != 0) {
            order.push_back(static_cast<std::uint8_t>(s));
        }
    }
    if (order.empty()) {
        throw std::invalid_argument("cannot build a codebook from an empty frequency table");
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint8_t a, std::uint8_t b) { return lengths[a] < lengths[b]; });

    Codebook book;
    book.entries.reserve(order.size());
    BitString code;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t len = lengths[order[i]];
        if (i != 0) {
            increment(code);
        }
        while (code.size() < len) {
            code.push_back(false);
        }
        book.entries.push_back(CodeEntry{order[i], code});
    }
    return book;
}

CompressedBlob compress(std::span<const std::uint8_t> data) {
    const FreqTable freq = build_frequency_table(data);
    CompressedBlob blob;
    blob.codebook = build_codebook(freq);
    blob.original_len = data.size();

    struct Short {
        std::uint64_t bits = 0;
        std::uint8_t len = 0;
    };
    std::array<Short, 256> fast{};
    std::array<const BitString*, 256> slow{};
    for (const auto& entry : blob.codebook.entries) {
        if (entry.code.size() <= 64) {
            fast[entry.symbol] = {entry.code.read_uint(0, entry.code.size()),
                                  static_cast<std::uint8_t>(entry.code.size())};
        } else {
            slow[entry.symbol] = &entry.code;
        }
    }

    BitString bits;
    bits.reserve_bits(blob.codebook.cost(freq));
    for (auto byte : data) {
        if (fast[byte].len != 0) {
            bits.append_uint(fast[byte].bits, fast[byte].len);
        } else {
            bits.append(*slow[byte]);
        }
    }
    blob.payload = pack_bits(bits);
    return blob;
}

std::vector<std::uint8_t> decompress(const CompressedBlob& blob) {
    const PaddedBytes& payload = blob.payload;
    if (payload.pad_bits > 7 || (payload.bytes.empty() && payload.pad_bits != 0)) {
        throw CorruptPayload("invalid payload pad count");
    }
    if (!payload.bytes.empty() &&
        (payload.bytes.back() & ((1u << payload.pad_bits) - 1)) != 0) {
        throw CorruptPayload("payload pad bits are not zero");
    }
    if (blob.codebook.entries.empty()) {
        throw CorruptPayload("empty codebook");
    }
    DecodeTrie trie(blob.codebook);
    if (!trie.ok()) {
        throw CorruptPayload("codebook is not prefix-free");
    }
    return trie.decode(BitReader(payload.bytes, payload.bit_length()), blob.original_len);
}

std::vector<std::uint8_t> serialize_header(const Codebook& codebook, unsigned pad_bits) {
    if (codebook.entries.empty()) {
        throw std::invalid_argument("cannot serialize an empty codebook");
    }
    if (codebook.entries.size() > 256) {
        throw std::invalid_argument("codebook has more than 256 entries");
    }
    if (pad_bits > 7) {
        throw std::invalid_argument("pad_bits must be in [0,7]");
    }
    std::vector<std::uint8_t> out;
    const auto count = static_cast<std::uint16_t>(codebook.entries.size());
    out.push_back(static_cast<std::uint8_t>(count >> 8));
    out.push_back(static_cast<std::uint8_t>(count & 0xFF));
    for (const auto& entry : codebook.entries) {
        const std::size_t len = entry.code.size();
        if (len < 1 || len > 255) {
            throw std::invalid_argument("code length must be in [1,255]");
        }
        out.push_back(entry.symbol);
        out.push_back(static_cast<std::uint8_t>(len));
        const auto packed = pack_bits(entry.code);
        out.insert(out.end(), packed.bytes.begin(), packed.bytes.end());
    }
    out.push_back(kHeaderSentinel);
    out.push_back(kHeaderSentinel);
    out.push_back(static_cast<std::uint8_t>(pad_bits));
    return out;
}

ParsedHeader parse_header(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto need = [&](std::size_t n, const char* what) {
        if (bytes.size() - pos < n) {
            throw BadHeader(std::string("header truncated while reading ") + what);
        }
    };

    need(2, "entry count");
    const std::size_t count = (std::size_t{bytes[0]} << 8) | bytes[1];
    pos = 2;
    if (count == 0 || count > 256) {
        throw BadHeader("entry count " + std::to_string(count) + " outside [1,256]");
    }

    ParsedHeader parsed;
    parsed.codebook.entries.reserve(count);
    std::array<bool, 256> seen{};
    for (std::size_t i = 0; i < count; ++i) {
        need(2, "entry");
        const std::uint8_t symbol = bytes[pos];
        const std::size_t len = bytes[pos + 1];
        pos += 2;
        if (len == 0) {
            throw BadHeader("zero-length code for symbol " + std::to_string(symbol));
        }
        if (seen[symbol]) {
            throw BadHeader("symbol " + std::to_string(symbol) + " appears twice");
        }
        seen[symbol] = true;
        const std::size_t nbytes = (len + 7) / 8;
        need(nbytes, "code bits");
        PaddedBytes packed;
        packed.bytes.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                            bytes.begin() + static_cast<std::ptrdiff_t>(pos + nbytes));
        packed.pad_bits = static_cast<unsigned>(nbytes * 8 - len);
        pos += nbytes;
        try {
            parsed.codebook.entries.push_back(CodeEntry{symbol, unpack_bits(packed)});
        } catch (const NonZeroPad&) {
            throw BadHeader("non-zero fill bits after code for symbol " + std::to_string(symbol));
        }
    }

    need(3, "sentinel");
    if (bytes[pos] != kHeaderSentinel || bytes[pos + 1] != kHeaderSentinel) {
        throw BadHeader("missing $$ sentinel after " + std::to_string(count) + " entries");
    }
    parsed.pad_bits = bytes[pos + 2];
    if (parsed.pad_bits > 7) {
        throw BadHeader("pad value " + std::to_string(parsed.pad_bits) + " outside [0,7]");
    }
    parsed.consumed = pos + 3;

    if (!DecodeTrie(parsed.codebook).ok()) {
        throw BadHeader("codes are not prefix-free");
    }
    return parsed;
}

double entropy_bits(const FreqTable& freq) {
    const double total = static_cast<double>(freq.total());
    double h = 0.0;
    for (auto c : freq.counts) {
        if (c != 0) {
            const double p = static_cast<double>(c) / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

} // namespace egv::huffman
