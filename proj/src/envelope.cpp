#include "egv/envelope.hpp"

#include <algorithm>
#include <string>

#include "egv/errors.hpp"
#include "egv/huffman.hpp"

namespace egv::envelope {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t value) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(value >> shift));
    }
}

void put_bytes(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> bytes) {
    const std::size_t at = out.size();
    out.resize(at + bytes.size());
    std::copy(bytes.begin(), bytes.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes, std::size_t pos) {
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        value = (value << 8) | bytes[pos + i];
    }
    return value;
}

// Validates magic, version and algorithm; returns the algorithm.
integrity::HashAlg check_prefix(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFixedPrefix) {
        throw FormatError("envelope truncated: " + std::to_string(bytes.size()) + " bytes");
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw FormatError("bad magic, not an EGV1 envelope");
    }
    if (bytes[4] != kVersion) {
        throw FormatError("unsupported envelope version " + std::to_string(bytes[4]));
    }
    const auto alg = integrity::alg_from_id(bytes[5]);
    if (!alg) {
        throw FormatError("unknown hash algorithm id " + std::to_string(bytes[5]));
    }
    return *alg;
}

} // namespace

std::vector<std::uint8_t> encode(const Envelope& env) {
    std::vector<std::uint8_t> out;
    out.reserve(kFixedPrefix + env.huffman_header.size() + 8 + env.payload.size() +
                env.digest.bytes.size());
    put_bytes(out, kMagic);
    out.push_back(env.version);
    out.push_back(static_cast<std::uint8_t>(env.hash_alg));
    out.push_back(env.block_bits);
    out.push_back(env.cipher_pad_bits);
    put_u64(out, env.original_len);
    put_bytes(out, env.huffman_header);
    put_u64(out, env.payload.size());
    put_bytes(out, env.payload);
    put_bytes(out, env.digest.bytes);
    return out;
}

Envelope decode(std::span<const std::uint8_t> bytes) {
    Envelope env;
    env.hash_alg = check_prefix(bytes);
    env.version = bytes[4];
    env.block_bits = bytes[6];
    env.cipher_pad_bits = bytes[7];
    if (env.block_bits < cipher::kMinBlockBits || env.block_bits > cipher::kMaxBlockBits) {
        throw FormatError("block length " + std::to_string(env.block_bits) + " outside [1,64]");
    }
    if (env.cipher_pad_bits >= env.block_bits) {
        throw FormatError("cipher pad " + std::to_string(env.cipher_pad_bits) +
                          " not below block length");
    }
    env.original_len = get_u64(bytes, 8);

    std::size_t pos = kFixedPrefix;
    const auto header = huffman::parse_header(bytes.subspan(pos));
    env.huffman_header.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                              bytes.begin() + static_cast<std::ptrdiff_t>(pos + header.consumed));
    pos += header.consumed;

    if (bytes.size() - pos < 8) {
        throw FormatError("envelope truncated before payload length");
    }
    const std::uint64_t payload_len = get_u64(bytes, pos);
    pos += 8;
    const std::size_t digest_len = integrity::digest_size(env.hash_alg);
    const std::size_t rest = bytes.size() - pos;
    if (rest < digest_len || payload_len > rest - digest_len) {
        throw FormatError("envelope truncated: payload of " + std::to_string(payload_len) +
                          " bytes plus digest exceeds " + std::to_string(rest) + " remaining");
    }
    if (payload_len != rest - digest_len) {
        throw FormatError("unexpected trailing bytes after digest");
    }
    env.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                       bytes.begin() + static_cast<std::ptrdiff_t>(pos + payload_len));
    pos += payload_len;
    env.digest.algorithm = env.hash_alg;
    env.digest.bytes.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return env;
}

integrity::Verdict verify(std::span<const std::uint8_t> bytes) {
    const auto alg = check_prefix(bytes);
    const std::size_t digest_len = integrity::digest_size(alg);
    if (bytes.size() < kFixedPrefix + digest_len) {
        throw FormatError("envelope too short to hold its digest");
    }
    const std::size_t body = bytes.size() - digest_len;
    integrity::Digest expected{alg, {bytes.begin() + static_cast<std::ptrdiff_t>(body), bytes.end()}};
    return integrity::verify(bytes.first(body), expected);
}

std::vector<std::uint8_t> pack(std::span<const std::uint8_t> data,
                               const cipher::CipherConfig& cfg, integrity::HashAlg alg) {
    const auto blob = huffman::compress(data);
    const auto stream = cipher::encrypt_stream(blob.payload, cfg);

    Envelope env;
    env.hash_alg = alg;
    env.block_bits = static_cast<std::uint8_t>(cfg.block_bits());
    env.cipher_pad_bits = static_cast<std::uint8_t>(stream.cipher_pad_bits);
    env.original_len = blob.original_len;
    env.huffman_header = huffman::serialize_header(blob.codebook, blob.payload.pad_bits);
    env.payload = stream.bytes;

    auto bytes = encode(env);
    const auto md = integrity::digest(bytes, alg);
    put_bytes(bytes, md.bytes);
    return bytes;
}

std::vector<std::uint8_t> unpack(std::span<const std::uint8_t> bytes) {
    if (verify(bytes) != integrity::Verdict::Ok) {
        throw IntegrityError("message digest mismatch, envelope rejected");
    }
    const Envelope env = decode(bytes);
    const auto header = huffman::parse_header(env.huffman_header);

    cipher::CipherStream stream;
    stream.bytes = env.payload;
    stream.cipher_pad_bits = env.cipher_pad_bits;
    stream.plain_pad_bits = header.pad_bits;

    huffman::CompressedBlob blob;
    blob.codebook = header.codebook;
    blob.payload = cipher::decrypt_stream(stream, cipher::CipherConfig(env.block_bits));
    blob.original_len = env.original_len;
    return huffman::decompress(blob);
}

} // namespace egv::envelope
