#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>

namespace egv::transport {

// Framing: 8-byte big-endian body length, then the body (one envelope). The
// receiver answers with a single status byte.

inline constexpr std::uint64_t kDefaultMaxFrame = std::uint64_t{256} << 20;
inline constexpr std::uint8_t kAckAccepted = 0x00;
inline constexpr std::uint8_t kAckRejected = 0x01;

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

/// "host:port"; throws std::invalid_argument.
Endpoint parse_endpoint(std::string_view text);

/// EGV_MAX_FRAME if set to a positive integer, else kDefaultMaxFrame. Throws
/// std::invalid_argument on a malformed value.
std::uint64_t max_frame_from_env();

struct SendOptions {
    std::uint64_t max_frame = kDefaultMaxFrame;
    int timeout_ms = 30'000;
};

struct TransferReport {
    std::uint64_t bytes_sent = 0;  // frame header included
    std::uint8_t ack = kAckRejected;
};

/// Sends one frame and waits for the acknowledgment. Throws ConnectionError
/// when the receiver cannot be reached or hangs up without acknowledging, and
/// RejectedByReceiver on ack 0x01.
TransferReport send(const Endpoint& to, std::span<const std::uint8_t> envelope,
                    const SendOptions& options = {});

struct ReceivedFiles {
    std::filesystem::path dump_text;  // recovered dump, byte-identical to what was packed
    std::filesystem::path table_csv;  // the parsed table
};

struct ConnectionResult {
    bool accepted = false;
    std::string error;  // set when rejected
    std::optional<ReceivedFiles> files;
};

struct ReceiverOptions {
    std::uint64_t max_frame = kDefaultMaxFrame;
    int timeout_ms = 30'000;
    /// Seconds since the epoch, used in output file names.
    std::function<std::int64_t()> clock;
    /// Sees every complete frame body before it is unpacked.
    std::function<void(std::span<const std::uint8_t>)> on_frame;
    std::function<void(std::string_view)> log;
};

/// Listens on an endpoint and processes one connection at a time: read frame,
/// unpack (digest first), parse the dump, write `<table>_<timestamp>.txt` and
/// `.csv` into the output directory, acknowledge. Failed connections are
/// acknowledged with 0x01 and leave nothing behind.
class Receiver {
public:
    /// Throws egv::Error if the directory is missing or not writable, and
    /// ConnectionError if the endpoint cannot be bound. Port 0 picks a free
    /// port.
    Receiver(const Endpoint& bind, std::filesystem::path out_dir, ReceiverOptions options = {});
    ~Receiver();

    Receiver(const Receiver&) = delete;
    Receiver& operator=(const Receiver&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    const std::filesystem::path& output_dir() const noexcept { return out_dir_; }

    /// Blocks for the next connection; nullopt if `stop` fired first.
    std::optional<ConnectionResult> serve_one(std::stop_token stop = {});

    /// Serves until stopped, or until `max_connections` have been handled
    /// when non-zero.
    void serve(std::stop_token stop, std::size_t max_connections = 0);

private:
    ConnectionResult handle(int fd);
    ReceivedFiles persist(std::string_view table_name, std::string_view dump_text,
                          std::string_view csv_text);
    void log(std::string_view message) const;

    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::filesystem::path out_dir_;
    ReceiverOptions options_;
};

} // namespace egv::transport
