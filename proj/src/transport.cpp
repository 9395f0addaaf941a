#include "egv/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <system_error>
#include <utility>
#include <vector>

#include "egv/dbtext.hpp"
#include "egv/envelope.hpp"
#include "egv/errors.hpp"

namespace egv::transport {

namespace fs = std::filesystem;

namespace {

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Socket& operator=(Socket&& other) noexcept {
        if (this != &other) {
            reset();
            fd_ = std::exchange(other.fd_, -1);
        }
        return *this;
    }
    ~Socket() { reset(); }

    int get() const noexcept { return fd_; }
    int release() noexcept { return std::exchange(fd_, -1); }
    void reset() noexcept {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_ = -1;
};

std::string errno_text() { return std::strerror(errno); }

void set_timeouts(int fd, int timeout_ms) {
    timeval tv{};
    tv.tv_sec = timeout_ms / 1000;
    tv.tv_usec = (timeout_ms % 1000) * 1000;
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

// False if the peer went away or the socket failed.
bool write_all(int fd, std::span<const std::uint8_t> bytes) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

// False on EOF or error before `out` is filled.
bool read_all(int fd, std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        const ssize_t n = ::recv(fd, out.data() + done, out.size() - done, 0);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

std::array<std::uint8_t, 8> length_prefix(std::uint64_t length) {
    std::array<std::uint8_t, 8> out{};
    for (std::size_t i = 0; i < 8; ++i) {
        out[i] = static_cast<std::uint8_t>(length >> (56 - 8 * i));
    }
    return out;
}

struct AddrInfoDeleter {
    void operator()(addrinfo* p) const noexcept { ::freeaddrinfo(p); }
};
using AddrInfoPtr = std::unique_ptr<addrinfo, AddrInfoDeleter>;

AddrInfoPtr resolve(const Endpoint& ep, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) {
        hints.ai_flags = AI_PASSIVE;
    }
    addrinfo* result = nullptr;
    const std::string port = std::to_string(ep.port);
    const char* host = ep.host.empty() ? nullptr : ep.host.c_str();
    const int rc = ::getaddrinfo(host, port.c_str(), &hints, &result);
    if (rc != 0) {
        throw ConnectionError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
    }
    return AddrInfoPtr(result);
}

std::string sanitize(std::string_view name) {
    std::string out;
    for (char c : name) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '_' || c == '-';
        out.push_back(keep ? c : '_');
    }
    return out.empty() ? std::string("table") : out;
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

} // namespace

Endpoint parse_endpoint(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("endpoint must be host:port, got \"" + std::string(text) + "\"");
    }
    Endpoint ep;
    ep.host = std::string(text.substr(0, colon));
    if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']') {
        ep.host = ep.host.substr(1, ep.host.size() - 2);
    }
    const auto port = text.substr(colon + 1);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || port.empty() || value > 65535) {
        throw std::invalid_argument("bad port \"" + std::string(port) + "\"");
    }
    ep.port = static_cast<std::uint16_t>(value);
    return ep;
}

std::uint64_t max_frame_from_env() {
    const char* raw = std::getenv("EGV_MAX_FRAME");
    if (raw == nullptr || *raw == '\0') {
        return kDefaultMaxFrame;
    }
    const std::string_view text(raw);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
        throw std::invalid_argument("EGV_MAX_FRAME must be a positive integer, got \"" +
                                    std::string(text) + "\"");
    }
    return value;
}

TransferReport send(const Endpoint& to, std::span<const std::uint8_t> envelope,
                    const SendOptions& options) {
    if (envelope.size() > options.max_frame) {
        throw Error("envelope of " + std::to_string(envelope.size()) +
                    " bytes exceeds the frame limit of " + std::to_string(options.max_frame));
    }
    const auto addrs = resolve(to, false);
    Socket sock;
    std::string last_error = "no address";
    for (const addrinfo* ai = addrs.get(); ai != nullptr; ai = ai->ai_next) {
        Socket candidate(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
        if (candidate.get() < 0) {
            last_error = errno_text();
            continue;
        }
        if (::connect(candidate.get(), ai->ai_addr, ai->ai_addrlen) == 0) {
            sock = std::move(candidate);
            break;
        }
        last_error = errno_text();
    }
    if (sock.get() < 0) {
        throw ConnectionError("cannot connect to " + to.host + ":" + std::to_string(to.port) +
                              ": " + last_error);
    }
    set_timeouts(sock.get(), options.timeout_ms);

    const auto prefix = length_prefix(envelope.size());
    // A receiver that refuses the frame may hang up mid-write; its ack, if
    // any, is still worth reading.
    const bool written = write_all(sock.get(), prefix) && write_all(sock.get(), envelope);

    TransferReport report;
    report.bytes_sent = written ? prefix.size() + envelope.size() : 0;
    std::uint8_t ack = 0;
    if (!read_all(sock.get(), {&ack, 1})) {
        throw ConnectionError("receiver closed the connection without acknowledging");
    }
    report.ack = ack;
    if (ack != kAckAccepted) {
        throw RejectedByReceiver("receiver rejected the envelope (ack " + std::to_string(ack) +
                                 ")");
    }
    if (!written) {
        throw ConnectionError("connection failed while sending");
    }
    return report;
}

Receiver::Receiver(const Endpoint& bind, fs::path out_dir, ReceiverOptions options)
    : out_dir_(std::move(out_dir)), options_(std::move(options)) {
    std::error_code ec;
    if (!fs::is_directory(out_dir_, ec)) {
        throw Error("output directory " + out_dir_.string() + " does not exist");
    }
    const fs::path probe = out_dir_ / ".egv-write-probe";
    {
        std::ofstream test(probe);
        if (!test) {
            throw Error("output directory " + out_dir_.string() + " is not writable");
        }
    }
    fs::remove(probe, ec);

    if (!options_.clock) {
        options_.clock = [] {
            return std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                .count();
        };
    }

    const auto addrs = resolve(bind, true);
    std::string last_error = "no address";
    for (const addrinfo* ai = addrs.get(); ai != nullptr; ai = ai->ai_next) {
        Socket sock(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
        if (sock.get() < 0) {
            last_error = errno_text();
            continue;
        }
        const int one = 1;
        ::setsockopt(sock.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(sock.get(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(sock.get(), 16) != 0) {
            last_error = errno_text();
            continue;
        }
        sockaddr_storage addr{};
        socklen_t len = sizeof addr;
        ::getsockname(sock.get(), reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = addr.ss_family == AF_INET6
                    ? ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port)
                    : ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
        listen_fd_ = sock.release();
        break;
    }
    if (listen_fd_ < 0) {
        throw ConnectionError("cannot listen on " + bind.host + ":" + std::to_string(bind.port) +
                              ": " + last_error);
    }
}

Receiver::~Receiver() {
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
    }
}

void Receiver::log(std::string_view message) const {
    if (options_.log) {
        options_.log(message);
    } else {
        std::cerr << "[egv recv] " << message << '\n';
    }
}

std::optional<ConnectionResult> Receiver::serve_one(std::stop_token stop) {
    for (;;) {
        if (stop.stop_requested()) {
            return std::nullopt;
        }
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, 100);
        if (ready < 0 && errno != EINTR) {
            throw ConnectionError("poll failed: " + errno_text());
        }
        if (ready <= 0) {
            continue;
        }
        Socket conn(::accept(listen_fd_, nullptr, nullptr));
        if (conn.get() < 0) {
            if (errno == EINTR || errno == ECONNABORTED) {
                continue;
            }
            throw ConnectionError("accept failed: " + errno_text());
        }
        set_timeouts(conn.get(), options_.timeout_ms);
        return handle(conn.get());
    }
}

void Receiver::serve(std::stop_token stop, std::size_t max_connections) {
    std::size_t handled = 0;
    while (max_connections == 0 || handled < max_connections) {
        if (!serve_one(stop)) {
            return;
        }
        ++handled;
    }
}

ConnectionResult Receiver::handle(int fd) {
    ConnectionResult result;
    auto reject = [&](std::string why) {
        log("rejected: " + why);
        result.accepted = false;
        result.error = std::move(why);
        const std::uint8_t ack = kAckRejected;
        write_all(fd, {&ack, 1});
        return result;
    };

    std::array<std::uint8_t, 8> prefix{};
    if (!read_all(fd, prefix)) {
        return reject("connection closed before frame length");
    }
    std::uint64_t length = 0;
    for (auto b : prefix) {
        length = (length << 8) | b;
    }
    if (length > options_.max_frame) {
        return reject("frame of " + std::to_string(length) + " bytes exceeds limit " +
                      std::to_string(options_.max_frame));
    }
    std::vector<std::uint8_t> body(static_cast<std::size_t>(length));
    if (!read_all(fd, body)) {
        return reject("connection closed mid-frame");
    }
    if (options_.on_frame) {
        options_.on_frame(body);
    }

    try {
        const auto data = envelope::unpack(body);
        const std::string_view text(reinterpret_cast<const char*>(data.data()), data.size());
        const auto table = dbtext::parse_dump(text);
        result.files = persist(table.table_name, text, dbtext::to_csv(table));
    } catch (const std::exception& e) {
        return reject(e.what());
    }

    const std::uint8_t ack = kAckAccepted;
    write_all(fd, {&ack, 1});
    result.accepted = true;
    log("accepted " + std::to_string(length) + " bytes -> " + result.files->dump_text.string());
    return result;
}

ReceivedFiles Receiver::persist(std::string_view table_name, std::string_view dump_text,
                                std::string_view csv_text) {
    const std::string stem = sanitize(table_name) + "_" + std::to_string(options_.clock());
    ReceivedFiles files;
    for (unsigned n = 0;; ++n) {
        const std::string base = n == 0 ? stem : stem + "_" + std::to_string(n);
        files.dump_text = out_dir_ / (base + ".txt");
        files.table_csv = out_dir_ / (base + ".csv");
        if (!fs::exists(files.dump_text) && !fs::exists(files.table_csv)) {
            break;
        }
    }

    const fs::path tmp_text = out_dir_ / ("." + files.dump_text.filename().string() + ".part");
    const fs::path tmp_csv = out_dir_ / ("." + files.table_csv.filename().string() + ".part");
    std::error_code ec;
    try {
        write_file(tmp_text, dump_text);
        write_file(tmp_csv, csv_text);
        fs::rename(tmp_text, files.dump_text);
        try {
            fs::rename(tmp_csv, files.table_csv);
        } catch (...) {
            fs::remove(files.dump_text, ec);
            throw;
        }
    } catch (...) {
        fs::remove(tmp_text, ec);
        fs::remove(tmp_csv, ec);
        throw;
    }
    return files;
}

} // namespace egv::transport
