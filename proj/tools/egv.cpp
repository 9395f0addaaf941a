// egv: pack, unpack, transfer and inspect EGV1 envelopes, and run the
// compression-ratio benchmark.
//
// Exit codes: 0 success, 1 generic failure, 2 integrity failure, 3 format
// failure, 4 usage error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "egv/bench.hpp"
#include "egv/dbtext.hpp"
#include "egv/envelope.hpp"
#include "egv/errors.hpp"
#include "egv/huffman.hpp"
#include "egv/transport.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int {
    kOk = 0,
    kGeneric = 1,
    kIntegrity = 2,
    kFormat = 3,
    kUsage = 4,
};

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_signal(int) { g_interrupted = 1; }

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw egv::Error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
        throw egv::Error("cannot write " + path.string());
    }
}

struct SourceOptions {
    std::string database = "E-GOV";
    std::string table;
    std::string schema_path;
    bool escape = false;
    bool force_csv = false;
};

struct PackOptions {
    unsigned block_bits = egv::cipher::kDefaultBlockBits;
    std::string hash = "sha512";
};

void add_source_options(CLI::App* cmd, SourceOptions& src) {
    cmd->add_flag("--csv", src.force_csv, "Treat the input as CSV even without a .csv extension");
    cmd->add_option("--database", src.database, "Database name for CSV input")->capture_default_str();
    cmd->add_option("--table", src.table, "Table name for CSV input (default: file stem)");
    cmd->add_option("--schema", src.schema_path,
                    "Sidecar schema CSV (Field,Type,Null,Default) for CSV input");
    cmd->add_flag("--escape", src.escape, "Backslash-escape delimiters in CSV cells");
}

void add_pack_options(CLI::App* cmd, PackOptions& pack) {
    cmd->add_option("--block-bits", pack.block_bits, "Cipher block length in bits")
        ->check(CLI::Range(1u, 64u))
        ->capture_default_str();
    cmd->add_option("--hash", pack.hash, "Digest algorithm: sha512 or sha1")->capture_default_str();
}

egv::integrity::HashAlg hash_from(const std::string& name) {
    const auto alg = egv::integrity::alg_from_name(name);
    if (!alg) {
        throw UsageError("unknown hash algorithm \"" + name + "\"");
    }
    return *alg;
}

// Dump text for the input: CSV goes through the table model, anything else
// is taken verbatim.
std::vector<std::uint8_t> load_source(const fs::path& path, const SourceOptions& src) {
    auto raw = read_file(path);
    if (!src.force_csv && path.extension() != ".csv") {
        return raw;
    }
    const std::string_view csv(reinterpret_cast<const char*>(raw.data()), raw.size());
    std::optional<std::vector<egv::dbtext::FieldDef>> schema;
    if (!src.schema_path.empty()) {
        const auto text = read_file(src.schema_path);
        schema = egv::dbtext::load_schema_csv(
            {reinterpret_cast<const char*>(text.data()), text.size()});
    }
    const std::string table_name = src.table.empty() ? path.stem().string() : src.table;
    const auto table = egv::dbtext::load_csv(csv, src.database, table_name, schema);
    const auto text = egv::dbtext::export_dump(
        table, src.escape ? egv::dbtext::CellMode::Escaped : egv::dbtext::CellMode::Strict);
    return {text.begin(), text.end()};
}

int cmd_pack(const fs::path& input, const SourceOptions& src, const PackOptions& pack,
             std::string out) {
    const auto data = load_source(input, src);
    const auto envelope =
        egv::envelope::pack(data, egv::cipher::CipherConfig(pack.block_bits), hash_from(pack.hash));
    if (out.empty()) {
        out = input.string() + ".egv";
    }
    write_file(out, envelope);

    const auto env = egv::envelope::decode(envelope);
    std::cout << "original   " << data.size() << " bytes\n"
              << "compressed " << env.huffman_header.size() + env.payload.size()
              << " bytes (header " << env.huffman_header.size() << ", payload "
              << env.payload.size() << ")\n"
              << "envelope   " << envelope.size() << " bytes -> " << out << '\n';
    return kOk;
}

int cmd_unpack(const fs::path& input, const std::string& out) {
    const auto data = egv::envelope::unpack(read_file(input));
    if (out.empty()) {
        std::cout.write(reinterpret_cast<const char*>(data.data()),
                        static_cast<std::streamsize>(data.size()));
        std::cout.flush();
    } else {
        write_file(out, data);
        std::cerr << "recovered " << data.size() << " bytes -> " << out << '\n';
    }
    return kOk;
}

int cmd_send(const std::string& address, const std::vector<std::string>& paths,
             const SourceOptions& src, const PackOptions& pack) {
    const auto endpoint = egv::transport::parse_endpoint(address);
    egv::transport::SendOptions options;
    options.max_frame = egv::transport::max_frame_from_env();
    for (const auto& p : paths) {
        const fs::path path(p);
        std::vector<std::uint8_t> envelope;
        if (path.extension() == ".egv") {
            envelope = read_file(path);
        } else {
            envelope = egv::envelope::pack(load_source(path, src),
                                           egv::cipher::CipherConfig(pack.block_bits),
                                           hash_from(pack.hash));
        }
        const auto report = egv::transport::send(endpoint, envelope, options);
        std::cout << p << ": sent " << report.bytes_sent << " bytes, ack "
                  << static_cast<unsigned>(report.ack) << '\n';
    }
    return kOk;
}

int cmd_recv(const std::string& address, const std::string& dir, std::size_t count) {
    egv::transport::ReceiverOptions options;
    options.max_frame = egv::transport::max_frame_from_env();
    egv::transport::Receiver receiver(egv::transport::parse_endpoint(address), dir, options);
    std::cerr << "listening on port " << receiver.port() << ", writing to " << dir << '\n';

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::stop_source stop;
    std::jthread watcher([&stop](std::stop_token done) {
        while (!done.stop_requested() && g_interrupted == 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        stop.request_stop();
    });
    receiver.serve(stop.get_token(), count);
    return kOk;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::uint64_t seed, const std::string& format) {
    const auto rows = egv::bench::run(sizes, seed);
    std::cout << (format == "tsv" ? egv::bench::format_tsv(rows) : egv::bench::format_table(rows));
    return kOk;
}

int cmd_inspect(const fs::path& input) {
    const auto bytes = read_file(input);
    const auto env = egv::envelope::decode(bytes);
    const auto header = egv::huffman::parse_header(env.huffman_header);
    const auto verdict = egv::envelope::verify(bytes);

    std::size_t min_len = 255;
    std::size_t max_len = 0;
    for (const auto& e : header.codebook.entries) {
        min_len = std::min(min_len, e.code.size());
        max_len = std::max(max_len, e.code.size());
    }

    std::cout << "version          " << static_cast<unsigned>(env.version) << '\n'
              << "hash algorithm   " << egv::integrity::name(env.hash_alg) << '\n'
              << "block bits       " << static_cast<unsigned>(env.block_bits) << '\n'
              << "cipher pad bits  " << static_cast<unsigned>(env.cipher_pad_bits) << '\n'
              << "original length  " << env.original_len << '\n'
              << "header length    " << env.huffman_header.size() << '\n'
              << "payload length   " << env.payload.size() << '\n'
              << "envelope length  " << bytes.size() << '\n'
              << "codebook         " << header.codebook.entries.size() << " symbols, code lengths "
              << min_len << ".." << max_len << ", pad " << header.pad_bits << '\n'
              << "digest           " << env.digest.hex() << '\n'
              << "verification     "
              << (verdict == egv::integrity::Verdict::Ok ? "OK" : "MISMATCH") << '\n';
    return verdict == egv::integrity::Verdict::Ok ? kOk : kIntegrity;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compress, encrypt and integrity-seal table dumps for transfer"};
    app.require_subcommand(1);

    SourceOptions src;
    PackOptions pack;

    std::string pack_input;
    std::string pack_out;
    auto* pack_cmd = app.add_subcommand("pack", "Pack a dump text or CSV file into an .egv envelope");
    pack_cmd->add_option("input", pack_input, "Dump text or CSV file")->required();
    pack_cmd->add_option("--out,-o", pack_out, "Envelope path (default: <input>.egv)");
    add_source_options(pack_cmd, src);
    add_pack_options(pack_cmd, pack);

    std::string unpack_input;
    std::string unpack_out;
    auto* unpack_cmd = app.add_subcommand("unpack", "Verify and unpack an envelope");
    unpack_cmd->add_option("envelope", unpack_input, "Envelope file")->required();
    unpack_cmd->add_option("--out,-o", unpack_out, "Output path (default: stdout)");

    std::string send_address;
    std::vector<std::string> send_paths;
    auto* send_cmd = app.add_subcommand("send", "Send envelopes (or files packed on the fly)");
    send_cmd->add_option("address", send_address, "Receiver host:port")->required();
    send_cmd->add_option("paths", send_paths, ".egv envelopes, dump text or CSV files")->required();
    add_source_options(send_cmd, src);
    add_pack_options(send_cmd, pack);

    std::string recv_address;
    std::string recv_dir;
    std::size_t recv_count = 0;
    auto* recv_cmd = app.add_subcommand("recv", "Receive envelopes and write recovered tables");
    recv_cmd->add_option("address", recv_address, "Listen host:port")->required();
    recv_cmd->add_option("--dir,-d", recv_dir, "Output directory")->required();
    recv_cmd->add_option("--count", recv_count, "Stop after this many connections (0: run forever)");

    std::vector<std::size_t> bench_sizes(egv::bench::kReferenceSizes.begin(),
                                         egv::bench::kReferenceSizes.end());
    std::uint64_t bench_seed = egv::bench::kDefaultSeed;
    std::string bench_format = "text";
    auto* bench_cmd = app.add_subcommand("bench", "Compression ratio on synthetic dump corpora");
    bench_cmd->add_option("--sizes", bench_sizes, "Corpus sizes in bytes")
        ->check(CLI::PositiveNumber)
        ->delimiter(',');
    bench_cmd->add_option("--seed", bench_seed, "Corpus generator seed")->capture_default_str();
    bench_cmd->add_option("--format", bench_format, "text or tsv")
        ->check(CLI::IsMember({"text", "tsv"}))
        ->capture_default_str();

    std::string inspect_input;
    auto* inspect_cmd = app.add_subcommand("inspect", "Print envelope metadata and digest verdict");
    inspect_cmd->add_option("envelope", inspect_input, "Envelope file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*pack_cmd) {
            return cmd_pack(pack_input, src, pack, pack_out);
        }
        if (*unpack_cmd) {
            return cmd_unpack(unpack_input, unpack_out);
        }
        if (*send_cmd) {
            return cmd_send(send_address, send_paths, src, pack);
        }
        if (*recv_cmd) {
            return cmd_recv(recv_address, recv_dir, recv_count);
        }
        if (*bench_cmd) {
            return cmd_bench(bench_sizes, bench_seed, bench_format);
        }
        if (*inspect_cmd) {
            return cmd_inspect(inspect_input);
        }
    } catch (const UsageError& e) {
        std::cerr << "egv: " << e.what() << '\n';
        return kUsage;
    } catch (const egv::IntegrityError& e) {
        std::cerr << "egv: integrity error: " << e.what() << '\n';
        return kIntegrity;
    } catch (const egv::RejectedByReceiver& e) {
        std::cerr << "egv: " << e.what() << '\n';
        return kIntegrity;
    } catch (const egv::FormatError& e) {
        std::cerr << "egv: format error: " << e.what() << '\n';
        return kFormat;
    } catch (const egv::BadHeader& e) {
        std::cerr << "egv: bad header: " << e.what() << '\n';
        return kFormat;
    } catch (const egv::CorruptPayload& e) {
        std::cerr << "egv: corrupt payload: " << e.what() << '\n';
        return kFormat;
    } catch (const egv::BadCipherPad& e) {
        std::cerr << "egv: corrupt payload: " << e.what() << '\n';
        return kFormat;
    } catch (const std::invalid_argument& e) {
        std::cerr << "egv: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "egv: " << e.what() << '\n';
        return kGeneric;
    }
    return kGeneric;
}
