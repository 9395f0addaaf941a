#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include "doctest.h"
#include "fixture_util.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(EGV_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.out.append(buf, n);
    }
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct Scratch {
    fs::path dir;
    Scratch() {
        static std::atomic<int> counter{0};
        dir = fs::temp_directory_path() /
              ("egv-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("pack, inspect and unpack the E-GOV sample dump") {
    Scratch s;
    const auto src = egv::test::fixture_path("E-GOV.txt");
    auto r = run("pack " + src + " --out " + (s / "ssn.egv"));
    CHECK(r.code == 0);
    CHECK(r.out.find("envelope") != std::string::npos);

    r = run("inspect " + (s / "ssn.egv"));
    CHECK(r.code == 0);
    CHECK(r.out.find("SHA-512") != std::string::npos);
    CHECK(r.out.find("verification     OK") != std::string::npos);

    r = run("unpack " + (s / "ssn.egv") + " --out " + (s / "out.txt"));
    CHECK(r.code == 0);
    CHECK(egv::test::read_text(s / "out.txt") == egv::test::read_text(src));

    r = run("unpack " + (s / "ssn.egv"));
    CHECK(r.out == egv::test::read_text(src));
}

TEST_CASE("CSV input with sidecar schema reproduces the dump") {
    Scratch s;
    auto r = run("pack " + egv::test::fixture_path("ssn.csv") + " --schema " +
                 egv::test::fixture_path("ssn_schema.csv") + " --table ssn --out " + (s / "c.egv"));
    REQUIRE(r.code == 0);
    r = run("unpack " + (s / "c.egv"));
    CHECK(r.out == egv::test::read_text(egv::test::fixture_path("E-GOV.txt")));
}

TEST_CASE("usage and pipeline errors map to exit codes") {
    Scratch s;
    const auto src = egv::test::fixture_path("E-GOV.txt");
    CHECK(run("pack " + src + " --block-bits 65 --out " + (s / "x.egv")).code == 4);
    CHECK(run("pack " + src + " --hash md5 --out " + (s / "x.egv")).code == 4);
    CHECK(run("frobnicate").code == 4);

    { std::ofstream(s / "empty.txt"); }
    CHECK(run("pack " + (s / "empty.txt") + " --out " + (s / "e.egv")).code == 1);

    REQUIRE(run("pack " + src + " --hash sha1 --block-bits 13 --out " + (s / "ok.egv")).code == 0);
    auto bytes = egv::test::read_bytes(s / "ok.egv");
    bytes[bytes.size() / 2] ^= 0x01;
    {
        std::ofstream out(s / "bad.egv", std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    CHECK(run("unpack " + (s / "bad.egv")).code == 2);
    CHECK(run("inspect " + (s / "bad.egv")).code == 2);
    CHECK(run("unpack " + src).code == 3);

    auto truncated = egv::test::read_bytes(s / "ok.egv");
    truncated.resize(truncated.size() - 1);
    {
        std::ofstream out(s / "short.egv", std::ios::binary);
        out.write(reinterpret_cast<const char*>(truncated.data()),
                  static_cast<std::streamsize>(truncated.size()));
    }
    CHECK(run("inspect " + (s / "short.egv")).code == 3);
}

TEST_CASE("bench output") {
    auto r = run("bench");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("Original Size(byte)\t1190\t2384\t8336\t11177\t22358\t37266\t81990\n", 0) == 0);

    r = run("bench --sizes 1 --format tsv");
    CHECK(r.code == 0);
    CHECK(r.out == "original\tcompressed\tpercentage\n1\t9\t900.00\n");

    CHECK(run("bench --seed 9 --format tsv").out == run("bench --seed 9 --format tsv").out);
    CHECK(run("bench --sizes 0").code == 4);
}

TEST_CASE("send and recv over loopback") {
    Scratch s;
    const std::string port = std::to_string(20000 + ::getpid() % 20000);
    fs::create_directories(s.dir / "in");

    std::thread receiver([&] { (void)run("recv 127.0.0.1:" + port + " --dir " + (s / "in") + " --count 1"); });
    Run sent;
    for (int attempt = 0; attempt < 50; ++attempt) {
        sent = run("send 127.0.0.1:" + port + " " + egv::test::fixture_path("E-GOV.txt"));
        if (sent.code == 0) {
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    receiver.join();
    CHECK(sent.code == 0);
    std::size_t texts = 0;
    for (const auto& entry : fs::directory_iterator(s.dir / "in")) {
        if (entry.path().extension() == ".txt") {
            ++texts;
            CHECK(egv::test::read_text(entry.path().string()) ==
                  egv::test::read_text(egv::test::fixture_path("E-GOV.txt")));
        }
    }
    CHECK(texts == 1);
}

TEST_CASE("recv with an unusable directory and send to a closed port fail") {
    Scratch s;
    CHECK(run("recv 127.0.0.1:0 --dir " + (s / "missing")).code == 1);
    CHECK(run("send 127.0.0.1:1 " + egv::test::fixture_path("E-GOV.txt")).code == 1);
}

}
