#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

// The binary under test and the source config directory arrive from the
// build system.
const char* cli_path() { return PLATOONID_CLI_PATH; }
const char* config_src_dir() { return PLATOONID_CONFIG_SRC_DIR; }

int run(const std::string& command) {
    int status = std::system(command.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -2;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

// Fresh working directory per test case, shared binary path.
struct CliDir {
    fs::path dir;

    explicit CliDir(const std::string& name) {
        dir = fs::temp_directory_path() /
              ("platoonid-cli-" + std::to_string(::getpid())) / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
    }

    std::string p(const std::string& leaf) const { return (dir / leaf).string(); }

    int cli(const std::string& args, const std::string& log = "out.log") const {
        std::string cmd = std::string(cli_path()) + " " + args + " >" + p(log) +
                          " 2>" + p("err.log");
        return run(cmd);
    }
};

}  // namespace

TEST_CASE("seeded key generation is reproducible", "[cli]") {
    CliDir t("keygen");
    REQUIRE(t.cli("keygen --seed 5 --out " + t.p("a.key")) == 0);
    REQUIRE(t.cli("keygen --seed 5 --out " + t.p("b.key")) == 0);
    CHECK(read_file(t.p("a.key")) == read_file(t.p("b.key")));
    CHECK(read_file(t.p("a.key.pub")) == read_file(t.p("b.key.pub")));
    // 32-byte secret and 96-byte public key, hex plus newline.
    CHECK(read_file(t.p("a.key")).size() == 65);
    CHECK(read_file(t.p("a.key.pub")).size() == 193);

    REQUIRE(t.cli("keygen --seed 6 --out " + t.p("c.key")) == 0);
    CHECK(read_file(t.p("a.key")) != read_file(t.p("c.key")));
}

TEST_CASE("prove and verify round trip through files", "[cli]") {
    CliDir t("prove");
    REQUIRE(t.cli("keygen --seed 5 --out " + t.p("a.key")) == 0);
    REQUIRE(t.cli("keygen --seed 6 --out " + t.p("b.key")) == 0);
    REQUIRE(t.cli("prove --key " + t.p("a.key") +
                  " --id 00:A0:C9:14:C8:29 --nonce ae620b593ca8184b56242f81805a0c3b"
                  " --out " + t.p("proof.hex")) == 0);

    SECTION("the matching key accepts") {
        CHECK(t.cli("verify --proof " + t.p("proof.hex") + " --pubkey " +
                    t.p("a.key.pub")) == 0);
        CHECK(read_file(t.p("out.log")) == "valid\n");
    }
    SECTION("identifier binding is enforced") {
        CHECK(t.cli("verify --proof " + t.p("proof.hex") + " --pubkey " +
                    t.p("a.key.pub") + " --id 00:A0:C9:14:C8:29") == 0);
        CHECK(t.cli("verify --proof " + t.p("proof.hex") + " --pubkey " +
                    t.p("a.key.pub") + " --id 11:22:33:44:55:66") == 1);
    }
    SECTION("a different key rejects") {
        CHECK(t.cli("verify --proof " + t.p("proof.hex") + " --pubkey " +
                    t.p("b.key.pub")) == 1);
        CHECK(read_file(t.p("out.log")) == "invalid\n");
    }
    SECTION("a truncated proof is malformed, not merely invalid") {
        auto hex = read_file(t.p("proof.hex"));
        write_file(t.p("broken.hex"), hex.substr(0, 40) + "\n");
        CHECK(t.cli("verify --proof " + t.p("broken.hex") + " --pubkey " +
                    t.p("a.key.pub")) == 2);
    }
}

TEST_CASE("scenario runs replay to identical artifacts", "[cli]") {
    CliDir t("scenario");
    REQUIRE(t.cli("run-scenario --trace " + t.p("t1.txt") + " --journal " +
                  t.p("j1.jsonl")) == 0);
    REQUIRE(t.cli("run-scenario --trace " + t.p("t2.txt") + " --journal " +
                  t.p("j2.jsonl")) == 0);
    CHECK(read_file(t.p("t1.txt")) == read_file(t.p("t2.txt")));
    CHECK(read_file(t.p("j1.jsonl")) == read_file(t.p("j2.jsonl")));

    // A different seed changes the key material, so the journal differs
    // even though the baseline's event timing does not.
    REQUIRE(t.cli("run-scenario --seed 43 --trace " + t.p("t3.txt") +
                  " --journal " + t.p("j3.jsonl")) == 0);
    CHECK(read_file(t.p("j1.jsonl")) != read_file(t.p("j3.jsonl")));

    SECTION("the journal passes inspection") {
        CHECK(t.cli("ledger-inspect --journal " + t.p("j1.jsonl") +
                    " --verify") == 0);
        auto out = read_file(t.p("out.log"));
        CHECK(out.find("chain valid") != std::string::npos);
    }
    SECTION("a tampered journal fails inspection") {
        auto journal = read_file(t.p("j1.jsonl"));
        auto at = journal.find("\"payload\"");
        REQUIRE(at != std::string::npos);
        journal[at + 15] = journal[at + 15] == 'a' ? 'b' : 'a';
        write_file(t.p("bad.jsonl"), journal);
        CHECK(t.cli("ledger-inspect --journal " + t.p("bad.jsonl") +
                    " --verify") == 1);
    }
    SECTION("history queries respect ownership") {
        CHECK(t.cli("query-history --journal " + t.p("j1.jsonl") +
                    " --as company-1") == 0);
        auto h1 = read_file(t.p("out.log"));
        CHECK(t.cli("query-history --journal " + t.p("j1.jsonl") +
                    " --as company-2") == 0);
        auto h2 = read_file(t.p("out.log"));
        CHECK(h1 != h2);
        CHECK(h1.find("records") != std::string::npos);
        CHECK(t.cli("query-history --journal " + t.p("j1.jsonl") +
                    " --as nobody") == 1);
    }
}

TEST_CASE("key registration extends a journal on disk", "[cli]") {
    CliDir t("register");
    REQUIRE(t.cli("keygen --seed 11 --out " + t.p("t9.key")) == 0);
    REQUIRE(t.cli("register-key --journal " + t.p("reg.jsonl") +
                  " --truck truck-09 --pubkey " + t.p("t9.key.pub") +
                  " --owner company-9") == 0);
    CHECK(t.cli("ledger-inspect --journal " + t.p("reg.jsonl") + " --verify") ==
          0);

    SECTION("the same truck cannot register twice") {
        CHECK(t.cli("register-key --journal " + t.p("reg.jsonl") +
                    " --truck truck-09 --pubkey " + t.p("t9.key.pub") +
                    " --owner company-9") == 1);
        auto err = read_file(t.p("err.log"));
        CHECK(err.find("error:") != std::string::npos);
    }
    SECTION("a second truck lands in a later block") {
        REQUIRE(t.cli("keygen --seed 12 --out " + t.p("t8.key")) == 0);
        REQUIRE(t.cli("register-key --journal " + t.p("reg.jsonl") +
                      " --truck truck-08 --pubkey " + t.p("t8.key.pub") +
                      " --owner company-8") == 0);
        auto out = read_file(t.p("out.log"));
        CHECK(out.find("height 2") != std::string::npos);
        CHECK(t.cli("ledger-inspect --journal " + t.p("reg.jsonl") +
                    " --verify") == 0);
    }
}

TEST_CASE("relative config paths fall back to the config directory", "[cli]") {
    CliDir t("config");
    // The name alone does not exist relative to the test's working
    // directory; the environment variable supplies the directory.
    std::string cmd = std::string("PLATOONID_CONFIG_DIR=") + config_src_dir() +
                      " " + cli_path() + " run-scenario --config baseline.json" +
                      " --trace " + t.p("trace.txt") + " >" + t.p("out.log") +
                      " 2>" + t.p("err.log");
    REQUIRE(run(cmd) == 0);
    auto out = read_file(t.p("out.log"));
    CHECK(out.find("members 8") != std::string::npos);

    // Without the fallback the same invocation fails.
    std::string bare = std::string(cli_path()) +
                       " run-scenario --config baseline.json >" + t.p("o2.log") +
                       " 2>" + t.p("e2.log");
    CHECK(run(bare) == 1);
}
