// Operator entry point: key lifecycle, one-shot prove/verify, scenario
// execution, ledger inspection, and benchmarks. Exit codes: 0 success,
// nonzero with a one-line diagnostic on error; `verify` uses the
// tri-state 0 valid / 1 invalid / 2 malformed.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "platoonid/bench.hpp"
#include "platoonid/identity.hpp"
#include "platoonid/ledger.hpp"
#include "platoonid/simnet.hpp"

namespace {

using namespace platoonid;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

std::string trimmed(const std::string& text) {
    auto begin = text.find_first_not_of(" \t\r\n");
    auto end = text.find_last_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    return text.substr(begin, end - begin + 1);
}

// Relative config paths fall back to $PLATOONID_CONFIG_DIR when the file
// is not found where given.
std::string resolve_config_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    const char* dir = std::getenv("PLATOONID_CONFIG_DIR");
    if (dir != nullptr && fs::path(path).is_relative()) {
        auto candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

std::vector<const EndorsingPeer*> peer_pointers(
    const std::deque<EndorsingPeer>& peers) {
    std::vector<const EndorsingPeer*> out;
    for (const auto& p : peers) out.push_back(&p);
    return out;
}

// Deterministic endorsing-peer set shared by register-key invocations
// against the same journal; keys derive from the network seed alone.
std::deque<EndorsingPeer> derive_network_peers(uint64_t network_seed,
                                               int n_peers) {
    std::deque<EndorsingPeer> peers;
    for (int i = 1; i <= n_peers; ++i) {
        Sha256Drbg rng(network_seed, "cli-peer-" + std::to_string(i) + "/key");
        peers.emplace_back("peer-" + std::to_string(i), keygen(rng).first);
    }
    return peers;
}

int cmd_keygen(const std::optional<uint64_t>& seed,
               const std::string& out_path) {
    std::pair<ProverKey, VerifierKey> pair = [&] {
        if (seed) {
            Sha256Drbg rng(*seed);
            return keygen(rng);
        }
        SystemRandomSource rng;
        return keygen(rng);
    }();
    auto secret = prover_key_to_hex(pair.first) + "\n";
    auto pub = verifier_key_to_hex(pair.second) + "\n";
    if (out_path.empty()) {
        std::cout << "key " << secret;
        std::cout << "pub " << pub;
    } else {
        write_text_file(out_path, secret);
        write_text_file(out_path + ".pub", pub);
        std::cout << "wrote " << out_path << " and " << out_path << ".pub\n";
    }
    return 0;
}

int cmd_prove(const std::string& key_path, const std::string& id,
              const std::string& nonce_hex, const std::string& out_path) {
    auto key = prover_key_from_hex(trimmed(read_text_file(key_path)));
    std::optional<Nonce16> nonce;
    if (!nonce_hex.empty()) {
        auto bytes = from_hex(nonce_hex);
        if (bytes.size() != 16) throw EncodingError("nonce must be 16 bytes");
        Nonce16 n;
        std::copy(bytes.begin(), bytes.end(), n.begin());
        nonce = n;
    }
    auto proof = generate_proof(key, hash_identity(id), nonce);
    auto hex = proof_to_hex(proof) + "\n";
    if (out_path.empty()) {
        std::cout << hex;
    } else {
        write_text_file(out_path, hex);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_verify(const std::string& proof_path, const std::string& pubkey_path,
               const std::string& id) {
    ProofBundle proof;
    VerifierKey key;
    try {
        proof = proof_from_hex(trimmed(read_text_file(proof_path)));
        key = verifier_key_from_hex(trimmed(read_text_file(pubkey_path)));
    } catch (const EncodingError& e) {
        std::cerr << "malformed input: " << e.what() << "\n";
        return 2;
    }
    if (!id.empty() && hash_identity(id) != proof.digest) {
        std::cout << "invalid\n";
        return 1;
    }
    bool ok = verify_proof(proof, key, setup_params());
    std::cout << (ok ? "valid" : "invalid") << "\n";
    return ok ? 0 : 1;
}

int cmd_register_key(const std::string& journal_path,
                     const std::string& truck_id,
                     const std::string& pubkey_path, const std::string& owner,
                     uint64_t network_seed, int n_peers, int endorsement_k) {
    auto key = verifier_key_from_hex(trimmed(read_text_file(pubkey_path)));
    auto peers = derive_network_peers(network_seed, n_peers);

    Ledger ledger(EndorsementPolicy{endorsement_k});
    for (const auto& p : peers) ledger.register_peer(p.id(), p.public_key());
    if (std::filesystem::exists(journal_path)) {
        std::ifstream in(journal_path, std::ios::binary);
        ledger.load_journal(in);
        ledger.adopt_participants_from_chain();
    }
    ledger.register_company(owner);
    ledger.register_truck(truck_id, owner);
    auto receipt = ledger.register_verifier_key(
        ledger.issuer(), truck_id, key, peer_pointers(peers), 0);
    std::ofstream out(journal_path, std::ios::binary);
    ledger.write_journal(out);
    std::cout << "registered " << truck_id << " at height " << receipt.height
              << "\n";
    return 0;
}

int cmd_run_scenario(const std::string& config_path,
                     const std::string& trace_path,
                     const std::string& journal_path,
                     const std::optional<uint64_t>& seed_override) {
    ScenarioConfig cfg = baseline_scenario();
    if (!config_path.empty()) {
        auto text = read_text_file(resolve_config_path(config_path));
        cfg = ScenarioConfig::from_json(json::parse(text));
    }
    if (seed_override) cfg.seed = *seed_override;
    auto result = run_scenario(cfg);
    if (!trace_path.empty()) {
        write_text_file(trace_path, result.trace.to_text());
    }
    if (!journal_path.empty()) {
        std::ofstream out(journal_path, std::ios::binary);
        result.ledger.write_journal(out);
    }
    for (const auto& [k, v] : result.counts) {
        std::cout << k << " " << v << "\n";
    }
    std::cout << "members " << result.platoon.members.size() << "\n";
    return 0;
}

int cmd_ledger_inspect(const std::string& journal_path, bool verify) {
    Ledger ledger((EndorsementPolicy{1}));
    std::ifstream in(journal_path, std::ios::binary);
    if (!in) throw Error("cannot open " + journal_path);
    ledger.load_journal(in);
    for (const auto& block : ledger.blocks()) {
        std::cout << "block " << block.height << " txs " << block.txs.size()
                  << " hash " << block.block_hash_hex.substr(0, 16) << "...\n";
        for (const auto& tx : block.txs) {
            std::cout << "  " << tx.tx_id << " " << tx_kind_name(tx.kind)
                      << " endorsers " << tx.endorsements.size() << "\n";
        }
    }
    if (verify) {
        bool ok = ledger.verify_chain();
        std::cout << (ok ? "chain valid" : "chain invalid") << "\n";
        return ok ? 0 : 1;
    }
    return 0;
}

int cmd_query_history(const std::string& journal_path, const std::string& as,
                      const std::string& truck) {
    Ledger ledger((EndorsementPolicy{1}));
    std::ifstream in(journal_path, std::ios::binary);
    if (!in) throw Error("cannot open " + journal_path);
    ledger.load_journal(in);
    ledger.adopt_participants_from_chain();
    std::optional<std::string> target;
    if (!truck.empty()) target = truck;
    auto records = ledger.query_platoon_history(as, target);
    for (const auto& r : records) {
        std::string members;
        for (const auto& m : r.member_list) {
            if (!members.empty()) members += ",";
            members += m;
        }
        std::cout << r.sim_timestamp << " " << PlatoonRecord::event_name(r.event)
                  << " " << r.platoon_id << " [" << members << "] "
                  << r.route_tag << "\n";
    }
    std::cout << records.size() << " records\n";
    return 0;
}

std::vector<int> parse_policies(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) out.push_back(std::stoi(part));
    }
    return out;
}

int cmd_bench(bool throughput, const std::string& policies_csv, int rounds,
              size_t tx_count, int n_peers, const std::string& out_path) {
    LoadSpec load;
    load.tx_count = tx_count;
    auto policies = parse_policies(policies_csv);
    auto reports = throughput ? bench_throughput(policies, load, rounds, n_peers)
                              : bench_latency(policies, load, rounds, n_peers);
    auto text = reports_to_json_text(reports);
    if (!out_path.empty()) {
        write_text_file(out_path, text);
        std::cout << "wrote " << out_path << "\n";
    }
    for (const auto& r : reports) {
        std::cout << "policy " << r.policy << " tps avg " << r.tps_avg
                  << " latency avg " << r.latency_avg_ms << " ms\n";
    }
    return 0;
}

int cmd_bench_crypto(int iterations, const std::string& out_path) {
    auto t = bench_crypto(iterations);
    json j{{"crypto_prove_avg_ms", t.prove_avg_ms},
           {"crypto_verify_avg_ms", t.verify_avg_ms},
           {"iterations", iterations},
           {"hardware_note", hardware_note()}};
    if (!out_path.empty()) write_text_file(out_path, j.dump(2) + "\n");
    std::cout << "prove avg " << t.prove_avg_ms << " ms, verify avg "
              << t.verify_avg_ms << " ms\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"platoonid: pairing-based platoon identity toolkit"};
    app.require_subcommand(1);

    // keygen
    auto* keygen_cmd = app.add_subcommand("keygen", "generate a key pair");
    std::optional<uint64_t> seed;
    std::string out_path;
    keygen_cmd->add_option("--seed", seed, "deterministic seed");
    keygen_cmd->add_option("--out", out_path,
                           "secret key file (public key goes to <out>.pub)");

    // prove
    auto* prove_cmd = app.add_subcommand("prove", "produce an identity proof");
    std::string key_path, identifier, nonce_hex, proof_out;
    prove_cmd->add_option("--key", key_path, "prover key file")->required();
    prove_cmd->add_option("--id", identifier, "identifier string, e.g. a MAC")
        ->required();
    prove_cmd->add_option("--nonce", nonce_hex, "16-byte hex challenge");
    prove_cmd->add_option("--out", proof_out, "proof output file");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "check an identity proof");
    std::string proof_path, pubkey_path, verify_id;
    verify_cmd->add_option("--proof", proof_path, "proof file")->required();
    verify_cmd->add_option("--pubkey", pubkey_path, "verifier key file")
        ->required();
    verify_cmd->add_option("--id", verify_id,
                           "optionally require the proof to cover this id");

    // register-key
    auto* reg_cmd =
        app.add_subcommand("register-key", "record a verifier key on a ledger");
    std::string journal_path, truck_id, owner = "company-1";
    uint64_t network_seed = 42;
    int n_peers = 3, endorsement_k = 3;
    reg_cmd->add_option("--journal", journal_path, "ledger journal file")
        ->required();
    reg_cmd->add_option("--truck", truck_id, "truck id")->required();
    reg_cmd->add_option("--pubkey", pubkey_path, "verifier key file")
        ->required();
    reg_cmd->add_option("--owner", owner, "owning company id");
    reg_cmd->add_option("--network-seed", network_seed,
                        "seed deriving the endorsing peer keys");
    reg_cmd->add_option("--peers", n_peers, "endorsing peer count");
    reg_cmd->add_option("--endorsement-k", endorsement_k,
                        "required endorsements per transaction");

    // run-scenario
    auto* scen_cmd = app.add_subcommand("run-scenario",
                                        "execute a simulated platoon scenario");
    std::string config_path, trace_path, scen_journal;
    std::optional<uint64_t> scen_seed;
    scen_cmd->add_option("--config", config_path,
                         "scenario config JSON (default: built-in baseline)");
    scen_cmd->add_option("--trace", trace_path, "event trace output file");
    scen_cmd->add_option("--journal", scen_journal, "ledger journal output file");
    scen_cmd->add_option("--seed", scen_seed, "override the config seed");

    // ledger-inspect
    auto* inspect_cmd =
        app.add_subcommand("ledger-inspect", "summarize a ledger journal");
    std::string inspect_journal;
    bool inspect_verify = false;
    inspect_cmd->add_option("--journal", inspect_journal, "journal file")
        ->required();
    inspect_cmd->add_flag("--verify", inspect_verify,
                          "recompute hashes and exit 1 if the chain is invalid");

    // query-history
    auto* query_cmd = app.add_subcommand(
        "query-history", "platooning history visible to a participant");
    std::string query_journal, query_as, query_truck;
    query_cmd->add_option("--journal", query_journal, "journal file")
        ->required();
    query_cmd->add_option("--as", query_as, "querying participant id")
        ->required();
    query_cmd->add_option("--truck", query_truck, "restrict to one truck");

    // benchmarks
    std::string policies_csv = "1,2,3";
    int rounds = 3;
    size_t tx_count = 40;
    int bench_peers = 4;
    std::string bench_out;
    auto* tput_cmd = app.add_subcommand(
        "bench-throughput", "committed tx/s versus endorsement policy");
    auto* lat_cmd = app.add_subcommand(
        "bench-latency", "submit-to-commit latency versus endorsement policy");
    for (auto* cmd : {tput_cmd, lat_cmd}) {
        cmd->add_option("--policies", policies_csv, "comma-separated k values");
        cmd->add_option("--rounds", rounds, "rounds per policy (>= 3)");
        cmd->add_option("--tx-count", tx_count, "transactions per sweep step");
        cmd->add_option("--peers", bench_peers, "endorsing peer count");
        cmd->add_option("--out", bench_out, "JSON report file");
    }
    auto* crypto_cmd = app.add_subcommand(
        "bench-crypto", "proof generation and verification averages");
    int iterations = 200;
    std::string crypto_out;
    crypto_cmd->add_option("--iterations", iterations, "iterations (>= 100)");
    crypto_cmd->add_option("--out", crypto_out, "JSON report file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (keygen_cmd->parsed()) return cmd_keygen(seed, out_path);
        if (prove_cmd->parsed()) {
            return cmd_prove(key_path, identifier, nonce_hex, proof_out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(proof_path, pubkey_path, verify_id);
        }
        if (reg_cmd->parsed()) {
            return cmd_register_key(journal_path, truck_id, pubkey_path, owner,
                                    network_seed, n_peers, endorsement_k);
        }
        if (scen_cmd->parsed()) {
            return cmd_run_scenario(config_path, trace_path, scen_journal,
                                    scen_seed);
        }
        if (inspect_cmd->parsed()) {
            return cmd_ledger_inspect(inspect_journal, inspect_verify);
        }
        if (query_cmd->parsed()) {
            return cmd_query_history(query_journal, query_as, query_truck);
        }
        if (tput_cmd->parsed() || lat_cmd->parsed()) {
            return cmd_bench(tput_cmd->parsed(), policies_csv, rounds, tx_count,
                             bench_peers, bench_out);
        }
        if (crypto_cmd->parsed()) return cmd_bench_crypto(iterations, crypto_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no command\n";
    return 1;
}
