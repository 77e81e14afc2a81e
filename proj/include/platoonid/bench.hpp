#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "platoonid/errors.hpp"
#include "platoonid/identity.hpp"
#include "platoonid/ledger.hpp"
#include "platoonid/rng.hpp"

namespace platoonid {

struct MetricSummary {
    double min = 0.0;
    double avg = 0.0;
    double max = 0.0;
};

inline MetricSummary summarize(const std::vector<double>& samples) {
    MetricSummary s;
    if (samples.empty()) return s;
    s.min = samples.front();
    s.max = samples.front();
    double total = 0.0;
    for (double v : samples) {
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        total += v;
    }
    s.avg = total / static_cast<double>(samples.size());
    return s;
}

struct BenchmarkReport {
    int policy = 1;  // k of k-of-any
    double tps_min = 0.0;
    double tps_avg = 0.0;
    double tps_max = 0.0;
    double latency_min_ms = 0.0;
    double latency_avg_ms = 0.0;
    double latency_max_ms = 0.0;
    double crypto_prove_avg_ms = 0.0;
    double crypto_verify_avg_ms = 0.0;
    int n_rounds = 0;
    std::string hardware_note;

    json to_json() const {
        json j;
        j["policy"] = policy;
        j["tps_min"] = tps_min;
        j["tps_avg"] = tps_avg;
        j["tps_max"] = tps_max;
        j["latency_min_ms"] = latency_min_ms;
        j["latency_avg_ms"] = latency_avg_ms;
        j["latency_max_ms"] = latency_max_ms;
        j["crypto_prove_avg_ms"] = crypto_prove_avg_ms;
        j["crypto_verify_avg_ms"] = crypto_verify_avg_ms;
        j["n_rounds"] = n_rounds;
        j["hardware_note"] = hardware_note;
        return j;
    }
};

// Offered-load shape: per round the submitter sweeps the listed multiples
// of the calibrated serial capacity; peak committed rate is the round's
// throughput. Latency runs use a single sub-saturation utilization.
struct LoadSpec {
    size_t tx_count = 40;                              // per sweep step
    std::vector<double> rate_multipliers = {0.5, 1.0, 2.0};
    double latency_utilization = 0.6;

    std::string describe() const {
        std::string sweep;
        for (double m : rate_multipliers) {
            if (!sweep.empty()) sweep += "/";
            sweep += std::to_string(m).substr(0, 4) + "x";
        }
        return "open-loop, " + std::to_string(tx_count) +
               " tx per step, sweep " + sweep + ", latency at " +
               std::to_string(latency_utilization).substr(0, 4) +
               "x capacity";
    }
};

inline std::string hardware_note() {
    std::string model = "unknown cpu";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        auto pos = line.find("model name");
        if (pos != std::string::npos) {
            auto colon = line.find(':');
            if (colon != std::string::npos) {
                model = line.substr(colon + 2);
            }
            break;
        }
    }
    return model + ", " +
           std::to_string(std::thread::hardware_concurrency()) + " threads";
}

struct CryptoTimings {
    double prove_avg_ms = 0.0;
    double verify_avg_ms = 0.0;
};

// Wall-clock averages of proof generation and verification over fresh
// random inputs, one keypair and identifier digest per iteration.
inline CryptoTimings bench_crypto(int n_iterations) {
    if (n_iterations < 100) {
        throw ConfigError("bench_crypto needs at least 100 iterations");
    }
    SystemRandomSource rng;
    auto params = setup_params();
    using clock = std::chrono::steady_clock;
    double prove_total = 0.0;
    double verify_total = 0.0;
    for (int i = 0; i < n_iterations; ++i) {
        auto [prover, verifier] = keygen(rng);
        uint8_t raw[32];
        rng.fill(raw, sizeof(raw));
        IdentityDigest digest{sha256(std::span<const uint8_t>(raw, sizeof(raw)))};
        Nonce16 nonce;
        rng.fill(nonce.data(), nonce.size());

        auto t0 = clock::now();
        auto proof = generate_proof(prover, digest, nonce);
        auto t1 = clock::now();
        bool ok = verify_proof(proof, verifier, params);
        auto t2 = clock::now();
        if (!ok) throw Error("benchmark proof failed to verify");

        prove_total += std::chrono::duration<double, std::milli>(t1 - t0).count();
        verify_total += std::chrono::duration<double, std::milli>(t2 - t1).count();
    }
    return CryptoTimings{prove_total / n_iterations,
                         verify_total / n_iterations};
}

namespace detail {

struct BenchFixture {
    Ledger ledger{EndorsementPolicy{1}, BatchConfig{1, 0}};
    std::deque<EndorsingPeer> peers;
    std::vector<const EndorsingPeer*> peer_ptrs;
    std::vector<Transaction> txs;

    // Fresh single-tx-per-block ledger with pre-endorsed transactions, so
    // the measured path is validation (k signature checks) plus the block
    // cut, never client-side signing.
    BenchFixture(int policy_k, int n_peers, size_t tx_count, uint64_t seed) {
        ledger = Ledger(EndorsementPolicy{policy_k}, BatchConfig{1, 0});
        for (int i = 1; i <= n_peers; ++i) {
            Sha256Drbg key_rng(seed, "bench-peer-" + std::to_string(i));
            peers.emplace_back("peer-" + std::to_string(i),
                               keygen(key_rng).first);
            ledger.register_peer(peers.back().id(), peers.back().public_key());
            peer_ptrs.push_back(&peers.back());
        }
        txs.reserve(tx_count);
        for (size_t i = 0; i < tx_count; ++i) {
            Transaction tx;
            tx.tx_id = "bench-" + std::to_string(i);
            tx.kind = TxKind::kPlatoonRecord;
            PlatoonRecord record{"bench-platoon", PlatoonRecord::Event::kJoin,
                                 {truck_label(i)}, "bench-route",
                                 static_cast<int64_t>(i)};
            tx.payload = record.to_payload();
            tx.submitter = truck_label(i);
            tx.endorsements = ledger.gather_endorsements(tx, peer_ptrs);
            txs.push_back(std::move(tx));
        }
    }

    static std::string truck_label(size_t i) {
        return "truck-" + std::to_string(i % 97);
    }
};

// Serial commits of a few throwaway transactions estimate the per-tx
// service time that anchors the sweep rates.
inline double calibrate_capacity_tps(int policy_k, int n_peers) {
    const size_t probes = 5;
    BenchFixture fixture(policy_k, n_peers, probes, 0xCA11);
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    for (size_t i = 0; i < probes; ++i) {
        fixture.ledger.append_transaction(fixture.txs[i],
                                          static_cast<int64_t>(i));
    }
    auto t1 = clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (ms <= 0.0) return 1e6;
    return 1000.0 * static_cast<double>(probes) / ms;
}

struct OpenLoopResult {
    double achieved_tps = 0.0;
    std::vector<double> latencies_ms;
};

// Open-loop run: the submitter publishes transaction indices on its own
// fixed schedule while the committer drains them through the ledger.
// Timestamps land in per-transaction slots, so neither thread contends
// on the bookkeeping.
inline OpenLoopResult run_open_loop(int policy_k, int n_peers,
                                    size_t tx_count, double offered_tps,
                                    uint64_t seed) {
    OpenLoopResult result;
    if (tx_count == 0 || offered_tps <= 0.0) return result;

    BenchFixture fixture(policy_k, n_peers, tx_count, seed);
    using clock = std::chrono::steady_clock;
    std::vector<clock::time_point> submit_at(tx_count);
    std::vector<clock::time_point> commit_at(tx_count);

    std::mutex mu;
    std::condition_variable cv;
    std::deque<size_t> queue;

    auto start = clock::now();
    std::thread submitter([&] {
        for (size_t i = 0; i < tx_count; ++i) {
            auto target =
                start + std::chrono::duration_cast<clock::duration>(
                            std::chrono::duration<double>(
                                static_cast<double>(i) / offered_tps));
            std::this_thread::sleep_until(target);
            {
                std::lock_guard<std::mutex> lock(mu);
                submit_at[i] = clock::now();
                queue.push_back(i);
            }
            cv.notify_one();
        }
    });

    for (size_t done = 0; done < tx_count; ++done) {
        size_t index;
        {
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return !queue.empty(); });
            index = queue.front();
            queue.pop_front();
        }
        fixture.ledger.append_transaction(fixture.txs[index],
                                          static_cast<int64_t>(index));
        commit_at[index] = clock::now();
    }
    submitter.join();

    auto first = submit_at.front();
    auto last = commit_at.front();
    for (const auto& t : commit_at) last = std::max(last, t);
    double span_ms =
        std::chrono::duration<double, std::milli>(last - first).count();
    result.achieved_tps =
        span_ms > 0.0 ? 1000.0 * static_cast<double>(tx_count) / span_ms : 0.0;
    result.latencies_ms.reserve(tx_count);
    for (size_t i = 0; i < tx_count; ++i) {
        result.latencies_ms.push_back(
            std::chrono::duration<double, std::milli>(commit_at[i] -
                                                      submit_at[i])
                .count());
    }
    return result;
}

inline void check_bench_preconditions(const std::vector<int>& policies,
                                      int n_peers, int rounds) {
    if (rounds < 3) throw ConfigError("benchmarks need at least 3 rounds");
    if (policies.empty()) throw ConfigError("no endorsement policies given");
    for (int k : policies) {
        if (k < 1 || k > n_peers) {
            throw ConfigError("policy " + std::to_string(k) +
                              " invalid for " + std::to_string(n_peers) +
                              " peers");
        }
    }
}

}  // namespace detail

// Saturation sweep: per policy, push offered load upward each round and
// report the peak committed rate; latencies under saturation ride along.
inline std::vector<BenchmarkReport> bench_throughput(
    const std::vector<int>& policies, const LoadSpec& load, int rounds,
    int n_peers = 4) {
    detail::check_bench_preconditions(policies, n_peers, rounds);
    auto note = hardware_note() + "; " + load.describe();
    auto crypto = bench_crypto(100);

    std::vector<BenchmarkReport> reports;
    for (int k : policies) {
        std::vector<double> round_peaks;
        std::vector<double> latencies;
        for (int round = 0; round < rounds; ++round) {
            double capacity = detail::calibrate_capacity_tps(k, n_peers);
            double peak = 0.0;
            for (size_t step = 0; step < load.rate_multipliers.size(); ++step) {
                double offered = capacity * load.rate_multipliers[step];
                auto run = detail::run_open_loop(
                    k, n_peers, load.tx_count, offered,
                    0xB000 + static_cast<uint64_t>(round * 10 + step));
                peak = std::max(peak, run.achieved_tps);
                latencies.insert(latencies.end(), run.latencies_ms.begin(),
                                 run.latencies_ms.end());
            }
            round_peaks.push_back(peak);
        }
        auto tps = summarize(round_peaks);
        auto lat = summarize(latencies);
        BenchmarkReport report;
        report.policy = k;
        report.tps_min = tps.min;
        report.tps_avg = tps.avg;
        report.tps_max = tps.max;
        report.latency_min_ms = lat.min;
        report.latency_avg_ms = lat.avg;
        report.latency_max_ms = lat.max;
        report.crypto_prove_avg_ms = crypto.prove_avg_ms;
        report.crypto_verify_avg_ms = crypto.verify_avg_ms;
        report.n_rounds = rounds;
        report.hardware_note = note;
        reports.push_back(std::move(report));
    }
    return reports;
}

// Latency probe: per policy, submit at a fixed sub-saturation fraction
// of that policy's own capacity and report per-transaction submit-to-commit
// wall time.
inline std::vector<BenchmarkReport> bench_latency(
    const std::vector<int>& policies, const LoadSpec& load, int rounds,
    int n_peers = 4) {
    detail::check_bench_preconditions(policies, n_peers, rounds);
    auto note = hardware_note() + "; " + load.describe();
    auto crypto = bench_crypto(100);

    std::vector<BenchmarkReport> reports;
    for (int k : policies) {
        std::vector<double> round_rates;
        std::vector<double> latencies;
        for (int round = 0; round < rounds; ++round) {
            double capacity = detail::calibrate_capacity_tps(k, n_peers);
            double offered = capacity * load.latency_utilization;
            auto run = detail::run_open_loop(
                k, n_peers, load.tx_count, offered,
                0x1A7 + static_cast<uint64_t>(round));
            round_rates.push_back(run.achieved_tps);
            latencies.insert(latencies.end(), run.latencies_ms.begin(),
                             run.latencies_ms.end());
        }
        auto tps = summarize(round_rates);
        auto lat = summarize(latencies);
        BenchmarkReport report;
        report.policy = k;
        report.tps_min = tps.min;
        report.tps_avg = tps.avg;
        report.tps_max = tps.max;
        report.latency_min_ms = lat.min;
        report.latency_avg_ms = lat.avg;
        report.latency_max_ms = lat.max;
        report.crypto_prove_avg_ms = crypto.prove_avg_ms;
        report.crypto_verify_avg_ms = crypto.verify_avg_ms;
        report.n_rounds = rounds;
        report.hardware_note = note;
        reports.push_back(std::move(report));
    }
    return reports;
}

inline std::string reports_to_json_text(
    const std::vector<BenchmarkReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    return arr.dump(2) + "\n";
}

}  // namespace platoonid
