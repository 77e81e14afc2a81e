#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "platoonid/errors.hpp"
#include "platoonid/identity.hpp"
#include "platoonid/ledger.hpp"
#include "platoonid/protocol.hpp"
#include "platoonid/reputation.hpp"
#include "platoonid/rng.hpp"
#include "platoonid/trace.hpp"

namespace platoonid {

struct LatencySpec {
    enum class Kind { kFixed, kUniform };

    Kind kind = Kind::kFixed;
    int64_t fixed_ms = 20;
    int64_t min_ms = 0;
    int64_t max_ms = 0;

    int64_t sample(RandomSource& rng) const {
        if (kind == Kind::kFixed) return fixed_ms;
        return static_cast<int64_t>(rng.uniform(static_cast<uint64_t>(min_ms),
                                                static_cast<uint64_t>(max_ms)));
    }

    json to_json() const {
        if (kind == Kind::kFixed) return json{{"kind", "fixed"}, {"ms", fixed_ms}};
        return json{{"kind", "uniform"}, {"min_ms", min_ms}, {"max_ms", max_ms}};
    }

    static LatencySpec from_json(const json& j) {
        LatencySpec spec;
        auto kind = j.at("kind").get<std::string>();
        if (kind == "fixed") {
            spec.kind = Kind::kFixed;
            spec.fixed_ms = j.at("ms").get<int64_t>();
        } else if (kind == "uniform") {
            spec.kind = Kind::kUniform;
            spec.min_ms = j.at("min_ms").get<int64_t>();
            spec.max_ms = j.at("max_ms").get<int64_t>();
        } else {
            throw ConfigError("unknown latency kind: " + kind);
        }
        return spec;
    }
};

enum class FaultKind { kPeerCrash, kByzantineVerifier, kLedgerEndorseFail };

inline const char* fault_kind_name(FaultKind kind) {
    switch (kind) {
        case FaultKind::kPeerCrash: return "peer-crash";
        case FaultKind::kByzantineVerifier: return "byzantine-verifier";
        case FaultKind::kLedgerEndorseFail: return "ledger-endorse-fail";
    }
    return "?";
}

inline FaultKind fault_kind_from_name(const std::string& name) {
    if (name == "peer-crash") return FaultKind::kPeerCrash;
    if (name == "byzantine-verifier") return FaultKind::kByzantineVerifier;
    if (name == "ledger-endorse-fail") return FaultKind::kLedgerEndorseFail;
    throw ConfigError("unknown fault kind: " + name);
}

// Fault active on [from_ms, to_ms); an empty window is a no-op and leaves
// the trace untouched.
struct FaultSpec {
    FaultKind kind = FaultKind::kPeerCrash;
    std::string target;
    int64_t from_ms = 0;
    int64_t to_ms = 0;

    bool active_at(int64_t t) const { return t >= from_ms && t < to_ms; }
};

struct JoinEntry {
    int64_t at_ms = 0;
    std::string truck;
};

inline std::string truck_name(int index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "truck-%02d", index);
    return buf;
}

inline std::string company_name(int index) {
    return "company-" + std::to_string(index);
}

inline std::string peer_name(int index) {
    return "peer-" + std::to_string(index);
}

struct ScenarioConfig {
    uint64_t seed = 42;
    int n_trucks = 8;
    int n_companies = 2;
    int verifier_group_k = 3;
    int endorsement_k = 3;
    int n_peers = 4;
    LatencySpec link_latency_ms{};
    double drop_rate = 0.0;
    std::set<std::string> byzantine_set;
    std::set<std::string> rogue_keys;  // trucks holding keys that differ from the registered record
    std::vector<JoinEntry> join_schedule;  // empty selects the staggered default
    int64_t timeout_T_ms = 500;
    int max_attempts = 3;
    size_t batch_max_tx = 10;
    int64_t batch_max_wait_ms = 100;
    std::string route_tag = "I-80";
    bool update_on_rejection = true;  // rotate the group after rejections too
    std::vector<FaultSpec> faults;

    // The first entry forms the platoon; later entries join it.
    std::vector<JoinEntry> effective_join_schedule() const {
        if (!join_schedule.empty()) return join_schedule;
        std::vector<JoinEntry> out;
        for (int i = 1; i <= n_trucks; ++i) {
            out.push_back(JoinEntry{static_cast<int64_t>(i - 1) * 1000,
                                    truck_name(i)});
        }
        return out;
    }

    bool is_known_truck(const std::string& id) const {
        for (int i = 1; i <= n_trucks; ++i) {
            if (truck_name(i) == id) return true;
        }
        return false;
    }

    bool is_known_peer(const std::string& id) const {
        for (int i = 1; i <= n_peers; ++i) {
            if (peer_name(i) == id) return true;
        }
        return false;
    }

    void validate() const {
        if (n_trucks < 1) throw ConfigError("n_trucks must be at least 1");
        if (n_companies < 1) throw ConfigError("n_companies must be at least 1");
        if (n_peers < 1) throw ConfigError("n_peers must be at least 1");
        if (verifier_group_k < 1 || verifier_group_k > n_trucks) {
            throw ConfigError("verifier_group_k must be in [1, n_trucks]");
        }
        if (endorsement_k < 1 || endorsement_k > n_peers) {
            throw ConfigError("endorsement_k must be in [1, n_peers]");
        }
        if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) {
            throw ConfigError("drop_rate must lie in [0, 1]");
        }
        if (timeout_T_ms <= 0) throw ConfigError("timeout_T_ms must be positive");
        if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
        if (batch_max_tx < 1) throw ConfigError("batch_max_tx must be at least 1");
        if (batch_max_wait_ms < 0) {
            throw ConfigError("batch_max_wait_ms must be non-negative");
        }
        if (link_latency_ms.kind == LatencySpec::Kind::kFixed) {
            if (link_latency_ms.fixed_ms < 0) {
                throw ConfigError("fixed latency must be non-negative");
            }
        } else if (link_latency_ms.min_ms < 0 ||
                   link_latency_ms.min_ms > link_latency_ms.max_ms) {
            throw ConfigError("uniform latency needs 0 <= min_ms <= max_ms");
        }
        auto schedule = effective_join_schedule();
        if (schedule.empty()) throw ConfigError("join schedule is empty");
        std::set<std::string> seen;
        for (const auto& entry : schedule) {
            if (entry.at_ms < 0) throw ConfigError("join times must be non-negative");
            if (entry.at_ms < schedule.front().at_ms) {
                throw ConfigError("the first schedule entry must be earliest");
            }
            if (!is_known_truck(entry.truck)) {
                throw ConfigError("join schedule names unknown truck " + entry.truck);
            }
            if (!seen.insert(entry.truck).second) {
                throw ConfigError("truck scheduled twice: " + entry.truck);
            }
        }
        for (const auto& id : byzantine_set) {
            if (!is_known_truck(id)) {
                throw ConfigError("byzantine_set names unknown truck " + id);
            }
        }
        for (const auto& id : rogue_keys) {
            if (!is_known_truck(id)) {
                throw ConfigError("rogue_keys names unknown truck " + id);
            }
        }
        for (const auto& fault : faults) {
            bool peer_fault = fault.kind != FaultKind::kByzantineVerifier;
            if (peer_fault && !is_known_peer(fault.target)) {
                throw UnknownTargetError("fault targets unknown peer " + fault.target);
            }
            if (!peer_fault && !is_known_truck(fault.target)) {
                throw UnknownTargetError("fault targets unknown truck " + fault.target);
            }
        }
        if (route_tag.empty()) throw ConfigError("route_tag must be non-empty");
    }

    json to_json() const {
        json j;
        j["seed"] = seed;
        j["n_trucks"] = n_trucks;
        j["n_companies"] = n_companies;
        j["verifier_group_k"] = verifier_group_k;
        j["endorsement_k"] = endorsement_k;
        j["n_peers"] = n_peers;
        j["link_latency_ms"] = link_latency_ms.to_json();
        j["drop_rate"] = drop_rate;
        j["byzantine_set"] = byzantine_set;
        j["rogue_keys"] = rogue_keys;
        j["join_schedule"] = json::array();
        for (const auto& e : join_schedule) {
            j["join_schedule"].push_back(json{{"at_ms", e.at_ms}, {"truck", e.truck}});
        }
        j["timeout_T_ms"] = timeout_T_ms;
        j["max_attempts"] = max_attempts;
        j["batch_max_tx"] = batch_max_tx;
        j["batch_max_wait_ms"] = batch_max_wait_ms;
        j["route_tag"] = route_tag;
        j["update_on_rejection"] = update_on_rejection;
        j["faults"] = json::array();
        for (const auto& f : faults) {
            j["faults"].push_back(json{{"kind", fault_kind_name(f.kind)},
                                       {"target", f.target},
                                       {"from_ms", f.from_ms},
                                       {"to_ms", f.to_ms}});
        }
        return j;
    }

    static ScenarioConfig from_json(const json& j) {
        ScenarioConfig cfg;
        try {
            cfg.seed = j.value("seed", cfg.seed);
            cfg.n_trucks = j.value("n_trucks", cfg.n_trucks);
            cfg.n_companies = j.value("n_companies", cfg.n_companies);
            cfg.verifier_group_k = j.value("verifier_group_k", cfg.verifier_group_k);
            cfg.endorsement_k = j.value("endorsement_k", cfg.endorsement_k);
            cfg.n_peers = j.value("n_peers", cfg.n_peers);
            if (j.contains("link_latency_ms")) {
                cfg.link_latency_ms = LatencySpec::from_json(j.at("link_latency_ms"));
            }
            cfg.drop_rate = j.value("drop_rate", cfg.drop_rate);
            if (j.contains("byzantine_set")) {
                cfg.byzantine_set = j.at("byzantine_set").get<std::set<std::string>>();
            }
            if (j.contains("rogue_keys")) {
                cfg.rogue_keys = j.at("rogue_keys").get<std::set<std::string>>();
            }
            if (j.contains("join_schedule")) {
                for (const auto& e : j.at("join_schedule")) {
                    cfg.join_schedule.push_back(JoinEntry{
                        e.at("at_ms").get<int64_t>(),
                        e.at("truck").get<std::string>()});
                }
            }
            cfg.timeout_T_ms = j.value("timeout_T_ms", cfg.timeout_T_ms);
            cfg.max_attempts = j.value("max_attempts", cfg.max_attempts);
            cfg.batch_max_tx = j.value("batch_max_tx", cfg.batch_max_tx);
            cfg.batch_max_wait_ms = j.value("batch_max_wait_ms", cfg.batch_max_wait_ms);
            cfg.route_tag = j.value("route_tag", cfg.route_tag);
            cfg.update_on_rejection =
                j.value("update_on_rejection", cfg.update_on_rejection);
            if (j.contains("faults")) {
                for (const auto& f : j.at("faults")) {
                    FaultSpec fault;
                    fault.kind = fault_kind_from_name(f.at("kind").get<std::string>());
                    fault.target = f.at("target").get<std::string>();
                    fault.from_ms = f.at("from_ms").get<int64_t>();
                    fault.to_ms = f.at("to_ms").get<int64_t>();
                    cfg.faults.push_back(fault);
                }
            }
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad scenario config: ") + e.what());
        }
        return cfg;
    }
};

// Default baseline: 8 trucks across 2 companies joining one platoon
// at 1-second intervals, 3-verifier group, 3-of-4 endorsement, clean links.
inline ScenarioConfig baseline_scenario() { return ScenarioConfig{}; }

inline void inject_fault(ScenarioConfig& cfg, FaultKind kind,
                         const std::string& target, int64_t from_ms,
                         int64_t to_ms) {
    bool peer_fault = kind != FaultKind::kByzantineVerifier;
    if (peer_fault && !cfg.is_known_peer(target)) {
        throw UnknownTargetError("fault targets unknown peer " + target);
    }
    if (!peer_fault && !cfg.is_known_truck(target)) {
        throw UnknownTargetError("fault targets unknown truck " + target);
    }
    if (from_ms > to_ms) throw ConfigError("fault window ends before it starts");
    cfg.faults.push_back(FaultSpec{kind, target, from_ms, to_ms});
}

// One network hop: sampled latency, or nullopt when the link drops it.
// Consumes one latency draw and one drop draw from the sender's stream
// regardless of outcome.
inline std::optional<int64_t> deliver(int64_t send_time,
                                      const LatencySpec& link,
                                      double drop_rate, RandomSource& rng) {
    int64_t latency = link.sample(rng);
    bool dropped = rng.bernoulli(drop_rate);
    if (dropped) return std::nullopt;
    return send_time + latency;
}

struct ScenarioResult {
    ScenarioConfig config;
    EventTrace trace;
    Ledger ledger{EndorsementPolicy{1}};
    PlatoonState platoon;
    ScoreTable scores;
    std::map<std::string, int64_t> counts;
};

// Single-threaded deterministic event loop. Every random draw comes from
// a stream keyed by (config.seed, entity label), so entities do not
// perturb one another across config edits.
class ScenarioEngine {
public:
    explicit ScenarioEngine(ScenarioConfig cfg)
        : cfg_(std::move(cfg)),
          ledger_(EndorsementPolicy{cfg_.endorsement_k},
                  BatchConfig{cfg_.batch_max_tx, cfg_.batch_max_wait_ms}),
          epoch_rng_(cfg_.seed, "epoch") {
        cfg_.validate();
    }

    ScenarioResult run() {
        // Fixed counter set: present in every result, even at zero.
        for (const char* key : {"submitted", "decided", "approved", "rejected",
                                "restarted", "terminal_timeout", "rotations"}) {
            counts_[key];
        }
        setup();
        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            ev.fn();
        }
        ledger_.flush_all(now_);
        drain_receipts();

        ScenarioResult result;
        result.config = cfg_;
        result.trace = std::move(trace_);
        result.platoon = platoon_;
        result.scores = book_.scores();
        result.counts = counts_;
        result.counts["blocks"] =
            static_cast<int64_t>(ledger_.blocks().size()) - 1;
        int64_t committed = 0;
        int64_t join_records = 0;
        for (const auto& record : ledger_.committed_platoon_records()) {
            if (record.event == PlatoonRecord::Event::kJoin) ++join_records;
        }
        for (size_t i = 1; i < ledger_.blocks().size(); ++i) {
            committed += static_cast<int64_t>(ledger_.blocks()[i].txs.size());
        }
        result.counts["committed_txs"] = committed;
        result.counts["join_records"] = join_records;
        result.ledger = std::move(ledger_);
        return result;
    }

private:
    struct Event {
        int64_t time;
        uint64_t seq;
        std::function<void()> fn;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };
    struct TruckState {
        TruckIdentity identity;
        ProverKey held_key;  // differs from the registered key for rogue trucks
    };
    struct RequestState {
        JoinRequest request;
        VerifierGroup group;  // snapshot challenged at submit time
        std::map<std::string, bool> votes;
        bool decided = false;
    };

    void schedule(int64_t time, std::function<void()> fn) {
        queue_.push(Event{std::max(time, now_), seq_++, std::move(fn)});
    }

    void trace(const std::string& kind,
               std::vector<std::pair<std::string, std::string>> fields) {
        trace_.emit(now_, kind, std::move(fields));
    }

    Sha256Drbg& stream(const std::string& entity) {
        auto it = streams_.find(entity);
        if (it == streams_.end()) {
            it = streams_.emplace(entity, Sha256Drbg(cfg_.seed, entity + "/net"))
                     .first;
        }
        return it->second;
    }

    // Result notifications are assumed retransmitted until heard, so a
    // drop draw never suppresses them; both draws are always consumed to
    // keep the sender's stream position independent of outcomes.
    void unicast(const std::string& from, bool droppable,
                 const std::string& drop_kind,
                 std::vector<std::pair<std::string, std::string>> drop_fields,
                 std::function<void()> on_deliver) {
        auto& rng = stream(from);
        int64_t latency = cfg_.link_latency_ms.sample(rng);
        bool dropped = rng.bernoulli(cfg_.drop_rate);
        if (dropped && droppable) {
            counts_[drop_kind] += 1;
            trace(drop_kind, std::move(drop_fields));
            return;
        }
        schedule(now_ + latency, std::move(on_deliver));
    }

    bool byzantine_active(const std::string& truck_id) const {
        if (cfg_.byzantine_set.count(truck_id)) return true;
        for (const auto& fault : cfg_.faults) {
            if (fault.kind == FaultKind::kByzantineVerifier &&
                fault.target == truck_id && fault.active_at(now_)) {
                return true;
            }
        }
        return false;
    }

    void setup() {
        for (int i = 1; i <= cfg_.n_peers; ++i) {
            Sha256Drbg key_rng(cfg_.seed, peer_name(i) + "/key");
            peers_.emplace_back(peer_name(i), keygen(key_rng).first);
            ledger_.register_peer(peers_.back().id(), peers_.back().public_key());
            peer_ptrs_.push_back(&peers_.back());
        }
        for (int i = 1; i <= cfg_.n_companies; ++i) {
            ledger_.register_company(company_name(i));
        }
        for (int i = 1; i <= cfg_.n_trucks; ++i) {
            auto id = truck_name(i);
            TruckState truck;
            truck.identity.truck_id = id;
            char mac[18];
            std::snprintf(mac, sizeof(mac), "02:70:6c:00:00:%02x",
                          static_cast<unsigned>(i) & 0xffu);
            truck.identity.mac_address = mac;
            truck.identity.owner_company =
                company_name((i - 1) % cfg_.n_companies + 1);
            ledger_.register_truck(id, truck.identity.owner_company);

            Sha256Drbg key_rng(cfg_.seed, id + "/key");
            auto registered = keygen(key_rng);
            truck.held_key = registered.first;
            if (cfg_.rogue_keys.count(id)) {
                Sha256Drbg rogue_rng(cfg_.seed, id + "/rogue");
                truck.held_key = keygen(rogue_rng).first;
            }
            ledger_.register_verifier_key(ledger_.issuer(), id,
                                          registered.second, peer_ptrs_, 0);
            trace("register", {{"truck", id},
                               {"owner", truck.identity.owner_company}});
            trucks_.emplace(id, std::move(truck));
        }
        drain_receipts();

        for (const auto& fault : cfg_.faults) {
            if (fault.from_ms >= fault.to_ms) continue;  // empty window, no-op
            schedule(fault.from_ms, [this, fault] {
                trace("fault-on", {{"kind", fault_kind_name(fault.kind)},
                                   {"target", fault.target}});
                if (fault.kind != FaultKind::kByzantineVerifier) {
                    set_peer_alive(fault.target, false);
                }
            });
            schedule(fault.to_ms, [this, fault] {
                trace("fault-off", {{"kind", fault_kind_name(fault.kind)},
                                    {"target", fault.target}});
                if (fault.kind != FaultKind::kByzantineVerifier) {
                    set_peer_alive(fault.target, true);
                }
            });
        }

        auto schedule_list = cfg_.effective_join_schedule();
        for (size_t i = 0; i < schedule_list.size(); ++i) {
            const auto& entry = schedule_list[i];
            if (i == 0) {
                schedule(entry.at_ms, [this, truck = entry.truck] {
                    form_platoon(truck);
                });
            } else {
                schedule(entry.at_ms, [this, truck = entry.truck] {
                    start_join(truck, 1, std::nullopt);
                });
            }
        }
    }

    void set_peer_alive(const std::string& peer_id, bool alive) {
        for (auto& peer : peers_) {
            if (peer.id() == peer_id) peer.set_alive(alive);
        }
    }

    void form_platoon(const std::string& founder) {
        platoon_.platoon_id = "platoon-1";
        platoon_.members = {founder};
        trace("form", {{"platoon", platoon_.platoon_id}, {"truck", founder}});
        rotate_group();
        PlatoonRecord record{platoon_.platoon_id, PlatoonRecord::Event::kForm,
                             platoon_.members, cfg_.route_tag, now_};
        submit_record_tx("form-1", TxKind::kPlatoonRecord, record.to_payload(),
                         founder, 0);
    }

    void rotate_group() {
        size_t k_eff = std::min<size_t>(cfg_.verifier_group_k,
                                        platoon_.members.size());
        platoon_.group = select_verifier_group(platoon_.members, book_.scores(),
                                               k_eff, platoon_.group.epoch,
                                               epoch_rng_);
        counts_["rotations"] += 1;
        trace("rotate", {{"epoch", std::to_string(platoon_.group.epoch)},
                         {"members", join_ids(platoon_.group.members)}});
    }

    static std::string join_ids(const std::vector<std::string>& ids) {
        std::string out;
        for (const auto& id : ids) {
            if (!out.empty()) out += ",";
            out += id;
        }
        return out;
    }

    void start_join(const std::string& truck_id, int attempt,
                    std::optional<std::string> timed_out_request) {
        const auto& truck = trucks_.at(truck_id);
        ProtocolConfig pcfg{cfg_.timeout_T_ms, cfg_.max_attempts,
                            VotingRule::kStrictMajority};
        std::string request_id = "req-" + std::to_string(++request_counter_);
        JoinRequest request;
        try {
            if (timed_out_request) {
                request = handle_timeout(requests_.at(*timed_out_request).request,
                                         truck.identity, truck.held_key,
                                         platoon_, ledger_, now_, pcfg,
                                         request_id);
            } else {
                request = submit_join_request(truck.identity, truck.held_key,
                                              platoon_, ledger_, now_, pcfg,
                                              request_id, attempt);
            }
        } catch (const MaxAttemptsExceededError&) {
            counts_["terminal_timeout"] += 1;
            trace("timeout", {{"request", *timed_out_request},
                              {"truck", truck_id},
                              {"terminal", "1"}});
            return;
        }
        if (timed_out_request) {
            counts_["restarted"] += 1;
            trace("timeout", {{"request", *timed_out_request},
                              {"truck", truck_id},
                              {"terminal", "0"}});
        }

        RequestState state;
        state.request = request;
        state.group = platoon_.group;
        requests_.emplace(request_id, std::move(state));
        counts_["submitted"] += 1;
        trace("submit", {{"request", request_id},
                         {"truck", truck_id},
                         {"attempt", std::to_string(request.attempt)}});

        for (const auto& verifier : platoon_.group.members) {
            unicast(truck_id, true, "proof-drop",
                    {{"request", request_id}, {"to", verifier}},
                    [this, request_id, verifier] {
                        on_proof(request_id, verifier);
                    });
        }
        schedule(request.deadline,
                 [this, request_id, truck_id] { on_deadline(request_id, truck_id); });
    }

    void on_proof(const std::string& request_id, const std::string& verifier) {
        auto& state = requests_.at(request_id);
        Vote vote = cast_vote(verifier, state.request, ledger_, state.group,
                              byzantine_active(verifier));
        trace("vote", {{"request", request_id},
                       {"verifier", verifier},
                       {"verdict", vote.verdict ? "1" : "0"}});
        unicast(verifier, true, "vote-drop",
                {{"request", request_id}, {"verifier", verifier}},
                [this, request_id, vote] { on_vote(request_id, vote); });
    }

    void on_vote(const std::string& request_id, const Vote& vote) {
        auto& state = requests_.at(request_id);
        if (state.decided) return;
        state.votes.emplace(vote.verifier, vote.verdict);
        if (state.votes.size() == state.group.members.size()) {
            decide_request(request_id);
        }
    }

    // Deadline rules: a decision already made wins; any votes at all force
    // a decision with absentees counted false; total silence restarts the
    // prover, up to the attempt cap.
    void on_deadline(const std::string& request_id, const std::string& truck_id) {
        auto& state = requests_.at(request_id);
        if (state.decided) return;
        if (!state.votes.empty()) {
            decide_request(request_id);
            return;
        }
        start_join(truck_id, state.request.attempt + 1, request_id);
    }

    void decide_request(const std::string& request_id) {
        auto& state = requests_.at(request_id);
        state.decided = true;

        VerificationResult result;
        result.request_id = request_id;
        result.decided_at = now_;
        for (const auto& member : state.group.members) {
            auto it = state.votes.find(member);
            if (it != state.votes.end()) {
                result.votes.push_back(Vote{member, request_id, it->second});
            }
        }
        result.approved = decide(result.votes, state.group.members.size(),
                                 VotingRule::kStrictMajority);
        counts_["decided"] += 1;
        counts_[result.approved ? "approved" : "rejected"] += 1;

        int yes = 0;
        for (const auto& v : result.votes) yes += v.verdict ? 1 : 0;
        trace("decide", {{"request", request_id},
                         {"approved", result.approved ? "1" : "0"},
                         {"votes_for", std::to_string(yes)},
                         {"group_size",
                          std::to_string(state.group.members.size())}});

        const std::string prover = state.request.prover;
        const VerifierGroup group_snapshot = state.group;
        bool joined = finalize(
            state.request, result, platoon_,
            [this](const JoinRequest& req, const VerificationResult& res) {
                PlatoonRecord record{platoon_.platoon_id,
                                     PlatoonRecord::Event::kJoin,
                                     {req.prover},
                                     cfg_.route_tag,
                                     res.decided_at};
                submit_record_tx("join-" + req.request_id,
                                 TxKind::kPlatoonRecord, record.to_payload(),
                                 req.prover, 0);
            },
            [this, &group_snapshot](const VerificationResult& res) {
                if (!res.approved && !cfg_.update_on_rejection) return;
                book_.apply(res.request_id, res.approved, votes_as_pairs(res),
                            group_snapshot);
                json payload;
                payload["request_id"] = res.request_id;
                payload["epoch"] = group_snapshot.epoch;
                payload["updates"] = json::array();
                for (const auto& member : group_snapshot.members) {
                    payload["updates"].push_back(
                        json{{"truck_id", member},
                             {"score", score_of(book_.scores(), member)}});
                }
                submit_record_tx("rep-" + res.request_id,
                                 TxKind::kReputationUpdate, payload.dump(),
                                 platoon_.platoon_id, 0);
            });
        trace("finalize", {{"request", request_id},
                           {"truck", prover},
                           {"joined", joined ? "1" : "0"}});
        if (result.approved || cfg_.update_on_rejection) rotate_group();

        unicast(platoon_.members.front(), false, "", {},
                [this, request_id, prover, approved = result.approved] {
                    trace("result", {{"request", request_id},
                                     {"truck", prover},
                                     {"approved", approved ? "1" : "0"}});
                });
    }

    void submit_record_tx(const std::string& tx_id, TxKind kind,
                          const std::string& payload,
                          const std::string& submitter, int tries) {
        Transaction tx;
        tx.tx_id = tx_id;
        tx.kind = kind;
        tx.payload = payload;
        tx.submitter = submitter;
        try {
            tx.endorsements = ledger_.gather_endorsements(tx, peer_ptrs_);
            ledger_.submit(tx, now_);
        } catch (const EndorsementShortfallError&) {
            if (tries + 1 >= kLedgerRetryCap) {
                trace("ledger-giveup", {{"tx", tx_id}});
                return;
            }
            trace("ledger-retry",
                  {{"tx", tx_id}, {"try", std::to_string(tries + 1)}});
            schedule(now_ + 100, [this, tx_id, kind, payload, submitter, tries] {
                submit_record_tx(tx_id, kind, payload, submitter, tries + 1);
            });
            return;
        }
        drain_receipts();
        arm_flush();
    }

    void arm_flush() {
        if (auto deadline = ledger_.next_cut_deadline()) {
            schedule(*deadline, [this] {
                ledger_.flush_due(now_);
                drain_receipts();
                arm_flush();
            });
        }
    }

    void drain_receipts() {
        const auto& receipts = ledger_.receipts();
        for (; receipts_seen_ < receipts.size(); ++receipts_seen_) {
            const auto& r = receipts[receipts_seen_];
            trace("ledger-commit", {{"tx", r.tx_id},
                                    {"height", std::to_string(r.height)}});
        }
    }

    // Retries every 100 ms while endorsing peers are short; gives up once
    // the outage outlasts the retry budget.
    static constexpr int kLedgerRetryCap = 50;

    ScenarioConfig cfg_;
    Ledger ledger_;
    Sha256Drbg epoch_rng_;
    EventTrace trace_;
    ReputationBook book_;
    PlatoonState platoon_;
    std::deque<EndorsingPeer> peers_;
    std::vector<const EndorsingPeer*> peer_ptrs_;
    std::map<std::string, TruckState> trucks_;
    std::map<std::string, RequestState> requests_;
    std::map<std::string, Sha256Drbg> streams_;
    std::map<std::string, int64_t> counts_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    uint64_t seq_ = 0;
    int64_t now_ = 0;
    int request_counter_ = 0;
    size_t receipts_seen_ = 0;
};

inline ScenarioResult run_scenario(const ScenarioConfig& config) {
    ScenarioEngine engine(config);
    return engine.run();
}

}  // namespace platoonid
