#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "platoonid/errors.hpp"
#include "platoonid/identity.hpp"
#include "platoonid/protocol.hpp"
#include "platoonid/sha256.hpp"

namespace platoonid {

using json = nlohmann::json;

enum class TxKind {
    kVerifierKeyRecord,
    kReputationUpdate,
    kPlatoonRecord,
};

inline const char* tx_kind_name(TxKind kind) {
    switch (kind) {
        case TxKind::kVerifierKeyRecord: return "VerifierKeyRecord";
        case TxKind::kReputationUpdate: return "ReputationUpdate";
        case TxKind::kPlatoonRecord: return "PlatoonRecord";
    }
    return "?";
}

inline TxKind tx_kind_from_name(const std::string& name) {
    if (name == "VerifierKeyRecord") return TxKind::kVerifierKeyRecord;
    if (name == "ReputationUpdate") return TxKind::kReputationUpdate;
    if (name == "PlatoonRecord") return TxKind::kPlatoonRecord;
    throw EncodingError("unknown transaction kind: " + name);
}

struct Endorsement {
    std::string peer_id;
    std::string signature_hex;  // compressed G1 proof point
};

struct Transaction {
    std::string tx_id;
    TxKind kind = TxKind::kPlatoonRecord;
    std::string payload;  // canonical JSON text, schema fixed by kind
    std::string submitter;
    std::vector<Endorsement> endorsements;
};

struct EndorsementPolicy {
    int k = 1;  // required count of distinct valid endorsers
};

struct CommitReceipt {
    std::string tx_id;
    uint64_t height = 0;
    int64_t commit_time = 0;
};

struct LedgerBlock {
    uint64_t height = 0;
    std::string prev_hash_hex;
    std::vector<Transaction> txs;
    std::string block_hash_hex;
};

struct PlatoonRecord {
    enum class Event { kJoin, kLeave, kForm, kDissolve };

    std::string platoon_id;
    Event event = Event::kJoin;
    std::vector<std::string> member_list;
    std::string route_tag;
    int64_t sim_timestamp = 0;

    static const char* event_name(Event e) {
        switch (e) {
            case Event::kJoin: return "join";
            case Event::kLeave: return "leave";
            case Event::kForm: return "form";
            case Event::kDissolve: return "dissolve";
        }
        return "?";
    }

    static Event event_from_name(const std::string& name) {
        if (name == "join") return Event::kJoin;
        if (name == "leave") return Event::kLeave;
        if (name == "form") return Event::kForm;
        if (name == "dissolve") return Event::kDissolve;
        throw EncodingError("unknown platoon event: " + name);
    }

    std::string to_payload() const {
        json j;
        j["platoon_id"] = platoon_id;
        j["event"] = event_name(event);
        j["member_list"] = member_list;
        j["route_tag"] = route_tag;
        j["sim_timestamp"] = sim_timestamp;
        return j.dump();
    }

    static PlatoonRecord from_payload(const std::string& text) {
        json j = json::parse(text);
        PlatoonRecord r;
        r.platoon_id = j.at("platoon_id").get<std::string>();
        r.event = event_from_name(j.at("event").get<std::string>());
        r.member_list = j.at("member_list").get<std::vector<std::string>>();
        r.route_tag = j.at("route_tag").get<std::string>();
        r.sim_timestamp = j.at("sim_timestamp").get<int64_t>();
        return r;
    }
};

namespace detail {

inline bool is_hex_of_length(const std::string& s, size_t n) {
    if (s.size() != n) return false;
    for (char c : s) {
        if (hex_nibble(c) < 0) return false;
    }
    return true;
}

}  // namespace detail

// Schema gate applied before endorsement and before commit.
inline void validate_payload(TxKind kind, const std::string& payload) {
    json j;
    try {
        j = json::parse(payload);
    } catch (const json::exception& e) {
        throw ValidationFailureError(std::string("payload is not JSON: ") +
                                     e.what());
    }
    try {
        switch (kind) {
            case TxKind::kVerifierKeyRecord: {
                auto truck = j.at("truck_id").get<std::string>();
                auto key = j.at("verifier_key").get<std::string>();
                if (truck.empty()) {
                    throw ValidationFailureError("empty truck_id");
                }
                if (!detail::is_hex_of_length(key, 192)) {
                    throw ValidationFailureError("verifier_key must be 96 hex bytes");
                }
                return;
            }
            case TxKind::kReputationUpdate: {
                j.at("request_id").get<std::string>();
                j.at("epoch").get<int64_t>();
                const auto& updates = j.at("updates");
                if (!updates.is_array() || updates.empty()) {
                    throw ValidationFailureError("updates must be non-empty");
                }
                for (const auto& u : updates) {
                    u.at("truck_id").get<std::string>();
                    u.at("score").get<int64_t>();
                }
                return;
            }
            case TxKind::kPlatoonRecord: {
                auto record = PlatoonRecord::from_payload(payload);
                bool needs_members =
                    record.event == PlatoonRecord::Event::kJoin ||
                    record.event == PlatoonRecord::Event::kForm;
                if (needs_members && record.member_list.empty()) {
                    throw ValidationFailureError(
                        "member_list must be non-empty for join/form");
                }
                return;
            }
        }
    } catch (const json::exception& e) {
        throw ValidationFailureError(std::string("payload schema violation: ") +
                                     e.what());
    } catch (const EncodingError& e) {
        throw ValidationFailureError(e.what());
    }
    throw ValidationFailureError("unknown transaction kind");
}

// Endorsements sign the transaction content, not other endorsements.
inline std::string tx_signing_text(const Transaction& tx) {
    json j;
    j["kind"] = tx_kind_name(tx.kind);
    j["payload"] = json::parse(tx.payload);
    j["submitter"] = tx.submitter;
    j["tx_id"] = tx.tx_id;
    return j.dump();
}

inline IdentityDigest tx_signing_digest(const Transaction& tx) {
    return IdentityDigest{sha256(tx_signing_text(tx))};
}

inline json tx_to_json(const Transaction& tx) {
    json j;
    j["endorsements"] = json::array();
    for (const auto& e : tx.endorsements) {
        j["endorsements"].push_back(
            json{{"peer_id", e.peer_id}, {"sig", e.signature_hex}});
    }
    j["kind"] = tx_kind_name(tx.kind);
    j["payload"] = json::parse(tx.payload);
    j["submitter"] = tx.submitter;
    j["tx_id"] = tx.tx_id;
    return j;
}

inline Transaction tx_from_json(const json& j) {
    Transaction tx;
    tx.tx_id = j.at("tx_id").get<std::string>();
    tx.kind = tx_kind_from_name(j.at("kind").get<std::string>());
    tx.payload = j.at("payload").dump();
    tx.submitter = j.at("submitter").get<std::string>();
    for (const auto& e : j.at("endorsements")) {
        tx.endorsements.push_back(Endorsement{
            e.at("peer_id").get<std::string>(),
            e.at("sig").get<std::string>()});
    }
    return tx;
}

// An endorsing peer: validates the payload schema, then signs the
// canonical transaction text with its own key pair.
class EndorsingPeer {
public:
    EndorsingPeer(std::string id, const ProverKey& key)
        : id_(std::move(id)), key_(key), pub_(derive_verifier_key(key)) {}

    const std::string& id() const { return id_; }
    const VerifierKey& public_key() const { return pub_; }

    bool alive() const { return alive_; }
    void set_alive(bool alive) { alive_ = alive; }

    Endorsement endorse(const Transaction& tx) const {
        if (!alive_) {
            throw UnknownPeerError("peer " + id_ + " is not reachable");
        }
        validate_payload(tx.kind, tx.payload);
        auto proof = generate_proof(key_, tx_signing_digest(tx));
        return Endorsement{id_, to_hex(bls::g1_compress(proof.delta))};
    }

private:
    std::string id_;
    ProverKey key_;
    VerifierKey pub_;
    bool alive_ = true;
};

// Block assembly parameters: a block is cut when max_tx transactions are
// pending or max_wait_ms has elapsed since the first of them, whichever
// comes first.
struct BatchConfig {
    size_t max_tx = 10;
    int64_t max_wait_ms = 100;
};

// Append-only hash-chained ledger with a single sequencer. Committed
// state (verifier keys, platoon records) is derived from the chain.
class Ledger : public VerifierKeyDirectory {
public:
    explicit Ledger(EndorsementPolicy policy, BatchConfig batch = {},
                    std::string issuer = "dmv")
        : policy_(policy), batch_(batch), issuer_(std::move(issuer)) {
        blocks_.push_back(make_block(0, std::string(64, '0'), {}));
    }

    const std::string& issuer() const { return issuer_; }
    const EndorsementPolicy& policy() const { return policy_; }
    const std::vector<LedgerBlock>& blocks() const { return blocks_; }

    // Test hook for tamper-evidence checks; production code never mutates
    // committed blocks.
    std::vector<LedgerBlock>& blocks_mutable() { return blocks_; }

    void register_peer(const std::string& peer_id, const VerifierKey& key) {
        peer_keys_.emplace(peer_id, key);
    }

    void register_company(const std::string& company_id) {
        companies_.insert(company_id);
    }

    void register_truck(const std::string& truck_id,
                        const std::string& owner_company) {
        if (!companies_.count(owner_company)) {
            throw UnknownParticipantError("unknown company " + owner_company);
        }
        truck_owner_[truck_id] = owner_company;
        company_trucks_[owner_company].push_back(truck_id);
    }

    bool knows_participant(const std::string& id) const {
        return companies_.count(id) > 0 || truck_owner_.count(id) > 0;
    }

    // Rebuilds the participant registry from committed key records, for
    // tools that only have the journal. Records without an owner field
    // leave the truck registered to no company.
    void adopt_participants_from_chain() {
        for (const auto& block : blocks_) {
            for (const auto& tx : block.txs) {
                if (tx.kind != TxKind::kVerifierKeyRecord) continue;
                json j = json::parse(tx.payload);
                if (!j.contains("owner")) continue;
                auto truck = j.at("truck_id").get<std::string>();
                auto owner = j.at("owner").get<std::string>();
                if (truck_owner_.count(truck)) continue;
                register_company(owner);
                register_truck(truck, owner);
            }
        }
    }

    // --- commit path ---

    // Validate, enqueue, and cut a block at once; the receipt reports the
    // commit height. Scenario and benchmark flows that want time-based
    // batching use submit() plus flush_due() instead.
    CommitReceipt append_transaction(const Transaction& tx, int64_t now) {
        submit(tx, now);
        cut_block(now);
        for (auto it = receipts_.rbegin(); it != receipts_.rend(); ++it) {
            if (it->tx_id == tx.tx_id) return *it;
        }
        throw Error("transaction vanished from the commit pipeline");
    }

    void submit(const Transaction& tx, int64_t now) {
        validate_for_commit(tx);
        if (pending_.empty()) batch_deadline_ = now + batch_.max_wait_ms;
        pending_.push_back(tx);
        if (pending_.size() >= batch_.max_tx) cut_block(now);
    }

    std::optional<int64_t> next_cut_deadline() const {
        if (pending_.empty()) return std::nullopt;
        return batch_deadline_;
    }

    void flush_due(int64_t now) {
        if (!pending_.empty() && now >= batch_deadline_) cut_block(now);
    }

    void flush_all(int64_t now) { cut_block(now); }

    // Receipts for every committed transaction, in commit order.
    const std::vector<CommitReceipt>& receipts() const { return receipts_; }

    // --- registration (permission-issuer only) ---

    CommitReceipt register_verifier_key(
        const std::string& submitter, const std::string& truck_id,
        const VerifierKey& key,
        const std::vector<const EndorsingPeer*>& peers, int64_t now) {
        if (submitter != issuer_) {
            throw AccessDeniedError("only " + issuer_ +
                                    " may register verifier keys");
        }
        if (registered_keys_.count(truck_id) || pending_keys_.count(truck_id)) {
            throw DuplicateKeyError("verifier key already registered for " +
                                    truck_id);
        }
        Transaction tx;
        tx.tx_id = "reg-" + truck_id;
        tx.kind = TxKind::kVerifierKeyRecord;
        json payload{{"truck_id", truck_id},
                     {"verifier_key", verifier_key_to_hex(key)}};
        auto owner = truck_owner_.find(truck_id);
        if (owner != truck_owner_.end()) payload["owner"] = owner->second;
        tx.payload = payload.dump();
        tx.submitter = submitter;
        tx.endorsements = gather_endorsements(tx, peers);
        auto receipt = append_transaction(tx, now);
        return receipt;
    }

    // First k alive peers sign; a shortfall surfaces at commit validation.
    std::vector<Endorsement> gather_endorsements(
        const Transaction& tx,
        const std::vector<const EndorsingPeer*>& peers) const {
        std::vector<Endorsement> out;
        for (const auto* peer : peers) {
            if (out.size() >= static_cast<size_t>(policy_.k)) break;
            if (peer->alive()) out.push_back(peer->endorse(tx));
        }
        return out;
    }

    // --- committed state ---

    std::optional<VerifierKey> find_verifier_key(
        const std::string& truck_id) const override {
        auto it = registered_keys_.find(truck_id);
        if (it == registered_keys_.end()) return std::nullopt;
        return it->second;
    }

    // Platooning history visible to the querier: trucks see their own
    // records, companies see records touching trucks they own.
    std::vector<PlatoonRecord> query_platoon_history(
        const std::string& querier,
        const std::optional<std::string>& target_truck = std::nullopt) const {
        if (!knows_participant(querier)) {
            throw UnknownParticipantError("unknown participant " + querier);
        }
        std::set<std::string> visible;
        if (companies_.count(querier)) {
            auto it = company_trucks_.find(querier);
            if (it != company_trucks_.end()) {
                visible.insert(it->second.begin(), it->second.end());
            }
            if (target_truck) {
                if (!visible.count(*target_truck)) {
                    throw AccessDeniedError(querier + " does not own " +
                                            *target_truck);
                }
                visible = {*target_truck};
            }
        } else {
            if (target_truck && *target_truck != querier) {
                throw AccessDeniedError("trucks may only query themselves");
            }
            visible = {querier};
        }
        std::vector<PlatoonRecord> out;
        for (const auto& record : records_) {
            for (const auto& member : record.member_list) {
                if (visible.count(member)) {
                    out.push_back(record);
                    break;
                }
            }
        }
        std::stable_sort(out.begin(), out.end(),
                         [](const PlatoonRecord& a, const PlatoonRecord& b) {
                             return a.sim_timestamp < b.sim_timestamp;
                         });
        return out;
    }

    const std::vector<PlatoonRecord>& committed_platoon_records() const {
        return records_;
    }

    // --- integrity ---

    bool verify_chain() const {
        try {
            std::string prev(64, '0');
            for (size_t i = 0; i < blocks_.size(); ++i) {
                const auto& block = blocks_[i];
                if (block.height != i) return false;
                if (block.prev_hash_hex != prev) return false;
                if (compute_block_hash(block.height, block.prev_hash_hex,
                                       block.txs) != block.block_hash_hex) {
                    return false;
                }
                prev = block.block_hash_hex;
            }
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }

    // Post-hoc policy soundness audit over every committed transaction.
    bool audit_endorsements() const {
        for (size_t i = 1; i < blocks_.size(); ++i) {
            for (const auto& tx : blocks_[i].txs) {
                std::set<std::string> distinct;
                try {
                    for (const auto& e : tx.endorsements) {
                        if (!distinct.count(e.peer_id) &&
                            endorsement_valid(tx, e)) {
                            distinct.insert(e.peer_id);
                        }
                    }
                } catch (const std::exception&) {
                    return false;
                }
                if (distinct.size() < static_cast<size_t>(policy_.k)) {
                    return false;
                }
            }
        }
        return true;
    }

    bool endorsement_valid(const Transaction& tx, const Endorsement& e) const {
        auto it = peer_keys_.find(e.peer_id);
        if (it == peer_keys_.end()) {
            throw UnknownPeerError("unknown endorsing peer " + e.peer_id);
        }
        ProofBundle proof;
        try {
            auto bytes = from_hex(e.signature_hex);
            proof.delta =
                bls::g1_decompress(std::span<const uint8_t>(bytes.data(), bytes.size()));
        } catch (const EncodingError&) {
            return false;
        }
        if (proof.delta.infinity) return false;
        proof.digest = tx_signing_digest(tx);
        return verify_proof(proof, it->second, setup_params());
    }

    // --- journal ---

    void write_journal(std::ostream& os) const {
        for (const auto& block : blocks_) {
            json j;
            j["block_hash"] = block.block_hash_hex;
            j["height"] = block.height;
            j["prev_hash"] = block.prev_hash_hex;
            j["txs"] = json::array();
            for (const auto& tx : block.txs) j["txs"].push_back(tx_to_json(tx));
            os << j.dump() << "\n";
        }
    }

    static std::vector<LedgerBlock> blocks_from_journal(std::istream& is) {
        std::vector<LedgerBlock> out;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::exception& e) {
                throw EncodingError(std::string("bad journal line: ") + e.what());
            }
            LedgerBlock block;
            block.height = j.at("height").get<uint64_t>();
            block.prev_hash_hex = j.at("prev_hash").get<std::string>();
            block.block_hash_hex = j.at("block_hash").get<std::string>();
            for (const auto& tj : j.at("txs")) {
                block.txs.push_back(tx_from_json(tj));
            }
            out.push_back(std::move(block));
        }
        return out;
    }

    // Replace the chain with journal contents and rebuild derived state.
    // Chain integrity is reported by verify_chain, not enforced here, so
    // an inspection tool can load a tampered journal and say so.
    void load_journal(std::istream& is) {
        blocks_ = blocks_from_journal(is);
        registered_keys_.clear();
        records_.clear();
        receipts_.clear();
        pending_.clear();
        pending_keys_.clear();
        for (const auto& block : blocks_) {
            for (const auto& tx : block.txs) {
                apply_committed(tx, block.height, 0);
            }
        }
    }

private:
    void validate_for_commit(const Transaction& tx) {
        validate_payload(tx.kind, tx.payload);
        std::vector<Endorsement> deduped;
        std::set<std::string> seen;
        for (const auto& e : tx.endorsements) {
            if (seen.insert(e.peer_id).second) deduped.push_back(e);
        }
        if (deduped.size() < static_cast<size_t>(policy_.k)) {
            throw EndorsementShortfallError(
                "policy requires " + std::to_string(policy_.k) +
                " endorsements, got " + std::to_string(deduped.size()) +
                " distinct");
        }
        for (const auto& e : deduped) {
            if (!endorsement_valid(tx, e)) {
                throw InvalidEndorsementError("endorsement by " + e.peer_id +
                                              " does not verify");
            }
        }
        if (tx.kind == TxKind::kVerifierKeyRecord) {
            auto truck =
                json::parse(tx.payload).at("truck_id").get<std::string>();
            pending_keys_.insert(truck);
        }
    }

    static std::string compute_block_hash(uint64_t height,
                                          const std::string& prev_hash_hex,
                                          const std::vector<Transaction>& txs) {
        json arr = json::array();
        for (const auto& tx : txs) arr.push_back(tx_to_json(tx));
        std::string text =
            std::to_string(height) + prev_hash_hex + arr.dump();
        return to_hex(sha256(text));
    }

    static LedgerBlock make_block(uint64_t height,
                                  const std::string& prev_hash_hex,
                                  std::vector<Transaction> txs) {
        LedgerBlock block;
        block.height = height;
        block.prev_hash_hex = prev_hash_hex;
        block.txs = std::move(txs);
        block.block_hash_hex =
            compute_block_hash(block.height, block.prev_hash_hex, block.txs);
        return block;
    }

    void cut_block(int64_t now) {
        if (pending_.empty()) return;
        auto block = make_block(blocks_.size(), blocks_.back().block_hash_hex,
                                std::move(pending_));
        pending_.clear();
        pending_keys_.clear();
        for (const auto& tx : block.txs) {
            apply_committed(tx, block.height, now);
        }
        blocks_.push_back(std::move(block));
    }

    void apply_committed(const Transaction& tx, uint64_t height, int64_t now) {
        receipts_.push_back(CommitReceipt{tx.tx_id, height, now});
        if (tx.kind == TxKind::kVerifierKeyRecord) {
            json j = json::parse(tx.payload);
            registered_keys_.emplace(
                j.at("truck_id").get<std::string>(),
                verifier_key_from_hex(j.at("verifier_key").get<std::string>()));
        } else if (tx.kind == TxKind::kPlatoonRecord) {
            records_.push_back(PlatoonRecord::from_payload(tx.payload));
        }
    }

    EndorsementPolicy policy_;
    BatchConfig batch_;
    std::string issuer_;

    std::map<std::string, VerifierKey> peer_keys_;
    std::set<std::string> companies_;
    std::map<std::string, std::string> truck_owner_;
    std::map<std::string, std::vector<std::string>> company_trucks_;

    std::vector<LedgerBlock> blocks_;
    std::vector<Transaction> pending_;
    std::set<std::string> pending_keys_;
    int64_t batch_deadline_ = 0;

    std::map<std::string, VerifierKey> registered_keys_;
    std::vector<PlatoonRecord> records_;
    std::vector<CommitReceipt> receipts_;
};

}  // namespace platoonid
