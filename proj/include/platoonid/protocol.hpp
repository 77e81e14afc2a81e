#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "platoonid/errors.hpp"
#include "platoonid/identity.hpp"
#include "platoonid/reputation.hpp"

namespace platoonid {

struct TruckIdentity {
    std::string truck_id;
    std::string mac_address;
    std::string owner_company;
};

struct JoinRequest {
    std::string request_id;
    std::string prover;
    ProofBundle proof;
    int64_t submitted_at = 0;
    int attempt = 1;
    int64_t deadline = 0;
};

struct Vote {
    std::string verifier;
    std::string request_id;
    bool verdict = false;
};

struct VerificationResult {
    std::string request_id;
    bool approved = false;
    std::vector<Vote> votes;
    int64_t decided_at = 0;
};

enum class VotingRule {
    kStrictMajority,  // true votes must exceed half the full group size
};

struct ProtocolConfig {
    int64_t timeout_ms = 500;
    int max_attempts = 3;
    VotingRule rule = VotingRule::kStrictMajority;
};

// Where verifier keys are looked up during voting; implemented by the
// ledger and by in-memory test doubles.
struct VerifierKeyDirectory {
    virtual ~VerifierKeyDirectory() = default;
    virtual std::optional<VerifierKey> find_verifier_key(
        const std::string& truck_id) const = 0;
};

struct PlatoonState {
    std::string platoon_id;
    std::vector<std::string> members;
    VerifierGroup group;

    bool is_member(const std::string& truck_id) const {
        return std::find(members.begin(), members.end(), truck_id) !=
               members.end();
    }
};

// Builds the join request carrying a proof bound to the group's current
// challenge. The prover must be new to the platoon and must already have
// a verifier key on the ledger.
inline JoinRequest submit_join_request(const TruckIdentity& prover,
                                       const ProverKey& key,
                                       const PlatoonState& platoon,
                                       const VerifierKeyDirectory& directory,
                                       int64_t now, const ProtocolConfig& cfg,
                                       std::string request_id,
                                       int attempt = 1) {
    if (platoon.is_member(prover.truck_id)) {
        throw AlreadyMemberError(prover.truck_id + " is already a member");
    }
    if (!directory.find_verifier_key(prover.truck_id)) {
        throw MissingVerifierKeyError("no verifier key on ledger for " +
                                      prover.truck_id);
    }
    JoinRequest request;
    request.request_id = std::move(request_id);
    request.prover = prover.truck_id;
    request.proof = generate_proof(key, hash_identity(prover.mac_address),
                                   platoon.group.challenge);
    request.submitted_at = now;
    request.attempt = attempt;
    request.deadline = now + cfg.timeout_ms;
    return request;
}

// An honest verifier accepts iff the proof is bound to the group's current
// challenge and the pairing equation holds under the on-ledger key. The
// byzantine flag (simulation only) inverts the verdict.
inline Vote cast_vote(const std::string& verifier_id,
                      const JoinRequest& request,
                      const VerifierKeyDirectory& directory,
                      const VerifierGroup& group, bool byzantine = false) {
    if (!group.contains(verifier_id)) {
        throw NotAVerifierError(verifier_id + " is not in the verifier group");
    }
    auto key = directory.find_verifier_key(request.prover);
    if (!key) {
        throw MissingVerifierKeyError("no verifier key on ledger for " +
                                      request.prover);
    }
    bool fresh = request.proof.nonce.has_value() &&
                 *request.proof.nonce == group.challenge;
    bool verdict = fresh && verify_proof(request.proof, *key, setup_params());
    if (byzantine) verdict = !verdict;
    return Vote{verifier_id, request.request_id, verdict};
}

// Strict majority of the full group size; group members who never voted
// count as false, ties reject.
inline bool decide(const std::vector<Vote>& votes, size_t group_size,
                   VotingRule rule) {
    (void)rule;  // single rule today; the parameter fixes the call shape
    if (votes.size() > group_size) {
        throw Error("more votes than verifier group members");
    }
    std::set<std::string> seen;
    size_t approvals = 0;
    for (const auto& vote : votes) {
        if (!seen.insert(vote.verifier).second) {
            throw DuplicateVoteError("duplicate vote from " + vote.verifier);
        }
        if (vote.verdict) ++approvals;
    }
    return 2 * approvals > group_size;
}

// Restart after a silent deadline: fresh request id, fresh proof bound to
// the (possibly rotated) current challenge, attempt counter bumped.
inline JoinRequest handle_timeout(const JoinRequest& request,
                                  const TruckIdentity& prover,
                                  const ProverKey& key,
                                  const PlatoonState& platoon,
                                  const VerifierKeyDirectory& directory,
                                  int64_t now, const ProtocolConfig& cfg,
                                  std::string new_request_id) {
    if (now < request.deadline) {
        throw Error("timeout handler invoked before the deadline");
    }
    if (request.attempt >= cfg.max_attempts) {
        throw MaxAttemptsExceededError(
            "request " + request.request_id + " failed after " +
            std::to_string(request.attempt) + " attempts");
    }
    return submit_join_request(prover, key, platoon, directory, now, cfg,
                               std::move(new_request_id),
                               request.attempt + 1);
}

// Applies a decided result: approved provers join the platoon, a platoon
// record is handed to the ledger hook, and the reputation hook fires for
// both outcomes. Hook failures propagate to the caller, which owns retry.
inline bool finalize(
    const JoinRequest& request, const VerificationResult& result,
    PlatoonState& platoon,
    const std::function<void(const JoinRequest&, const VerificationResult&)>&
        ledger_hook = {},
    const std::function<void(const VerificationResult&)>& reputation_hook = {}) {
    bool joined = false;
    if (result.approved && !platoon.is_member(request.prover)) {
        platoon.members.push_back(request.prover);
        joined = true;
    }
    if (reputation_hook) reputation_hook(result);
    if (joined && ledger_hook) ledger_hook(request, result);
    return joined;
}

// Reputation adapter for decided results.
inline std::vector<std::pair<std::string, bool>> votes_as_pairs(
    const VerificationResult& result) {
    std::vector<std::pair<std::string, bool>> out;
    out.reserve(result.votes.size());
    for (const auto& vote : result.votes) {
        out.emplace_back(vote.verifier, vote.verdict);
    }
    return out;
}

inline ScoreTable update_scores(const VerificationResult& result,
                                const VerifierGroup& group,
                                ScoreTable scores) {
    return update_scores(result.approved, votes_as_pairs(result), group,
                         std::move(scores));
}

}  // namespace platoonid
