#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "platoonid/errors.hpp"
#include "platoonid/identity.hpp"
#include "platoonid/rng.hpp"

namespace platoonid {

// truck_id -> signed score. Every truck starts at 0 on platoon entry.
using ScoreTable = std::map<std::string, int64_t>;

struct VerifierGroup {
    std::vector<std::string> members;  // top-k by (score desc, id asc)
    int64_t epoch = 0;
    Nonce16 challenge{};

    bool contains(const std::string& truck_id) const {
        return std::find(members.begin(), members.end(), truck_id) !=
               members.end();
    }
};

// Per-request score update: a verifier whose verdict matches the decision
// gains one point, any other group member loses one. Group members who
// never voted carry an implicit false verdict. Pure function; the caller
// guards against double application.
inline ScoreTable update_scores(
    bool approved, const std::vector<std::pair<std::string, bool>>& votes,
    const VerifierGroup& group, ScoreTable scores) {
    for (const auto& member : group.members) {
        bool verdict = false;
        for (const auto& [voter, v] : votes) {
            if (voter == member) {
                verdict = v;
                break;
            }
        }
        scores[member] += (verdict == approved) ? 1 : -1;
    }
    return scores;
}

inline int64_t score_of(const ScoreTable& scores, const std::string& truck_id) {
    auto it = scores.find(truck_id);
    return it == scores.end() ? 0 : it->second;
}

// Top-k members by (score desc, truck_id asc), with a fresh epoch counter
// and challenge nonce. The member list is a pure function of the inputs.
inline VerifierGroup select_verifier_group(
    const std::vector<std::string>& platoon_members, const ScoreTable& scores,
    size_t k, int64_t previous_epoch, RandomSource& challenge_rng) {
    if (k < 1) throw ConfigError("verifier group size must be at least 1");
    if (platoon_members.size() < k) {
        throw InsufficientMembersError(
            "platoon has " + std::to_string(platoon_members.size()) +
            " members, need " + std::to_string(k));
    }
    std::vector<std::string> ranked = platoon_members;
    std::sort(ranked.begin(), ranked.end(),
              [&](const std::string& a, const std::string& b) {
                  int64_t sa = score_of(scores, a);
                  int64_t sb = score_of(scores, b);
                  if (sa != sb) return sa > sb;
                  return a < b;
              });
    ranked.resize(k);

    VerifierGroup group;
    group.members = std::move(ranked);
    group.epoch = previous_epoch + 1;
    challenge_rng.fill(group.challenge.data(), group.challenge.size());
    return group;
}

// Stateful wrapper enforcing the consume-once rule: each decided request
// adjusts scores exactly once.
class ReputationBook {
public:
    const ScoreTable& scores() const { return scores_; }

    void apply(const std::string& request_id, bool approved,
               const std::vector<std::pair<std::string, bool>>& votes,
               const VerifierGroup& group) {
        if (!consumed_.insert(request_id).second) {
            throw DuplicateUpdateError("scores already updated for request " +
                                       request_id);
        }
        scores_ = update_scores(approved, votes, group, std::move(scores_));
    }

    // Epoch snapshot in structured text, one "truck_id score" pair per line.
    std::string snapshot() const {
        std::string out;
        for (const auto& [id, score] : scores_) {
            out += id + " " + std::to_string(score) + "\n";
        }
        return out;
    }

private:
    ScoreTable scores_;
    std::set<std::string> consumed_;
};

}  // namespace platoonid
