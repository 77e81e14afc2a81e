#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "platoonid/simnet.hpp"

using namespace platoonid;

namespace {

std::string rotate_members_field(const TraceEvent& ev) {
    for (const auto& [k, v] : ev.fields) {
        if (k == "members") return v;
    }
    return {};
}

}  // namespace

TEST_CASE("scenario configs reject out-of-range parameters", "[simnet]") {
    SECTION("verifier group larger than the fleet") {
        auto cfg = baseline_scenario();
        cfg.n_trucks = 2;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SECTION("endorsement threshold larger than the peer count") {
        auto cfg = baseline_scenario();
        cfg.endorsement_k = 5;
        cfg.n_peers = 4;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SECTION("drop rate outside the unit interval") {
        auto cfg = baseline_scenario();
        cfg.drop_rate = 1.5;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SECTION("unknown byzantine truck") {
        auto cfg = baseline_scenario();
        cfg.byzantine_set = {"truck-99"};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SECTION("join schedule naming an unknown truck") {
        auto cfg = baseline_scenario();
        cfg.join_schedule = {{0, "truck-01"}, {1000, "truck-77"}};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SECTION("duplicate schedule entry") {
        auto cfg = baseline_scenario();
        cfg.join_schedule = {{0, "truck-01"}, {1000, "truck-01"}};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SECTION("non-positive timeout") {
        auto cfg = baseline_scenario();
        cfg.timeout_T_ms = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("fault injection validates its target and window", "[simnet]") {
    auto cfg = baseline_scenario();
    SECTION("unknown peer target") {
        CHECK_THROWS_AS(inject_fault(cfg, FaultKind::kPeerCrash, "peer-99", 0, 10),
                        UnknownTargetError);
    }
    SECTION("unknown truck target") {
        CHECK_THROWS_AS(
            inject_fault(cfg, FaultKind::kByzantineVerifier, "truck-99", 0, 10),
            UnknownTargetError);
    }
    SECTION("window ending before it starts") {
        CHECK_THROWS_AS(inject_fault(cfg, FaultKind::kPeerCrash, "peer-1", 10, 5),
                        ConfigError);
    }
    SECTION("accepted fault lands in the config") {
        inject_fault(cfg, FaultKind::kPeerCrash, "peer-1", 5, 10);
        REQUIRE(cfg.faults.size() == 1);
        CHECK(cfg.faults[0].target == "peer-1");
        CHECK(cfg.faults[0].active_at(5));
        CHECK_FALSE(cfg.faults[0].active_at(10));
    }
}

TEST_CASE("scenario configs round trip through JSON", "[simnet]") {
    auto cfg = baseline_scenario();
    cfg.byzantine_set = {"truck-03"};
    cfg.rogue_keys = {"truck-05"};
    cfg.link_latency_ms = LatencySpec{LatencySpec::Kind::kUniform, 0, 5, 15};
    cfg.join_schedule = {{0, "truck-01"}, {500, "truck-02"}};
    inject_fault(cfg, FaultKind::kPeerCrash, "peer-2", 100, 200);

    auto j = cfg.to_json();
    auto parsed = ScenarioConfig::from_json(j);
    CHECK(parsed.to_json() == j);
    CHECK(parsed.byzantine_set == cfg.byzantine_set);
    CHECK(parsed.rogue_keys == cfg.rogue_keys);
    CHECK(parsed.join_schedule.size() == 2);
    CHECK(parsed.faults.size() == 1);
    CHECK(parsed.link_latency_ms.kind == LatencySpec::Kind::kUniform);

    CHECK_THROWS_AS(ScenarioConfig::from_json(json::parse("{\"seed\": \"x\"}")),
                    ConfigError);
}

TEST_CASE("the default schedule staggers one truck per second", "[simnet]") {
    auto cfg = baseline_scenario();
    auto schedule = cfg.effective_join_schedule();
    REQUIRE(schedule.size() == static_cast<size_t>(cfg.n_trucks));
    for (size_t i = 0; i < schedule.size(); ++i) {
        CHECK(schedule[i].at_ms == static_cast<int64_t>(i) * 1000);
        CHECK(schedule[i].truck == truck_name(static_cast<int>(i) + 1));
    }
}

TEST_CASE("message delivery draws latency then the drop verdict", "[simnet]") {
    SECTION("fixed latency, lossless link") {
        Sha256Drbg rng(uint64_t{1});
        LatencySpec fixed{LatencySpec::Kind::kFixed, 10, 0, 0};
        auto at = deliver(100, fixed, 0.0, rng);
        REQUIRE(at.has_value());
        CHECK(*at == 110);
    }
    SECTION("certain drop consumes the same stream draws") {
        Sha256Drbg a(uint64_t{2});
        Sha256Drbg b(uint64_t{2});
        LatencySpec fixed{LatencySpec::Kind::kFixed, 10, 0, 0};
        CHECK_FALSE(deliver(100, fixed, 1.0, a).has_value());
        REQUIRE(deliver(100, fixed, 0.0, b).has_value());
        // Both paths must leave the stream at the same position.
        CHECK(a.next_u64() == b.next_u64());
    }
    SECTION("uniform latency stays in range with the expected mean") {
        Sha256Drbg rng(uint64_t{3});
        LatencySpec uniform{LatencySpec::Kind::kUniform, 0, 5, 15};
        double total = 0;
        for (int i = 0; i < 1000; ++i) {
            auto at = deliver(0, uniform, 0.0, rng);
            REQUIRE(at.has_value());
            CHECK(*at >= 5);
            CHECK(*at <= 15);
            total += static_cast<double>(*at);
        }
        double mean = total / 1000.0;
        CHECK(mean > 9.5);
        CHECK(mean < 10.5);
    }
}

TEST_CASE("the baseline scenario admits the whole fleet onto the ledger",
          "[simnet]") {
    auto cfg = baseline_scenario();
    auto result = run_scenario(cfg);

    CHECK(result.counts.at("submitted") == 7);
    CHECK(result.counts.at("approved") == 7);
    CHECK(result.counts.at("rejected") == 0);
    CHECK(result.counts.at("terminal_timeout") == 0);
    CHECK(result.platoon.members.size() == 8);

    // Every approval produced exactly one committed join record.
    CHECK(result.counts.at("join_records") == 7);
    CHECK(result.trace.count("finalize") == 7);
    CHECK(result.trace.count("decide") == 7);
    CHECK(result.ledger.verify_chain());
    CHECK(result.ledger.audit_endorsements());

    // One group rotation per decided request plus the initial formation.
    CHECK(result.counts.at("rotations") >= 7);

    SECTION("trace timestamps never run backwards") {
        int64_t prev = -1;
        for (const auto& ev : result.trace.events()) {
            CHECK(ev.time >= prev);
            prev = ev.time;
        }
    }
}

TEST_CASE("identical configs replay to identical traces and journals",
          "[simnet]") {
    auto cfg = baseline_scenario();
    auto first = run_scenario(cfg);
    auto second = run_scenario(cfg);
    CHECK(first.trace.to_text() == second.trace.to_text());
    std::ostringstream ja, jb;
    first.ledger.write_journal(ja);
    second.ledger.write_journal(jb);
    CHECK(ja.str() == jb.str());
    CHECK(first.scores == second.scores);
}

TEST_CASE("a rogue key is rejected unanimously", "[simnet]") {
    auto cfg = baseline_scenario();
    cfg.rogue_keys = {"truck-05"};
    auto result = run_scenario(cfg);

    CHECK(result.counts.at("rejected") == 1);
    CHECK(result.counts.at("approved") == 6);
    CHECK(result.platoon.members.size() == 7);
    CHECK_FALSE(result.platoon.is_member("truck-05"));

    bool saw_zero_votes = false;
    for (const auto& ev : result.trace.events()) {
        if (ev.kind != "decide") continue;
        for (const auto& [k, v] : ev.fields) {
            if (k == "votes_for" && v == "0") saw_zero_votes = true;
        }
    }
    CHECK(saw_zero_votes);
}

TEST_CASE("a byzantine verifier is outscored and rotated out", "[simnet]") {
    auto cfg = baseline_scenario();
    cfg.byzantine_set = {"truck-03"};
    auto result = run_scenario(cfg);

    // The honest majority still admits everyone.
    CHECK(result.counts.at("approved") == 7);
    CHECK(result.scores.at("truck-03") < 0);

    // Once inside a full group, the dissenter must fall out within a
    // bounded number of decided requests.
    int decided_while_in_group = 0;
    bool was_in_group = false;
    bool excluded = false;
    for (const auto& ev : result.trace.events()) {
        if (ev.kind == "rotate") {
            bool has = rotate_members_field(ev).find("truck-03") !=
                       std::string::npos;
            if (was_in_group && !has) {
                excluded = true;
                break;
            }
            was_in_group = has;
        }
        if (ev.kind == "decide" && was_in_group) ++decided_while_in_group;
    }
    CHECK(excluded);
    CHECK(decided_while_in_group <= 2 * cfg.verifier_group_k);

    // The final rotation no longer lists the dissenter.
    std::string last_members;
    for (const auto& ev : result.trace.events()) {
        if (ev.kind == "rotate") last_members = rotate_members_field(ev);
    }
    CHECK(last_members.find("truck-03") == std::string::npos);
}

TEST_CASE("total message loss exhausts the attempt budget", "[simnet]") {
    auto cfg = baseline_scenario();
    cfg.n_trucks = 2;
    cfg.verifier_group_k = 2;
    cfg.drop_rate = 1.0;
    auto result = run_scenario(cfg);

    CHECK(result.counts.at("submitted") == 3);  // one per allowed attempt
    CHECK(result.counts.at("restarted") == 2);
    CHECK(result.counts.at("terminal_timeout") == 1);
    CHECK(result.counts.at("decided") == 0);
    CHECK(result.platoon.members.size() == 1);
    CHECK(result.trace.count("proof-drop") > 0);
}

TEST_CASE("a crashed endorsing peer stalls commits until it returns",
          "[simnet]") {
    auto cfg = baseline_scenario();
    cfg.n_peers = 3;  // exactly the endorsement threshold
    inject_fault(cfg, FaultKind::kPeerCrash, "peer-2", 500, 2500);
    auto result = run_scenario(cfg);

    CHECK(result.trace.count("fault-on") == 1);
    CHECK(result.trace.count("fault-off") == 1);
    CHECK(result.trace.count("ledger-retry") > 0);
    // Retries bridge the outage: nothing is lost.
    CHECK(result.counts.at("approved") == 7);
    CHECK(result.counts.at("join_records") == 7);
    CHECK(result.ledger.verify_chain());
    CHECK(result.ledger.audit_endorsements());
}

TEST_CASE("an empty fault window changes nothing", "[simnet]") {
    auto plain = run_scenario(baseline_scenario());
    auto cfg = baseline_scenario();
    cfg.faults.push_back(FaultSpec{FaultKind::kPeerCrash, "peer-2", 300, 300});
    auto noop = run_scenario(cfg);
    CHECK(noop.trace.to_text() == plain.trace.to_text());
}
