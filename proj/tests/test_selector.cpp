#include "doctest.h"

#include <cmath>
#include <optional>
#include <vector>

#include "trilink/selector.hpp"
#include "trilink/tierlink.hpp"

using namespace trilink;
using selector::ClassKind;
using selector::SessionKey;
using selector::T1Status;
using selector::TrafficClass;
using tierlink::LinkInstance;
using tierlink::Tier;

namespace {

LinkInstance mk_link(Tier tier, bool up, double latency_ms, double throughput,
                     std::optional<double> rssi = std::nullopt) {
    LinkInstance l;
    l.tier = tier;
    l.up = up;
    l.latency_ms = latency_ms;
    l.throughput = throughput;
    l.rssi_dbm = rssi;
    return l;
}

std::vector<TrafficClass> standard_classes() {
    return {{"safety", ClassKind::LATENCY_CRITICAL, 20.0, 1.0},
            {"stream", ClassKind::BANDWIDTH, 100.0, 5.0},
            {"sos", ClassKind::EMERGENCY, 300.0, 0.5}};
}

int rank(const std::optional<Tier>& t) {
    if (!t) return 0;
    switch (*t) {
        case Tier::T3_D2C: return 1;
        case Tier::T2_NTN: return 2;
        case Tier::T1_TERRESTRIAL: return 3;
    }
    return 0;
}

} // namespace

TEST_CASE("state table: exhaustive 16-case enumeration") {
    const auto classes = standard_classes();
    for (int t1_up = 0; t1_up <= 1; ++t1_up) {
        for (int degraded_rssi = 0; degraded_rssi <= 1; ++degraded_rssi) {
            for (int t2_up = 0; t2_up <= 1; ++t2_up) {
                for (int t3_up = 0; t3_up <= 1; ++t3_up) {
                    const double rssi = degraded_rssi ? -115.0 : -100.0;
                    std::vector<LinkInstance> links = {
                        mk_link(Tier::T1_TERRESTRIAL, t1_up != 0, 10.0, 200.0, rssi),
                        mk_link(Tier::T2_NTN, t2_up != 0, 45.0, 35.0),
                        mk_link(Tier::T3_D2C, t3_up != 0, 200.0, 5.0),
                    };
                    const auto st = selector::evaluate(links, classes);
                    const auto& safety = st.assignment("safety");
                    const auto& stream = st.assignment("stream");
                    const auto& sos = st.assignment("sos");

                    if (t1_up && !degraded_rssi) {
                        CHECK(st.t1_status == T1Status::AVAILABLE);
                        CHECK(safety.tier == Tier::T1_TERRESTRIAL);
                        CHECK(stream.tier == Tier::T1_TERRESTRIAL);
                        CHECK(sos.tier == Tier::T1_TERRESTRIAL);
                    } else if (t1_up && degraded_rssi) {
                        CHECK(st.t1_status == T1Status::DEGRADED);
                        CHECK(safety.tier == Tier::T1_TERRESTRIAL);
                        CHECK(sos.tier == Tier::T1_TERRESTRIAL);
                        if (t2_up) CHECK(stream.tier == Tier::T2_NTN);
                        else CHECK(stream.tier == Tier::T1_TERRESTRIAL);
                    } else if (t2_up) {
                        CHECK(st.t1_status == T1Status::LOST);
                        CHECK_FALSE(safety.served());  // 45 ms exceeds its 20 ms budget
                        CHECK(stream.tier == Tier::T2_NTN);
                        CHECK(sos.tier == Tier::T2_NTN);
                    } else if (t3_up) {
                        CHECK_FALSE(safety.served());
                        CHECK_FALSE(stream.served());
                        CHECK(sos.tier == Tier::T3_D2C);
                    } else {
                        CHECK_FALSE(safety.served());
                        CHECK_FALSE(stream.served());
                        CHECK_FALSE(sos.served());
                    }
                }
            }
        }
    }
}

TEST_CASE("boundary: rssi exactly at the threshold is not degraded") {
    const auto classes = standard_classes();
    std::vector<LinkInstance> links = {mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, -110.0),
                                       mk_link(Tier::T2_NTN, true, 45.0, 35.0)};
    const auto st = selector::evaluate(links, classes);
    CHECK(st.t1_status == T1Status::AVAILABLE);
    for (const auto& a : st.assignments) CHECK(a.tier == Tier::T1_TERRESTRIAL);
}

TEST_CASE("hysteresis band on recovery from DEGRADED") {
    const LinkInstance t1a = mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, -107.0);
    // without history: -107 is above the trigger
    CHECK(selector::classify_t1(&t1a, -110.0) == T1Status::AVAILABLE);
    // with DEGRADED history: recovery needs -105 or better
    CHECK(selector::classify_t1(&t1a, -110.0, T1Status::DEGRADED) == T1Status::DEGRADED);
    const LinkInstance t1b = mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, -104.0);
    CHECK(selector::classify_t1(&t1b, -110.0, T1Status::DEGRADED) == T1Status::AVAILABLE);
    const LinkInstance t1c = mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, -110.5);
    CHECK(selector::classify_t1(&t1c, -110.0, T1Status::AVAILABLE) == T1Status::DEGRADED);
}

TEST_CASE("priority monotonicity: better rssi never demotes a class") {
    const auto classes = standard_classes();
    std::vector<int> prev_rank(classes.size(), 0);
    bool first = true;
    for (double rssi = -120.0; rssi <= -95.0; rssi += 0.5) {
        std::vector<LinkInstance> links = {mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, rssi),
                                           mk_link(Tier::T2_NTN, true, 45.0, 35.0),
                                           mk_link(Tier::T3_D2C, true, 200.0, 5.0)};
        const auto st = selector::evaluate(links, classes);
        for (std::size_t i = 0; i < classes.size(); ++i) {
            const int r = rank(st.assignments[i].tier);
            if (!first) CHECK(r >= prev_rank[i]);
            prev_rank[i] = r;
        }
        first = false;
    }
}

TEST_CASE("evaluate is deterministic and validates inputs") {
    const auto classes = standard_classes();
    std::vector<LinkInstance> links = {mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, -100.0),
                                       mk_link(Tier::T2_NTN, true, 45.0, 35.0)};
    const auto a = selector::evaluate(links, classes);
    const auto b = selector::evaluate(links, classes);
    CHECK(a.t1_status == b.t1_status);
    for (std::size_t i = 0; i < classes.size(); ++i)
        CHECK(a.assignments[i].tier == b.assignments[i].tier);

    CHECK_THROWS_AS(selector::evaluate(links, {}), std::invalid_argument);
    std::vector<LinkInstance> two_t1 = {mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, -100.0),
                                        mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, -100.0)};
    CHECK_THROWS_AS(selector::evaluate(two_t1, classes), std::invalid_argument);
    std::vector<LinkInstance> no_rssi = {mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0)};
    CHECK_THROWS_AS(selector::evaluate(no_rssi, classes), std::invalid_argument);
}

TEST_CASE("throughput scaling leaves assignments unchanged below admission limits") {
    const auto classes = standard_classes();
    for (double k : {0.8, 1.5, 3.0, 10.0}) {
        std::vector<LinkInstance> base = {mk_link(Tier::T1_TERRESTRIAL, false, 10.0, 200.0),
                                          mk_link(Tier::T2_NTN, true, 45.0, 35.0),
                                          mk_link(Tier::T3_D2C, true, 200.0, 5.0)};
        std::vector<LinkInstance> scaled = base;
        for (auto& l : scaled) l.throughput *= k;
        const auto a = selector::evaluate(base, classes);
        const auto b = selector::evaluate(scaled, classes);
        for (std::size_t i = 0; i < classes.size(); ++i)
            CHECK(a.assignments[i].tier == b.assignments[i].tier);
    }
    // ...except where min_throughput admission flips: a bandwidth class that
    // needs 30 Mbps loses T2 when the link is scaled down to 17.5 Mbps.
    std::vector<TrafficClass> hungry = {{"bulk", ClassKind::BANDWIDTH, 100.0, 30.0}};
    std::vector<LinkInstance> links = {mk_link(Tier::T1_TERRESTRIAL, false, 10.0, 200.0),
                                       mk_link(Tier::T2_NTN, true, 45.0, 35.0)};
    CHECK(selector::evaluate(links, hungry).assignments[0].tier == Tier::T2_NTN);
    links[1].throughput *= 0.5;
    CHECK_FALSE(selector::evaluate(links, hungry).assignments[0].served());
}

TEST_CASE("emergency falls through to T3 when T2 cannot meet its throughput") {
    std::vector<TrafficClass> classes = {{"sos", ClassKind::EMERGENCY, 300.0, 0.5}};
    std::vector<LinkInstance> links = {
        mk_link(Tier::T2_NTN, true, 45.0, 0.0001),  // 0.1 kbps: below the 0.5 kbps need
        mk_link(Tier::T3_D2C, true, 200.0, 5.0)};
    const auto st = selector::evaluate(links, classes);
    CHECK(st.assignments[0].tier == Tier::T3_D2C);
}

TEST_CASE("multi-connectivity group forms from concurrent T2 links") {
    const auto classes = standard_classes();
    std::vector<LinkInstance> links = {mk_link(Tier::T2_NTN, true, 45.0, 30.0),
                                       mk_link(Tier::T2_NTN, true, 50.0, 45.0),
                                       mk_link(Tier::T2_NTN, true, 40.0, 20.0)};
    const auto st = selector::evaluate(links, classes);
    REQUIRE(st.mc_group.has_value());
    CHECK(st.mc_group->members.size() == 3);
    CHECK(selector::aggregate_mbps(*st.mc_group) == doctest::Approx(95.0).epsilon(1e-12));
    // serving link is the highest-throughput member
    CHECK(st.assignment("stream").latency_ms == 50.0);
}

TEST_CASE("aggregate throughput is the exact member sum") {
    auto g2 = selector::make_mc_group({mk_link(Tier::T2_NTN, true, 45.0, 25.0),
                                       mk_link(Tier::T2_NTN, true, 50.0, 25.0)});
    CHECK(selector::aggregate_mbps(g2) == 50.0);
    auto g3 = selector::make_mc_group({mk_link(Tier::T2_NTN, true, 45.0, 20.0),
                                       mk_link(Tier::T2_NTN, true, 50.0, 20.0),
                                       mk_link(Tier::T2_NTN, true, 40.0, 20.0)});
    CHECK(selector::aggregate_mbps(g3) == 60.0);

    CHECK_THROWS_AS(selector::make_mc_group({mk_link(Tier::T2_NTN, true, 45.0, 25.0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(selector::make_mc_group({mk_link(Tier::T2_NTN, true, 45.0, 25.0),
                                             mk_link(Tier::T2_NTN, true, 45.0, 25.0),
                                             mk_link(Tier::T2_NTN, true, 45.0, 25.0),
                                             mk_link(Tier::T2_NTN, true, 45.0, 25.0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(selector::make_mc_group({mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 25.0),
                                             mk_link(Tier::T2_NTN, true, 45.0, 25.0)}),
                    std::invalid_argument);
}

TEST_CASE("sampled 2-3 member groups stay inside the arithmetic envelope") {
    const auto t2 = tierlink::default_profile(Tier::T2_NTN);
    for (std::uint64_t seed = 0; seed < 5000; ++seed) {
        Rng rng(seed * 2654435761ULL + 1);
        const int n = 2 + static_cast<int>(rng.below(2));
        std::vector<LinkInstance> members;
        double manual = 0.0;
        for (int i = 0; i < n; ++i) {
            auto l = tierlink::sample_link(t2, {}, true, seed * 7 + static_cast<std::uint64_t>(i));
            l.up = true;
            manual += l.throughput;
            members.push_back(l);
        }
        const double agg = selector::aggregate_mbps(selector::make_mc_group(members));
        CHECK(agg == manual);
        CHECK(agg >= 40.0);
        CHECK(agg <= 150.0);
    }
}

TEST_CASE("token round trip, forgery, and expiry") {
    const SessionKey key{0x1234abcd5678ef01ULL, 0x0fedcba987654321ULL};
    const auto token =
        selector::issue_token(key, 42, Tier::T1_TERRESTRIAL, Tier::T2_NTN, 1000.0, 2000.0);
    CHECK(selector::validate_token(token, key, 1000.0) == selector::TokenStatus::VALID);
    CHECK(selector::validate_token(token, key, 2999.0) == selector::TokenStatus::VALID);

    auto flipped = token;
    flipped.tag ^= 1ULL << 17;
    CHECK(selector::validate_token(flipped, key, 1000.0) == selector::TokenStatus::INVALID_TAG);

    auto retargeted = token;
    retargeted.to_tier = Tier::T3_D2C;  // field tampering invalidates the tag
    CHECK(selector::validate_token(retargeted, key, 1000.0) == selector::TokenStatus::INVALID_TAG);

    CHECK(selector::validate_token(token, key, 3000.1) == selector::TokenStatus::EXPIRED);

    const SessionKey other{1, 2};
    CHECK(selector::validate_token(token, other, 1000.0) == selector::TokenStatus::INVALID_TAG);
}

TEST_CASE("handover admission") {
    const SessionKey key{7, 9};
    const TrafficClass bw{"stream", ClassKind::BANDWIDTH, 100.0, 5.0};
    const TrafficClass sos{"sos", ClassKind::EMERGENCY, 300.0, 0.5};
    const auto token =
        selector::issue_token(key, 1, Tier::T1_TERRESTRIAL, Tier::T3_D2C, 0.0, 2000.0);

    // latency visibility: a 200 ms tier cannot serve a 100 ms class
    CHECK(selector::admit_handover(bw, Tier::T3_D2C, 200.0, token, key, 0.0, false).verdict ==
          selector::AdmitVerdict::REJECT_LATENCY);

    CHECK(selector::admit_handover(sos, Tier::T3_D2C, 200.0, token, key, 0.0, false).admitted());

    auto forged = token;
    forged.tag ^= 0xff;
    CHECK(selector::admit_handover(sos, Tier::T3_D2C, 200.0, forged, key, 0.0, false).verdict ==
          selector::AdmitVerdict::REJECT_TOKEN);

    CHECK(selector::admit_handover(sos, Tier::T3_D2C, 200.0, token, key, 0.0, true).verdict ==
          selector::AdmitVerdict::REJECT_BUSY);
}

TEST_CASE("handover execution and freeze budgets") {
    selector::HandoverRecord within;
    within.from_tier = Tier::T2_NTN;
    within.to_tier = Tier::T2_NTN;
    within.start_t_ms = 1000.0;
    within.budget_ms = selector::handover_budget_ms(within.from_tier, within.to_tier);
    CHECK(within.budget_ms == 150.0);
    const auto ok = selector::execute_handover(within, 120.0);
    CHECK_FALSE(ok.violation);
    CHECK(ok.freeze_start_ms == 1000.0);
    CHECK(ok.freeze_end_ms == 1120.0);

    selector::HandoverRecord between;
    between.from_tier = Tier::T1_TERRESTRIAL;
    between.to_tier = Tier::T2_NTN;
    between.start_t_ms = 0.0;
    between.budget_ms = selector::handover_budget_ms(between.from_tier, between.to_tier);
    CHECK(between.budget_ms == 500.0);
    CHECK(selector::execute_handover(between, 600.0).violation);

    const auto degenerate = selector::execute_handover(between, 0.0);
    CHECK_FALSE(degenerate.violation);
    CHECK(degenerate.freeze_start_ms == degenerate.freeze_end_ms);
}

TEST_CASE("minimum risk manoeuvre predicate") {
    const auto classes = standard_classes();
    std::vector<LinkInstance> t2_only = {mk_link(Tier::T1_TERRESTRIAL, false, 10.0, 200.0),
                                         mk_link(Tier::T2_NTN, true, 45.0, 35.0)};
    const auto st = selector::evaluate(t2_only, classes);
    const auto ev = selector::mrm_check(st, "safety", "mrm-safety-0");
    REQUIRE(ev.has_value());
    CHECK(ev->class_name == "safety");
    CHECK(ev->fallback_id == "mrm-safety-0");

    std::vector<LinkInstance> t1_good = {mk_link(Tier::T1_TERRESTRIAL, true, 10.0, 200.0, -95.0)};
    CHECK_FALSE(selector::mrm_check(selector::evaluate(t1_good, classes), "safety", "f").has_value());

    // served but over budget: 60 ms on a 50 ms class
    std::vector<TrafficClass> tight = {{"lc50", ClassKind::LATENCY_CRITICAL, 50.0, 1.0}};
    std::vector<LinkInstance> slow_t2 = {mk_link(Tier::T1_TERRESTRIAL, false, 10.0, 200.0),
                                         mk_link(Tier::T2_NTN, true, 48.0, 35.0)};
    auto st2 = selector::evaluate(slow_t2, tight);
    CHECK(st2.assignments[0].tier == Tier::T2_NTN);
    st2.assignments[0].latency_ms = 60.0;  // serving latency drifted past the budget
    CHECK(selector::mrm_check(st2, "lc50", "f").has_value());

    CHECK_THROWS_AS(selector::mrm_check(st, "sos", "f"), std::invalid_argument);
}

TEST_CASE("traffic class invariants") {
    CHECK_THROWS_AS(TrafficClass({"x", ClassKind::EMERGENCY, 200.0, 1.0}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(TrafficClass({"x", ClassKind::BANDWIDTH, 0.0, 1.0}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(TrafficClass({"x", ClassKind::BANDWIDTH, 100.0, 0.0}).validate(),
                    std::invalid_argument);
    CHECK_NOTHROW(TrafficClass({"x", ClassKind::EMERGENCY, 250.0, 1.0}).validate());
}
