#include "doctest.h"

#include <cmath>

#include "trilink/tierlink.hpp"

using namespace trilink;
using tierlink::D2cRouting;
using tierlink::NtnPayload;
using tierlink::Tier;
using tierlink::ZoneKind;

TEST_CASE("default tier profiles") {
    const auto t1 = tierlink::default_profile(Tier::T1_TERRESTRIAL);
    CHECK(t1.latency_ms.lo == 5.0);
    CHECK(t1.latency_ms.hi == 20.0);
    CHECK(t1.throughput.lo == 100.0);
    CHECK(t1.throughput.hi == 300.0);
    CHECK(t1.availability == 0.995);
    CHECK(t1.coverage_fraction == 0.80);
    CHECK(t1.power_multiplier.lo == 1.0);
    CHECK(t1.power_multiplier.hi == 1.0);

    const auto t2 = tierlink::default_profile(Tier::T2_NTN);
    CHECK(t2.latency_ms.lo == 30.0);
    CHECK(t2.latency_ms.hi == 60.0);
    CHECK(t2.throughput.lo == 20.0);
    CHECK(t2.throughput.hi == 50.0);
    CHECK(t2.availability == 0.95);
    CHECK(t2.coverage_fraction == 0.15);
    CHECK(t2.power_multiplier.lo == 2.0);
    CHECK(t2.power_multiplier.hi == 3.0);

    const auto t3 = tierlink::default_profile(Tier::T3_D2C);
    CHECK(t3.latency_ms.lo == 150.0);
    CHECK(t3.latency_ms.hi == 250.0);
    CHECK(t3.throughput.lo == 1.0);
    CHECK(t3.throughput.hi == 10.0);
    CHECK(t3.throughput_unit == tierlink::ThroughputUnit::KBPS);
    CHECK(t3.availability == 0.85);
    CHECK(t3.coverage_fraction == 0.05);
    CHECK(t3.power_multiplier.lo == 5.0);
    CHECK(t3.power_multiplier.hi == 6.0);
}

TEST_CASE("variant-adjusted latency ranges") {
    const auto t3_isl = tierlink::effective_latency(Tier::T3_D2C, D2cRouting::ISL);
    CHECK(t3_isl.lo == 50.0);
    CHECK(t3_isl.hi == 100.0);

    const auto t2_regen = tierlink::effective_latency(Tier::T2_NTN, NtnPayload::REGENERATIVE_ISL);
    CHECK(t2_regen.contains(25.0));
    CHECK(t2_regen.lo == 20.0);
    CHECK(t2_regen.hi == 30.0);

    const auto t2_trans = tierlink::effective_latency(Tier::T2_NTN, NtnPayload::TRANSPARENT);
    CHECK(t2_trans.contains(60.0));

    CHECK(tierlink::effective_latency(Tier::T1_TERRESTRIAL, tierlink::LinkVariant{}).hi == 20.0);

    CHECK_THROWS_AS(tierlink::effective_latency(Tier::T2_NTN, D2cRouting::ISL),
                    std::invalid_argument);
    CHECK_THROWS_AS(tierlink::effective_latency(Tier::T3_D2C, NtnPayload::TRANSPARENT),
                    std::invalid_argument);
    CHECK_THROWS_AS(tierlink::effective_latency(Tier::T1_TERRESTRIAL, D2cRouting::GATEWAY),
                    std::invalid_argument);
}

TEST_CASE("latency ranges are ordered by midpoint") {
    const double t1 = tierlink::effective_latency(Tier::T1_TERRESTRIAL, tierlink::LinkVariant{}).mid();
    const double t2r = tierlink::effective_latency(Tier::T2_NTN, NtnPayload::REGENERATIVE_ISL).mid();
    const double t2t = tierlink::effective_latency(Tier::T2_NTN, NtnPayload::TRANSPARENT).mid();
    const double t3i = tierlink::effective_latency(Tier::T3_D2C, D2cRouting::ISL).mid();
    const double t3g = tierlink::effective_latency(Tier::T3_D2C, D2cRouting::GATEWAY).mid();
    CHECK(t1 < t2r);
    CHECK(t2r < t2t);
    CHECK(t2t <= t3i);
    CHECK(t3i < t3g);
}

TEST_CASE("power multipliers") {
    CHECK(tierlink::power_multiplier(Tier::T1_TERRESTRIAL).lo == 1.0);
    CHECK(tierlink::power_multiplier(Tier::T1_TERRESTRIAL).hi == 1.0);
    CHECK(tierlink::power_multiplier(Tier::T2_NTN).lo == 2.0);
    CHECK(tierlink::power_multiplier(Tier::T2_NTN).hi == 3.0);
    CHECK(tierlink::power_multiplier(Tier::T3_D2C).lo == 5.0);
    CHECK(tierlink::power_multiplier(Tier::T3_D2C).hi == 6.0);
    CHECK(tierlink::power_multiplier(Tier::T1_TERRESTRIAL).mid() <
          tierlink::power_multiplier(Tier::T2_NTN).mid());
    CHECK(tierlink::power_multiplier(Tier::T2_NTN).mid() <
          tierlink::power_multiplier(Tier::T3_D2C).mid());
}

TEST_CASE("rssi model anchors") {
    CHECK(*tierlink::rssi_model(ZoneKind::URBAN, 0.0) == -85.0);
    CHECK(*tierlink::rssi_model(ZoneKind::URBAN, 1.0) == -105.0);
    CHECK(*tierlink::rssi_model(ZoneKind::SUBURBAN, 0.0) == -95.0);
    CHECK(*tierlink::rssi_model(ZoneKind::SUBURBAN, 1.0) == -115.0);
    CHECK(*tierlink::rssi_model(ZoneKind::SUBURBAN, 1.0) < -110.0);
    CHECK_FALSE(tierlink::rssi_model(ZoneKind::RURAL, 0.5).has_value());
    CHECK_FALSE(tierlink::rssi_model(ZoneKind::MARITIME, 0.5).has_value());

    // urban never crosses the degradation trigger
    for (double f = 0.0; f <= 1.0; f += 0.01)
        CHECK(*tierlink::rssi_model(ZoneKind::URBAN, f) >= -110.0);

    CHECK_THROWS_AS(tierlink::rssi_model(ZoneKind::URBAN, -0.1), std::domain_error);
    CHECK_THROWS_AS(tierlink::rssi_model(ZoneKind::URBAN, 1.1), std::domain_error);
}

TEST_CASE("sampled values stay inside their declared ranges") {
    const auto t3 = tierlink::default_profile(Tier::T3_D2C);
    const auto t2 = tierlink::default_profile(Tier::T2_NTN);
    tierlink::LinkVariant variant;  // gateway + transparent
    for (std::uint64_t seed = 0; seed < 100000; ++seed) {
        const auto l3 = tierlink::sample_link(t3, variant, true, seed);
        CHECK(l3.latency_ms >= 150.0);
        CHECK(l3.latency_ms <= 250.0);
        CHECK(l3.throughput >= 1.0);
        CHECK(l3.throughput <= 10.0);
        const auto l2 = tierlink::sample_link(t2, variant, true, seed);
        CHECK(l2.latency_ms >= 50.0);  // transparent shaping
        CHECK(l2.latency_ms <= 70.0);
        CHECK(l2.throughput >= 20.0);
        CHECK(l2.throughput <= 50.0);
    }
}

TEST_CASE("variant shaping applies to sampled links") {
    auto t2 = tierlink::default_profile(Tier::T2_NTN);
    tierlink::LinkVariant regen;
    regen.ntn_payload = NtnPayload::REGENERATIVE_ISL;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const auto l = tierlink::sample_link(t2, regen, true, seed);
        CHECK(l.latency_ms >= 20.0);
        CHECK(l.latency_ms <= 30.0);
    }
    // an explicit latency override beats the variant shaping
    t2.latency_ms = Range(10.0, 12.0);
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const auto l = tierlink::sample_link(t2, regen, true, seed);
        CHECK(l.latency_ms >= 10.0);
        CHECK(l.latency_ms <= 12.0);
    }
}

TEST_CASE("no coverage means no link") {
    const auto t2 = tierlink::default_profile(Tier::T2_NTN);
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        CHECK_FALSE(tierlink::sample_link(t2, {}, false, seed).up);
}

TEST_CASE("empirical availability matches the Bernoulli model") {
    const auto t2 = tierlink::default_profile(Tier::T2_NTN);
    int up = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
        if (tierlink::sample_link(t2, {}, true, 777000 + static_cast<std::uint64_t>(i)).up) ++up;
    const double rate = static_cast<double>(up) / n;
    CHECK(std::abs(rate - 0.95) <= 0.01);
}

TEST_CASE("sampling is pure in (profile, variant, coverage, seed)") {
    const auto t1 = tierlink::default_profile(Tier::T1_TERRESTRIAL);
    const auto a = tierlink::sample_link(t1, {}, true, 31337);
    const auto b = tierlink::sample_link(t1, {}, true, 31337);
    CHECK(a.up == b.up);
    CHECK(a.latency_ms == b.latency_ms);
    CHECK(a.throughput == b.throughput);
}

TEST_CASE("profile validation") {
    auto p = tierlink::default_profile(Tier::T2_NTN);
    p.availability = 1.2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = tierlink::default_profile(Tier::T2_NTN);
    p.coverage_fraction = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
