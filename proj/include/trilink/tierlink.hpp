#pragma once

// Statistical models of the three connectivity tiers: terrestrial 5G,
// NTN satellite broadband, and the D2C emergency fallback. Latency and
// throughput are drawn uniformly from per-tier closed ranges; routing and
// payload variants reshape the latency ranges.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "trilink/util.hpp"

namespace trilink::tierlink {

enum class Tier { T1_TERRESTRIAL, T2_NTN, T3_D2C };
enum class ZoneKind { URBAN, SUBURBAN, RURAL, MARITIME };
enum class ThroughputUnit { MBPS, KBPS };

enum class D2cRouting { GATEWAY, ISL };
enum class NtnPayload { TRANSPARENT, REGENERATIVE_ISL };

struct LinkVariant {
    D2cRouting d2c_routing = D2cRouting::GATEWAY;
    NtnPayload ntn_payload = NtnPayload::TRANSPARENT;
};

struct TierProfile {
    Tier tier = Tier::T1_TERRESTRIAL;
    Range latency_ms;
    Range throughput;                 // Mbps for T1/T2, kbps for T3
    ThroughputUnit throughput_unit = ThroughputUnit::MBPS;
    double availability = 1.0;        // in-coverage availability
    double coverage_fraction = 1.0;   // descriptive share of area covered
    Range power_multiplier;           // x terrestrial baseline

    void validate() const {
        if (!(availability >= 0.0 && availability <= 1.0))
            throw std::invalid_argument("TierProfile: availability outside [0, 1]");
        if (!(coverage_fraction >= 0.0 && coverage_fraction <= 1.0))
            throw std::invalid_argument("TierProfile: coverage_fraction outside [0, 1]");
        if (latency_ms.lo < 0.0 || throughput.lo < 0.0 || power_multiplier.lo < 0.0)
            throw std::invalid_argument("TierProfile: negative range bound");
    }
};

inline TierProfile default_profile(Tier tier) {
    TierProfile p;
    p.tier = tier;
    switch (tier) {
        case Tier::T1_TERRESTRIAL:
            p.latency_ms = Range(5.0, 20.0);
            p.throughput = Range(100.0, 300.0);
            p.throughput_unit = ThroughputUnit::MBPS;
            p.availability = 0.995;
            p.coverage_fraction = 0.80;
            p.power_multiplier = Range(1.0, 1.0);
            break;
        case Tier::T2_NTN:
            p.latency_ms = Range(30.0, 60.0);
            p.throughput = Range(20.0, 50.0);
            p.throughput_unit = ThroughputUnit::MBPS;
            p.availability = 0.95;
            p.coverage_fraction = 0.15;
            p.power_multiplier = Range(2.0, 3.0);
            break;
        case Tier::T3_D2C:
            p.latency_ms = Range(150.0, 250.0);
            p.throughput = Range(1.0, 10.0);
            p.throughput_unit = ThroughputUnit::KBPS;
            p.availability = 0.85;
            p.coverage_fraction = 0.05;
            p.power_multiplier = Range(5.0, 6.0);
            break;
    }
    return p;
}

// A sampled link state at one instant. rssi is meaningful for T1 only.
struct LinkInstance {
    Tier tier = Tier::T1_TERRESTRIAL;
    bool up = false;
    std::optional<double> rssi_dbm;
    double latency_ms = 0.0;
    double throughput = 0.0;  // unit per TierProfile
    LinkVariant variant;
};

// Variant-adjusted service latency range per tier.
inline Range effective_latency(Tier tier, const LinkVariant& variant) {
    switch (tier) {
        case Tier::T1_TERRESTRIAL:
            return Range(5.0, 20.0);
        case Tier::T2_NTN:
            return variant.ntn_payload == NtnPayload::TRANSPARENT ? Range(50.0, 70.0)
                                                                  : Range(20.0, 30.0);
        case Tier::T3_D2C:
            return variant.d2c_routing == D2cRouting::GATEWAY ? Range(150.0, 250.0)
                                                              : Range(50.0, 100.0);
    }
    throw std::logic_error("effective_latency: bad tier");
}

// Per-tier overloads; asking the wrong tier for a variant is an error.
inline Range effective_latency(Tier tier, NtnPayload payload) {
    if (tier != Tier::T2_NTN)
        throw std::invalid_argument("effective_latency: NTN payload variant applies to T2 only");
    LinkVariant v;
    v.ntn_payload = payload;
    return effective_latency(tier, v);
}

inline Range effective_latency(Tier tier, D2cRouting routing) {
    if (tier != Tier::T3_D2C)
        throw std::invalid_argument("effective_latency: D2C routing variant applies to T3 only");
    LinkVariant v;
    v.d2c_routing = routing;
    return effective_latency(tier, v);
}

inline Range power_multiplier(Tier tier) {
    switch (tier) {
        case Tier::T1_TERRESTRIAL: return Range(1.0, 1.0);
        case Tier::T2_NTN:         return Range(2.0, 3.0);
        case Tier::T3_D2C:         return Range(5.0, 6.0);
    }
    throw std::logic_error("power_multiplier: bad tier");
}

// One link draw: up = in_coverage AND Bernoulli(availability); latency from
// the variant-adjusted range unless the profile overrides it; throughput
// from the profile range. Pure in (profile, variant, in_coverage, seed).
inline LinkInstance sample_link(const TierProfile& profile, const LinkVariant& variant,
                                bool in_coverage, std::uint64_t rng_seed) {
    profile.validate();
    Rng rng(rnd::derive(rng_seed, rnd::fnv1a("sample_link")));

    Range latency = effective_latency(profile.tier, variant);
    const TierProfile defaults = default_profile(profile.tier);
    if (profile.latency_ms.lo != defaults.latency_ms.lo ||
        profile.latency_ms.hi != defaults.latency_ms.hi) {
        latency = profile.latency_ms;  // explicit override wins over variant shaping
    }

    LinkInstance link;
    link.tier = profile.tier;
    link.variant = variant;
    link.up = in_coverage && rng.bernoulli(profile.availability);
    link.latency_ms = rng.uniform(latency);
    link.throughput = rng.uniform(profile.throughput);
    return link;
}

// Terrestrial RSSI along a zone crossing; the anchors keep urban above the
// -110 dBm degradation trigger and push suburban edges below it. RURAL and
// MARITIME have no terrestrial signal.
inline std::optional<double> rssi_model(ZoneKind zone, double position_in_zone) {
    if (!(position_in_zone >= 0.0 && position_in_zone <= 1.0))
        throw std::domain_error("rssi_model: position_in_zone must be in [0, 1]");
    switch (zone) {
        case ZoneKind::URBAN:    return -85.0 - 20.0 * position_in_zone;   // -85 .. -105
        case ZoneKind::SUBURBAN: return -95.0 - 20.0 * position_in_zone;   // -95 .. -115
        case ZoneKind::RURAL:
        case ZoneKind::MARITIME: return std::nullopt;
    }
    throw std::logic_error("rssi_model: bad zone");
}

inline std::string tier_name(Tier tier) {
    switch (tier) {
        case Tier::T1_TERRESTRIAL: return "T1";
        case Tier::T2_NTN:         return "T2";
        case Tier::T3_D2C:         return "T3";
    }
    return "?";
}

inline std::string zone_name(ZoneKind zone) {
    switch (zone) {
        case ZoneKind::URBAN:    return "URBAN";
        case ZoneKind::SUBURBAN: return "SUBURBAN";
        case ZoneKind::RURAL:    return "RURAL";
        case ZoneKind::MARITIME: return "MARITIME";
    }
    return "?";
}

} // namespace trilink::tierlink
