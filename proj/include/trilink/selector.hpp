#pragma once

// Deterministic priority-based link selection across the three tiers, with
// RSSI-triggered degradation, latency-visibility admission, freeze-window
// handover semantics, token-authenticated switching, MRM triggering, and
// NTN multi-connectivity aggregation.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trilink/tierlink.hpp"

namespace trilink::selector {

using tierlink::LinkInstance;
using tierlink::Tier;

enum class ClassKind { LATENCY_CRITICAL, BANDWIDTH, EMERGENCY };

// Throughput requirement units follow the class kind: Mbps for
// LATENCY_CRITICAL and BANDWIDTH, kbps for EMERGENCY.
struct TrafficClass {
    std::string name;
    ClassKind kind = ClassKind::LATENCY_CRITICAL;
    double max_latency_ms = 0.0;
    double min_throughput = 0.0;

    void validate() const {
        if (!(max_latency_ms > 0.0) || !(min_throughput > 0.0))
            throw std::invalid_argument("TrafficClass " + name + ": requirements must be positive");
        if (kind == ClassKind::EMERGENCY && max_latency_ms < 250.0)
            throw std::invalid_argument("TrafficClass " + name +
                                        ": EMERGENCY max_latency must be >= 250 ms");
    }

    double min_throughput_kbps() const {
        return kind == ClassKind::EMERGENCY ? min_throughput : min_throughput * 1e3;
    }
};

enum class T1Status { AVAILABLE, DEGRADED, LOST };

struct ClassAssignment {
    std::string name;
    ClassKind kind = ClassKind::LATENCY_CRITICAL;
    double max_latency_ms = 0.0;
    std::optional<Tier> tier;   // nullopt = UNSERVED
    double latency_ms = 0.0;    // serving link latency, 0 when unserved
    double throughput_kbps = 0.0;

    bool served() const { return tier.has_value(); }
};

struct MultiConnectivityGroup {
    std::vector<LinkInstance> members;  // 2-3 concurrent T2 links, all up
};

inline MultiConnectivityGroup make_mc_group(std::vector<LinkInstance> members) {
    if (members.size() < 2 || members.size() > 3)
        throw std::invalid_argument("MultiConnectivityGroup: needs 2-3 members");
    for (const auto& m : members) {
        if (m.tier != Tier::T2_NTN)
            throw std::invalid_argument("MultiConnectivityGroup: members must be T2");
        if (!m.up) throw std::invalid_argument("MultiConnectivityGroup: members must be up");
    }
    MultiConnectivityGroup g;
    g.members = std::move(members);
    return g;
}

// Exact sum of member downlink throughputs, Mbps.
inline double aggregate_mbps(const MultiConnectivityGroup& group) {
    if (group.members.size() < 2 || group.members.size() > 3)
        throw std::invalid_argument("aggregate_mbps: group must have 2-3 members");
    double sum = 0.0;
    for (const auto& m : group.members) sum += m.throughput;
    return sum;
}

struct SelectorState {
    T1Status t1_status = T1Status::LOST;
    std::vector<ClassAssignment> assignments;  // parallel to the input classes
    std::optional<MultiConnectivityGroup> mc_group;

    const ClassAssignment& assignment(std::string_view name) const {
        for (const auto& a : assignments)
            if (a.name == name) return a;
        throw std::out_of_range("SelectorState: no class named " + std::string(name));
    }
};

// --- handover tokens -------------------------------------------------------

struct SessionKey {
    std::uint64_t k0 = 0;
    std::uint64_t k1 = 0;
};

namespace detail {

inline std::uint64_t rotl64(std::uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

// SipHash-2-4 over a short byte string.
inline std::uint64_t siphash24(const SessionKey& key, const unsigned char* data, std::size_t len) {
    std::uint64_t v0 = 0x736f6d6570736575ULL ^ key.k0;
    std::uint64_t v1 = 0x646f72616e646f6dULL ^ key.k1;
    std::uint64_t v2 = 0x6c7967656e657261ULL ^ key.k0;
    std::uint64_t v3 = 0x7465646279746573ULL ^ key.k1;
    const auto round = [&] {
        v0 += v1; v1 = rotl64(v1, 13); v1 ^= v0; v0 = rotl64(v0, 32);
        v2 += v3; v3 = rotl64(v3, 16); v3 ^= v2;
        v0 += v3; v3 = rotl64(v3, 21); v3 ^= v0;
        v2 += v1; v1 = rotl64(v1, 17); v1 ^= v2; v2 = rotl64(v2, 32);
    };
    const std::size_t full = len - (len % 8);
    for (std::size_t i = 0; i < full; i += 8) {
        std::uint64_t m = 0;
        for (int j = 0; j < 8; ++j) m |= static_cast<std::uint64_t>(data[i + j]) << (8 * j);
        v3 ^= m; round(); round(); v0 ^= m;
    }
    std::uint64_t tail = static_cast<std::uint64_t>(len & 0xff) << 56;
    for (std::size_t i = full, j = 0; i < len; ++i, ++j)
        tail |= static_cast<std::uint64_t>(data[i]) << (8 * j);
    v3 ^= tail; round(); round(); v0 ^= tail;
    v2 ^= 0xff;
    round(); round(); round(); round();
    return v0 ^ v1 ^ v2 ^ v3;
}

inline void put_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline std::uint64_t double_bits(double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, sizeof u);
    return u;
}

} // namespace detail

struct HandoverToken {
    std::uint64_t session_id = 0;
    Tier from_tier = Tier::T1_TERRESTRIAL;
    Tier to_tier = Tier::T1_TERRESTRIAL;
    double issued_t_ms = 0.0;
    double ttl_ms = 2000.0;
    std::uint64_t tag = 0;  // keyed MAC over the canonical field encoding
};

namespace detail {

inline std::uint64_t token_tag(const SessionKey& key, const HandoverToken& t) {
    std::vector<unsigned char> buf;
    buf.reserve(8 * 4 + 2);
    put_u64(buf, t.session_id);
    buf.push_back(static_cast<unsigned char>(t.from_tier));
    buf.push_back(static_cast<unsigned char>(t.to_tier));
    put_u64(buf, double_bits(t.issued_t_ms));
    put_u64(buf, double_bits(t.ttl_ms));
    return siphash24(key, buf.data(), buf.size());
}

} // namespace detail

inline HandoverToken issue_token(const SessionKey& key, std::uint64_t session_id, Tier from,
                                 Tier to, double issued_t_ms, double ttl_ms = 2000.0) {
    HandoverToken t;
    t.session_id = session_id;
    t.from_tier = from;
    t.to_tier = to;
    t.issued_t_ms = issued_t_ms;
    t.ttl_ms = ttl_ms;
    t.tag = detail::token_tag(key, t);
    return t;
}

enum class TokenStatus { VALID, INVALID_TAG, EXPIRED };

inline TokenStatus validate_token(const HandoverToken& token, const SessionKey& key, double now_ms) {
    if (detail::token_tag(key, token) != token.tag) return TokenStatus::INVALID_TAG;
    if (now_ms > token.issued_t_ms + token.ttl_ms) return TokenStatus::EXPIRED;
    return TokenStatus::VALID;
}

// --- handover admission and execution --------------------------------------

inline double handover_budget_ms(Tier from, Tier to) {
    return from == to ? 150.0 : 500.0;
}

struct HandoverRecord {
    std::string class_name;
    Tier from_tier = Tier::T1_TERRESTRIAL;
    Tier to_tier = Tier::T1_TERRESTRIAL;
    double start_t_ms = 0.0;
    double budget_ms = 0.0;
    bool freeze = true;
    HandoverToken token;
    std::string mrm_fallback_id;
};

enum class AdmitVerdict { ADMIT, REJECT_LATENCY, REJECT_TOKEN, REJECT_BUSY };

struct AdmitResult {
    AdmitVerdict verdict = AdmitVerdict::ADMIT;
    bool admitted() const { return verdict == AdmitVerdict::ADMIT; }
};

// Latency visibility first, then token authentication, then the
// one-active-handover-per-class rule.
inline AdmitResult admit_handover(const TrafficClass& cls, Tier /*target_tier*/,
                                  double target_latency_ms, const HandoverToken& token,
                                  const SessionKey& key, double now_ms,
                                  bool class_has_active_handover) {
    if (target_latency_ms > cls.max_latency_ms) return {AdmitVerdict::REJECT_LATENCY};
    if (validate_token(token, key, now_ms) != TokenStatus::VALID)
        return {AdmitVerdict::REJECT_TOKEN};
    if (class_has_active_handover) return {AdmitVerdict::REJECT_BUSY};
    return {AdmitVerdict::ADMIT};
}

struct HandoverOutcome {
    double freeze_start_ms = 0.0;
    double freeze_end_ms = 0.0;
    bool violation = false;
};

inline HandoverOutcome execute_handover(const HandoverRecord& record, double actual_duration_ms) {
    HandoverOutcome out;
    out.freeze_start_ms = record.start_t_ms;
    out.freeze_end_ms = record.start_t_ms + actual_duration_ms;
    out.violation = actual_duration_ms > record.budget_ms;
    return out;
}

// --- tier selection ---------------------------------------------------------

// T1 status with an optional hysteresis band: degradation triggers on
// rssi strictly below threshold; recovery from DEGRADED needs
// rssi >= recovery_dbm so the state machine cannot chatter at the boundary.
inline T1Status classify_t1(const LinkInstance* t1, double threshold_dbm,
                            std::optional<T1Status> prev = std::nullopt,
                            double recovery_dbm = -105.0) {
    if (t1 == nullptr || !t1->up) return T1Status::LOST;
    if (!t1->rssi_dbm)
        throw std::invalid_argument("classify_t1: up T1 link must carry an RSSI sample");
    const double rssi = *t1->rssi_dbm;
    if (prev && *prev == T1Status::DEGRADED)
        return rssi >= recovery_dbm ? T1Status::AVAILABLE : T1Status::DEGRADED;
    return rssi < threshold_dbm ? T1Status::DEGRADED : T1Status::AVAILABLE;
}

namespace detail {

inline double link_throughput_kbps(const LinkInstance& link) {
    return link.tier == Tier::T3_D2C ? link.throughput : link.throughput * 1e3;
}

} // namespace detail

// Quiescent assignment of traffic classes to tiers.
//
//   (1) T1 available: everything on T1.
//   (2) T1 degraded: latency-critical and emergency hold T1; bandwidth moves
//       to T2 when a fit T2 link is up, else stays on T1.
//   (3) T1 lost, T2 up: everything fitting T2 moves there; classes whose
//       requirements T2 cannot meet become UNSERVED (emergency may still
//       fall through to T3).
//   (4) T1 and T2 lost: emergency on T3 when up and fit; the rest UNSERVED.
//
// Requirement checks (latency and min throughput) gate assignment to the
// satellite tiers only; T1 is the home tier and MRM monitoring catches any
// requirement violation while served there.
inline SelectorState evaluate(const std::vector<LinkInstance>& links,
                              const std::vector<TrafficClass>& classes,
                              double threshold_dbm = -110.0,
                              std::optional<T1Status> prev_t1_status = std::nullopt,
                              double recovery_dbm = -105.0) {
    if (classes.empty()) throw std::invalid_argument("evaluate: classes must be non-empty");
    for (const auto& c : classes) c.validate();

    const LinkInstance* t1 = nullptr;
    std::vector<const LinkInstance*> t2_up;
    const LinkInstance* t3 = nullptr;
    for (const auto& link : links) {
        switch (link.tier) {
            case Tier::T1_TERRESTRIAL:
                if (t1 != nullptr) throw std::invalid_argument("evaluate: at most one T1 link");
                t1 = &link;
                break;
            case Tier::T2_NTN:
                if (link.up) t2_up.push_back(&link);
                break;
            case Tier::T3_D2C:
                if (t3 == nullptr || (!t3->up && link.up)) t3 = &link;
                break;
        }
    }

    SelectorState state;
    state.t1_status = classify_t1(t1, threshold_dbm, prev_t1_status, recovery_dbm);

    // Serving T2 link: highest sampled throughput; group of up to three for
    // multi-connectivity aggregation. Stable sort keeps ties deterministic.
    std::stable_sort(t2_up.begin(), t2_up.end(), [](const LinkInstance* a, const LinkInstance* b) {
        return a->throughput > b->throughput;
    });
    if (t2_up.size() > 3) t2_up.resize(3);
    const LinkInstance* t2 = t2_up.empty() ? nullptr : t2_up.front();
    if (t2_up.size() >= 2) {
        std::vector<LinkInstance> members;
        for (const auto* l : t2_up) members.push_back(*l);
        state.mc_group = make_mc_group(std::move(members));
    }

    const bool t3_up = t3 != nullptr && t3->up;
    const double t2_thr_kbps =
        t2 == nullptr ? 0.0
                      : (state.mc_group ? aggregate_mbps(*state.mc_group) * 1e3
                                        : detail::link_throughput_kbps(*t2));

    const auto fits_t2 = [&](const TrafficClass& cls) {
        return t2 != nullptr && t2->latency_ms <= cls.max_latency_ms &&
               t2_thr_kbps >= cls.min_throughput_kbps();
    };
    const auto fits_t3 = [&](const TrafficClass& cls) {
        return t3_up && t3->latency_ms <= cls.max_latency_ms &&
               detail::link_throughput_kbps(*t3) >= cls.min_throughput_kbps();
    };

    for (const auto& cls : classes) {
        ClassAssignment a;
        a.name = cls.name;
        a.kind = cls.kind;
        a.max_latency_ms = cls.max_latency_ms;

        const auto assign_t1 = [&] {
            a.tier = Tier::T1_TERRESTRIAL;
            a.latency_ms = t1->latency_ms;
            a.throughput_kbps = detail::link_throughput_kbps(*t1);
        };
        const auto assign_t2 = [&] {
            a.tier = Tier::T2_NTN;
            a.latency_ms = t2->latency_ms;
            a.throughput_kbps = t2_thr_kbps;
        };
        const auto assign_t3 = [&] {
            a.tier = Tier::T3_D2C;
            a.latency_ms = t3->latency_ms;
            a.throughput_kbps = detail::link_throughput_kbps(*t3);
        };

        switch (state.t1_status) {
            case T1Status::AVAILABLE:
                assign_t1();
                break;
            case T1Status::DEGRADED:
                if (cls.kind == ClassKind::BANDWIDTH && fits_t2(cls)) assign_t2();
                else assign_t1();
                break;
            case T1Status::LOST:
                if (fits_t2(cls)) assign_t2();
                else if (cls.kind == ClassKind::EMERGENCY && fits_t3(cls)) assign_t3();
                // else UNSERVED
                break;
        }
        state.assignments.push_back(std::move(a));
    }
    return state;
}

// --- minimum risk manoeuvre -------------------------------------------------

struct MrmEvent {
    std::string class_name;
    std::string fallback_id;  // pre-computed fallback trajectory
};

// Level predicate: a latency-critical class is in an MRM condition when it
// is unserved or its serving latency exceeds its budget.
inline std::optional<MrmEvent> mrm_check(const SelectorState& state, std::string_view class_name,
                                         std::string_view fallback_id) {
    const ClassAssignment& a = state.assignment(class_name);
    if (a.kind != ClassKind::LATENCY_CRITICAL)
        throw std::invalid_argument("mrm_check: class must be LATENCY_CRITICAL");
    if (!a.served() || a.latency_ms > a.max_latency_ms)
        return MrmEvent{a.name, std::string(fallback_id)};
    return std::nullopt;
}

} // namespace trilink::selector
