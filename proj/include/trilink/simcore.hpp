#pragma once

// Deterministic discrete-event engine. A run advances scenario time on a
// fixed sampling interval, samples per-tier links for the current zone,
// drives the tier selector, executes token-authenticated handovers with
// freeze windows, routes workload messages, accrues energy, and emits a
// metrics report plus an append-only event log.
//
// Determinism: every random draw is keyed by (scenario seed, concern label,
// structural index). Adding or changing the workload therefore never
// perturbs link-availability draws, and identical inputs reproduce the log
// and report bit for bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trilink/radio.hpp"
#include "trilink/selector.hpp"
#include "trilink/tierlink.hpp"
#include "trilink/util.hpp"

namespace trilink::simcore {

using selector::ClassKind;
using selector::TrafficClass;
using tierlink::LinkVariant;
using tierlink::Tier;
using tierlink::TierProfile;
using tierlink::ZoneKind;

// Serving satellites rotate on this cadence, driving within-tier handovers.
inline constexpr double kSatellitePassS = 600.0;
inline constexpr double kRssiNoiseDb = 1.0;
inline constexpr double kTokenTtlMs = 2000.0;

struct ZoneSegment {
    ZoneKind zone = ZoneKind::URBAN;
    double fraction = 0.0;  // share of the scenario duration
    bool t1_coverage = false;
    bool t2_coverage = false;
    bool t3_coverage = false;
};

struct WorkloadItem {
    TrafficClass traffic_class;
    double period_ms = 0.0;
    double size_bytes = 0.0;
};

// Partial per-tier parameter override applied on top of the defaults.
struct TierOverride {
    std::optional<Range> latency_ms;
    std::optional<Range> throughput;
    std::optional<double> availability;
    std::optional<double> coverage_fraction;
    std::optional<Range> power_multiplier;
};

struct Scenario {
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    std::vector<ZoneSegment> route;
    std::vector<WorkloadItem> workload;
    LinkVariant variants;
    std::map<Tier, TierOverride> tier_overrides;
    double sample_interval_ms = 100.0;

    // Returns every violated invariant; empty means valid.
    std::vector<std::string> validate() const {
        std::vector<std::string> errors;
        if (!(duration_s >= 0.0)) errors.push_back("duration_s must be >= 0");
        if (!(sample_interval_ms > 0.0)) errors.push_back("sample_interval_ms must be > 0");
        if (route.empty()) errors.push_back("route must have at least one segment");
        double sum = 0.0;
        for (std::size_t i = 0; i < route.size(); ++i) {
            if (!(route[i].fraction > 0.0))
                errors.push_back("route[" + std::to_string(i) + "].fraction must be > 0");
            sum += route[i].fraction;
        }
        if (!route.empty() && std::abs(sum - 1.0) > 1e-9)
            errors.push_back("route fractions must sum to 1");
        if (workload.empty()) errors.push_back("workload must have at least one class");
        for (std::size_t i = 0; i < workload.size(); ++i) {
            const auto& w = workload[i];
            if (!(w.period_ms > 0.0))
                errors.push_back("workload[" + std::to_string(i) + "].period_ms must be > 0");
            try {
                w.traffic_class.validate();
            } catch (const std::exception& e) {
                errors.push_back("workload[" + std::to_string(i) + "]: " + e.what());
            }
        }
        return errors;
    }
};

struct ScenarioValidationError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ScenarioValidationError(std::vector<std::string> v)
        : std::runtime_error("scenario validation failed (" + std::to_string(v.size()) +
                             " violations)"),
          violations(std::move(v)) {}
};

// Segment index whose cumulative fraction interval contains t; boundaries
// belong to the later segment.
inline std::size_t zone_at(const std::vector<ZoneSegment>& route, double t_s, double duration_s) {
    if (!(t_s >= 0.0 && t_s <= duration_s))
        throw std::domain_error("zone_at: t outside [0, duration]");
    if (route.empty()) throw std::domain_error("zone_at: empty route");
    const double pos = duration_s == 0.0 ? 0.0 : t_s / duration_s;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        cum += route[i].fraction;
        if (pos < cum) return i;
    }
    return route.size() - 1;
}

// --- events ------------------------------------------------------------------

enum class EventKind {
    SAMPLE,
    ASSIGNMENT_CHANGE,
    HANDOVER_START,
    HANDOVER_END,
    FREEZE_VIOLATION,
    MRM,
    MSG_SENT,
    MSG_DELIVERED,
    MSG_QUEUED,
};

struct LinkSnap {
    bool up = false;
    double latency_ms = 0.0;
    double throughput = 0.0;
};

struct SampleRecord {
    ZoneKind zone = ZoneKind::URBAN;
    double zone_fraction = 0.0;
    double t1_rssi_dbm = 0.0;
    bool t1_rssi_present = false;
    LinkSnap t1;
    int t2_visible = 0;
    std::array<LinkSnap, 3> t2{};
    LinkSnap t3;
};

// One log record. Field meaning depends on kind; unused slots stay at their
// defaults. Tier slots use -1 for "none/UNSERVED".
struct Event {
    double t_ms = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::SAMPLE;
    std::int32_t class_idx = -1;
    std::int32_t sample_idx = -1;
    std::int32_t handover_id = -1;
    std::int64_t msg_idx = -1;
    std::int8_t from_tier = -1;
    std::int8_t to_tier = -1;
    double a = 0.0;  // START: budget_ms; END/VIOLATION: duration_ms; DELIVERED: network latency
    double b = 0.0;  // END/VIOLATION: budget_ms; DELIVERED: total latency
    // Token reference (HANDOVER_START only).
    std::uint64_t tok_session = 0;
    double tok_issued_ms = 0.0;
    double tok_ttl_ms = 0.0;
    std::uint64_t tok_tag = 0;
};

struct EventLog {
    std::uint64_t seed = 0;
    std::vector<Event> events;
    std::vector<SampleRecord> samples;
};

// --- metrics -----------------------------------------------------------------

struct TierClassStats {
    std::int64_t delivered = 0;
    double network_latency_sum_ms = 0.0;
    double mean_network_latency_ms() const {
        return delivered == 0 ? 0.0 : network_latency_sum_ms / static_cast<double>(delivered);
    }
};

struct ClassMetrics {
    std::string name;
    std::int64_t generated = 0;
    std::int64_t sent = 0;
    std::int64_t delivered = 0;
    std::int64_t delivered_within_max = 0;
    std::int64_t unresolved = 0;
    double availability = 0.0;  // delivered_within_max / generated
    double total_latency_sum_ms = 0.0;
    std::vector<std::int64_t> histogram;  // 10 ms bins, [0, 1000) + overflow
    std::map<std::string, TierClassStats> per_tier;

    double mean_total_latency_ms() const {
        return delivered == 0 ? 0.0 : total_latency_sum_ms / static_cast<double>(delivered);
    }
};

struct MetricsReport {
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    double sample_interval_ms = 0.0;
    std::int64_t ticks = 0;
    std::int64_t served_ticks = 0;
    std::map<std::string, std::int64_t> tier_serving_ticks;      // "T1"/"T2"/"T3"
    std::map<std::string, double> tier_serving_fraction;         // of served ticks
    std::vector<ClassMetrics> classes;
    std::int64_t handovers_within_tier = 0;
    std::int64_t handovers_between_tier = 0;
    std::int64_t handovers_rejected = 0;
    std::int64_t freeze_violations = 0;
    std::int64_t mrm_events = 0;
    std::int64_t mc_groups = 0;
    double mc_aggregate_min_mbps = 0.0;
    double mc_aggregate_max_mbps = 0.0;
    double mc_aggregate_mean_mbps = 0.0;
    double mc_fraction_in_50_100 = 0.0;
    // Energy: per-tick multiplier tallies; tick_multiplier_x10_sum is exact
    // integer arithmetic (midpoints x10), energy_units the derived value in
    // baseline-device-seconds.
    std::map<std::string, std::int64_t> energy_tick_counts;  // key: multiplier, e.g. "5.5"
    std::int64_t tick_multiplier_x10_sum = 0;
    double energy_units = 0.0;
};

struct RunResult {
    MetricsReport report;
    EventLog log;
};

// --- engine ------------------------------------------------------------------

namespace detail {

struct PendingAction {
    double t_ms = 0.0;
    std::uint64_t order = 0;
    enum class Kind { HANDOVER_END, DELIVERY } kind = Kind::DELIVERY;
    std::int32_t class_idx = -1;
    // handover
    std::int32_t handover_id = -1;
    std::int8_t from_tier = -1;
    std::int8_t to_tier = -1;
    double duration_ms = 0.0;
    double budget_ms = 0.0;
    // delivery
    std::int64_t msg_idx = -1;
    std::int8_t tier = -1;
    double network_latency_ms = 0.0;
    double total_latency_ms = 0.0;

    bool operator>(const PendingAction& o) const {
        if (t_ms != o.t_ms) return t_ms > o.t_ms;
        return order > o.order;
    }
};

struct QueuedMsg {
    std::int64_t msg_idx = 0;
    double nominal_t_ms = 0.0;
};

struct ClassState {
    std::optional<Tier> current;
    bool frozen = false;
    double freeze_start_ms = 0.0;
    double freeze_end_ms = 0.0;
    double next_gen_ms = 0.0;
    std::int64_t msg_counter = 0;
    std::vector<QueuedMsg> queue;            // sent but unserved
    std::vector<QueuedMsg> frozen_deferred;  // generated during freeze
    bool mrm_active = false;
};

inline std::int8_t tier_code(std::optional<Tier> t) {
    return t ? static_cast<std::int8_t>(*t) : std::int8_t{-1};
}

inline std::string multiplier_key(int x10) {
    return format_fixed(static_cast<double>(x10) / 10.0, 1);
}

} // namespace detail

inline selector::SessionKey session_key_for_seed(std::uint64_t seed) {
    return {rnd::derive(seed, rnd::fnv1a("token-key-0")),
            rnd::derive(seed, rnd::fnv1a("token-key-1"))};
}

inline RunResult run(const Scenario& scenario) {
    using detail::ClassState;
    using detail::PendingAction;

    auto violations = scenario.validate();
    if (!violations.empty()) throw ScenarioValidationError(std::move(violations));

    const double dt_ms = scenario.sample_interval_ms;
    const double duration_ms = scenario.duration_s * 1e3;
    const std::int64_t ticks = static_cast<std::int64_t>(std::floor(duration_ms / dt_ms));

    // Per-concern stream seeds.
    const std::uint64_t seed = scenario.seed;
    const std::uint64_t link_seed = rnd::derive(seed, rnd::fnv1a("links"));
    const std::uint64_t rssi_seed = rnd::derive(seed, rnd::fnv1a("rssi-noise"));
    const std::uint64_t msg_seed = rnd::derive(seed, rnd::fnv1a("messages"));
    const std::uint64_t resync_seed = rnd::derive(seed, rnd::fnv1a("resync"));
    const std::uint64_t handover_seed = rnd::derive(seed, rnd::fnv1a("handover"));
    const std::uint64_t session_id = rnd::derive(seed, rnd::fnv1a("session"));
    const selector::SessionKey key = session_key_for_seed(seed);

    // Tier profiles with overrides applied.
    std::array<TierProfile, 3> profiles = {tierlink::default_profile(Tier::T1_TERRESTRIAL),
                                           tierlink::default_profile(Tier::T2_NTN),
                                           tierlink::default_profile(Tier::T3_D2C)};
    for (auto& p : profiles) {
        auto it = scenario.tier_overrides.find(p.tier);
        if (it == scenario.tier_overrides.end()) continue;
        const TierOverride& o = it->second;
        if (o.latency_ms) p.latency_ms = *o.latency_ms;
        if (o.throughput) p.throughput = *o.throughput;
        if (o.availability) p.availability = *o.availability;
        if (o.coverage_fraction) p.coverage_fraction = *o.coverage_fraction;
        if (o.power_multiplier) p.power_multiplier = *o.power_multiplier;
        p.validate();
    }

    std::vector<TrafficClass> classes;
    classes.reserve(scenario.workload.size());
    for (const auto& w : scenario.workload) classes.push_back(w.traffic_class);

    // Route segment boundaries (seconds).
    std::vector<double> seg_start_s(scenario.route.size(), 0.0);
    {
        double cum = 0.0;
        for (std::size_t i = 0; i < scenario.route.size(); ++i) {
            seg_start_s[i] = cum * scenario.duration_s;
            cum += scenario.route[i].fraction;
        }
    }

    RunResult result;
    EventLog& log = result.log;
    log.seed = seed;
    log.events.reserve(static_cast<std::size_t>(ticks) + 1024);
    log.samples.reserve(static_cast<std::size_t>(ticks));

    std::uint64_t seq = 0;
    const auto push_event = [&](Event e) {
        e.seq = seq++;
        log.events.push_back(e);
    };

    std::priority_queue<PendingAction, std::vector<PendingAction>, std::greater<PendingAction>>
        pending;
    std::uint64_t pending_order = 0;

    std::vector<ClassState> cls_state(classes.size());
    std::optional<selector::T1Status> prev_t1_status;
    std::int32_t handover_counter = 0;
    std::array<std::int64_t, 2> sat_epoch = {0, 0};  // T2, T3

    MetricsReport& rep = result.report;
    rep.seed = seed;
    rep.duration_s = scenario.duration_s;
    rep.sample_interval_ms = dt_ms;
    rep.ticks = ticks;
    rep.classes.resize(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        rep.classes[i].name = classes[i].name;
        rep.classes[i].histogram.assign(101, 0);
    }
    for (const char* t : {"T1", "T2", "T3"}) rep.tier_serving_ticks[t] = 0;
    double mc_aggregate_sum = 0.0;
    std::int64_t mc_in_band = 0;
    std::map<int, std::int64_t> energy_ticks_x10;

    const auto record_delivery = [&](const PendingAction& act) {
        Event e;
        e.t_ms = act.t_ms;
        e.kind = EventKind::MSG_DELIVERED;
        e.class_idx = act.class_idx;
        e.msg_idx = act.msg_idx;
        e.to_tier = act.tier;
        e.a = act.network_latency_ms;
        e.b = act.total_latency_ms;
        push_event(e);
        auto& cm = rep.classes[static_cast<std::size_t>(act.class_idx)];
        cm.delivered++;
        cm.total_latency_sum_ms += act.total_latency_ms;
        if (act.total_latency_ms <= classes[static_cast<std::size_t>(act.class_idx)].max_latency_ms)
            cm.delivered_within_max++;
        const int bin = act.total_latency_ms >= 1000.0
                            ? 100
                            : static_cast<int>(act.total_latency_ms / 10.0);
        cm.histogram[static_cast<std::size_t>(bin)]++;
        auto& ts = cm.per_tier[tierlink::tier_name(static_cast<Tier>(act.tier))];
        ts.delivered++;
        ts.network_latency_sum_ms += act.network_latency_ms;
    };

    const auto commit_handover_end = [&](const PendingAction& act) {
        Event e;
        e.t_ms = act.t_ms;
        e.kind = EventKind::HANDOVER_END;
        e.class_idx = act.class_idx;
        e.handover_id = act.handover_id;
        e.from_tier = act.from_tier;
        e.to_tier = act.to_tier;
        e.a = act.duration_ms;
        e.b = act.budget_ms;
        push_event(e);
        if (act.duration_ms > act.budget_ms) {
            Event v = e;
            v.kind = EventKind::FREEZE_VIOLATION;
            push_event(v);
            rep.freeze_violations++;
        }
        auto& cs = cls_state[static_cast<std::size_t>(act.class_idx)];
        const std::optional<Tier> from = cs.current;
        cs.current = static_cast<Tier>(act.to_tier);
        cs.frozen = false;
        Event a;
        a.t_ms = act.t_ms;
        a.kind = EventKind::ASSIGNMENT_CHANGE;
        a.class_idx = act.class_idx;
        a.from_tier = detail::tier_code(from);
        a.to_tier = act.to_tier;
        push_event(a);
    };

    const auto flush_pending = [&](double up_to_ms) {
        while (!pending.empty() && pending.top().t_ms <= up_to_ms) {
            const PendingAction act = pending.top();
            pending.pop();
            if (act.kind == PendingAction::Kind::HANDOVER_END) commit_handover_end(act);
            else record_delivery(act);
        }
    };

    // Sends one message: MSG_SENT now, then either a scheduled delivery or a
    // queue entry when the class is unserved.
    const auto send_message = [&](std::size_t ci, std::int64_t msg_idx, double nominal_ms,
                                  double now_ms) {
        auto& cs = cls_state[ci];
        auto& cm = rep.classes[ci];
        Event s;
        s.t_ms = now_ms;
        s.kind = EventKind::MSG_SENT;
        s.class_idx = static_cast<std::int32_t>(ci);
        s.msg_idx = msg_idx;
        s.to_tier = detail::tier_code(cs.current);
        push_event(s);
        cm.sent++;
        if (cs.current) {
            const Tier tier = *cs.current;
            Rng lat_rng(rnd::derive(msg_seed, static_cast<std::uint64_t>(ci),
                                    static_cast<std::uint64_t>(msg_idx)));
            Range range = tierlink::effective_latency(tier, scenario.variants);
            auto it = scenario.tier_overrides.find(tier);
            if (it != scenario.tier_overrides.end() && it->second.latency_ms)
                range = *it->second.latency_ms;
            const double draw = lat_rng.uniform(range);
            PendingAction d;
            d.t_ms = now_ms + draw;
            d.order = pending_order++;
            d.kind = PendingAction::Kind::DELIVERY;
            d.class_idx = static_cast<std::int32_t>(ci);
            d.msg_idx = msg_idx;
            d.tier = static_cast<std::int8_t>(tier);
            d.network_latency_ms = draw;
            d.total_latency_ms = (now_ms - nominal_ms) + draw;
            pending.push(d);
        } else {
            Event q;
            q.t_ms = now_ms;
            q.kind = EventKind::MSG_QUEUED;
            q.class_idx = static_cast<std::int32_t>(ci);
            q.msg_idx = msg_idx;
            push_event(q);
            cs.queue.push_back({msg_idx, nominal_ms});
        }
    };

    for (std::int64_t tick = 0; tick < ticks; ++tick) {
        const double t_ms = static_cast<double>(tick) * dt_ms;
        const double t_s = t_ms / 1e3;

        flush_pending(t_ms);

        // (a) zone lookup
        const std::size_t seg_idx = zone_at(scenario.route, t_s, scenario.duration_s);
        const ZoneSegment& seg = scenario.route[seg_idx];
        const double seg_len_s = seg.fraction * scenario.duration_s;
        const double zone_frac =
            seg_len_s <= 0.0 ? 0.0 : std::min(1.0, (t_s - seg_start_s[seg_idx]) / seg_len_s);

        // (b) link sampling, (c) terrestrial RSSI
        std::vector<tierlink::LinkInstance> links;
        links.reserve(5);
        SampleRecord rec;
        rec.zone = seg.zone;
        rec.zone_fraction = zone_frac;

        const auto rssi_base = tierlink::rssi_model(seg.zone, zone_frac);
        tierlink::LinkInstance t1 = tierlink::sample_link(
            profiles[0], scenario.variants, seg.t1_coverage && rssi_base.has_value(),
            rnd::derive(link_seed, static_cast<std::uint64_t>(tick), 0));
        if (t1.up && rssi_base) {
            Rng noise(rnd::derive(rssi_seed, static_cast<std::uint64_t>(tick)));
            t1.rssi_dbm = *rssi_base + noise.uniform(-kRssiNoiseDb, kRssiNoiseDb);
        }
        rec.t1 = {t1.up, t1.latency_ms, t1.throughput};
        rec.t1_rssi_present = t1.rssi_dbm.has_value();
        rec.t1_rssi_dbm = t1.rssi_dbm.value_or(0.0);
        links.push_back(t1);

        const int t2_visible =
            2 + static_cast<int>(rnd::derive(link_seed, static_cast<std::uint64_t>(tick), 4) & 1);
        rec.t2_visible = t2_visible;
        for (int slot = 0; slot < 3; ++slot) {
            tierlink::LinkInstance t2 = tierlink::sample_link(
                profiles[1], scenario.variants, seg.t2_coverage && slot < t2_visible,
                rnd::derive(link_seed, static_cast<std::uint64_t>(tick),
                            static_cast<std::uint64_t>(1 + slot)));
            rec.t2[static_cast<std::size_t>(slot)] = {t2.up, t2.latency_ms, t2.throughput};
            links.push_back(t2);
        }

        tierlink::LinkInstance t3 = tierlink::sample_link(
            profiles[2], scenario.variants, seg.t3_coverage,
            rnd::derive(link_seed, static_cast<std::uint64_t>(tick), 5));
        rec.t3 = {t3.up, t3.latency_ms, t3.throughput};
        links.push_back(t3);

        const std::int32_t sample_idx = static_cast<std::int32_t>(log.samples.size());
        log.samples.push_back(rec);
        Event se;
        se.t_ms = t_ms;
        se.kind = EventKind::SAMPLE;
        se.sample_idx = sample_idx;
        push_event(se);

        // (d) selector evaluation with hysteresis
        const selector::SelectorState state =
            selector::evaluate(links, classes, -110.0, prev_t1_status);
        prev_t1_status = state.t1_status;

        if (state.mc_group) {
            const double agg = selector::aggregate_mbps(*state.mc_group);
            if (rep.mc_groups == 0 || agg < rep.mc_aggregate_min_mbps)
                rep.mc_aggregate_min_mbps = agg;
            if (rep.mc_groups == 0 || agg > rep.mc_aggregate_max_mbps)
                rep.mc_aggregate_max_mbps = agg;
            rep.mc_groups++;
            mc_aggregate_sum += agg;
            if (agg >= 50.0 && agg <= 100.0) mc_in_band++;
        }

        // satellite pass rotation (drives within-tier handovers)
        const std::int64_t epoch = static_cast<std::int64_t>(std::floor(t_s / kSatellitePassS));
        const bool t2_rotated = tick > 0 && epoch != sat_epoch[0];
        const bool t3_rotated = tick > 0 && epoch != sat_epoch[1];
        sat_epoch = {epoch, epoch};

        // (e) transitions and handover admission/execution
        for (std::size_t ci = 0; ci < classes.size(); ++ci) {
            auto& cs = cls_state[ci];
            if (cs.frozen) continue;
            const auto& target = state.assignments[ci];

            const auto start_handover = [&](Tier from, Tier to, bool within) {
                const std::int32_t id = handover_counter++;
                const auto token = selector::issue_token(key, session_id, from, to, t_ms, kTokenTtlMs);
                const auto admit = selector::admit_handover(classes[ci], to, target.latency_ms,
                                                            token, key, t_ms, cs.frozen);
                if (!admit.admitted()) {
                    rep.handovers_rejected++;
                    return;
                }
                Rng base_rng(rnd::derive(handover_seed, static_cast<std::uint64_t>(id)));
                double duration = base_rng.uniform(30.0, 120.0);
                if (!within) {
                    // Re-sync cost of acquiring the target system.
                    const std::uint64_t rs = rnd::derive(resync_seed, static_cast<std::uint64_t>(id));
                    if (to == Tier::T2_NTN)
                        duration += radio::resync_latency(radio::System::NTN, true, rs).resync_ms;
                    else if (to == Tier::T3_D2C)
                        duration += radio::resync_latency(radio::System::D2C, false, rs).resync_ms;
                    else
                        duration += Rng(rnd::derive(rs, rnd::fnv1a("t1-attach"))).uniform(20.0, 50.0);
                }
                const double budget = selector::handover_budget_ms(from, to);
                Event h;
                h.t_ms = t_ms;
                h.kind = EventKind::HANDOVER_START;
                h.class_idx = static_cast<std::int32_t>(ci);
                h.handover_id = id;
                h.from_tier = static_cast<std::int8_t>(from);
                h.to_tier = static_cast<std::int8_t>(to);
                h.a = budget;
                h.tok_session = token.session_id;
                h.tok_issued_ms = token.issued_t_ms;
                h.tok_ttl_ms = token.ttl_ms;
                h.tok_tag = token.tag;
                push_event(h);
                (within ? rep.handovers_within_tier : rep.handovers_between_tier)++;
                cs.frozen = true;
                cs.freeze_start_ms = t_ms;
                cs.freeze_end_ms = t_ms + duration;
                PendingAction end;
                end.t_ms = t_ms + duration;
                end.order = pending_order++;
                end.kind = PendingAction::Kind::HANDOVER_END;
                end.class_idx = static_cast<std::int32_t>(ci);
                end.handover_id = id;
                end.from_tier = static_cast<std::int8_t>(from);
                end.to_tier = static_cast<std::int8_t>(to);
                end.duration_ms = duration;
                end.budget_ms = budget;
                pending.push(end);
            };

            if (target.tier && cs.current && *target.tier != *cs.current) {
                start_handover(*cs.current, *target.tier, false);
            } else if (target.tier && cs.current && *target.tier == *cs.current &&
                       ((*cs.current == Tier::T2_NTN && t2_rotated) ||
                        (*cs.current == Tier::T3_D2C && t3_rotated))) {
                start_handover(*cs.current, *target.tier, true);
            } else if (target.tier && !cs.current) {
                // Reconnection from UNSERVED: plain assignment, no handover.
                cs.current = target.tier;
                Event a;
                a.t_ms = t_ms;
                a.kind = EventKind::ASSIGNMENT_CHANGE;
                a.class_idx = static_cast<std::int32_t>(ci);
                a.from_tier = -1;
                a.to_tier = detail::tier_code(cs.current);
                push_event(a);
            } else if (!target.tier && cs.current) {
                const auto from = cs.current;
                cs.current = std::nullopt;
                Event a;
                a.t_ms = t_ms;
                a.kind = EventKind::ASSIGNMENT_CHANGE;
                a.class_idx = static_cast<std::int32_t>(ci);
                a.from_tier = detail::tier_code(from);
                a.to_tier = -1;
                push_event(a);
            }
        }

        // minimum-risk-manoeuvre monitoring (edge-triggered events)
        for (std::size_t ci = 0; ci < classes.size(); ++ci) {
            if (classes[ci].kind != ClassKind::LATENCY_CRITICAL) continue;
            const auto& a = state.assignments[ci];
            const bool mrm_now = !a.served() || a.latency_ms > a.max_latency_ms;
            auto& cs = cls_state[ci];
            if (mrm_now && !cs.mrm_active) {
                Event m;
                m.t_ms = t_ms;
                m.kind = EventKind::MRM;
                m.class_idx = static_cast<std::int32_t>(ci);
                push_event(m);
                rep.mrm_events++;
            }
            cs.mrm_active = mrm_now;
        }

        // (f) message routing
        for (std::size_t ci = 0; ci < classes.size(); ++ci) {
            auto& cs = cls_state[ci];
            const bool serviceable = !cs.frozen;

            if (serviceable && !cs.frozen_deferred.empty()) {
                for (const auto& m : cs.frozen_deferred)
                    send_message(ci, m.msg_idx, m.nominal_t_ms, t_ms);
                cs.frozen_deferred.clear();
            }
            if (serviceable && cs.current && !cs.queue.empty()) {
                for (const auto& m : cs.queue) {
                    Rng lat_rng(rnd::derive(msg_seed, static_cast<std::uint64_t>(ci),
                                            static_cast<std::uint64_t>(m.msg_idx)));
                    Range range = tierlink::effective_latency(*cs.current, scenario.variants);
                    auto it = scenario.tier_overrides.find(*cs.current);
                    if (it != scenario.tier_overrides.end() && it->second.latency_ms)
                        range = *it->second.latency_ms;
                    const double draw = lat_rng.uniform(range);
                    PendingAction d;
                    d.t_ms = t_ms + draw;
                    d.order = pending_order++;
                    d.kind = PendingAction::Kind::DELIVERY;
                    d.class_idx = static_cast<std::int32_t>(ci);
                    d.msg_idx = m.msg_idx;
                    d.tier = static_cast<std::int8_t>(*cs.current);
                    d.network_latency_ms = draw;
                    d.total_latency_ms = (t_ms - m.nominal_t_ms) + draw;
                    pending.push(d);
                }
                cs.queue.clear();
            }

            const double period = scenario.workload[ci].period_ms;
            while (cs.next_gen_ms <= t_ms + 1e-9) {
                const std::int64_t idx = cs.msg_counter++;
                const double nominal = cs.next_gen_ms;
                cs.next_gen_ms += period;
                rep.classes[ci].generated++;
                if (cs.frozen) cs.frozen_deferred.push_back({idx, nominal});
                else send_message(ci, idx, nominal, t_ms);
            }
        }

        // (g) energy accrual and serving-time accounting
        bool any_served = false;
        int mult_x10 = 10;  // idle baseline
        std::array<bool, 3> tier_active = {false, false, false};
        for (const auto& cs : cls_state) {
            if (!cs.current) continue;
            any_served = true;
            tier_active[static_cast<std::size_t>(*cs.current)] = true;
        }
        for (std::size_t ti = 0; ti < 3; ++ti) {
            if (!tier_active[ti]) continue;
            mult_x10 = std::max(
                mult_x10, static_cast<int>(std::lround(profiles[ti].power_multiplier.mid() * 10.0)));
        }
        energy_ticks_x10[mult_x10]++;
        rep.tick_multiplier_x10_sum += mult_x10;
        if (any_served) rep.served_ticks++;
        if (tier_active[0]) rep.tier_serving_ticks["T1"]++;
        if (tier_active[1]) rep.tier_serving_ticks["T2"]++;
        if (tier_active[2]) rep.tier_serving_ticks["T3"]++;
    }

    // Final flush: commit outstanding handovers and tail deliveries, then
    // emit deferred sends held by a freeze that outlived the run.
    flush_pending(std::numeric_limits<double>::infinity());
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        auto& cs = cls_state[ci];
        if (cs.frozen_deferred.empty()) continue;
        const double t_flush = std::max(duration_ms, cs.freeze_end_ms);
        for (const auto& m : cs.frozen_deferred) send_message(ci, m.msg_idx, m.nominal_t_ms, t_flush);
        cs.frozen_deferred.clear();
        flush_pending(std::numeric_limits<double>::infinity());
    }

    // finalize metrics
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        auto& cm = rep.classes[ci];
        cm.unresolved = static_cast<std::int64_t>(cls_state[ci].queue.size());
        cm.availability = cm.generated == 0
                              ? 0.0
                              : static_cast<double>(cm.delivered_within_max) /
                                    static_cast<double>(cm.generated);
    }
    for (const auto& [name, count] : rep.tier_serving_ticks) {
        rep.tier_serving_fraction[name] =
            rep.served_ticks == 0 ? 0.0
                                  : static_cast<double>(count) / static_cast<double>(rep.served_ticks);
    }
    rep.mc_aggregate_mean_mbps =
        rep.mc_groups == 0 ? 0.0 : mc_aggregate_sum / static_cast<double>(rep.mc_groups);
    rep.mc_fraction_in_50_100 =
        rep.mc_groups == 0 ? 0.0
                           : static_cast<double>(mc_in_band) / static_cast<double>(rep.mc_groups);
    for (const auto& [x10, count] : energy_ticks_x10)
        rep.energy_tick_counts[detail::multiplier_key(x10)] = count;
    rep.energy_units =
        static_cast<double>(rep.tick_multiplier_x10_sum) / 10.0 * (dt_ms / 1e3);

    return result;
}

// --- audit -------------------------------------------------------------------

struct AuditReport {
    std::vector<std::string> findings;
    bool ok() const { return findings.empty(); }
};

// Independent verification pass over an event log: freeze atomicity at the
// safety-decision (MSG_SENT) level, handover start/end pairing, token
// authenticity under the log's session key, and freeze-violation flags
// recomputed from event timestamps against the 150/500 ms budgets.
inline AuditReport audit(const EventLog& log) {
    AuditReport out;
    const selector::SessionKey key = session_key_for_seed(log.seed);

    struct Handover {
        const Event* start = nullptr;
        const Event* end = nullptr;
        bool violation_flagged = false;
    };
    std::map<std::int32_t, Handover> handovers;
    // Freeze intervals per class: [start, end)
    std::map<std::int32_t, std::vector<std::pair<double, double>>> freezes;

    for (const auto& e : log.events) {
        switch (e.kind) {
            case EventKind::HANDOVER_START: {
                auto& h = handovers[e.handover_id];
                if (h.start != nullptr)
                    out.findings.push_back("duplicate HANDOVER_START id=" +
                                           std::to_string(e.handover_id));
                h.start = &e;
                break;
            }
            case EventKind::HANDOVER_END: {
                auto& h = handovers[e.handover_id];
                if (h.end != nullptr)
                    out.findings.push_back("duplicate HANDOVER_END id=" +
                                           std::to_string(e.handover_id));
                h.end = &e;
                break;
            }
            case EventKind::FREEZE_VIOLATION:
                handovers[e.handover_id].violation_flagged = true;
                break;
            default:
                break;
        }
    }

    for (const auto& [id, h] : handovers) {
        if (h.start == nullptr) {
            out.findings.push_back("HANDOVER_END without START id=" + std::to_string(id));
            continue;
        }
        if (h.end == nullptr) {
            out.findings.push_back("HANDOVER_START without END id=" + std::to_string(id));
            continue;
        }
        freezes[h.start->class_idx].emplace_back(h.start->t_ms, h.end->t_ms);

        selector::HandoverToken token;
        token.session_id = h.start->tok_session;
        token.from_tier = static_cast<Tier>(h.start->from_tier);
        token.to_tier = static_cast<Tier>(h.start->to_tier);
        token.issued_t_ms = h.start->tok_issued_ms;
        token.ttl_ms = h.start->tok_ttl_ms;
        token.tag = h.start->tok_tag;
        if (selector::validate_token(token, key, h.start->t_ms) != selector::TokenStatus::VALID)
            out.findings.push_back("handover id=" + std::to_string(id) +
                                   " executed with an invalid token");

        const double recomputed = h.end->t_ms - h.start->t_ms;
        const double budget = h.start->a;
        const bool should_flag = recomputed > budget;
        if (should_flag != h.violation_flagged)
            out.findings.push_back(
                "handover id=" + std::to_string(id) + " freeze-violation flag mismatch (duration " +
                format_fixed(recomputed, 3) + " ms vs budget " + format_fixed(budget, 1) + " ms)");
    }

    for (const auto& e : log.events) {
        if (e.kind != EventKind::MSG_SENT) continue;
        auto it = freezes.find(e.class_idx);
        if (it == freezes.end()) continue;
        for (const auto& [start, end] : it->second) {
            if (e.t_ms >= start && e.t_ms < end) {
                out.findings.push_back("MSG_SENT for frozen class " + std::to_string(e.class_idx) +
                                       " at t=" + format_fixed(e.t_ms, 3) + " ms inside freeze [" +
                                       format_fixed(start, 3) + ", " + format_fixed(end, 3) + ")");
                break;
            }
        }
    }

    return out;
}

} // namespace trilink::simcore
