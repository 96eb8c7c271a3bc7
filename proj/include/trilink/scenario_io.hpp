#pragma once

// JSON ingestion and serialization for scenarios, metrics reports and event
// logs. Scenario parsing is strict: unknown keys are errors, and parse
// failures report the line and field. Report and log serialization is
// deterministic so identical runs are byte-identical on disk.

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "trilink/simcore.hpp"

namespace trilink::scenario_io {

using json = nlohmann::ordered_json;
using simcore::EventKind;
using tierlink::Tier;

struct ScenarioParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_keys(const json& obj, std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional, const std::string& where) {
    for (const char* k : required)
        if (!obj.contains(k))
            throw ScenarioParseError(where + ": missing required field '" + k + "'");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* k : required) known = known || key == k;
        for (const char* k : optional) known = known || key == k;
        if (!known) throw ScenarioParseError(where + ": unknown field '" + key + "'");
    }
}

inline tierlink::ZoneKind parse_zone(const std::string& s, const std::string& where) {
    if (s == "URBAN") return tierlink::ZoneKind::URBAN;
    if (s == "SUBURBAN") return tierlink::ZoneKind::SUBURBAN;
    if (s == "RURAL") return tierlink::ZoneKind::RURAL;
    if (s == "MARITIME") return tierlink::ZoneKind::MARITIME;
    throw ScenarioParseError(where + ": unknown zone '" + s + "'");
}

inline selector::ClassKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "LATENCY_CRITICAL") return selector::ClassKind::LATENCY_CRITICAL;
    if (s == "BANDWIDTH") return selector::ClassKind::BANDWIDTH;
    if (s == "EMERGENCY") return selector::ClassKind::EMERGENCY;
    throw ScenarioParseError(where + ": unknown class kind '" + s + "'");
}

inline std::string kind_name(selector::ClassKind k) {
    switch (k) {
        case selector::ClassKind::LATENCY_CRITICAL: return "LATENCY_CRITICAL";
        case selector::ClassKind::BANDWIDTH:        return "BANDWIDTH";
        case selector::ClassKind::EMERGENCY:        return "EMERGENCY";
    }
    return "?";
}

inline Range parse_range(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw ScenarioParseError(where + ": expected [lo, hi]");
    return Range(j[0].get<double>(), j[1].get<double>());
}

inline Tier parse_tier(const std::string& s, const std::string& where) {
    if (s == "T1") return Tier::T1_TERRESTRIAL;
    if (s == "T2") return Tier::T2_NTN;
    if (s == "T3") return Tier::T3_D2C;
    throw ScenarioParseError(where + ": unknown tier '" + s + "'");
}

} // namespace detail

inline simcore::Scenario scenario_from_json(const json& j) {
    using namespace detail;
    require_keys(j, {"seed", "duration_s", "route", "workload"},
                 {"variants", "tier_overrides", "sample_interval_ms"}, "scenario");

    simcore::Scenario sc;
    sc.seed = j.at("seed").get<std::uint64_t>();
    sc.duration_s = j.at("duration_s").get<double>();
    if (j.contains("sample_interval_ms"))
        sc.sample_interval_ms = j.at("sample_interval_ms").get<double>();

    std::size_t i = 0;
    for (const auto& seg_j : j.at("route")) {
        const std::string where = "route[" + std::to_string(i++) + "]";
        require_keys(seg_j, {"zone", "fraction", "t1", "t2", "t3"}, {}, where);
        simcore::ZoneSegment seg;
        seg.zone = parse_zone(seg_j.at("zone").get<std::string>(), where);
        seg.fraction = seg_j.at("fraction").get<double>();
        seg.t1_coverage = seg_j.at("t1").get<bool>();
        seg.t2_coverage = seg_j.at("t2").get<bool>();
        seg.t3_coverage = seg_j.at("t3").get<bool>();
        sc.route.push_back(seg);
    }

    i = 0;
    for (const auto& w_j : j.at("workload")) {
        const std::string where = "workload[" + std::to_string(i++) + "]";
        require_keys(w_j, {"class", "period_ms"}, {"size_bytes"}, where);
        const json& c_j = w_j.at("class");
        require_keys(c_j, {"name", "kind", "max_latency_ms", "min_throughput"}, {}, where + ".class");
        simcore::WorkloadItem w;
        w.traffic_class.name = c_j.at("name").get<std::string>();
        w.traffic_class.kind = parse_kind(c_j.at("kind").get<std::string>(), where + ".class");
        w.traffic_class.max_latency_ms = c_j.at("max_latency_ms").get<double>();
        w.traffic_class.min_throughput = c_j.at("min_throughput").get<double>();
        w.period_ms = w_j.at("period_ms").get<double>();
        if (w_j.contains("size_bytes")) w.size_bytes = w_j.at("size_bytes").get<double>();
        sc.workload.push_back(std::move(w));
    }

    if (j.contains("variants")) {
        const json& v = j.at("variants");
        require_keys(v, {}, {"d2c_routing", "ntn_payload"}, "variants");
        if (v.contains("d2c_routing")) {
            const std::string s = v.at("d2c_routing").get<std::string>();
            if (s == "GATEWAY") sc.variants.d2c_routing = tierlink::D2cRouting::GATEWAY;
            else if (s == "ISL") sc.variants.d2c_routing = tierlink::D2cRouting::ISL;
            else throw ScenarioParseError("variants: unknown d2c_routing '" + s + "'");
        }
        if (v.contains("ntn_payload")) {
            const std::string s = v.at("ntn_payload").get<std::string>();
            if (s == "TRANSPARENT") sc.variants.ntn_payload = tierlink::NtnPayload::TRANSPARENT;
            else if (s == "REGENERATIVE_ISL")
                sc.variants.ntn_payload = tierlink::NtnPayload::REGENERATIVE_ISL;
            else throw ScenarioParseError("variants: unknown ntn_payload '" + s + "'");
        }
    }

    if (j.contains("tier_overrides")) {
        for (const auto& [tier_key, o_j] : j.at("tier_overrides").items()) {
            const Tier tier = detail::parse_tier(tier_key, "tier_overrides");
            const std::string where = "tier_overrides." + tier_key;
            require_keys(o_j, {},
                         {"latency_ms", "throughput", "availability", "coverage_fraction",
                          "power_multiplier"},
                         where);
            simcore::TierOverride o;
            if (o_j.contains("latency_ms")) o.latency_ms = parse_range(o_j.at("latency_ms"), where);
            if (o_j.contains("throughput")) o.throughput = parse_range(o_j.at("throughput"), where);
            if (o_j.contains("availability")) o.availability = o_j.at("availability").get<double>();
            if (o_j.contains("coverage_fraction"))
                o.coverage_fraction = o_j.at("coverage_fraction").get<double>();
            if (o_j.contains("power_multiplier"))
                o.power_multiplier = parse_range(o_j.at("power_multiplier"), where);
            sc.tier_overrides[tier] = o;
        }
    }

    return sc;
}

inline simcore::Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Recover the line number from the byte offset for the error message.
        std::size_t line = 1;
        for (std::size_t k = 0; k < e.byte && k < text.size(); ++k)
            if (text[k] == '\n') ++line;
        throw ScenarioParseError("scenario parse error at line " + std::to_string(line) + ": " +
                                 e.what());
    }
    return scenario_from_json(j);
}

inline simcore::Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioParseError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

inline json scenario_to_json(const simcore::Scenario& sc) {
    json j;
    j["seed"] = sc.seed;
    j["duration_s"] = sc.duration_s;
    j["route"] = json::array();
    for (const auto& seg : sc.route) {
        json s;
        s["zone"] = tierlink::zone_name(seg.zone);
        s["fraction"] = seg.fraction;
        s["t1"] = seg.t1_coverage;
        s["t2"] = seg.t2_coverage;
        s["t3"] = seg.t3_coverage;
        j["route"].push_back(s);
    }
    j["workload"] = json::array();
    for (const auto& w : sc.workload) {
        json c;
        c["name"] = w.traffic_class.name;
        c["kind"] = detail::kind_name(w.traffic_class.kind);
        c["max_latency_ms"] = w.traffic_class.max_latency_ms;
        c["min_throughput"] = w.traffic_class.min_throughput;
        json item;
        item["class"] = c;
        item["period_ms"] = w.period_ms;
        item["size_bytes"] = w.size_bytes;
        j["workload"].push_back(item);
    }
    j["variants"] = {
        {"d2c_routing",
         sc.variants.d2c_routing == tierlink::D2cRouting::GATEWAY ? "GATEWAY" : "ISL"},
        {"ntn_payload", sc.variants.ntn_payload == tierlink::NtnPayload::TRANSPARENT
                            ? "TRANSPARENT"
                            : "REGENERATIVE_ISL"}};
    if (!sc.tier_overrides.empty()) {
        json o_all;
        for (const auto& [tier, o] : sc.tier_overrides) {
            json o_j;
            if (o.latency_ms) o_j["latency_ms"] = {o.latency_ms->lo, o.latency_ms->hi};
            if (o.throughput) o_j["throughput"] = {o.throughput->lo, o.throughput->hi};
            if (o.availability) o_j["availability"] = *o.availability;
            if (o.coverage_fraction) o_j["coverage_fraction"] = *o.coverage_fraction;
            if (o.power_multiplier)
                o_j["power_multiplier"] = {o.power_multiplier->lo, o.power_multiplier->hi};
            o_all[tierlink::tier_name(tier)] = o_j;
        }
        j["tier_overrides"] = o_all;
    }
    j["sample_interval_ms"] = sc.sample_interval_ms;
    return j;
}

inline json report_to_json(const simcore::MetricsReport& rep) {
    json j;
    j["seed"] = rep.seed;
    j["duration_s"] = rep.duration_s;
    j["sample_interval_ms"] = rep.sample_interval_ms;
    j["ticks"] = rep.ticks;
    j["served_ticks"] = rep.served_ticks;
    json tiers;
    for (const auto& [name, count] : rep.tier_serving_ticks) {
        tiers[name] = {{"serving_ticks", count},
                       {"fraction_of_served", rep.tier_serving_fraction.at(name)}};
    }
    j["tiers"] = tiers;
    j["classes"] = json::array();
    for (const auto& c : rep.classes) {
        json cj;
        cj["name"] = c.name;
        cj["generated"] = c.generated;
        cj["sent"] = c.sent;
        cj["delivered"] = c.delivered;
        cj["delivered_within_max"] = c.delivered_within_max;
        cj["unresolved"] = c.unresolved;
        cj["availability"] = c.availability;
        cj["mean_total_latency_ms"] = c.mean_total_latency_ms();
        json hj;
        hj["bin_ms"] = 10;
        hj["counts"] = c.histogram;
        cj["latency_histogram"] = hj;
        json per_tier;
        for (const auto& [tier, st] : c.per_tier) {
            per_tier[tier] = {{"delivered", st.delivered},
                              {"mean_network_latency_ms", st.mean_network_latency_ms()}};
        }
        cj["per_tier"] = per_tier;
        j["classes"].push_back(cj);
    }
    j["handovers"] = {{"within_tier", rep.handovers_within_tier},
                      {"between_tier", rep.handovers_between_tier},
                      {"rejected", rep.handovers_rejected}};
    j["freeze_violations"] = rep.freeze_violations;
    j["mrm_events"] = rep.mrm_events;
    j["multi_connectivity"] = {{"groups", rep.mc_groups},
                               {"aggregate_mbps_min", rep.mc_aggregate_min_mbps},
                               {"aggregate_mbps_max", rep.mc_aggregate_max_mbps},
                               {"aggregate_mbps_mean", rep.mc_aggregate_mean_mbps},
                               {"fraction_in_50_100", rep.mc_fraction_in_50_100}};
    j["energy"] = {{"tick_counts", rep.energy_tick_counts},
                   {"tick_multiplier_x10_sum", rep.tick_multiplier_x10_sum},
                   {"units", rep.energy_units}};
    return j;
}

// Flat key,value CSV rendering of the report (stable ordering).
inline std::string report_to_csv(const simcore::MetricsReport& rep) {
    std::ostringstream out;
    out << "key,value\n";
    const json j = report_to_json(rep);
    const std::function<void(const json&, const std::string&)> walk =
        [&](const json& node, const std::string& prefix) {
            if (node.is_object()) {
                for (const auto& [k, v] : node.items())
                    walk(v, prefix.empty() ? k : prefix + "." + k);
            } else if (node.is_array()) {
                std::size_t i = 0;
                for (const auto& v : node) walk(v, prefix + "[" + std::to_string(i++) + "]");
            } else {
                out << prefix << "," << node.dump() << "\n";
            }
        };
    walk(j, "");
    return out.str();
}

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::SAMPLE:            return "SAMPLE";
        case EventKind::ASSIGNMENT_CHANGE: return "ASSIGNMENT_CHANGE";
        case EventKind::HANDOVER_START:    return "HANDOVER_START";
        case EventKind::HANDOVER_END:      return "HANDOVER_END";
        case EventKind::FREEZE_VIOLATION:  return "FREEZE_VIOLATION";
        case EventKind::MRM:               return "MRM";
        case EventKind::MSG_SENT:          return "MSG_SENT";
        case EventKind::MSG_DELIVERED:     return "MSG_DELIVERED";
        case EventKind::MSG_QUEUED:        return "MSG_QUEUED";
    }
    return "?";
}

inline std::string tier_code_name(std::int8_t code) {
    if (code < 0) return "UNSERVED";
    return tierlink::tier_name(static_cast<Tier>(code));
}

// Newline-delimited structured records, one JSON object per event.
inline std::string log_to_ndjson(const simcore::EventLog& log) {
    std::ostringstream out;
    {
        json header;
        header["seed"] = log.seed;
        header["events"] = log.events.size();
        out << header.dump() << "\n";
    }
    for (const auto& e : log.events) {
        json j;
        j["t_ms"] = e.t_ms;
        j["seq"] = e.seq;
        j["kind"] = event_kind_name(e.kind);
        switch (e.kind) {
            case EventKind::SAMPLE: {
                const auto& s = log.samples[static_cast<std::size_t>(e.sample_idx)];
                j["zone"] = tierlink::zone_name(s.zone);
                j["zone_fraction"] = s.zone_fraction;
                json t1 = {{"up", s.t1.up},
                           {"latency_ms", s.t1.latency_ms},
                           {"throughput", s.t1.throughput}};
                if (s.t1_rssi_present) t1["rssi_dbm"] = s.t1_rssi_dbm;
                j["t1"] = t1;
                json t2 = json::array();
                for (int i = 0; i < s.t2_visible; ++i) {
                    const auto& l = s.t2[static_cast<std::size_t>(i)];
                    t2.push_back({{"up", l.up},
                                  {"latency_ms", l.latency_ms},
                                  {"throughput", l.throughput}});
                }
                j["t2"] = t2;
                j["t3"] = {{"up", s.t3.up},
                           {"latency_ms", s.t3.latency_ms},
                           {"throughput", s.t3.throughput}};
                break;
            }
            case EventKind::ASSIGNMENT_CHANGE:
                j["class"] = e.class_idx;
                j["from"] = tier_code_name(e.from_tier);
                j["to"] = tier_code_name(e.to_tier);
                break;
            case EventKind::HANDOVER_START:
                j["class"] = e.class_idx;
                j["handover_id"] = e.handover_id;
                j["from"] = tier_code_name(e.from_tier);
                j["to"] = tier_code_name(e.to_tier);
                j["budget_ms"] = e.a;
                j["token"] = {{"session", e.tok_session},
                              {"issued_t_ms", e.tok_issued_ms},
                              {"ttl_ms", e.tok_ttl_ms},
                              {"tag", e.tok_tag}};
                break;
            case EventKind::HANDOVER_END:
            case EventKind::FREEZE_VIOLATION:
                j["class"] = e.class_idx;
                j["handover_id"] = e.handover_id;
                j["duration_ms"] = e.a;
                j["budget_ms"] = e.b;
                break;
            case EventKind::MRM:
                j["class"] = e.class_idx;
                break;
            case EventKind::MSG_SENT:
                j["class"] = e.class_idx;
                j["msg"] = e.msg_idx;
                j["tier"] = tier_code_name(e.to_tier);
                break;
            case EventKind::MSG_DELIVERED:
                j["class"] = e.class_idx;
                j["msg"] = e.msg_idx;
                j["tier"] = tier_code_name(e.to_tier);
                j["network_latency_ms"] = e.a;
                j["total_latency_ms"] = e.b;
                break;
            case EventKind::MSG_QUEUED:
                j["class"] = e.class_idx;
                j["msg"] = e.msg_idx;
                break;
        }
        out << j.dump() << "\n";
    }
    return out.str();
}

} // namespace trilink::scenario_io
