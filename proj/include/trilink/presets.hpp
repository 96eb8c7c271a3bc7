#pragma once

// Bundled scenario presets. These are fixed fixtures: the corridor drive
// crosses all four zone kinds in one hour, the urban and maritime scenarios
// pin down the single-zone extremes.

#include <stdexcept>
#include <string>
#include <vector>

#include "trilink/simcore.hpp"

namespace trilink::presets {

inline std::vector<simcore::WorkloadItem> standard_workload() {
    using selector::ClassKind;
    simcore::WorkloadItem safety;
    safety.traffic_class = {"safety", ClassKind::LATENCY_CRITICAL, 20.0, 1.0};
    safety.period_ms = 500.0;
    safety.size_bytes = 200.0;

    simcore::WorkloadItem maps;
    maps.traffic_class = {"map-updates", ClassKind::BANDWIDTH, 100.0, 5.0};
    maps.period_ms = 500.0;
    maps.size_bytes = 50000.0;

    simcore::WorkloadItem sos;
    sos.traffic_class = {"sos", ClassKind::EMERGENCY, 300.0, 0.5};
    sos.period_ms = 1000.0;
    sos.size_bytes = 100.0;

    return {safety, maps, sos};
}

inline simcore::Scenario corridor() {
    simcore::Scenario sc;
    sc.seed = 42;
    sc.duration_s = 3600.0;
    sc.route = {
        {tierlink::ZoneKind::URBAN, 0.3, true, true, true},
        {tierlink::ZoneKind::SUBURBAN, 0.2, true, true, true},
        {tierlink::ZoneKind::RURAL, 0.3, false, true, true},
        {tierlink::ZoneKind::MARITIME, 0.2, false, false, true},
    };
    sc.workload = standard_workload();
    return sc;
}

inline simcore::Scenario urban() {
    simcore::Scenario sc;
    sc.seed = 42;
    sc.duration_s = 3600.0;
    sc.route = {{tierlink::ZoneKind::URBAN, 1.0, true, true, true}};
    sc.workload = standard_workload();
    return sc;
}

inline simcore::Scenario maritime() {
    simcore::Scenario sc;
    sc.seed = 42;
    sc.duration_s = 3600.0;
    sc.route = {{tierlink::ZoneKind::MARITIME, 1.0, false, false, true}};
    sc.workload = standard_workload();
    return sc;
}

inline simcore::Scenario scenario(const std::string& name) {
    if (name == "corridor") return corridor();
    if (name == "urban") return urban();
    if (name == "maritime") return maritime();
    throw std::invalid_argument("unknown scenario preset: " + name);
}

inline std::vector<std::string> scenario_names() { return {"corridor", "urban", "maritime"}; }

} // namespace trilink::presets
