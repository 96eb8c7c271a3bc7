#pragma once

// Command-line front end: doppler profiling, link-budget comparison,
// scenario simulation, and variant comparison. Exit codes are a stable
// contract: 0 success, 1 usage, 2 validation (bad inputs or scenario), and
// 3 audit failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "trilink/linkbudget.hpp"
#include "trilink/presets.hpp"
#include "trilink/radio.hpp"
#include "trilink/scenario_io.hpp"

namespace trilink::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAudit = 3;

namespace detail {

inline void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

} // namespace detail

// --- doppler -----------------------------------------------------------------

struct DopplerOptions {
    double fc_ghz = 1.6;
    double altitude_km = 500.0;
    double duration_s = 600.0;
    double step_s = 1.0;
    double max_elevation_deg = 90.0;
    std::optional<double> v_kms;  // Doppler-velocity override (geometry keeps the orbital value)
    std::string out = "-";
};

// CSV profile of one pass, centered on culmination. Rows outside the
// visibility window are omitted and counted in the footer; the footer also
// carries the theta=0 bound f_c*v/c, which no physical pass reaches (the
// line of sight is never parallel to the velocity vector).
inline std::string doppler_csv(const DopplerOptions& opt) {
    const geometry::OrbitConfig orbit(opt.altitude_km, opt.max_elevation_deg);
    const radio::CarrierConfig carrier(opt.fc_ghz * 1e9);
    if (!(opt.step_s > 0.0)) throw std::domain_error("doppler: step_s must be > 0");
    if (!(opt.duration_s > 0.0)) throw std::domain_error("doppler: duration_s must be > 0");

    const double v_actual = geometry::orbital_velocity_kms(orbit);
    const double v_used = opt.v_kms.value_or(v_actual);
    const double half = geometry::half_window_s(orbit);

    const auto shift_at = [&](double t) {
        const auto s = geometry::pass_geometry(orbit, t);
        const double cos_theta = -s.range_rate_kms / v_actual;
        return carrier.f_c_hz * (v_used * 1e3) * cos_theta / carrier.c_ms;
    };
    const auto rate_at = [&](double t) {
        // Stencil clamped inside the window near the pass edges.
        const double h = 0.1;
        const double t1 = std::max(t - h, -half + 1e-9);
        const double t2 = std::min(t + h, half - 1e-9);
        return (shift_at(t2) - shift_at(t1)) / (t2 - t1);
    };

    std::ostringstream out;
    out << "t_s,elevation_deg,slant_range_km,doppler_hz,doppler_rate_hz_s,ta_ms,ta_rate_us_s\n";
    std::int64_t omitted = 0;
    const std::int64_t steps = static_cast<std::int64_t>(std::floor(opt.duration_s / opt.step_s + 1e-9));
    for (std::int64_t k = 0; k <= steps; ++k) {
        const double t = -opt.duration_s / 2.0 + static_cast<double>(k) * opt.step_s;
        if (std::abs(t) > half) {
            ++omitted;
            continue;
        }
        const auto s = geometry::pass_geometry(orbit, t);
        const auto ta = radio::timing_advance(s);
        out << format_fixed(t, 3) << "," << format_fixed(s.elevation_deg, 3) << ","
            << format_fixed(s.slant_range_km, 3) << "," << format_fixed(shift_at(t), 1) << ","
            << format_fixed(rate_at(t), 2) << "," << format_fixed(ta.ta_ms(), 4) << ","
            << format_fixed(ta.ta_rate_us_per_s(), 2) << "\n";
    }
    out << "# out_of_window_rows," << omitted << "\n";
    out << "# eq1_theta0_bound_hz," << format_fixed(carrier.f_c_hz * (v_used * 1e3) / carrier.c_ms, 1)
        << "\n";
    return out.str();
}

inline int cmd_doppler(const DopplerOptions& opt) {
    try {
        detail::write_output(opt.out, doppler_csv(opt));
    } catch (const std::exception& e) {
        std::cerr << "doppler: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

// --- linkbudget --------------------------------------------------------------

struct LinkbudgetOptions {
    std::string preset = "table4";
    std::optional<std::string> inputs_path;  // explicit inputs JSON, overrides the preset
    bool fspl_computed = false;
    std::string out = "-";
    std::string format = "csv";
};

namespace detail {

inline linkbudget::BudgetInput budget_input_from_json(const nlohmann::ordered_json& j,
                                                      const std::string& where) {
    linkbudget::BudgetInput in;
    const std::vector<std::string> known = {"eirp_dbw",     "path_loss_db",    "rx_gain_dbi",
                                            "noise_dbw",    "tx_power_dbm",    "sat_rx_gain_dbi",
                                            "waveform_adjust_db", "required_cnr_db"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const auto& k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument(where + ": unknown field '" + key + "'");
    }
    for (const char* k : {"eirp_dbw", "path_loss_db", "rx_gain_dbi", "noise_dbw", "tx_power_dbm",
                          "sat_rx_gain_dbi"})
        if (!j.contains(k))
            throw std::invalid_argument(where + ": incomplete explicit inputs, missing '" +
                                        std::string(k) + "'");
    in.eirp_dbw = j.at("eirp_dbw").get<double>();
    in.path_loss_db = j.at("path_loss_db").get<double>();
    in.rx_gain_dbi = j.at("rx_gain_dbi").get<double>();
    in.noise.noise_dbw = j.at("noise_dbw").get<double>();
    in.tx_power_dbm = j.at("tx_power_dbm").get<double>();
    in.sat_rx_gain_dbi = j.at("sat_rx_gain_dbi").get<double>();
    if (j.contains("waveform_adjust_db")) in.waveform_adjust_db = j.at("waveform_adjust_db").get<double>();
    if (j.contains("required_cnr_db")) in.required_cnr_db = j.at("required_cnr_db").get<double>();
    return in;
}

} // namespace detail

// Full two-system budget table (both directions) with deltas, one decimal.
inline std::string linkbudget_table(const linkbudget::BudgetInput& d2c_base,
                                    const linkbudget::BudgetInput& ntn_base, bool fspl_computed,
                                    const std::string& format) {
    linkbudget::BudgetInput d2c = d2c_base;
    linkbudget::BudgetInput ntn = ntn_base;
    double computed_fspl = 0.0;
    if (fspl_computed) {
        computed_fspl = linkbudget::fspl_db(500.0, 1.6e9);
        d2c.path_loss_db = -computed_fspl;
        ntn.path_loss_db = -computed_fspl;
    }

    auto down_d2c = d2c, down_ntn = ntn, up_d2c = d2c, up_ntn = ntn;
    down_d2c.direction = down_ntn.direction = linkbudget::Direction::DOWNLINK;
    up_d2c.direction = up_ntn.direction = linkbudget::Direction::UPLINK;
    const auto down = linkbudget::compare_systems(down_d2c, down_ntn);
    const auto up = linkbudget::compare_systems(up_d2c, up_ntn);

    std::vector<linkbudget::ComparisonRow> rows;
    rows.push_back(down.row("eirp_dbw"));
    rows.push_back(down.row("path_loss_db"));
    rows.push_back(down.row("ue_antenna_gain_dbi"));
    rows.push_back(down.row("received_power_dbw"));
    rows.push_back(down.row("noise_power_dbw"));
    rows.push_back(down.row("downlink_cnr_db"));
    rows.push_back(up.row("ue_tx_power_dbm"));
    rows.push_back(up.row("uplink_cnr_db"));
    rows.push_back(up.row("uplink_margin_db"));

    if (format == "structured") {
        nlohmann::ordered_json j;
        for (const auto& r : rows)
            j["rows"].push_back(
                {{"parameter", r.name}, {"d2c", r.d2c}, {"ntn", r.ntn}, {"delta", r.delta()}});
        if (fspl_computed)
            j["note"] = "computed FSPL at 500 km / 1.6 GHz is " + format_fixed(computed_fspl, 1) +
                        " dB; the reference table overrides it to " +
                        format_fixed(-d2c_base.path_loss_db, 1) + " dB (delta " +
                        format_fixed(-d2c_base.path_loss_db - computed_fspl, 1) + " dB)";
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    out << "parameter,d2c,ntn,delta\n";
    for (const auto& r : rows)
        out << r.name << "," << format_fixed(r.d2c, 1) << "," << format_fixed(r.ntn, 1) << ","
            << format_fixed(r.delta(), 1) << "\n";
    if (fspl_computed) {
        out << "# note,computed FSPL at 500 km / 1.6 GHz is " << format_fixed(computed_fspl, 1)
            << " dB; the reference table overrides it to "
            << format_fixed(-d2c_base.path_loss_db, 1) << " dB (delta "
            << format_fixed(-d2c_base.path_loss_db - computed_fspl, 1) << " dB)\n";
    }
    return out.str();
}

inline int cmd_linkbudget(const LinkbudgetOptions& opt) {
    try {
        linkbudget::BudgetInput d2c, ntn;
        if (opt.inputs_path) {
            std::ifstream in(*opt.inputs_path);
            if (!in) throw std::invalid_argument("cannot open inputs file: " + *opt.inputs_path);
            nlohmann::ordered_json j = nlohmann::ordered_json::parse(in);
            if (!j.contains("d2c") || !j.contains("ntn"))
                throw std::invalid_argument("inputs file must carry 'd2c' and 'ntn' objects");
            d2c = detail::budget_input_from_json(j.at("d2c"), "d2c");
            ntn = detail::budget_input_from_json(j.at("ntn"), "ntn");
        } else if (opt.preset == "table4") {
            d2c = linkbudget::preset_input("table4-d2c", linkbudget::Direction::DOWNLINK);
            ntn = linkbudget::preset_input("table4-ntn", linkbudget::Direction::DOWNLINK);
        } else {
            std::cerr << "linkbudget: unknown preset '" << opt.preset << "'\n";
            return kExitUsage;
        }
        detail::write_output(opt.out, linkbudget_table(d2c, ntn, opt.fspl_computed, opt.format));
    } catch (const std::exception& e) {
        std::cerr << "linkbudget: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

// --- simulate ----------------------------------------------------------------

struct SimulateOptions {
    std::optional<std::string> scenario_path;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::string out = "-";
    std::optional<std::string> log_path;
    std::string format = "structured";
};

namespace detail {

inline simcore::Scenario resolve_scenario(const std::optional<std::string>& path,
                                          const std::optional<std::string>& preset,
                                          const std::optional<std::uint64_t>& seed) {
    simcore::Scenario sc;
    if (path) sc = scenario_io::load_scenario(*path);
    else if (preset) sc = presets::scenario(*preset);
    else throw std::invalid_argument("provide --scenario or --preset");
    if (seed) sc.seed = *seed;  // override wins over the scenario seed
    return sc;
}

inline std::string render_report(const simcore::MetricsReport& rep, const std::string& format) {
    if (format == "csv") return scenario_io::report_to_csv(rep);
    return scenario_io::report_to_json(rep).dump(2) + "\n";
}

} // namespace detail

inline int cmd_simulate(const SimulateOptions& opt) {
    simcore::RunResult result;
    try {
        const simcore::Scenario sc = detail::resolve_scenario(opt.scenario_path, opt.preset, opt.seed);
        result = simcore::run(sc);
    } catch (const simcore::ScenarioValidationError& e) {
        std::cerr << "simulate: scenario invalid:\n";
        for (const auto& v : e.violations) std::cerr << "  - " << v << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        detail::write_output(opt.out, detail::render_report(result.report, opt.format));
        if (opt.log_path) detail::write_output(*opt.log_path, scenario_io::log_to_ndjson(result.log));
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitValidation;
    }

    const simcore::AuditReport audit = simcore::audit(result.log);
    if (!audit.ok()) {
        std::cerr << "simulate: audit failed:\n";
        for (const auto& f : audit.findings) std::cerr << "  - " << f << "\n";
        return kExitAudit;
    }
    return kExitOk;
}

// --- compare -----------------------------------------------------------------

struct CompareOptions {
    std::optional<std::string> scenario_path;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::string axis = "ntn-payload";
    std::string out = "-";
    std::string format = "csv";
};

namespace detail {

inline double tier_mean_network_latency(const simcore::MetricsReport& rep, const std::string& tier) {
    std::int64_t delivered = 0;
    double sum = 0.0;
    for (const auto& c : rep.classes) {
        auto it = c.per_tier.find(tier);
        if (it == c.per_tier.end()) continue;
        delivered += it->second.delivered;
        sum += it->second.network_latency_sum_ms;
    }
    return delivered == 0 ? 0.0 : sum / static_cast<double>(delivered);
}

inline std::int64_t tier_delivered(const simcore::MetricsReport& rep, const std::string& tier) {
    std::int64_t delivered = 0;
    for (const auto& c : rep.classes) {
        auto it = c.per_tier.find(tier);
        if (it != c.per_tier.end()) delivered += it->second.delivered;
    }
    return delivered;
}

inline std::int64_t total_generated(const simcore::MetricsReport& rep) {
    std::int64_t n = 0;
    for (const auto& c : rep.classes) n += c.generated;
    return n;
}

inline std::int64_t total_delivered(const simcore::MetricsReport& rep) {
    std::int64_t n = 0;
    for (const auto& c : rep.classes) n += c.delivered;
    return n;
}

} // namespace detail

inline std::string compare_table(const std::vector<std::pair<std::string, simcore::MetricsReport>>& runs,
                                 const std::string& format) {
    struct Row {
        std::string metric;
        std::vector<std::string> values;
    };
    std::vector<Row> rows;
    const auto add = [&](const std::string& metric, auto&& fn) {
        Row r{metric, {}};
        for (const auto& [_, rep] : runs) r.values.push_back(fn(rep));
        rows.push_back(std::move(r));
    };
    using simcore::MetricsReport;
    add("generated", [](const MetricsReport& r) { return std::to_string(detail::total_generated(r)); });
    add("delivered", [](const MetricsReport& r) { return std::to_string(detail::total_delivered(r)); });
    add("delivered_fraction", [](const MetricsReport& r) {
        const auto gen = detail::total_generated(r);
        return format_fixed(gen == 0 ? 0.0 : static_cast<double>(detail::total_delivered(r)) /
                                                 static_cast<double>(gen),
                            6);
    });
    for (const char* tier : {"T1", "T2", "T3"}) {
        add(std::string(tier) + "_delivered",
            [tier](const MetricsReport& r) { return std::to_string(detail::tier_delivered(r, tier)); });
        add(std::string(tier) + "_mean_network_latency_ms", [tier](const MetricsReport& r) {
            return format_fixed(detail::tier_mean_network_latency(r, tier), 3);
        });
    }
    add("handovers_within_tier",
        [](const MetricsReport& r) { return std::to_string(r.handovers_within_tier); });
    add("handovers_between_tier",
        [](const MetricsReport& r) { return std::to_string(r.handovers_between_tier); });
    add("freeze_violations", [](const MetricsReport& r) { return std::to_string(r.freeze_violations); });
    add("mrm_events", [](const MetricsReport& r) { return std::to_string(r.mrm_events); });
    add("mc_fraction_in_50_100",
        [](const MetricsReport& r) { return format_fixed(r.mc_fraction_in_50_100, 6); });
    add("energy_units", [](const MetricsReport& r) { return format_fixed(r.energy_units, 3); });

    if (format == "structured") {
        nlohmann::ordered_json j;
        j["variants"] = nlohmann::ordered_json::array();
        for (const auto& [name, _] : runs) j["variants"].push_back(name);
        for (const auto& r : rows) {
            nlohmann::ordered_json vals = nlohmann::ordered_json::array();
            for (const auto& v : r.values) vals.push_back(v);
            j["metrics"][r.metric] = vals;
        }
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    out << "metric";
    for (const auto& [name, _] : runs) out << "," << name;
    out << "\n";
    for (const auto& r : rows) {
        out << r.metric;
        for (const auto& v : r.values) out << "," << v;
        out << "\n";
    }
    return out.str();
}

inline int cmd_compare(const CompareOptions& opt) {
    std::vector<std::pair<std::string, simcore::Scenario>> variants;
    try {
        const simcore::Scenario base =
            detail::resolve_scenario(opt.scenario_path, opt.preset, opt.seed);
        if (opt.axis == "d2c-routing") {
            auto a = base, b = base;
            a.variants.d2c_routing = tierlink::D2cRouting::GATEWAY;
            b.variants.d2c_routing = tierlink::D2cRouting::ISL;
            variants = {{"gateway", a}, {"isl", b}};
        } else if (opt.axis == "ntn-payload") {
            auto a = base, b = base;
            a.variants.ntn_payload = tierlink::NtnPayload::TRANSPARENT;
            b.variants.ntn_payload = tierlink::NtnPayload::REGENERATIVE_ISL;
            variants = {{"transparent", a}, {"regenerative", b}};
        } else if (opt.axis == "tri-vs-single") {
            auto a = base, b = base;
            for (auto& seg : b.route) {
                seg.t2_coverage = false;
                seg.t3_coverage = false;
            }
            variants = {{"tri-link", a}, {"t1-only", b}};
        } else {
            std::cerr << "compare: unknown axis '" << opt.axis << "'\n";
            return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "compare: " << e.what() << "\n";
        return kExitValidation;
    }

    std::vector<std::pair<std::string, simcore::MetricsReport>> runs;
    try {
        for (const auto& [name, sc] : variants) {
            simcore::RunResult r = simcore::run(sc);
            const auto audit = simcore::audit(r.log);
            if (!audit.ok()) {
                std::cerr << "compare: audit failed for variant '" << name << "'\n";
                for (const auto& f : audit.findings) std::cerr << "  - " << f << "\n";
                return kExitAudit;
            }
            runs.emplace_back(name, std::move(r.report));
        }
        detail::write_output(opt.out, compare_table(runs, opt.format));
    } catch (const simcore::ScenarioValidationError& e) {
        std::cerr << "compare: scenario invalid:\n";
        for (const auto& v : e.violations) std::cerr << "  - " << v << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "compare: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

// --- argument wiring ---------------------------------------------------------

inline int run_cli(std::vector<std::string> args) {
    CLI::App app{"trilink: hybrid satellite-terrestrial connectivity simulator"};
    app.require_subcommand(1);

    DopplerOptions dop;
    auto* dop_cmd = app.add_subcommand("doppler", "Doppler/timing profile of a LEO pass (CSV)");
    dop_cmd->add_option("--fc-ghz", dop.fc_ghz, "Carrier frequency, GHz");
    dop_cmd->add_option("--altitude-km", dop.altitude_km, "Orbit altitude, km");
    dop_cmd->add_option("--duration-s", dop.duration_s, "Profile span centered on culmination, s");
    dop_cmd->add_option("--step-s", dop.step_s, "Row step, s");
    dop_cmd->add_option("--max-elevation-deg", dop.max_elevation_deg, "Culmination elevation, deg");
    double v_kms = 0.0;
    auto* v_opt = dop_cmd->add_option("--v-kms", v_kms, "Velocity override for the Doppler columns");
    dop_cmd->add_option("--out", dop.out, "Output path, - for stdout");

    LinkbudgetOptions lb;
    auto* lb_cmd = app.add_subcommand("linkbudget", "D2C vs NTN link budget comparison table");
    lb_cmd->add_option("--preset", lb.preset, "Preset name (table4)");
    std::string lb_inputs;
    auto* lb_in_opt = lb_cmd->add_option("--inputs", lb_inputs, "Explicit inputs JSON file");
    lb_cmd->add_flag("--fspl-computed", lb.fspl_computed,
                     "Use formula FSPL instead of the preset override");
    lb_cmd->add_option("--out", lb.out, "Output path, - for stdout");
    lb_cmd->add_option("--format", lb.format, "csv or structured");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario, write the metrics report");
    std::string sim_scenario, sim_preset, sim_log;
    std::uint64_t sim_seed = 0;
    auto* sim_sc_opt = sim_cmd->add_option("--scenario", sim_scenario, "Scenario JSON file");
    auto* sim_pr_opt = sim_cmd->add_option("--preset", sim_preset, "Bundled preset name");
    auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "Seed override");
    sim_cmd->add_option("--out", sim.out, "Report path, - for stdout");
    auto* sim_log_opt = sim_cmd->add_option("--log", sim_log, "Event log path (NDJSON)");
    sim_cmd->add_option("--format", sim.format, "structured or csv");

    CompareOptions cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "Run scenario variants side by side");
    std::string cmp_scenario, cmp_preset;
    std::uint64_t cmp_seed = 0;
    auto* cmp_sc_opt = cmp_cmd->add_option("--scenario", cmp_scenario, "Scenario JSON file");
    auto* cmp_pr_opt = cmp_cmd->add_option("--preset", cmp_preset, "Bundled preset name");
    auto* cmp_seed_opt = cmp_cmd->add_option("--seed", cmp_seed, "Seed override");
    cmp_cmd->add_option("--axis", cmp.axis, "d2c-routing, ntn-payload, or tri-vs-single");
    cmp_cmd->add_option("--out", cmp.out, "Output path, - for stdout");
    cmp_cmd->add_option("--format", cmp.format, "csv or structured");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    if (dop_cmd->parsed()) {
        if (v_opt->count() > 0) dop.v_kms = v_kms;
        return cmd_doppler(dop);
    }
    if (lb_cmd->parsed()) {
        if (lb_in_opt->count() > 0) lb.inputs_path = lb_inputs;
        return cmd_linkbudget(lb);
    }
    if (sim_cmd->parsed()) {
        if (sim_sc_opt->count() > 0) sim.scenario_path = sim_scenario;
        if (sim_pr_opt->count() > 0) sim.preset = sim_preset;
        if (sim_seed_opt->count() > 0) sim.seed = sim_seed;
        if (sim_log_opt->count() > 0) sim.log_path = sim_log;
        return cmd_simulate(sim);
    }
    if (cmp_cmd->parsed()) {
        if (cmp_sc_opt->count() > 0) cmp.scenario_path = cmp_scenario;
        if (cmp_pr_opt->count() > 0) cmp.preset = cmp_preset;
        if (cmp_seed_opt->count() > 0) cmp.seed = cmp_seed;
        return cmd_compare(cmp);
    }
    return kExitUsage;
}

} // namespace trilink::cli
