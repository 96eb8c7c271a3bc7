#pragma once

// dB-domain link budget: free-space path loss, thermal noise, received
// power, carrier-to-noise ratio, and link margin, plus a two-system
// comparison that reproduces the reference D2C/NTN budget table.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trilink/radio.hpp"

namespace trilink::linkbudget {

inline constexpr double kSpeedOfLightMs = 2.998e8;
inline constexpr double kBoltzmannDbw = -228.6;  // 10 log10(k), dBW/(K Hz)

enum class Direction { DOWNLINK, UPLINK };

// 20 log10(4 pi d f / c), positive magnitude.
inline double fspl_db(double distance_km, double f_c_hz) {
    if (!(distance_km > 0.0) || !(f_c_hz > 0.0))
        throw std::domain_error("fspl_db: distance and frequency must be positive");
    return 20.0 * std::log10(4.0 * geometry::kPi * (distance_km * 1e3) * f_c_hz / kSpeedOfLightMs);
}

// -228.6 + 10 log10(T) + 10 log10(B).
inline double noise_power_dbw(double temp_k, double bandwidth_hz) {
    if (!(temp_k > 0.0) || !(bandwidth_hz > 0.0))
        throw std::domain_error("noise_power_dbw: temperature and bandwidth must be positive");
    return kBoltzmannDbw + 10.0 * std::log10(temp_k) + 10.0 * std::log10(bandwidth_hz);
}

struct NoiseSpec {
    // Exactly one of: direct noise power, or a (temperature, bandwidth) pair.
    std::optional<double> noise_dbw;
    std::optional<double> temp_k;
    std::optional<double> bandwidth_hz;
};

struct BudgetInput {
    Direction direction = Direction::DOWNLINK;
    double eirp_dbw = 0.0;        // satellite EIRP (downlink)
    double path_loss_db = 0.0;    // negative convention, e.g. -185.5
    double rx_gain_dbi = 0.0;     // UE antenna gain, used in both directions
    NoiseSpec noise;
    std::optional<double> tx_power_dbm;      // UE transmit power (uplink)
    std::optional<double> sat_rx_gain_dbi;   // satellite receive gain (uplink)
    double waveform_adjust_db = 0.0;
    double required_cnr_db = 4.0;  // demodulation threshold for the margin

    double noise_dbw() const {
        const bool direct = noise.noise_dbw.has_value();
        const bool pair = noise.temp_k.has_value() && noise.bandwidth_hz.has_value();
        if (direct == pair)
            throw std::invalid_argument("BudgetInput: provide noise_dbw or (temp_k, bandwidth_hz), not both");
        if (direct) return *noise.noise_dbw;
        return noise_power_dbw(*noise.temp_k, *noise.bandwidth_hz);
    }
};

struct BudgetResult {
    double p_rx_dbw = 0.0;
    double cnr_db = 0.0;
    double margin_db = 0.0;
    double penalty_db = 0.0;
};

inline double link_margin_db(double cnr_db, double required_cnr_db = 4.0, double penalty_db = 0.0) {
    return cnr_db - required_cnr_db - penalty_db;
}

inline BudgetResult budget(const BudgetInput& input, double penalty_db = 0.0) {
    const double n = input.noise_dbw();
    BudgetResult r;
    r.penalty_db = penalty_db;
    if (input.direction == Direction::DOWNLINK) {
        r.p_rx_dbw = input.eirp_dbw + input.path_loss_db + input.rx_gain_dbi;
    } else {
        if (!input.tx_power_dbm || !input.sat_rx_gain_dbi)
            throw std::invalid_argument("budget: uplink requires tx_power_dbm and sat_rx_gain_dbi");
        const double tx_dbw = *input.tx_power_dbm - 30.0;
        r.p_rx_dbw = tx_dbw + input.rx_gain_dbi + input.path_loss_db + *input.sat_rx_gain_dbi +
                     input.waveform_adjust_db;
    }
    r.cnr_db = r.p_rx_dbw - n;
    r.margin_db = link_margin_db(r.cnr_db, input.required_cnr_db, penalty_db);
    return r;
}

struct ComparisonRow {
    std::string name;
    double d2c = 0.0;
    double ntn = 0.0;
    double delta() const { return ntn - d2c; }
};

struct ComparisonRecord {
    Direction direction = Direction::DOWNLINK;
    std::vector<ComparisonRow> rows;

    const ComparisonRow& row(std::string_view name) const {
        for (const auto& r : rows)
            if (r.name == name) return r;
        throw std::out_of_range("ComparisonRecord: no row named " + std::string(name));
    }
};

inline ComparisonRecord compare_systems(const BudgetInput& d2c, const BudgetInput& ntn,
                                        double d2c_penalty_db = 0.0, double ntn_penalty_db = 0.0) {
    if (d2c.direction != ntn.direction)
        throw std::invalid_argument("compare_systems: inputs must share a direction");
    const BudgetResult rd = budget(d2c, d2c_penalty_db);
    const BudgetResult rn = budget(ntn, ntn_penalty_db);

    ComparisonRecord rec;
    rec.direction = d2c.direction;
    if (d2c.direction == Direction::DOWNLINK) {
        rec.rows.push_back({"eirp_dbw", d2c.eirp_dbw, ntn.eirp_dbw});
        rec.rows.push_back({"path_loss_db", d2c.path_loss_db, ntn.path_loss_db});
        rec.rows.push_back({"ue_antenna_gain_dbi", d2c.rx_gain_dbi, ntn.rx_gain_dbi});
        rec.rows.push_back({"received_power_dbw", rd.p_rx_dbw, rn.p_rx_dbw});
        rec.rows.push_back({"noise_power_dbw", d2c.noise_dbw(), ntn.noise_dbw()});
        rec.rows.push_back({"downlink_cnr_db", rd.cnr_db, rn.cnr_db});
    } else {
        rec.rows.push_back({"ue_tx_power_dbm", *d2c.tx_power_dbm, *ntn.tx_power_dbm});
        rec.rows.push_back({"ue_antenna_gain_dbi", d2c.rx_gain_dbi, ntn.rx_gain_dbi});
        rec.rows.push_back({"path_loss_db", d2c.path_loss_db, ntn.path_loss_db});
        rec.rows.push_back({"uplink_cnr_db", rd.cnr_db, rn.cnr_db});
        rec.rows.push_back({"uplink_margin_db", rd.margin_db, rn.margin_db});
    }
    return rec;
}

// Reference-table presets. The table's stated path loss (-185.5 dB at
// "500 km", L-band) does not follow from the FSPL formula (150.5 dB); the
// preset therefore carries it as an explicit override. The satellite
// receive gains (49.4 / 48.4 dBi) and the 4.0 dB required C/N are
// back-solved so the preset reproduces the table row-for-row.
inline BudgetInput preset_input(std::string_view name, Direction direction) {
    BudgetInput in;
    in.direction = direction;
    in.path_loss_db = -185.5;
    in.noise.noise_dbw = -156.3;
    in.tx_power_dbm = 23.0;
    in.required_cnr_db = 4.0;
    if (name == "table4-d2c") {
        in.eirp_dbw = 52.0;
        in.rx_gain_dbi = -2.0;
        in.sat_rx_gain_dbi = 49.4;
    } else if (name == "table4-ntn") {
        in.eirp_dbw = 45.0;
        in.rx_gain_dbi = 2.0;
        in.sat_rx_gain_dbi = 48.4;
    } else {
        throw std::invalid_argument("preset_input: unknown preset " + std::string(name));
    }
    return in;
}

} // namespace trilink::linkbudget
