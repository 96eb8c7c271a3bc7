#pragma once

// Carrier-level frequency dynamics for a LEO pass: Doppler shift and drift,
// the two compensation strategies with their residual-error models, the
// residual -> link-margin penalty map, tracking-loop acquisition limits,
// timing advance, and handover re-synchronization latencies.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "trilink/geometry.hpp"
#include "trilink/util.hpp"

namespace trilink::radio {

enum class System { D2C, NTN };

struct CarrierConfig {
    double f_c_hz;
    double c_ms = 2.998e8;

    CarrierConfig(double f_c_hz_, double min_hz = 1.0e9, double max_hz = 3.0e9)
        : f_c_hz(f_c_hz_) {
        if (!(f_c_hz >= min_hz && f_c_hz <= max_hz))
            throw std::invalid_argument("CarrierConfig: f_c outside configured band");
    }
};

// Signed shift, signed drift, at pass time t.
struct DopplerProfile {
    double shift_hz = 0.0;
    double rate_hz_s = 0.0;
    double t_s = 0.0;
};

enum class CompensationKind { D2C_PRECOMP, NTN_JOINT };

struct CompensationStrategy {
    CompensationKind kind = CompensationKind::D2C_PRECOMP;
    double d2c_residual_min_khz = 0.5;   // documented worst-case band, lower edge
    double d2c_residual_max_khz = 1.0;   // upper edge; also the hard clamp
    double ntn_residual_bound_khz = 0.2;
    double ntn_convergence_ms = 100.0;
    double atmospheric_floor_khz = 0.1;

    void validate() const {
        if (!(d2c_residual_min_khz > 0.0 && d2c_residual_max_khz >= d2c_residual_min_khz))
            throw std::invalid_argument("CompensationStrategy: bad D2C residual band");
        if (!(ntn_residual_bound_khz > 0.0))
            throw std::invalid_argument("CompensationStrategy: NTN bound must be positive");
        if (!(ntn_residual_bound_khz < d2c_residual_min_khz))
            throw std::invalid_argument("CompensationStrategy: NTN bound must undercut D2C band");
        if (!(atmospheric_floor_khz >= 0.0))
            throw std::invalid_argument("CompensationStrategy: negative atmospheric floor");
    }
};

// Post-compensation carrier frequency error.
struct ResidualError {
    double residual_khz = 0.0;  // signed
    CompensationKind kind = CompensationKind::D2C_PRECOMP;

    double magnitude_khz() const { return std::abs(residual_khz); }
};

struct TimingAdvanceState {
    double ta_s = 0.0;           // two-way propagation delay
    double ta_rate_s_per_s = 0.0;

    double ta_ms() const { return ta_s * 1e3; }
    double ta_rate_us_per_s() const { return ta_rate_s_per_s * 1e6; }
};

struct SyncModel {
    System system = System::NTN;
    double resync_ms = 0.0;

    SyncModel() = default;
    SyncModel(System system_, double resync_ms_) : system(system_), resync_ms(resync_ms_) {
        if (system == System::D2C && !(resync_ms >= 150.0))
            throw std::invalid_argument("SyncModel: D2C resync must be >= 150 ms");
        if (system == System::NTN && !(resync_ms >= 50.0 && resync_ms <= 100.0))
            throw std::invalid_argument("SyncModel: NTN resync must be in [50, 100] ms");
    }
};

struct AcquireResult {
    bool success = false;
    double convergence_ms = 0.0;
};

// f_d = f_c * v * cos(theta) / c; theta is the velocity/LOS angle.
inline double doppler_shift_hz(const CarrierConfig& carrier, double v_kms, double theta_deg) {
    if (!(theta_deg >= 0.0 && theta_deg <= 180.0))
        throw std::domain_error("doppler_shift_hz: theta must be in [0, 180]");
    return carrier.f_c_hz * (v_kms * 1e3) * std::cos(geometry::deg2rad(theta_deg)) / carrier.c_ms;
}

// Doppler shift at pass time t. Equals f_c * v * cos(theta) / c with theta
// taken from the pass geometry, since v * cos(theta) = -range_rate.
inline DopplerProfile doppler_shift_at(const CarrierConfig& carrier,
                                       const geometry::OrbitConfig& orbit, double t_s) {
    const auto sample = geometry::pass_geometry(orbit, t_s);
    DopplerProfile p;
    p.t_s = t_s;
    p.shift_hz = -carrier.f_c_hz * (sample.range_rate_kms * 1e3) / carrier.c_ms;
    return p;
}

// Central finite difference of the shift along the pass, step 0.1 s.
// Propagates the out-of-window error near the pass edges.
inline double doppler_rate_hz_s(const CarrierConfig& carrier,
                                const geometry::OrbitConfig& orbit, double t_s,
                                double step_s = 0.1) {
    const double fp = doppler_shift_at(carrier, orbit, t_s + step_s).shift_hz;
    const double fm = doppler_shift_at(carrier, orbit, t_s - step_s).shift_hz;
    return (fp - fm) / (2.0 * step_s);
}

// Shift + rate in one profile; asserts the |shift| <= f_c v / c bound.
inline DopplerProfile doppler_at(const CarrierConfig& carrier,
                                 const geometry::OrbitConfig& orbit, double t_s) {
    DopplerProfile p = doppler_shift_at(carrier, orbit, t_s);
    p.rate_hz_s = doppler_rate_hz_s(carrier, orbit, t_s);
    const double bound = carrier.f_c_hz * (geometry::orbital_velocity_kms(orbit) * 1e3) / carrier.c_ms;
    if (std::abs(p.shift_hz) > bound * (1.0 + 1e-12))
        throw std::logic_error("doppler_at: shift exceeds the theta=0 bound");
    return p;
}

// Residual frequency error after compensation.
//
// D2C pre-compensation: quadrature sum of an ephemeris term (linear,
// 2 km -> 0.7 kHz), a user-motion term (f_c * v_perp / c, heading sampled
// per seed), and a fixed atmospheric floor; clamped at the strategy's upper
// band edge. NTN joint compensation: UE tracking absorbs ephemeris error
// after convergence; residual stays within the 0.2 kHz bound regardless.
inline ResidualError compensate(const CarrierConfig& carrier,
                                const CompensationStrategy& strategy,
                                const DopplerProfile& /*true_doppler*/,
                                const geometry::EphemerisError& ephem_err,
                                double user_speed_ms, std::uint64_t rng_seed) {
    strategy.validate();
    Rng rng(rnd::derive(rng_seed, rnd::fnv1a("compensate")));
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;

    ResidualError out;
    out.kind = strategy.kind;
    if (strategy.kind == CompensationKind::NTN_JOINT) {
        const double floor = std::min(strategy.atmospheric_floor_khz, strategy.ntn_residual_bound_khz);
        const double mag = floor + rng.u01() * (strategy.ntn_residual_bound_khz - floor);
        out.residual_khz = sign * mag;
        return out;
    }

    const double eph_khz = 0.35 * std::abs(ephem_err.along_track_km);  // 2 km -> 0.7 kHz
    const double heading = rng.uniform(0.0, 2.0 * geometry::kPi);
    const double v_perp = user_speed_ms * std::abs(std::sin(heading));
    const double user_khz = carrier.f_c_hz * v_perp / carrier.c_ms / 1e3;
    const double floor_khz = strategy.atmospheric_floor_khz;
    double mag = std::sqrt(eph_khz * eph_khz + user_khz * user_khz + floor_khz * floor_khz);
    if (mag > strategy.d2c_residual_max_khz) mag = strategy.d2c_residual_max_khz;
    out.residual_khz = sign * mag;
    return out;
}

// Piecewise-linear residual -> margin penalty through the anchors
// (0, 0), (0.2, 0.5), (0.5, 1.0), (1.0, 3.0); clamped at 3.0 beyond 1 kHz.
inline double margin_penalty_db(double residual_khz) {
    if (residual_khz < 0.0)
        throw std::domain_error("margin_penalty_db: residual must be >= 0");
    struct Anchor { double khz, db; };
    static constexpr Anchor anchors[] = {{0.0, 0.0}, {0.2, 0.5}, {0.5, 1.0}, {1.0, 3.0}};
    if (residual_khz >= anchors[3].khz) return anchors[3].db;
    for (int i = 3; i >= 1; --i) {
        if (residual_khz >= anchors[i - 1].khz && residual_khz <= anchors[i].khz) {
            const double f = (residual_khz - anchors[i - 1].khz) / (anchors[i].khz - anchors[i - 1].khz);
            return anchors[i - 1].db + f * (anchors[i].db - anchors[i - 1].db);
        }
    }
    return 0.0;
}

// Acquisition succeeds within +/-40 kHz offset and +/-1 kHz/s rate.
inline AcquireResult tracking_acquire(double offset_khz, double rate_khz_s, System system) {
    AcquireResult r;
    r.success = std::abs(offset_khz) <= 40.0 && std::abs(rate_khz_s) <= 1.0;
    if (r.success) r.convergence_ms = (system == System::NTN) ? 100.0 : 150.0;
    return r;
}

// ta = 2 d / c (round trip), ta_rate = 2 * range_rate / c.
inline TimingAdvanceState timing_advance(const geometry::GeometrySample& sample) {
    constexpr double c_ms = 2.998e8;
    TimingAdvanceState ta;
    ta.ta_s = 2.0 * (sample.slant_range_km * 1e3) / c_ms;
    ta.ta_rate_s_per_s = 2.0 * (sample.range_rate_kms * 1e3) / c_ms;
    return ta;
}

// D2C re-sync sampled in [150, 250] ms; NTN in [50, 100] ms, or fixed
// 100 ms when ephemeris-predictive timing advance is in use.
inline SyncModel resync_latency(System system, bool predictive, std::uint64_t rng_seed) {
    Rng rng(rnd::derive(rng_seed, rnd::fnv1a("resync")));
    if (system == System::D2C) return SyncModel(System::D2C, rng.uniform(150.0, 250.0));
    if (predictive) return SyncModel(System::NTN, 100.0);
    return SyncModel(System::NTN, rng.uniform(50.0, 100.0));
}

} // namespace trilink::radio
