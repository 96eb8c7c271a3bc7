#pragma once

// Circular-orbit LEO pass over a static ground point.
//
// Model: spherical non-rotating Earth, 2-D great-circle pass parametrized by
// the culmination elevation. The satellite sits on a circle of radius
// Re + h; the ground point is fixed. Central angle between satellite and
// ground point: cos(gamma) = cos(beta) * cos(omega * t), where beta is the
// constant cross-track offset set by the culmination elevation and omega the
// orbital angular rate. t = 0 is culmination.

#include <cmath>
#include <stdexcept>
#include <string>

#include "trilink/util.hpp"

namespace trilink::geometry {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Thrown when a pass sample is requested outside the visibility window.
struct OutOfWindowError : std::domain_error {
    using std::domain_error::domain_error;
};

struct OrbitConfig {
    double altitude_km;
    double max_elevation_deg;         // culmination elevation of the pass
    double earth_radius_km = 6371.0;
    double mu_km3s2 = 398600.4418;

    OrbitConfig(double altitude_km_, double max_elevation_deg_,
                double earth_radius_km_ = 6371.0, double mu_km3s2_ = 398600.4418)
        : altitude_km(altitude_km_),
          max_elevation_deg(max_elevation_deg_),
          earth_radius_km(earth_radius_km_),
          mu_km3s2(mu_km3s2_) {
        if (!(altitude_km > 0.0)) throw std::invalid_argument("OrbitConfig: altitude_km must be > 0");
        if (!(max_elevation_deg > 0.0 && max_elevation_deg <= 90.0))
            throw std::invalid_argument("OrbitConfig: max_elevation_deg must be in (0, 90]");
        if (!(earth_radius_km > 0.0)) throw std::invalid_argument("OrbitConfig: earth_radius_km must be > 0");
        if (!(mu_km3s2 > 0.0)) throw std::invalid_argument("OrbitConfig: mu_km3s2 must be > 0");
    }

    double orbit_radius_km() const { return earth_radius_km + altitude_km; }
};

// Instantaneous satellite/ground relationship. t = 0 at culmination;
// range_rate < 0 while approaching. los_angle is the angle between the
// satellite velocity vector and the line of sight to the ground point.
struct GeometrySample {
    double t_s = 0.0;
    double slant_range_km = 0.0;
    double elevation_deg = 0.0;
    double los_angle_deg = 0.0;
    double range_rate_kms = 0.0;
};

// Along-track ephemeris prediction error, bounded in magnitude.
struct EphemerisError {
    double along_track_km = 0.0;
    double bound_km = 2.0;

    EphemerisError() = default;
    EphemerisError(double along_track_km_, double bound_km_ = 2.0)
        : along_track_km(along_track_km_), bound_km(bound_km_) {
        if (!(bound_km >= 0.0)) throw std::invalid_argument("EphemerisError: bound_km must be >= 0");
        if (std::abs(along_track_km) > bound_km)
            throw std::invalid_argument("EphemerisError: |along_track_km| exceeds bound_km");
    }
};

// Circular-orbit speed at a given orbit radius (surface-grazing at Re).
inline double circular_velocity_kms(double orbit_radius_km, double mu_km3s2 = 398600.4418) {
    if (!(orbit_radius_km > 0.0))
        throw std::domain_error("circular_velocity_kms: radius must be > 0");
    return std::sqrt(mu_km3s2 / orbit_radius_km);
}

// v = sqrt(mu / (Re + h)), constant over a circular pass.
inline double orbital_velocity_kms(const OrbitConfig& orbit) {
    return circular_velocity_kms(orbit.orbit_radius_km(), orbit.mu_km3s2);
}

// d = sqrt((Re+h)^2 - Re^2 cos^2 e) - Re sin e, spherical Earth.
inline double slant_range_km(double altitude_km, double elevation_deg,
                             double earth_radius_km = 6371.0) {
    if (!(elevation_deg >= 0.0 && elevation_deg <= 90.0))
        throw std::domain_error("slant_range_km: elevation must be in [0, 90]");
    if (!(altitude_km > 0.0)) throw std::domain_error("slant_range_km: altitude must be > 0");
    const double re = earth_radius_km;
    const double r = re + altitude_km;
    const double e = deg2rad(elevation_deg);
    const double ce = std::cos(e);
    return std::sqrt(r * r - re * re * ce * ce) - re * std::sin(e);
}

namespace detail {

// Cross-track central angle from the culmination elevation:
// cos(beta + e) = (Re/r) cos e.
inline double cross_track_angle_rad(const OrbitConfig& orbit) {
    const double e = deg2rad(orbit.max_elevation_deg);
    const double ratio = orbit.earth_radius_km / orbit.orbit_radius_km();
    double c = ratio * std::cos(e);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c) - e;
}

inline double clamp_unit(double x) { return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x); }

} // namespace detail

// Half-width of the visibility window (elevation >= 0), seconds.
inline double half_window_s(const OrbitConfig& orbit) {
    const double r = orbit.orbit_radius_km();
    const double ratio = orbit.earth_radius_km / r;
    const double beta = detail::cross_track_angle_rad(orbit);
    const double omega = orbital_velocity_kms(orbit) / r;  // rad/s
    const double c = detail::clamp_unit(ratio / std::cos(beta));
    return std::acos(c) / omega;
}

inline GeometrySample pass_geometry(const OrbitConfig& orbit, double t_s) {
    const double re = orbit.earth_radius_km;
    const double r = orbit.orbit_radius_km();
    const double v = orbital_velocity_kms(orbit);
    const double omega = v / r;
    const double beta = detail::cross_track_angle_rad(orbit);

    const double cos_gamma = std::cos(beta) * std::cos(omega * t_s);
    const double sin_gamma = std::sqrt(std::max(0.0, 1.0 - cos_gamma * cos_gamma));
    const double d = std::sqrt(std::max(0.0, re * re + r * r - 2.0 * re * r * cos_gamma));

    double elevation_rad;
    if (sin_gamma == 0.0) {
        elevation_rad = kPi / 2.0;  // directly overhead
    } else {
        elevation_rad = std::atan2(cos_gamma - re / r, sin_gamma);
    }
    if (elevation_rad < -1e-12)
        throw OutOfWindowError("pass_geometry: t=" + std::to_string(t_s) +
                               " s is outside the visibility window");

    const double range_rate = re * r * std::cos(beta) * omega * std::sin(omega * t_s) / d;
    const double cos_theta = detail::clamp_unit(-range_rate / v);

    GeometrySample s;
    s.t_s = t_s;
    s.slant_range_km = d;
    s.elevation_deg = rad2deg(std::max(0.0, elevation_rad));
    s.los_angle_deg = rad2deg(std::acos(cos_theta));
    s.range_rate_kms = range_rate;
    return s;
}

// Predicted geometry under an along-track ephemeris error. A forward offset
// of eps km behaves, to first order, like sampling the pass eps/v seconds
// later, so the range perturbation is -cos(theta) * eps (magnitude <= eps).
inline GeometrySample apply_ephemeris_error(const GeometrySample& sample,
                                            const EphemerisError& err) {
    GeometrySample predicted = sample;
    predicted.slant_range_km -= std::cos(deg2rad(sample.los_angle_deg)) * err.along_track_km;
    return predicted;
}

} // namespace trilink::geometry
