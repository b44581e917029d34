#pragma once

#include <algorithm>

#include "hcfs/errors.hpp"

namespace hcfs {

// One vehicle at one frame. Velocity never goes negative; acceleration is
// whatever command was last executed.
struct VehicleState {
    double x = 0.0;  // position along lane (m)
    double v = 0.0;  // velocity (m/s)
    double a = 0.0;  // acceleration (m/s^2)
};

// Geometry, actuation limits and communication delay shared by a platoon run.
struct PlatoonConfig {
    int n_followers = 6;
    double dt = 0.2;              // s
    double vehicle_length = 5.0;  // m
    double safe_headway = 2.0;    // m
    double a_max = 3.0;           // m/s^2
    double v_max = 100.0 / 3.6;   // m/s
    double jerk_max = 30.0;       // m/s^3, default 2*a_max/dt
    double v2v_delay = 0.005;     // s

    // desired bumper-to-bumper spacing per slot
    double desired_gap() const { return vehicle_length + safe_headway; }
    // widest admissible acceleration change per frame
    double jerk_band() const { return jerk_max * dt; }

    void validate() const;  // throws ConfigError
};

inline double clamp_accel(double a, double a_max) {
    return std::clamp(a, -a_max, a_max);
}

// Closed clamp of a command into the jerk band around the previous
// acceleration; identity when already inside.
inline double clamp_jerk(double a_cmd, double a_prev, double jerk_max, double dt) {
    const double band = jerk_max * dt;
    return std::clamp(a_cmd, a_prev - band, a_prev + band);
}

// Advance one vehicle by dt under a constant commanded acceleration.
// Velocity floors at zero: if the vehicle comes to rest inside the step,
// position integrates only over the moving sub-interval.
VehicleState step_vehicle(const VehicleState& state, double a_cmd, double dt);

// The neighbor state the ego actually perceives over V2V: position stale by
// `delay` (shifted by -v*delay), velocity and acceleration as transmitted.
VehicleState delayed_view(const VehicleState& neighbor, double delay);

}  // namespace hcfs
