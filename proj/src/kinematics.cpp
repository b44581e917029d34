#include "hcfs/kinematics.hpp"

#include <cmath>

namespace hcfs {

void PlatoonConfig::validate() const {
    if (n_followers < 1) throw ConfigError("platoon.n_followers must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("platoon.dt must be > 0");
    if (!(vehicle_length > 0.0)) throw ConfigError("platoon.vehicle_length must be > 0");
    if (!(safe_headway > 0.0)) throw ConfigError("platoon.safe_headway must be > 0");
    if (!(a_max > 0.0)) throw ConfigError("platoon.a_max must be > 0");
    if (!(v_max > 0.0)) throw ConfigError("platoon.v_max must be > 0");
    if (!(jerk_max > 0.0)) throw ConfigError("platoon.jerk_max must be > 0");
    if (!(v2v_delay >= 0.0)) throw ConfigError("platoon.v2v_delay must be >= 0");
}

VehicleState step_vehicle(const VehicleState& state, double a_cmd, double dt) {
    if (!std::isfinite(state.x) || !std::isfinite(state.v) || !std::isfinite(a_cmd))
        throw NumericError("step_vehicle: non-finite input");
    if (!(dt > 0.0)) throw NumericError("step_vehicle: dt must be > 0");

    VehicleState next;
    next.a = a_cmd;
    const double v_end = state.v + a_cmd * dt;
    if (v_end >= 0.0) {
        next.v = v_end;
        next.x = state.x + state.v * dt + 0.5 * a_cmd * dt * dt;
    } else {
        // rest is reached at t_stop < dt; the vehicle holds position afterwards
        const double t_stop = (a_cmd < 0.0) ? -state.v / a_cmd : 0.0;
        next.v = 0.0;
        next.x = state.x + state.v * t_stop + 0.5 * a_cmd * t_stop * t_stop;
    }
    return next;
}

VehicleState delayed_view(const VehicleState& neighbor, double delay) {
    if (!(delay >= 0.0)) throw NumericError("delayed_view: delay must be >= 0");
    if (!std::isfinite(neighbor.x) || !std::isfinite(neighbor.v))
        throw NumericError("delayed_view: non-finite neighbor state");
    VehicleState seen = neighbor;
    seen.x -= neighbor.v * delay;
    return seen;
}

}  // namespace hcfs
