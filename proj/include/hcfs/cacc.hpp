#pragma once

#include "hcfs/environment.hpp"

namespace hcfs {

// Feedback gains of the platoon velocity-command law.
struct CaccGains {
    double k1 = 0.01;  // spacing error to predecessor
    double k2 = 0.01;  // velocity error to predecessor
    double k3 = 0.02;  // spacing error to leader
    double k4 = 0.9;   // velocity error to leader

    void validate() const;
};

// Target velocity: current velocity plus gain-weighted errors. Linear and
// odd-symmetric in the error vector.
inline double cacc_velocity_command(const Observation& obs, const CaccGains& g, double v_last) {
    return v_last + g.k1 * obs.e_gap_pred + g.k2 * obs.e_v_pred + g.k3 * obs.e_gap_lead +
           g.k4 * obs.e_v_lead;
}

// Acceleration realizing the velocity command over one frame, saturated at
// +-a_max. Jerk clamping is left to the caller so every strategy shares one
// clamp path.
double cacc_command(const Observation& obs, const CaccGains& gains, double v_last, double dt,
                    double a_max);

}  // namespace hcfs
