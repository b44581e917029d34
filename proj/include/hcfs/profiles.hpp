#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcfs/kinematics.hpp"

namespace hcfs {

// Leader velocity trace on a uniform time grid.
struct VelocityProfile {
    double dt = 0.2;
    std::vector<double> v;  // m/s, all in [0, v_max]

    double duration() const { return dt * static_cast<double>(v.size() - 1); }
    // nearest grid index for a time stamp
    std::size_t index_at(double t) const;

    void validate(double v_max) const;
};

// Reads a "t,v" CSV (optional "t,v" header), resamples linearly onto the
// target_dt grid and clamps velocities into [0, v_max]. Parse failures name
// the offending line.
VelocityProfile load_profile(const std::string& path, double target_dt, double v_max);
VelocityProfile read_profile(std::istream& in, double target_dt, double v_max);

// Synthetic stop-and-go trace: sinusoid around v_mean plus smoothed Gaussian
// noise, clamped into [0, v_max]. Deterministic per seed.
VelocityProfile synth_stop_and_go(double duration, double dt, double v_mean, double amp,
                                  double period, double noise_sigma, std::uint64_t seed,
                                  double v_max);

// Leader state series: acceleration by backward finite difference (zero at
// the first sample), position advanced by x' = x + v*dt + 0.5*a*dt^2 using
// the acceleration at the current sample. The leader is not bounded by a_max.
std::vector<VehicleState> derive_leader_trace(const VelocityProfile& profile, double x0);

void write_profile_csv(const VelocityProfile& profile, std::ostream& out);

}  // namespace hcfs
