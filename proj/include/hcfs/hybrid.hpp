#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "hcfs/cacc.hpp"
#include "hcfs/ddpg.hpp"
#include "hcfs/environment.hpp"

namespace hcfs {

enum class ControllerSource : int { Cacc = 0, Ddpg = 1 };

// Per-frame record of the hybrid arbitration.
struct HybridDecision {
    double a_ddpg = 0.0;  // clamped candidate (m/s^2)
    double a_cacc = 0.0;  // clamped candidate (m/s^2)
    double r_ddpg = 0.0;  // predicted one-step reward
    double r_cacc = 0.0;
    ControllerSource source = ControllerSource::Cacc;  // argmax winner, ties go to CACC
    bool switched = false;                             // source differs from previous frame
    double beta = 0.0;                                 // blend weight, 0 or beta_switch
    double a_exec = 0.0;                               // executed acceleration
};

// Carried between frames of one follower's run.
struct HybridState {
    std::optional<ControllerSource> prev_source;  // empty on the first frame
    double a_prev = 0.0;                          // last executed acceleration
};

// One arbitration frame. Both raw candidates are accel-clamped and then
// jerk-clamped against the shared a_prev, which is what makes the executed
// action (pure or blended) land inside the jerk band. Ties in predicted
// reward select CACC; the first frame of a run never counts as a switch.
HybridDecision hcfs_select(const Observation& obs, double leader_a_est, double pred_a_est,
                           HybridState& state, const Mlp& actor, const CaccGains& gains,
                           const PlatoonConfig& pc, const RewardConfig& rc, double beta_switch);

constexpr double kJerkBoundTol = 1e-9;

struct JerkCheck {
    bool pass = true;
    std::size_t first_violation = 0;  // index of the later frame of the violating pair
};

// Every consecutive executed-acceleration pair must satisfy
// |a_k - a_{k-1}| <= jerk_max*dt + tolerance.
JerkCheck verify_jerk_bound(std::span<const double> a_exec, double jerk_max, double dt);

}  // namespace hcfs
