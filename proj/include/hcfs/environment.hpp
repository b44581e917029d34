#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hcfs/kinematics.hpp"

namespace hcfs {

using Vec6 = Eigen::Matrix<double, 6, 1>;

// The six features one follower observes, ordered
// [e_gap_pred, e_v_pred, e_gap_lead, e_v_lead, v, a].
// Sign convention: predecessor/leader quantity minus ego quantity minus
// desired offset, so a positive error means the ego should speed up.
struct Observation {
    double e_gap_pred = 0.0;  // spacing error to predecessor (m)
    double e_v_pred = 0.0;    // velocity error to predecessor (m/s)
    double e_gap_lead = 0.0;  // spacing error to leader (m)
    double e_v_lead = 0.0;    // velocity error to leader (m/s)
    double v = 0.0;           // ego velocity (m/s)
    double a = 0.0;           // ego acceleration (m/s^2)

    Vec6 as_vector() const {
        Vec6 out;
        out << e_gap_pred, e_v_pred, e_gap_lead, e_v_lead, v, a;
        return out;
    }
};

struct RewardConfig {
    double omega1 = 10.0;        // velocity-error weight
    double omega2 = 0.1;         // jerk weight
    double v_max = 100.0 / 3.6;  // m/s
    double a_max = 3.0;          // m/s^2
    double dt = 0.2;             // s

    // normalizing jerk scale 2*a_max/dt
    double jerk_scale() const { return 2.0 * a_max / dt; }

    void validate() const;
};

// Platoon snapshot: leader plus ordered followers, with each follower's
// previously executed acceleration for jerk bookkeeping.
struct PlatoonFrame {
    VehicleState leader;
    std::vector<VehicleState> followers;
    std::vector<double> prev_actions;
    double time = 0.0;
};

// Followers parked at desired spacing behind the leader, matching its
// velocity, zero acceleration.
PlatoonFrame equilibrium_frame(const VehicleState& leader, const PlatoonConfig& cfg);

// Observation for follower k (1-based). Predecessor and leader states pass
// through delayed_view; the ego knows its own state exactly.
Observation build_observation(int k, const PlatoonFrame& frame, const PlatoonConfig& cfg);

// Fixed network-input scales: distance errors / 100 m, velocity features
// / v_max, acceleration / a_max.
Vec6 normalize_observation(const Observation& obs, const PlatoonConfig& cfg);

// r = -omega1*|e_v_lead|/v_max - omega2*|jerk|/(2*a_max/dt); never positive.
double compute_reward(double e_v_lead, double jerk, const RewardConfig& cfg);

// One-step model rollout of an observation: ego advanced with a_cand,
// neighbors with the given acceleration estimates, all under the same
// zero-velocity-floor kinematics as the true step.
Observation predict_observation(const Observation& obs, double a_cand, double leader_a_est,
                                double pred_a_est, const PlatoonConfig& cfg);

// Reward a candidate action would earn at the next frame, before executing
// anything: the rollout above plus the reward of the predicted e_v_lead and
// of jerk (a_cand - obs.a)/dt.
double predict_reward(const Observation& obs, double a_cand, double leader_a_est,
                      double pred_a_est, const PlatoonConfig& pc, const RewardConfig& rc);

struct StepResult {
    PlatoonFrame frame;
    std::vector<Observation> observations;  // per follower, at the new frame
    std::vector<double> rewards;            // realized, per follower
    bool collision = false;
};

// Advance the platoon one frame: the leader replays its trace, each follower
// executes its (already clamped) action. Rewards use the realized next-frame
// e_v_lead and the executed jerk; collision means some true gap <= L.
StepResult step_platoon(const PlatoonFrame& frame, const std::vector<double>& actions,
                        double leader_next_v, const PlatoonConfig& pc, const RewardConfig& rc);

}  // namespace hcfs
