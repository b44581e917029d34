#include "hcfs/environment.hpp"

#include <cmath>

namespace hcfs {

namespace {
constexpr double kDistScale = 100.0;  // m, network-input scale for gap errors
}

void RewardConfig::validate() const {
    if (!(omega1 > 0.0)) throw ConfigError("reward.omega1 must be > 0");
    if (!(omega2 > 0.0)) throw ConfigError("reward.omega2 must be > 0");
    if (!(v_max > 0.0)) throw ConfigError("reward: v_max must be > 0");
    if (!(a_max > 0.0)) throw ConfigError("reward: a_max must be > 0");
    if (!(dt > 0.0)) throw ConfigError("reward: dt must be > 0");
}

PlatoonFrame equilibrium_frame(const VehicleState& leader, const PlatoonConfig& cfg) {
    PlatoonFrame frame;
    frame.leader = leader;
    frame.followers.resize(static_cast<std::size_t>(cfg.n_followers));
    frame.prev_actions.assign(static_cast<std::size_t>(cfg.n_followers), 0.0);
    for (int k = 1; k <= cfg.n_followers; ++k) {
        auto& s = frame.followers[static_cast<std::size_t>(k - 1)];
        s.x = leader.x - static_cast<double>(k) * cfg.desired_gap();
        s.v = leader.v;
        s.a = 0.0;
    }
    return frame;
}

Observation build_observation(int k, const PlatoonFrame& frame, const PlatoonConfig& cfg) {
    const auto n = static_cast<int>(frame.followers.size());
    if (k < 1 || k > n) throw StructuralError("build_observation: follower index out of range");

    const VehicleState& ego = frame.followers[static_cast<std::size_t>(k - 1)];
    const VehicleState pred = delayed_view(
        k == 1 ? frame.leader : frame.followers[static_cast<std::size_t>(k - 2)], cfg.v2v_delay);
    const VehicleState lead = delayed_view(frame.leader, cfg.v2v_delay);

    Observation obs;
    obs.e_gap_pred = (pred.x - ego.x) - cfg.desired_gap();
    obs.e_v_pred = pred.v - ego.v;
    obs.e_gap_lead = (lead.x - ego.x) - static_cast<double>(k) * cfg.desired_gap();
    obs.e_v_lead = lead.v - ego.v;
    obs.v = ego.v;
    obs.a = ego.a;
    return obs;
}

Vec6 normalize_observation(const Observation& obs, const PlatoonConfig& cfg) {
    Vec6 out;
    out << obs.e_gap_pred / kDistScale, obs.e_v_pred / cfg.v_max, obs.e_gap_lead / kDistScale,
        obs.e_v_lead / cfg.v_max, obs.v / cfg.v_max, obs.a / cfg.a_max;
    return out;
}

double compute_reward(double e_v_lead, double jerk, const RewardConfig& cfg) {
    return -cfg.omega1 * std::abs(e_v_lead) / cfg.v_max -
           cfg.omega2 * std::abs(jerk) / cfg.jerk_scale();
}

Observation predict_observation(const Observation& obs, double a_cand, double leader_a_est,
                                double pred_a_est, const PlatoonConfig& cfg) {
    // gap errors stand in for positions; step displacements depend only on
    // (v, a), so the desired-offset constants cancel
    const VehicleState ego = step_vehicle({0.0, obs.v, obs.a}, a_cand, cfg.dt);
    const VehicleState pred =
        step_vehicle({obs.e_gap_pred, obs.v + obs.e_v_pred, pred_a_est}, pred_a_est, cfg.dt);
    const VehicleState lead =
        step_vehicle({obs.e_gap_lead, obs.v + obs.e_v_lead, leader_a_est}, leader_a_est, cfg.dt);

    Observation next;
    next.e_gap_pred = pred.x - ego.x;
    next.e_v_pred = pred.v - ego.v;
    next.e_gap_lead = lead.x - ego.x;
    next.e_v_lead = lead.v - ego.v;
    next.v = ego.v;
    next.a = a_cand;
    return next;
}

double predict_reward(const Observation& obs, double a_cand, double leader_a_est,
                      double pred_a_est, const PlatoonConfig& pc, const RewardConfig& rc) {
    const Observation next = predict_observation(obs, a_cand, leader_a_est, pred_a_est, pc);
    const double jerk = (a_cand - obs.a) / pc.dt;
    return compute_reward(next.e_v_lead, jerk, rc);
}

StepResult step_platoon(const PlatoonFrame& frame, const std::vector<double>& actions,
                        double leader_next_v, const PlatoonConfig& pc, const RewardConfig& rc) {
    const std::size_t n = frame.followers.size();
    if (actions.size() != n) throw StructuralError("step_platoon: action count mismatch");
    if (frame.prev_actions.size() != n)
        throw StructuralError("step_platoon: prev_actions count mismatch");

    StepResult result;
    // leader replays its trace: position advances with the current
    // backward-difference acceleration, then velocity jumps to the next sample
    VehicleState lead;
    lead.x = frame.leader.x + frame.leader.v * pc.dt + 0.5 * frame.leader.a * pc.dt * pc.dt;
    lead.v = leader_next_v;
    lead.a = (leader_next_v - frame.leader.v) / pc.dt;
    result.frame.leader = lead;
    result.frame.time = frame.time + pc.dt;

    result.frame.followers.reserve(n);
    result.frame.prev_actions = actions;
    for (std::size_t i = 0; i < n; ++i)
        result.frame.followers.push_back(step_vehicle(frame.followers[i], actions[i], pc.dt));

    double ahead_x = lead.x;
    for (const VehicleState& s : result.frame.followers) {
        if (ahead_x - s.x <= pc.vehicle_length) result.collision = true;
        ahead_x = s.x;
    }

    result.observations.reserve(n);
    result.rewards.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.observations.push_back(
            build_observation(static_cast<int>(i) + 1, result.frame, pc));
        const double jerk = (actions[i] - frame.prev_actions[i]) / pc.dt;
        // reward sees the true (undelayed) leader velocity
        const double e_v_lead = lead.v - result.frame.followers[i].v;
        result.rewards.push_back(compute_reward(e_v_lead, jerk, rc));
    }
    return result;
}

}  // namespace hcfs
