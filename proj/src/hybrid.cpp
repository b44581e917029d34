#include "hcfs/hybrid.hpp"

#include <cmath>

namespace hcfs {

HybridDecision hcfs_select(const Observation& obs, double leader_a_est, double pred_a_est,
                           HybridState& state, const Mlp& actor, const CaccGains& gains,
                           const PlatoonConfig& pc, const RewardConfig& rc, double beta_switch) {
    const double a_prev = state.a_prev;

    HybridDecision dec;
    dec.a_ddpg = clamp_jerk(
        clamp_accel(actor_action(actor, normalize_observation(obs, pc), pc.a_max), pc.a_max),
        a_prev, pc.jerk_max, pc.dt);
    dec.a_cacc = clamp_jerk(
        clamp_accel(cacc_command(obs, gains, obs.v, pc.dt, pc.a_max), pc.a_max), a_prev,
        pc.jerk_max, pc.dt);

    dec.r_ddpg = predict_reward(obs, dec.a_ddpg, leader_a_est, pred_a_est, pc, rc);
    dec.r_cacc = predict_reward(obs, dec.a_cacc, leader_a_est, pred_a_est, pc, rc);

    dec.source = (dec.r_ddpg > dec.r_cacc) ? ControllerSource::Ddpg : ControllerSource::Cacc;
    dec.switched = state.prev_source.has_value() && *state.prev_source != dec.source;
    dec.beta = dec.switched ? beta_switch : 0.0;

    const double chosen = (dec.source == ControllerSource::Ddpg) ? dec.a_ddpg : dec.a_cacc;
    const double other = (dec.source == ControllerSource::Ddpg) ? dec.a_cacc : dec.a_ddpg;
    // keep the non-blended path bit-exact so the executed action's predicted
    // reward recomputes to exactly max(r_ddpg, r_cacc)
    dec.a_exec = (dec.beta == 0.0) ? chosen : (1.0 - dec.beta) * chosen + dec.beta * other;

    state.prev_source = dec.source;
    state.a_prev = dec.a_exec;
    return dec;
}

JerkCheck verify_jerk_bound(std::span<const double> a_exec, double jerk_max, double dt) {
    JerkCheck check;
    const double band = jerk_max * dt + kJerkBoundTol;
    for (std::size_t i = 1; i < a_exec.size(); ++i) {
        if (std::abs(a_exec[i] - a_exec[i - 1]) > band) {
            check.pass = false;
            check.first_violation = i;
            return check;
        }
    }
    return check;
}

}  // namespace hcfs
