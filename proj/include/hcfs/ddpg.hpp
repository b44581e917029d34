#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hcfs/environment.hpp"
#include "hcfs/neuralnet.hpp"
#include "hcfs/profiles.hpp"
#include "hcfs/rng.hpp"

namespace hcfs {

struct DdpgConfig {
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    std::size_t buffer_capacity = 500000;
    int batch_size = 32;
    double tau = 0.001;   // target-network tracking rate, in (0, 1]
    double gamma = 0.99;  // discount, in [0, 1)
    double theta_ou = 0.15;
    double sigma_ou = 0.6;       // initial exploration scale (m/s^2)
    double sigma_decay = 0.999;  // per-episode multiplier on sigma
    int episodes = 2000;
    std::uint64_t seed = 1;
    double episode_seconds = 60.0;
    int warmup = 1000;     // transitions gathered before updates start
    int update_every = 1;  // environment frames between optimizer steps

    void validate() const;
};

// One experience: normalized observations, executed action, realized reward.
struct Transition {
    Vec6 s = Vec6::Zero();
    double a = 0.0;
    double r = 0.0;
    Vec6 s_next = Vec6::Zero();
    bool done = false;
};

// Ring storage, oldest entries overwritten first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return storage_[i]; }

    // m draws, uniform with replacement, deterministic per rng state.
    std::vector<Transition> sample(int m, Rng& rng) const;

private:
    std::vector<Transition> storage_;
    std::size_t capacity_;
    std::size_t next_ = 0;
};

// Actor/critic current and target networks plus optimizer state. The actor
// emits the normalized action tanh(.) in [-1, 1]; the critic consumes the
// normalized observation with the normalized action appended.
struct ModelParams {
    Mlp actor;
    Mlp critic;
    Mlp actor_target;
    Mlp critic_target;
    AdamState actor_opt;
    AdamState critic_opt;
};

// Default architecture: actor 6-64-64-1 (rectifier hidden, tanh out),
// critic 7-64-64-1 (rectifier hidden, identity out).
ModelParams make_model(std::uint64_t seed);

void save_model(const ModelParams& model, const std::string& path);
ModelParams load_model(const std::string& path);

// Greedy policy action in m/s^2; always within [-a_max, a_max].
double actor_action(const Mlp& actor, const Vec6& normalized_obs, double a_max);

// Mean-reverting exploration noise, one step.
double ou_noise_step(double n_prev, double theta, double sigma, Rng& rng);

// y = r + gamma * q_next, with the bootstrap cut at terminal transitions.
inline double td_target(double r, double q_next, double gamma, bool done) {
    return r + gamma * q_next * (done ? 0.0 : 1.0);
}

// Ascent direction of mean_batch Q(s, mu(s)) with respect to the actor
// parameters, holding the critic fixed. Optionally reports the mean Q.
MlpGrads actor_policy_gradient(const Mlp& actor, const Mlp& critic, const MatrixXd& states,
                               double* mean_q = nullptr);

struct UpdateStats {
    double critic_loss = 0.0;
    double actor_objective = 0.0;
};

// One optimizer step each for critic (squared TD error against the target
// networks) and actor (policy gradient through the critic), then soft target
// updates. Throws NumericError on a non-finite loss.
UpdateStats update_step(ModelParams& nets, const std::vector<Transition>& batch,
                        const DdpgConfig& cfg, double a_max);

struct EpisodeStats {
    int episode = 0;
    double total_return = 0.0;    // realized reward summed over followers and frames
    double mean_critic_loss = 0.0;
    bool collision = false;
};

struct TrainResult {
    ModelParams model;
    std::vector<EpisodeStats> curve;
};

// Thrown when training hits a non-finite loss; carries the parameters as of
// the last completed episode.
class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(const std::string& what, TrainResult last_good)
        : std::runtime_error(what), last_good_(std::move(last_good)) {}
    const TrainResult& last_good() const { return last_good_; }

private:
    TrainResult last_good_;
};

struct TrainSetup {
    PlatoonConfig platoon;  // n_followers is the training platoon size
    RewardConfig reward;
    VelocityProfile profile;
    // [t_start, t_end) windows no training episode may overlap
    std::vector<std::pair<double, double>> holdout_windows;
};

// Runs cfg.episodes episodes on random training-profile slices. One shared
// policy receives transitions from all followers; per-follower noise streams.
// Fully deterministic per (seed, config, profile).
TrainResult train(const TrainSetup& setup, const DdpgConfig& cfg);

}  // namespace hcfs
