#include "hcfs/ddpg.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hcfs/text.hpp"

namespace hcfs {

void DdpgConfig::validate() const {
    if (!(actor_lr >= 0.0)) throw ConfigError("ddpg.actor_lr must be >= 0");
    if (!(critic_lr >= 0.0)) throw ConfigError("ddpg.critic_lr must be >= 0");
    if (buffer_capacity < 1) throw ConfigError("ddpg.buffer_capacity must be >= 1");
    if (batch_size < 1) throw ConfigError("ddpg.batch_size must be >= 1");
    if (static_cast<std::size_t>(batch_size) > buffer_capacity)
        throw ConfigError("ddpg.batch_size must not exceed ddpg.buffer_capacity");
    if (!(tau > 0.0) || !(tau <= 1.0)) throw ConfigError("ddpg.tau must be in (0, 1]");
    if (!(gamma >= 0.0) || !(gamma < 1.0)) throw ConfigError("ddpg.gamma must be in [0, 1)");
    if (!(theta_ou > 0.0) || !(theta_ou < 1.0))
        throw ConfigError("ddpg.theta_ou must be in (0, 1)");
    if (!(sigma_ou >= 0.0)) throw ConfigError("ddpg.sigma_ou must be >= 0");
    if (!(sigma_decay > 0.0) || !(sigma_decay <= 1.0))
        throw ConfigError("ddpg.sigma_decay must be in (0, 1]");
    if (episodes < 0) throw ConfigError("ddpg.episodes must be >= 0");
    if (!(episode_seconds > 0.0)) throw ConfigError("ddpg.episode_seconds must be > 0");
    if (warmup < 0) throw ConfigError("ddpg.warmup must be >= 0");
    if (update_every < 1) throw ConfigError("ddpg.update_every must be >= 1");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity < 1) throw StructuralError("replay buffer capacity must be >= 1");
}

void ReplayBuffer::push(const Transition& t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(t);
    } else {
        storage_[next_] = t;
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(int m, Rng& rng) const {
    if (m < 1) throw StructuralError("replay sample: m must be >= 1");
    if (storage_.size() < static_cast<std::size_t>(m))
        throw StructuralError("replay sample: buffer holds fewer than m transitions");
    std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
    std::vector<Transition> batch;
    batch.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) batch.push_back(storage_[pick(rng)]);
    return batch;
}

namespace {
constexpr int kObsDim = 6;
const std::vector<int> kActorDims{6, 64, 64, 1};
const std::vector<int> kCriticDims{7, 64, 64, 1};
}  // namespace

ModelParams make_model(std::uint64_t seed) {
    Rng rng(seed);
    ModelParams m;
    m.actor = make_mlp(kActorDims, Activation::Relu, Activation::Tanh, rng);
    m.critic = make_mlp(kCriticDims, Activation::Relu, Activation::Identity, rng);
    m.actor_target = m.actor;
    m.critic_target = m.critic;
    m.actor_opt = make_adam_state(m.actor);
    m.critic_opt = make_adam_state(m.critic);
    return m;
}

double actor_action(const Mlp& actor, const Vec6& normalized_obs, double a_max) {
    return a_max * forward(actor, VectorXd(normalized_obs))(0);
}

double ou_noise_step(double n_prev, double theta, double sigma, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    return n_prev + theta * (0.0 - n_prev) + sigma * gauss(rng);
}

MlpGrads actor_policy_gradient(const Mlp& actor, const Mlp& critic, const MatrixXd& states,
                               double* mean_q) {
    const Eigen::Index m = states.cols();
    ForwardCache actor_cache;
    const MatrixXd a_mu = forward(actor, states, &actor_cache);  // 1 x m, normalized

    MatrixXd critic_in(states.rows() + 1, m);
    critic_in << states, a_mu;
    ForwardCache critic_cache;
    const MatrixXd q = forward(critic, critic_in, &critic_cache);
    if (mean_q) *mean_q = q.row(0).mean();

    MatrixXd upstream = MatrixXd::Constant(1, m, 1.0 / static_cast<double>(m));
    MatrixXd input_grad;
    backward(critic, critic_cache, upstream, &input_grad);
    const MatrixXd action_grad = input_grad.row(states.rows());  // d mean(Q) / d a

    return backward(actor, actor_cache, action_grad);
}

UpdateStats update_step(ModelParams& nets, const std::vector<Transition>& batch,
                        const DdpgConfig& cfg, double a_max) {
    const auto m = static_cast<Eigen::Index>(batch.size());
    if (m < 1) throw StructuralError("update_step: empty batch");

    MatrixXd s(kObsDim, m), s_next(kObsDim, m);
    VectorXd actions(m), rewards(m), not_done(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Transition& t = batch[static_cast<std::size_t>(j)];
        s.col(j) = t.s;
        s_next.col(j) = t.s_next;
        actions(j) = t.a / a_max;  // critic sees normalized actions
        rewards(j) = t.r;
        not_done(j) = t.done ? 0.0 : 1.0;
    }

    // TD targets from the target networks, held constant
    MatrixXd next_in(kObsDim + 1, m);
    next_in << s_next, forward(nets.actor_target, s_next);
    const MatrixXd q_next = forward(nets.critic_target, next_in);
    const VectorXd targets =
        rewards.array() + cfg.gamma * q_next.row(0).transpose().array() * not_done.array();

    // critic: one step on mean squared TD error
    MatrixXd critic_in(kObsDim + 1, m);
    critic_in << s, actions.transpose();
    ForwardCache critic_cache;
    const MatrixXd q = forward(nets.critic, critic_in, &critic_cache);
    const VectorXd td = q.row(0).transpose() - targets;
    const double critic_loss = td.squaredNorm() / static_cast<double>(m);
    if (!std::isfinite(critic_loss)) throw NumericError("update_step: non-finite critic loss");

    MatrixXd upstream = (2.0 / static_cast<double>(m)) * td.transpose();
    const MlpGrads critic_grads = backward(nets.critic, critic_cache, upstream);
    adam_step(nets.critic, critic_grads, nets.critic_opt, cfg.critic_lr);

    // actor: ascend mean Q(s, mu(s)) through the (frozen) critic
    double actor_objective = 0.0;
    MlpGrads actor_grads = actor_policy_gradient(nets.actor, nets.critic, s, &actor_objective);
    for (auto& g : actor_grads.w) g = -g;
    for (auto& g : actor_grads.b) g = -g;
    adam_step(nets.actor, actor_grads, nets.actor_opt, cfg.actor_lr);

    soft_update(nets.critic_target, nets.critic, cfg.tau);
    soft_update(nets.actor_target, nets.actor, cfg.tau);
    return UpdateStats{critic_loss, actor_objective};
}

namespace {

void write_dims(std::ostream& out, const Mlp& net) {
    const auto dims = net.dims();
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) out << ' ';
        out << dims[i];
    }
}

std::vector<int> parse_dims(std::string_view text, int lineno) {
    std::vector<int> dims;
    for (const auto& tok : split(trim(text), ' ')) {
        if (tok.empty()) continue;
        const auto v = parse_integer(tok);
        if (!v || *v < 1) throw ParseError("model: bad layer dimension", lineno);
        dims.push_back(static_cast<int>(*v));
    }
    if (dims.size() < 2) throw ParseError("model: dimension list too short", lineno);
    return dims;
}

Mlp shaped_mlp(const std::vector<int>& dims, Activation output) {
    Mlp net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.w = MatrixXd::Zero(dims[i + 1], dims[i]);
        l.b = VectorXd::Zero(dims[i + 1]);
        l.act = (i + 2 == dims.size()) ? output : Activation::Relu;
        net.layers.push_back(std::move(l));
    }
    return net;
}

void expect_line(std::istream& in, int& lineno, const std::string& expected) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("model: unexpected end of file", lineno + 1);
    ++lineno;
    if (trim(line) != expected)
        throw ParseError("model: expected '" + expected + "'", lineno);
}

}  // namespace

void save_model(const ModelParams& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    out << "hcfs-model v1\n";
    write_dims(out, model.actor);
    out << " ; ";
    write_dims(out, model.critic);
    out << '\n';
    out << "actor\n";
    write_mlp_layers(out, model.actor);
    out << "critic\n";
    write_mlp_layers(out, model.critic);
    out << "target-actor\n";
    write_mlp_layers(out, model.actor_target);
    out << "target-critic\n";
    write_mlp_layers(out, model.critic_target);
    if (!out) throw IoError("failed writing model file: " + path);
}

ModelParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);

    int lineno = 0;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("model: empty file", 1);
    ++lineno;
    if (trim(line) != "hcfs-model v1") throw ParseError("model: bad header", lineno);

    if (!std::getline(in, line)) throw ParseError("model: missing dimension list", 2);
    ++lineno;
    const auto parts = split(line, ';');
    if (parts.size() != 2) throw ParseError("model: expected 'actor dims ; critic dims'", lineno);
    const auto actor_dims = parse_dims(parts[0], lineno);
    const auto critic_dims = parse_dims(parts[1], lineno);
    if (actor_dims.front() != kObsDim || actor_dims.back() != 1)
        throw ParseError("model: actor must map 6 features to 1 action", lineno);
    if (critic_dims.front() != kObsDim + 1 || critic_dims.back() != 1)
        throw ParseError("model: critic must map 7 features to 1 value", lineno);

    ModelParams model;
    model.actor = shaped_mlp(actor_dims, Activation::Tanh);
    model.critic = shaped_mlp(critic_dims, Activation::Identity);
    model.actor_target = model.actor;
    model.critic_target = model.critic;

    expect_line(in, lineno, "actor");
    read_mlp_layers(in, model.actor, lineno);
    expect_line(in, lineno, "critic");
    read_mlp_layers(in, model.critic, lineno);
    expect_line(in, lineno, "target-actor");
    read_mlp_layers(in, model.actor_target, lineno);
    expect_line(in, lineno, "target-critic");
    read_mlp_layers(in, model.critic_target, lineno);

    model.actor_opt = make_adam_state(model.actor);
    model.critic_opt = make_adam_state(model.critic);
    return model;
}

namespace {

// start indices of episode slices that do not overlap any holdout window
std::vector<std::size_t> allowed_episode_starts(const VelocityProfile& profile, int steps,
                                                const std::vector<std::pair<double, double>>& holdouts) {
    std::vector<std::size_t> starts;
    if (profile.v.size() < static_cast<std::size_t>(steps) + 1) return starts;
    const std::size_t last = profile.v.size() - 1 - static_cast<std::size_t>(steps);
    for (std::size_t i = 0; i <= last; ++i) {
        const double t0 = static_cast<double>(i) * profile.dt;
        const double t1 = t0 + static_cast<double>(steps) * profile.dt;
        bool clear = true;
        for (const auto& [h0, h1] : holdouts)
            if (t0 < h1 && h0 < t1) {
                clear = false;
                break;
            }
        if (clear) starts.push_back(i);
    }
    return starts;
}

}  // namespace

TrainResult train(const TrainSetup& setup, const DdpgConfig& cfg) {
    cfg.validate();
    setup.platoon.validate();
    setup.reward.validate();
    setup.profile.validate(setup.platoon.v_max);

    const PlatoonConfig& pc = setup.platoon;
    const int steps = static_cast<int>(std::llround(cfg.episode_seconds / pc.dt));
    if (steps < 1) throw ConfigError("ddpg: episode shorter than one frame");

    const auto starts = allowed_episode_starts(setup.profile, steps, setup.holdout_windows);
    if (starts.empty())
        throw ConfigError("ddpg: profile leaves no training slice of the requested length");

    const auto n = static_cast<std::size_t>(pc.n_followers);
    const auto leader_trace = derive_leader_trace(setup.profile, 0.0);

    TrainResult result;
    result.model = make_model(substream_seed(cfg.seed, "init"));
    if (cfg.episodes == 0) return result;

    Rng train_rng = make_rng(cfg.seed, "train");
    std::vector<Rng> noise_rngs;
    noise_rngs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) noise_rngs.push_back(make_rng(cfg.seed, "noise", k));

    ReplayBuffer buffer(cfg.buffer_capacity);
    TrainResult checkpoint = result;

    std::uniform_int_distribution<std::size_t> pick_start(0, starts.size() - 1);
    for (int ep = 0; ep < cfg.episodes; ++ep) {
        const double sigma = cfg.sigma_ou * std::pow(cfg.sigma_decay, static_cast<double>(ep));
        const std::size_t i0 = starts[pick_start(train_rng)];

        PlatoonFrame frame = equilibrium_frame(leader_trace[i0], pc);
        std::vector<Observation> obs(n);
        for (std::size_t k = 0; k < n; ++k)
            obs[k] = build_observation(static_cast<int>(k) + 1, frame, pc);
        std::vector<double> noise(n, 0.0);

        EpisodeStats stats;
        stats.episode = ep;
        double loss_sum = 0.0;
        int loss_count = 0;

        try {
            for (int t = 0; t < steps; ++t) {
                std::vector<double> actions(n);
                for (std::size_t k = 0; k < n; ++k) {
                    noise[k] = ou_noise_step(noise[k], cfg.theta_ou, sigma, noise_rngs[k]);
                    const double a =
                        actor_action(result.model.actor, normalize_observation(obs[k], pc),
                                     pc.a_max) +
                        noise[k];
                    // exploration is accel-clamped but not jerk-clamped: the
                    // jerk cost stays visible in the reward
                    actions[k] = clamp_accel(a, pc.a_max);
                }

                const StepResult sr = step_platoon(frame, actions, leader_trace[i0 + t + 1].v,
                                                   pc, setup.reward);
                for (std::size_t k = 0; k < n; ++k) {
                    Transition tr;
                    tr.s = normalize_observation(obs[k], pc);
                    tr.a = actions[k];
                    tr.r = sr.rewards[k];
                    tr.s_next = normalize_observation(sr.observations[k], pc);
                    // the reward carries no collision term, so cutting the
                    // bootstrap at terminations would make an early crash look
                    // free to the critic; values stay infinite-horizon
                    tr.done = false;
                    buffer.push(tr);
                    stats.total_return += sr.rewards[k];
                }

                if (buffer.size() >= static_cast<std::size_t>(cfg.warmup) &&
                    buffer.size() >= static_cast<std::size_t>(cfg.batch_size) &&
                    t % cfg.update_every == 0) {
                    const auto batch = buffer.sample(cfg.batch_size, train_rng);
                    const UpdateStats us = update_step(result.model, batch, cfg, pc.a_max);
                    loss_sum += us.critic_loss;
                    ++loss_count;
                }

                frame = sr.frame;
                obs = sr.observations;
                if (sr.collision) {
                    stats.collision = true;
                    break;
                }
            }
        } catch (const NumericError& err) {
            throw TrainingDiverged(std::string("training diverged at episode ") +
                                       std::to_string(ep) + ": " + err.what(),
                                   std::move(checkpoint));
        }

        stats.mean_critic_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
        result.curve.push_back(stats);
        checkpoint = result;
    }
    return result;
}

}  // namespace hcfs
