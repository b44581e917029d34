#include "hcfs/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "hcfs/rng.hpp"
#include "hcfs/text.hpp"

namespace hcfs {

namespace fs = std::filesystem;

VelocityProfile resolve_profile(const RunConfig& cfg) {
    if (!cfg.profile_path.empty())
        return load_profile(cfg.profile_path, cfg.platoon.dt, cfg.platoon.v_max);
    return synth_stop_and_go(cfg.synth.duration, cfg.platoon.dt, cfg.synth.v_mean, cfg.synth.amp,
                             cfg.synth.period, cfg.synth.noise_sigma,
                             substream_seed(cfg.seed, "profile-synth"), cfg.platoon.v_max);
}

EvalContext make_eval_context(const RunConfig& cfg) {
    EvalContext ctx;
    ctx.platoon = cfg.platoon;
    ctx.reward = cfg.reward_config();
    ctx.gains = cfg.cacc;
    ctx.beta_switch = cfg.beta_switch;
    ctx.profile = resolve_profile(cfg);
    return ctx;
}

namespace {

std::ofstream open_out(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

void write_curve(const std::string& path, const std::vector<EpisodeStats>& curve) {
    auto out = open_out(path);
    out << "episode,return,critic_loss\n";
    for (const EpisodeStats& s : curve)
        out << s.episode << ',' << fmt_double(s.total_return) << ','
            << fmt_double(s.mean_critic_loss) << '\n';
    if (!out) throw IoError("failed writing curve file: " + path);
}

}  // namespace

void run_train(const RunConfig& cfg) {
    TrainSetup setup;
    setup.platoon = cfg.platoon;
    setup.reward = cfg.reward_config();
    setup.profile = resolve_profile(cfg);
    for (const CaseWindow& w : cfg.case_windows())
        setup.holdout_windows.emplace_back(w.t_start, w.t_end);

    try {
        const TrainResult result = train(setup, cfg.ddpg);
        save_model(result.model, cfg.out_model);
        write_curve(cfg.out_curve, result.curve);
    } catch (const TrainingDiverged& diverged) {
        save_model(diverged.last_good().model, cfg.out_model);
        write_curve(cfg.out_curve, diverged.last_good().curve);
        throw;
    }
}

namespace {

std::string trajectory_path(const std::string& dir, int case_index, Strategy strategy) {
    return (fs::path(dir) /
            ("case" + std::to_string(case_index) + "_" + strategy_name(strategy) + ".csv"))
        .string();
}

}  // namespace

void run_compare(const RunConfig& cfg, const std::vector<Strategy>& strategies) {
    const auto cases = cfg.case_windows();
    const bool needs_model = std::any_of(strategies.begin(), strategies.end(),
                                         [](Strategy s) { return s != Strategy::Cacc; });
    ModelParams model;
    if (needs_model) model = load_model(cfg.in_model);

    const EvalContext ctx = make_eval_context(cfg);

    std::vector<ReportRow> report;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        for (Strategy s : strategies) {
            CaseSpec spec;
            spec.window = cases[ci];
            spec.strategy = s;
            spec.seed = cfg.seed;
            const Trajectory traj = run_case(spec, needs_model ? &model : nullptr, ctx);
            auto tout = open_out(trajectory_path(cfg.out_traj_dir, static_cast<int>(ci) + 1, s));
            write_trajectory_csv(traj, tout);

            ReportRow row;
            row.case_index = static_cast<int>(ci) + 1;
            row.window = cases[ci];
            row.strategy = s;
            row.metrics = case_metrics(traj);
            report.push_back(row);
        }
    }
    auto out = open_out(cfg.out_report);
    write_report_csv(report, out);
    if (!out) throw IoError("failed writing report file: " + cfg.out_report);
}

void run_eval(const RunConfig& cfg, Strategy strategy, const CaseWindow& window,
              std::ostream& summary) {
    ModelParams model;
    const bool needs_model = strategy != Strategy::Cacc;
    if (needs_model) model = load_model(cfg.in_model);

    const EvalContext ctx = make_eval_context(cfg);
    CaseSpec spec;
    spec.window = window;
    spec.strategy = strategy;
    spec.seed = cfg.seed;
    const Trajectory traj = run_case(spec, needs_model ? &model : nullptr, ctx);

    auto tout = open_out(trajectory_path(cfg.out_traj_dir, 1, strategy));
    write_trajectory_csv(traj, tout);

    ReportRow row;
    row.case_index = 1;
    row.window = window;
    row.strategy = strategy;
    row.metrics = case_metrics(traj);
    write_report_csv({row}, summary);
}

void run_synth_profile(const RunConfig& cfg) {
    const VelocityProfile profile =
        synth_stop_and_go(cfg.synth.duration, cfg.platoon.dt, cfg.synth.v_mean, cfg.synth.amp,
                          cfg.synth.period, cfg.synth.noise_sigma,
                          substream_seed(cfg.seed, "profile-synth"), cfg.platoon.v_max);
    auto out = open_out(cfg.out_profile);
    write_profile_csv(profile, out);
    if (!out) throw IoError("failed writing profile file: " + cfg.out_profile);
}

}  // namespace hcfs
