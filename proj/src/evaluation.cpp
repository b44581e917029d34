#include "hcfs/evaluation.hpp"

#include <cmath>
#include <ostream>

#include "hcfs/text.hpp"

namespace hcfs {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Cacc: return "CACC";
        case Strategy::Ddpg: return "DDPG";
        case Strategy::Hcfs: return "HCFS";
    }
    throw StructuralError("unknown strategy");
}

Strategy parse_strategy(const std::string& name) {
    if (name == "CACC" || name == "cacc") return Strategy::Cacc;
    if (name == "DDPG" || name == "ddpg") return Strategy::Ddpg;
    if (name == "HCFS" || name == "hcfs") return Strategy::Hcfs;
    throw ConfigError("unknown strategy '" + name + "' (expected CACC, DDPG or HCFS)");
}

Trajectory run_case(const CaseSpec& spec, const ModelParams* model, const EvalContext& ctx) {
    if (spec.strategy != Strategy::Cacc && model == nullptr)
        throw StructuralError("run_case: strategy " + strategy_name(spec.strategy) +
                              " needs a model");
    if (!(spec.window.t_end > spec.window.t_start))
        throw ConfigError("case window must satisfy t_start < t_end");
    if (spec.window.n_followers < 1) throw ConfigError("case needs at least one follower");

    PlatoonConfig pc = ctx.platoon;
    pc.n_followers = spec.window.n_followers;
    const auto n = static_cast<std::size_t>(pc.n_followers);

    const std::size_t i0 = ctx.profile.index_at(spec.window.t_start);
    const std::size_t i1 = ctx.profile.index_at(spec.window.t_end);
    if (i1 <= i0) throw ConfigError("case window shorter than one frame");
    const std::size_t steps = i1 - i0;

    // leader enters the slice with its profile velocity and mid-trace
    // backward-difference acceleration; positions re-origin at the slice
    VehicleState leader0{0.0, ctx.profile.v[i0], 0.0};
    if (i0 > 0) leader0.a = (ctx.profile.v[i0] - ctx.profile.v[i0 - 1]) / pc.dt;

    PlatoonFrame frame = equilibrium_frame(leader0, pc);
    std::vector<Observation> obs(n);
    for (std::size_t k = 0; k < n; ++k)
        obs[k] = build_observation(static_cast<int>(k) + 1, frame, pc);

    std::vector<HybridState> hybrid(n);
    for (std::size_t k = 0; k < n; ++k) hybrid[k].a_prev = frame.followers[k].a;

    Trajectory out;
    out.rows.reserve(steps * n);

    for (std::size_t t = 0; t < steps; ++t) {
        std::vector<double> actions(n);
        std::vector<int> sources(n);
        for (std::size_t k = 0; k < n; ++k) {
            // neighbor acceleration estimates as observed over V2V
            const VehicleState& pred_state = (k == 0) ? frame.leader : frame.followers[k - 1];
            const double leader_a_est = frame.leader.a;
            const double pred_a_est = pred_state.a;
            const double a_prev = frame.prev_actions[k];
            switch (spec.strategy) {
                case Strategy::Cacc:
                    actions[k] = clamp_jerk(
                        cacc_command(obs[k], ctx.gains, obs[k].v, pc.dt, pc.a_max), a_prev,
                        pc.jerk_max, pc.dt);
                    sources[k] = 0;
                    break;
                case Strategy::Ddpg:
                    actions[k] = clamp_jerk(
                        clamp_accel(actor_action(model->actor, normalize_observation(obs[k], pc),
                                                 pc.a_max),
                                    pc.a_max),
                        a_prev, pc.jerk_max, pc.dt);
                    sources[k] = 1;
                    break;
                case Strategy::Hcfs: {
                    const HybridDecision dec =
                        hcfs_select(obs[k], leader_a_est, pred_a_est, hybrid[k], model->actor,
                                    ctx.gains, pc, ctx.reward, ctx.beta_switch);
                    actions[k] = dec.a_exec;
                    sources[k] = dec.switched ? 2 : static_cast<int>(dec.source);
                    break;
                }
            }
        }

        const StepResult sr =
            step_platoon(frame, actions, ctx.profile.v[i0 + t + 1], pc, ctx.reward);

        const double row_t = static_cast<double>(t + 1) * pc.dt;
        for (std::size_t k = 0; k < n; ++k) {
            TrajectoryRow row;
            row.t = row_t;
            row.vehicle_id = static_cast<int>(k) + 1;
            row.x = sr.frame.followers[k].x;
            row.v = sr.frame.followers[k].v;
            row.a = actions[k];
            row.jerk = (actions[k] - frame.prev_actions[k]) / pc.dt;
            row.e_v_lead = sr.frame.leader.v - sr.frame.followers[k].v;
            row.source = sources[k];
            row.reward = sr.rewards[k];
            out.rows.push_back(row);
        }

        frame = sr.frame;
        obs = sr.observations;
        if (sr.collision) {
            out.collision = true;
            break;
        }
    }
    return out;
}

CaseMetrics case_metrics(const Trajectory& trajectory) {
    if (trajectory.rows.empty()) throw StructuralError("case_metrics: empty trajectory");

    CaseMetrics m;
    m.collision = trajectory.collision;
    const auto count = static_cast<double>(trajectory.rows.size());
    double ev_mean = 0.0, jerk_mean = 0.0;
    for (const TrajectoryRow& row : trajectory.rows) {
        m.sum_reward += row.reward;
        m.sum_abs_ev += std::abs(row.e_v_lead);
        m.sum_abs_jerk += std::abs(row.jerk);
    }
    ev_mean = m.sum_abs_ev / count;
    jerk_mean = m.sum_abs_jerk / count;

    double ev_var = 0.0, jerk_var = 0.0;
    for (const TrajectoryRow& row : trajectory.rows) {
        const double de = std::abs(row.e_v_lead) - ev_mean;
        const double dj = std::abs(row.jerk) - jerk_mean;
        ev_var += de * de;
        jerk_var += dj * dj;
    }
    m.std_ev = std::sqrt(ev_var / count);
    m.std_jerk = std::sqrt(jerk_var / count);
    return m;
}

std::vector<ReportRow> compare_report(const std::vector<CaseWindow>& cases,
                                      const std::vector<Strategy>& strategies,
                                      const ModelParams* model, const EvalContext& ctx) {
    std::vector<ReportRow> rows;
    rows.reserve(cases.size() * strategies.size());
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        for (Strategy s : strategies) {
            CaseSpec spec;
            spec.window = cases[ci];
            spec.strategy = s;
            ReportRow row;
            row.case_index = static_cast<int>(ci) + 1;
            row.window = cases[ci];
            row.strategy = s;
            row.metrics = case_metrics(run_case(spec, model, ctx));
            rows.push_back(row);
        }
    }
    return rows;
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "t,vehicle_id,x,v,a,jerk,e_v_lead,source,reward\n";
    for (const TrajectoryRow& r : trajectory.rows) {
        out << fmt_double(r.t) << ',' << r.vehicle_id << ',' << fmt_double(r.x) << ','
            << fmt_double(r.v) << ',' << fmt_double(r.a) << ',' << fmt_double(r.jerk) << ','
            << fmt_double(r.e_v_lead) << ',' << r.source << ',' << fmt_double(r.reward) << '\n';
    }
}

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
    out << "case,strategy,sum_reward,sum_abs_ev,sum_abs_jerk,std_ev,std_jerk,collision\n";
    for (const ReportRow& r : rows) {
        out << r.case_index << ',' << strategy_name(r.strategy) << ','
            << fmt_double(r.metrics.sum_reward) << ',' << fmt_double(r.metrics.sum_abs_ev) << ','
            << fmt_double(r.metrics.sum_abs_jerk) << ',' << fmt_double(r.metrics.std_ev) << ','
            << fmt_double(r.metrics.std_jerk) << ',' << (r.metrics.collision ? 1 : 0) << '\n';
    }
}

}  // namespace hcfs
