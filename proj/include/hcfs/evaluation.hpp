#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcfs/cacc.hpp"
#include "hcfs/ddpg.hpp"
#include "hcfs/hybrid.hpp"
#include "hcfs/profiles.hpp"

namespace hcfs {

enum class Strategy { Cacc, Ddpg, Hcfs };

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);  // throws ConfigError

// A leader-profile slice and a platoon size.
struct CaseWindow {
    double t_start = 0.0;
    double t_end = 0.0;
    int n_followers = 1;
};

struct CaseSpec {
    CaseWindow window;
    Strategy strategy = Strategy::Cacc;
    std::uint64_t seed = 0;
};

// One follower at one frame. source: 0 = CACC, 1 = DDPG, 2 = blend frame.
struct TrajectoryRow {
    double t = 0.0;
    int vehicle_id = 0;
    double x = 0.0;
    double v = 0.0;
    double a = 0.0;
    double jerk = 0.0;
    double e_v_lead = 0.0;
    int source = 0;
    double reward = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    bool collision = false;
};

// The five aggregate statistics of one strategy on one case.
struct CaseMetrics {
    double sum_reward = 0.0;
    double sum_abs_ev = 0.0;    // m/s
    double sum_abs_jerk = 0.0;  // m/s^3
    double std_ev = 0.0;        // population std of |e_v| samples
    double std_jerk = 0.0;      // population std of |jerk| samples
    bool collision = false;
};

struct EvalContext {
    PlatoonConfig platoon;
    RewardConfig reward;
    CaccGains gains;
    double beta_switch = 0.5;
    VelocityProfile profile;
};

// Simulates the slice under one strategy. Followers start at desired spacing
// with the leader's initial velocity; every strategy's command goes through
// the shared accel+jerk clamp path. A collision frame is recorded, then the
// run stops. `model` may be null for the CACC strategy only.
Trajectory run_case(const CaseSpec& spec, const ModelParams* model, const EvalContext& ctx);

CaseMetrics case_metrics(const Trajectory& trajectory);

struct ReportRow {
    int case_index = 0;  // 1-based
    CaseWindow window;
    Strategy strategy = Strategy::Cacc;
    CaseMetrics metrics;
};

// All (case, strategy) combinations in a fixed order. Cell values do not
// depend on the order strategies are listed in.
std::vector<ReportRow> compare_report(const std::vector<CaseWindow>& cases,
                                      const std::vector<Strategy>& strategies,
                                      const ModelParams* model, const EvalContext& ctx);

// header "t,vehicle_id,x,v,a,jerk,e_v_lead,source,reward"
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
// header "case,strategy,sum_reward,sum_abs_ev,sum_abs_jerk,std_ev,std_jerk,collision"
void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out);

}  // namespace hcfs
