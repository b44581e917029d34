#pragma once

#include <string>
#include <vector>

#include "hcfs/cacc.hpp"
#include "hcfs/ddpg.hpp"
#include "hcfs/evaluation.hpp"
#include "hcfs/kinematics.hpp"

namespace hcfs {

// Parameters of the synthetic stop-and-go leader trace.
struct SynthParams {
    double duration = 1200.0;   // s
    double v_mean = 8.0;        // m/s
    double amp = 5.0;           // m/s
    double period = 45.0;       // s
    double noise_sigma = 0.05;  // m/s
};

// Everything a run needs, addressable as flat dotted keys. Defaults carry the
// reference parameter tables; any key can come from a config file or a
// same-named command-line flag.
struct RunConfig {
    std::uint64_t seed = 1;
    PlatoonConfig platoon;
    double omega1 = 10.0;
    double omega2 = 0.1;
    CaccGains cacc;
    DdpgConfig ddpg;
    double beta_switch = 0.5;

    std::string profile_path;  // empty -> synthesize
    SynthParams synth;
    std::string cases_text = "200:220:8;620:640:6;1020:1040:4";

    std::string out_model = "model.txt";
    std::string out_curve = "curve.csv";
    std::string out_report = "report.csv";
    std::string out_traj_dir = "traj";
    std::string out_profile = "profile.csv";
    std::string in_model = "model.txt";

    bool jerk_max_set = false;  // explicit override of the 2*a_max/dt default

    RewardConfig reward_config() const;
    std::vector<CaseWindow> case_windows() const;  // parsed cases_text

    // resolves dependent defaults and validates every field
    void finalize();
};

// All known keys in dump order.
const std::vector<std::string>& config_keys();

// Applies "key=value"; unknown keys or unparsable values throw ConfigError.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// key=value lines, '#' comments. Unknown keys are rejected with line numbers.
RunConfig load_config_file(const std::string& path);
void apply_config_text(RunConfig& cfg, const std::string& text);

// Effective configuration; reloading the dump reproduces the run.
std::string dump_config(const RunConfig& cfg);

std::vector<CaseWindow> parse_case_windows(const std::string& text);

}  // namespace hcfs
