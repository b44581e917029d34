#include "hcfs/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hcfs/text.hpp"

namespace hcfs {

namespace {

struct KeyEntry {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

double parse_double_or_throw(const std::string& key, const std::string& value) {
    const auto v = parse_double(trim(value));
    if (!v || !std::isfinite(*v)) throw ConfigError("config: key '" + key + "' needs a number");
    return *v;
}

long long parse_int_or_throw(const std::string& key, const std::string& value) {
    const auto v = parse_integer(trim(value));
    if (!v) throw ConfigError("config: key '" + key + "' needs an integer");
    return *v;
}

std::uint64_t parse_u64_or_throw(const std::string& key, const std::string& value) {
    const auto v = parse_u64(trim(value));
    if (!v) throw ConfigError("config: key '" + key + "' needs a non-negative integer");
    return *v;
}

const std::vector<KeyEntry>& key_table() {
    static const std::vector<KeyEntry> table = [] {
        std::vector<KeyEntry> t;
        auto add_double = [&t](const std::string& key, auto getter) {
            t.push_back(KeyEntry{
                key,
                [key, getter](RunConfig& c, const std::string& v) {
                    *getter(c) = parse_double_or_throw(key, v);
                },
                [getter](const RunConfig& c) {
                    return fmt_double(*getter(const_cast<RunConfig&>(c)));
                }});
        };
        auto add_string = [&t](const std::string& key, auto getter) {
            t.push_back(KeyEntry{
                key,
                [getter](RunConfig& c, const std::string& v) { *getter(c) = std::string(trim(v)); },
                [getter](const RunConfig& c) { return *getter(const_cast<RunConfig&>(c)); }});
        };

        t.push_back(KeyEntry{
            "seed",
            [](RunConfig& c, const std::string& v) {
                c.seed = parse_u64_or_throw("seed", v);
                c.ddpg.seed = c.seed;
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }});

        t.push_back(KeyEntry{
            "platoon.n_followers",
            [](RunConfig& c, const std::string& v) {
                c.platoon.n_followers =
                    static_cast<int>(parse_int_or_throw("platoon.n_followers", v));
            },
            [](const RunConfig& c) { return std::to_string(c.platoon.n_followers); }});
        add_double("platoon.dt", [](RunConfig& c) { return &c.platoon.dt; });
        add_double("platoon.vehicle_length", [](RunConfig& c) { return &c.platoon.vehicle_length; });
        add_double("platoon.safe_headway", [](RunConfig& c) { return &c.platoon.safe_headway; });
        add_double("platoon.a_max", [](RunConfig& c) { return &c.platoon.a_max; });
        add_double("platoon.v_max", [](RunConfig& c) { return &c.platoon.v_max; });
        t.push_back(KeyEntry{
            "platoon.jerk_max",
            [](RunConfig& c, const std::string& v) {
                c.platoon.jerk_max = parse_double_or_throw("platoon.jerk_max", v);
                c.jerk_max_set = true;
            },
            [](const RunConfig& c) { return fmt_double(c.platoon.jerk_max); }});
        add_double("platoon.v2v_delay", [](RunConfig& c) { return &c.platoon.v2v_delay; });

        add_double("reward.omega1", [](RunConfig& c) { return &c.omega1; });
        add_double("reward.omega2", [](RunConfig& c) { return &c.omega2; });

        add_double("cacc.k1", [](RunConfig& c) { return &c.cacc.k1; });
        add_double("cacc.k2", [](RunConfig& c) { return &c.cacc.k2; });
        add_double("cacc.k3", [](RunConfig& c) { return &c.cacc.k3; });
        add_double("cacc.k4", [](RunConfig& c) { return &c.cacc.k4; });

        add_double("ddpg.actor_lr", [](RunConfig& c) { return &c.ddpg.actor_lr; });
        add_double("ddpg.critic_lr", [](RunConfig& c) { return &c.ddpg.critic_lr; });
        t.push_back(KeyEntry{
            "ddpg.buffer_capacity",
            [](RunConfig& c, const std::string& v) {
                const auto n = parse_int_or_throw("ddpg.buffer_capacity", v);
                if (n < 1) throw ConfigError("ddpg.buffer_capacity must be >= 1");
                c.ddpg.buffer_capacity = static_cast<std::size_t>(n);
            },
            [](const RunConfig& c) { return std::to_string(c.ddpg.buffer_capacity); }});
        t.push_back(KeyEntry{
            "ddpg.batch_size",
            [](RunConfig& c, const std::string& v) {
                c.ddpg.batch_size = static_cast<int>(parse_int_or_throw("ddpg.batch_size", v));
            },
            [](const RunConfig& c) { return std::to_string(c.ddpg.batch_size); }});
        add_double("ddpg.tau", [](RunConfig& c) { return &c.ddpg.tau; });
        add_double("ddpg.gamma", [](RunConfig& c) { return &c.ddpg.gamma; });
        add_double("ddpg.theta_ou", [](RunConfig& c) { return &c.ddpg.theta_ou; });
        add_double("ddpg.sigma_ou", [](RunConfig& c) { return &c.ddpg.sigma_ou; });
        add_double("ddpg.sigma_decay", [](RunConfig& c) { return &c.ddpg.sigma_decay; });
        t.push_back(KeyEntry{
            "ddpg.episodes",
            [](RunConfig& c, const std::string& v) {
                c.ddpg.episodes = static_cast<int>(parse_int_or_throw("ddpg.episodes", v));
            },
            [](const RunConfig& c) { return std::to_string(c.ddpg.episodes); }});
        add_double("ddpg.episode_seconds", [](RunConfig& c) { return &c.ddpg.episode_seconds; });
        t.push_back(KeyEntry{
            "ddpg.warmup",
            [](RunConfig& c, const std::string& v) {
                c.ddpg.warmup = static_cast<int>(parse_int_or_throw("ddpg.warmup", v));
            },
            [](const RunConfig& c) { return std::to_string(c.ddpg.warmup); }});
        t.push_back(KeyEntry{
            "ddpg.update_every",
            [](RunConfig& c, const std::string& v) {
                c.ddpg.update_every = static_cast<int>(parse_int_or_throw("ddpg.update_every", v));
            },
            [](const RunConfig& c) { return std::to_string(c.ddpg.update_every); }});

        add_double("hybrid.beta_switch", [](RunConfig& c) { return &c.beta_switch; });

        add_string("profile.path", [](RunConfig& c) { return &c.profile_path; });
        add_double("profile.duration", [](RunConfig& c) { return &c.synth.duration; });
        add_double("profile.v_mean", [](RunConfig& c) { return &c.synth.v_mean; });
        add_double("profile.amp", [](RunConfig& c) { return &c.synth.amp; });
        add_double("profile.period", [](RunConfig& c) { return &c.synth.period; });
        add_double("profile.noise_sigma", [](RunConfig& c) { return &c.synth.noise_sigma; });

        add_string("eval.cases", [](RunConfig& c) { return &c.cases_text; });

        add_string("out.model", [](RunConfig& c) { return &c.out_model; });
        add_string("out.curve", [](RunConfig& c) { return &c.out_curve; });
        add_string("out.report", [](RunConfig& c) { return &c.out_report; });
        add_string("out.traj_dir", [](RunConfig& c) { return &c.out_traj_dir; });
        add_string("out.profile", [](RunConfig& c) { return &c.out_profile; });
        add_string("in.model", [](RunConfig& c) { return &c.in_model; });
        return t;
    }();
    return table;
}

const KeyEntry* find_key(const std::string& name) {
    for (const KeyEntry& e : key_table())
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const KeyEntry& e : key_table()) out.push_back(e.name);
        return out;
    }();
    return names;
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const KeyEntry* entry = find_key(key);
    if (!entry) throw ConfigError("unknown config key '" + key + "'");
    entry->set(cfg, value);
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
        const std::string key{trim(body.substr(0, eq))};
        const std::string value{trim(body.substr(eq + 1))};
        try {
            apply_config_value(cfg, key, value);
        } catch (const ConfigError& err) {
            throw ConfigError(std::string(err.what()) + " (line " + std::to_string(lineno) + ")");
        }
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig cfg;
    apply_config_text(cfg, buf.str());
    return cfg;
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream out;
    for (const KeyEntry& e : key_table()) out << e.name << '=' << e.get(cfg) << '\n';
    return out.str();
}

std::vector<CaseWindow> parse_case_windows(const std::string& text) {
    std::vector<CaseWindow> out;
    for (const auto& item : split(text, ';')) {
        const auto body = trim(item);
        if (body.empty()) continue;
        const auto parts = split(body, ':');
        if (parts.size() != 3)
            throw ConfigError("case '" + std::string(body) + "' must be start:end:n_followers");
        const auto t0 = parse_double(trim(parts[0]));
        const auto t1 = parse_double(trim(parts[1]));
        const auto n = parse_integer(trim(parts[2]));
        if (!t0 || !t1 || !n) throw ConfigError("case '" + std::string(body) + "' is not numeric");
        if (!(*t1 > *t0)) throw ConfigError("case '" + std::string(body) + "' needs t_end > t_start");
        if (*n < 1) throw ConfigError("case '" + std::string(body) + "' needs n_followers >= 1");
        out.push_back(CaseWindow{*t0, *t1, static_cast<int>(*n)});
    }
    if (out.empty()) throw ConfigError("eval.cases is empty");
    return out;
}

RewardConfig RunConfig::reward_config() const {
    RewardConfig rc;
    rc.omega1 = omega1;
    rc.omega2 = omega2;
    rc.v_max = platoon.v_max;
    rc.a_max = platoon.a_max;
    rc.dt = platoon.dt;
    return rc;
}

std::vector<CaseWindow> RunConfig::case_windows() const { return parse_case_windows(cases_text); }

void RunConfig::finalize() {
    if (!jerk_max_set) platoon.jerk_max = 2.0 * platoon.a_max / platoon.dt;
    ddpg.seed = seed;
    platoon.validate();
    reward_config().validate();
    cacc.validate();
    ddpg.validate();
    if (!(beta_switch >= 0.0) || !(beta_switch <= 1.0))
        throw ConfigError("hybrid.beta_switch must be in [0, 1]");
    if (profile_path.empty()) {
        if (!(synth.duration > 0.0)) throw ConfigError("profile.duration must be > 0");
        if (!(synth.amp >= 0.0) || !(synth.amp <= synth.v_mean))
            throw ConfigError("profile.amp must satisfy 0 <= amp <= v_mean");
        if (!(synth.period > 0.0)) throw ConfigError("profile.period must be > 0");
        if (!(synth.noise_sigma >= 0.0)) throw ConfigError("profile.noise_sigma must be >= 0");
    }
    case_windows();  // validates the case list
}

}  // namespace hcfs
