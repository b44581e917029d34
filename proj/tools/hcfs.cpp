// Command-line front end: train, eval, compare, synth-profile.
//
// Exit codes: 0 success, 2 config error, 3 I/O or file-format error,
// 4 training divergence.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcfs/commands.hpp"
#include "hcfs/text.hpp"

namespace {

struct CliState {
    std::string config_path;
    std::string dump_path;
    std::vector<std::string> sets;  // key=value overrides
    std::map<std::string, std::string> flag_values;
};

// Unique trailing segments of dotted keys double as short flags, so
// `--tau 0.01` works alongside `--ddpg.tau 0.01`.
std::map<std::string, std::string> short_aliases() {
    std::map<std::string, int> tail_count;
    for (const std::string& key : hcfs::config_keys()) {
        const auto dot = key.rfind('.');
        if (dot == std::string::npos) continue;
        ++tail_count[key.substr(dot + 1)];
    }
    std::map<std::string, std::string> alias;
    for (const std::string& key : hcfs::config_keys()) {
        const auto dot = key.rfind('.');
        if (dot == std::string::npos) continue;
        const std::string tail = key.substr(dot + 1);
        if (tail_count[tail] == 1) alias[key] = tail;
    }
    return alias;
}

void add_config_flags(CLI::App* cmd, CliState& state) {
    cmd->add_option("--config", state.config_path, "key=value configuration file");
    cmd->add_option("--dump-config", state.dump_path, "write the effective configuration here");
    cmd->add_option("--set", state.sets, "override one key, as key=value (repeatable)");
    const auto aliases = short_aliases();
    for (const std::string& key : hcfs::config_keys()) {
        std::string names = "--" + key;
        const auto it = aliases.find(key);
        if (it != aliases.end()) names += ",--" + it->second;
        cmd->add_option(names, state.flag_values[key], "config key " + key);
    }
}

hcfs::RunConfig build_config(const CliState& state) {
    hcfs::RunConfig cfg;
    if (!state.config_path.empty()) cfg = hcfs::load_config_file(state.config_path);
    for (const std::string& key : hcfs::config_keys()) {
        const auto it = state.flag_values.find(key);
        if (it != state.flag_values.end() && !it->second.empty())
            hcfs::apply_config_value(cfg, key, it->second);
    }
    for (const std::string& item : state.sets) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw hcfs::ConfigError("--set expects key=value, got '" + item + "'");
        hcfs::apply_config_value(cfg, item.substr(0, eq), item.substr(eq + 1));
    }
    cfg.finalize();
    if (!state.dump_path.empty()) {
        std::ofstream out(state.dump_path, std::ios::binary);
        if (!out) throw hcfs::IoError("cannot open dump file: " + state.dump_path);
        out << hcfs::dump_config(cfg);
    }
    return cfg;
}

std::vector<hcfs::Strategy> parse_strategies(const std::string& text) {
    std::vector<hcfs::Strategy> out;
    for (const auto& part : hcfs::split(text, ',')) {
        const auto name = hcfs::trim(part);
        if (name.empty()) continue;
        out.push_back(hcfs::parse_strategy(std::string(name)));
    }
    if (out.empty()) throw hcfs::ConfigError("no strategies given");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid car-following platoon simulator and trainer"};
    app.require_subcommand(1);

    CliState train_state, eval_state, compare_state, synth_state;

    CLI::App* train_cmd = app.add_subcommand("train", "train the DDPG policy");
    add_config_flags(train_cmd, train_state);

    CLI::App* eval_cmd = app.add_subcommand("eval", "run one case under one strategy");
    add_config_flags(eval_cmd, eval_state);
    std::string eval_strategy = "HCFS";
    std::string eval_case;
    eval_cmd->add_option("--strategy", eval_strategy, "CACC, DDPG or HCFS");
    eval_cmd->add_option("--case", eval_case, "start:end:n_followers (default: first eval case)");

    CLI::App* compare_cmd =
        app.add_subcommand("compare", "run all cases under several strategies");
    add_config_flags(compare_cmd, compare_state);
    std::string compare_strategies = "CACC,DDPG,HCFS";
    compare_cmd->add_option("--strategies", compare_strategies, "comma-separated strategy list");

    CLI::App* synth_cmd = app.add_subcommand("synth-profile", "write a synthetic leader profile");
    add_config_flags(synth_cmd, synth_state);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train_cmd->parsed()) {
            hcfs::run_train(build_config(train_state));
        } else if (eval_cmd->parsed()) {
            const auto cfg = build_config(eval_state);
            const auto window = eval_case.empty() ? cfg.case_windows().front()
                                                  : hcfs::parse_case_windows(eval_case).front();
            hcfs::run_eval(cfg, hcfs::parse_strategy(eval_strategy), window, std::cout);
        } else if (compare_cmd->parsed()) {
            hcfs::run_compare(build_config(compare_state), parse_strategies(compare_strategies));
        } else if (synth_cmd->parsed()) {
            hcfs::run_synth_profile(build_config(synth_state));
        }
    } catch (const hcfs::TrainingDiverged& err) {
        std::cerr << "error: " << err.what() << "\n"
                  << "last-good checkpoint written\n";
        return 4;
    } catch (const hcfs::ConfigError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const hcfs::ParseError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    } catch (const hcfs::IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
