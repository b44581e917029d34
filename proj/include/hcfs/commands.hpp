#pragma once

#include <iosfwd>

#include "hcfs/config.hpp"

namespace hcfs {

// Leader trace for a run: loaded from profile.path when set, otherwise the
// synthetic stop-and-go generator seeded from the run's profile-synth stream.
VelocityProfile resolve_profile(const RunConfig& cfg);

EvalContext make_eval_context(const RunConfig& cfg);

// Trains on the configured profile with the eval cases held out; writes the
// model file and the "episode,return,critic_loss" curve. On divergence the
// last-good checkpoint and partial curve are still written before the
// TrainingDiverged exception propagates.
void run_train(const RunConfig& cfg);

// Runs every (case, strategy) combination; writes the report CSV and one
// trajectory CSV per run under out.traj_dir.
void run_compare(const RunConfig& cfg, const std::vector<Strategy>& strategies);

// One case under one strategy; writes the trajectory CSV and prints a
// single-row report to `summary`.
void run_eval(const RunConfig& cfg, Strategy strategy, const CaseWindow& window,
              std::ostream& summary);

void run_synth_profile(const RunConfig& cfg);

}  // namespace hcfs
