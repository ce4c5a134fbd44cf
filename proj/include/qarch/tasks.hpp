#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "qarch/closed_moments.hpp"
#include "qarch/config.hpp"

namespace qarch::cli {

// Executes the config's tasks in order (optionally restricted to the given
// types), writing one CSV per task plus a JSON manifest into out_dir.
// Returns 0 on success, 2 on task failure.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log,
                   const std::vector<TaskType>& only = {}, bool force_compare = false);

// ARCH(1) shape of a general spec (quadratic Q with c2 = 1, one explicit lag):
// needed by the closed-moment and comparison tasks.
std::optional<closed_moments::Arch1Params> arch1_shape(const model::ModelSpec& spec);

}  // namespace qarch::cli
