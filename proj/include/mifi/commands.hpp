#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mifi/config.hpp"

namespace mifi {

// Subcommand bodies. Each returns a process exit code; expected failures are
// thrown as the library error types and mapped to codes by the CLI main.
int cmd_synth(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_eval(const std::string& run_dir, const std::string& split, int view_override);
int cmd_gradcheck(std::uint64_t seed, bool corrupt);
int cmd_sweep_alpha(const std::vector<double>& betas, int total_epochs,
                    const std::string& out_path);
int cmd_keyframes(const std::string& input, std::size_t n, const std::string& output);

} // namespace mifi
