#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mifi/data.hpp"
#include "mifi/fusion.hpp"
#include "mifi/head.hpp"
#include "mifi/losses.hpp"

namespace mifi {

// Effective run configuration: JSON file, overridden by CLI flags, with
// defaults matching the reference training protocol.
struct RunConfig {
    std::string fusion = "concat-t";
    std::string loss = "casl";
    double beta = 4.0;
    double gamma = 0.0;
    std::optional<double> lambda1; // family-dependent default, see lambda1_value
    std::optional<double> lambda2;
    double gamma_fl = 2.0;
    double lr = 0.1;
    int epochs = 100;
    std::vector<int> decay_epochs = {30, 50};
    int batch_size = 32;
    std::uint64_t seed = 0;
    std::string dataset; // manifest directory; empty -> synthesize from `synth`
    std::string out = "run";
    int view = 0; // 0 = fused two-view; 1/2 = single camera
    int train_drivers = 35;
    int val_drivers = 5;
    int test_drivers = 10;
    SynthConfig synth;
    bool synth_seed_set = false; // synth.seed follows the run seed unless set

    double lambda1_value() const; // casl 0, asl 1
    double lambda2_value() const; // 4 for both

    void validate() const;
    FusionMode fusion_mode() const { return fusion_mode_from_name(fusion); }
    LossKind loss_kind() const;
    SgdConfig sgd_config() const;
    SplitSpec split_spec() const;
    SynthConfig synth_config() const; // seed resolved against the run seed
};

RunConfig config_from_json_text(const std::string& text, const std::string& origin);
RunConfig load_config_file(const std::filesystem::path& path);

// Serialize every effective key; loading the result reproduces the config.
std::string config_to_json(const RunConfig& config);

} // namespace mifi
