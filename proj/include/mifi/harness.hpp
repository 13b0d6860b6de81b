#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mifi/data.hpp"
#include "mifi/fusion.hpp"
#include "mifi/head.hpp"
#include "mifi/losses.hpp"
#include "mifi/metrics.hpp"

namespace mifi {

struct EpochRecord {
    int epoch = 0;
    std::optional<double> alpha; // present only for the cyclical loss
    double lr = 0.0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
};

// One row per epoch 0..epochs-1 from the training passes, plus a terminal row
// at epoch == epochs evaluating the final parameters (so the blending factor
// is recorded over its whole domain, including alpha(e_t)).
struct TrainHistory {
    std::vector<EpochRecord> records;
    bool has_alpha = false;
    int best_epoch = -1;
    double best_val_acc = 0.0;
};

// Pooled feature a head consumes: fuse the sample's views in camera-id order
// (or take one view), then global-average-pool.
std::vector<double> pooled_feature(const Sample& sample, FusionMode mode);
std::vector<double> pooled_single_view(const Sample& sample, int view_id);

// Train a head on the fused two-view features of the train split, selecting
// the parameters with the best validation accuracy (strict improvement, so
// the earliest best epoch wins).
std::pair<HeadParams, TrainHistory> train(const Dataset& dataset, FusionMode fusion_mode,
                                          const LossKind& loss_kind,
                                          const SgdConfig& sgd_config, std::uint64_t seed);

// Same protocol on a single camera view (D = C).
std::pair<HeadParams, TrainHistory> train_single_view(const Dataset& dataset, int view_id,
                                                      const LossKind& loss_kind,
                                                      const SgdConfig& sgd_config,
                                                      std::uint64_t seed);

Metrics evaluate(const HeadParams& head, const Dataset& dataset, Split split,
                 FusionMode fusion_mode);

Metrics single_view_evaluate(const HeadParams& head, const Dataset& dataset, Split split,
                             int view_id);

// Class holding the single highest probability across both views; ties go to
// the lower class index, then to view 1.
int vote_predict(const std::vector<double>& probs_v1, const std::vector<double>& probs_v2);

Metrics evaluate_voting(const HeadParams& head_v1, const HeadParams& head_v2,
                        const Dataset& dataset, Split split, int view1, int view2);

// CSV of (id, label, pooled feature values) for external projection tools.
void dump_embeddings(const HeadParams& head, const Dataset& dataset, Split split,
                     FusionMode fusion_mode, const std::filesystem::path& path);

std::string history_to_csv(const TrainHistory& history);

} // namespace mifi
