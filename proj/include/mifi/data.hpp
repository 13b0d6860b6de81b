#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mifi/rng.hpp"
#include "mifi/tensor.hpp"

namespace mifi {

enum class Split { Train, Val, Test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

// One labeled clip with a feature tensor per camera view.
struct Sample {
    std::string id;
    int label = 0;
    int driver_id = 0;
    std::map<int, Tensor> views; // camera id -> feature clip, identical dims
    Split split = Split::Train;
};

struct Dataset {
    int n_classes = 0;
    std::vector<Sample> samples;

    std::vector<int> view_ids() const;
    std::size_t count(Split s) const;
};

// Synthetic multi-view generator. Class identity lives in per-view prototype
// tensors; difficulty and complementarity are injected via three controls:
//  - view_ambiguity: class pairs whose prototypes coincide in one view, so
//    that view alone cannot tell them apart;
//  - hard_classes + hard_margin_scale: prototypes of the hard classes are
//    pulled toward their common centroid, shrinking their mutual margins;
//  - driver offsets: one offset tensor per (driver, view) so unseen drivers
//    shift features at test time.
struct SynthConfig {
    int n_classes = 16;
    int n_drivers = 50;
    int clips_per_driver_per_class = 1;
    std::array<std::size_t, 4> dims = {64, 4, 7, 7}; // (C,T,W,H)
    std::map<int, std::vector<std::pair<int, int>>> view_ambiguity; // view -> pairs
    std::set<int> hard_classes;
    double noise_std = 1.0;
    std::uint64_t seed = 0;
    double view_correlation = 0.9;   // rho between a class's two view prototypes
    double hard_margin_scale = 0.35; // <1 shrinks hard-class margins
    double driver_std = 0.5;         // per-(driver,view) offset scale
    double ambiguity_residual = 0.0; // fraction of pair separation kept in the blind view

    void validate() const;
};

Dataset generate_synthetic(const SynthConfig& config);

// Whole-driver split assignment; counts must cover every driver exactly.
struct SplitSpec {
    int n_train_drivers = 35;
    int n_val_drivers = 5;
    int n_test_drivers = 10;
    std::uint64_t seed = 0;
};

Dataset split_by_driver(Dataset dataset, const SplitSpec& spec);

// Dataset directory: manifest.json plus one container file per view per clip.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// Keep the n frames with the largest total L1 difference to all other frames,
// preserving temporal order; ties go to the lower frame index.
Tensor keyframe_select(const Tensor& frames, std::size_t n);

} // namespace mifi
