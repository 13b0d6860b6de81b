#include "mifi/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mifi/container.hpp"

namespace mifi {

namespace {

// stream ids for forked generators
constexpr std::uint64_t kStreamSignature = 1;
constexpr std::uint64_t kStreamViewNoise = 2;
constexpr std::uint64_t kStreamDriver = 3;
constexpr std::uint64_t kStreamSample = 4;
constexpr std::uint64_t kMaxViews = 8;

std::string sample_id(int driver, int cls, int clip) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "d%03d_c%02d_k%02d", driver, cls, clip);
    return buf;
}

} // namespace

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw InvalidInputError("unknown split '" + name + "'");
}

std::vector<int> Dataset::view_ids() const {
    std::vector<int> ids;
    if (samples.empty()) return ids;
    for (const auto& [v, t] : samples.front().views) ids.push_back(v);
    return ids;
}

std::size_t Dataset::count(Split s) const {
    std::size_t n = 0;
    for (const auto& smp : samples) {
        if (smp.split == s) ++n;
    }
    return n;
}

void SynthConfig::validate() const {
    if (n_classes < 2) throw InvalidInputError("synth: n_classes must be >= 2");
    if (n_drivers < 1) throw InvalidInputError("synth: n_drivers must be >= 1");
    if (clips_per_driver_per_class < 1) {
        throw InvalidInputError("synth: clips_per_driver_per_class must be >= 1");
    }
    for (std::size_t d : dims) {
        if (d < 1) throw InvalidInputError("synth: dims must all be >= 1");
    }
    if (!(noise_std >= 0.0)) throw InvalidInputError("synth: noise_std must be >= 0");
    if (!(driver_std >= 0.0)) throw InvalidInputError("synth: driver_std must be >= 0");
    if (!(view_correlation >= 0.0 && view_correlation <= 1.0)) {
        throw InvalidInputError("synth: view_correlation must be in [0,1]");
    }
    if (!(hard_margin_scale > 0.0 && hard_margin_scale <= 1.0)) {
        throw InvalidInputError("synth: hard_margin_scale must be in (0,1]");
    }
    for (int k : hard_classes) {
        if (k < 0 || k >= n_classes) {
            throw InvalidInputError("synth: hard class " + std::to_string(k) +
                                    " out of range");
        }
    }
    if (!(ambiguity_residual >= 0.0 && ambiguity_residual <= 1.0)) {
        throw InvalidInputError("synth: ambiguity_residual must be in [0,1]");
    }
    for (const auto& [view, pairs] : view_ambiguity) {
        if (view != 1 && view != 2) {
            throw InvalidInputError("synth: ambiguity view must be 1 or 2");
        }
        std::set<int> used;
        for (const auto& [a, b] : pairs) {
            if (a < 0 || a >= n_classes || b < 0 || b >= n_classes || a == b) {
                throw InvalidInputError("synth: invalid ambiguity pair (" +
                                        std::to_string(a) + "," + std::to_string(b) +
                                        ") in view " + std::to_string(view));
            }
            if (!used.insert(a).second || !used.insert(b).second) {
                throw InvalidInputError("synth: class used twice in view " +
                                        std::to_string(view) + " ambiguity pairs");
            }
        }
    }
}

Dataset generate_synthetic(const SynthConfig& config) {
    config.validate();
    const std::size_t numel = config.dims[0] * config.dims[1] * config.dims[2] * config.dims[3];
    const std::vector<std::size_t> shape(config.dims.begin(), config.dims.end());
    const int views[2] = {1, 2};
    Rng root(config.seed);

    // Per-class base signatures shared across views.
    std::vector<std::vector<float>> sig(config.n_classes);
    for (int k = 0; k < config.n_classes; ++k) {
        Rng r = root.fork(kStreamSignature).fork(static_cast<std::uint64_t>(k));
        sig[k] = rng_normal(r, numel, 0.0, 1.0);
    }

    // Per-view prototypes: rho * signature + sqrt(1-rho^2) * view-private part.
    double rho = config.view_correlation;
    double rho_c = std::sqrt(1.0 - rho * rho);
    std::vector<std::array<std::vector<float>, 2>> proto(config.n_classes);
    for (int k = 0; k < config.n_classes; ++k) {
        for (int vi = 0; vi < 2; ++vi) {
            Rng r = root.fork(kStreamViewNoise)
                        .fork(static_cast<std::uint64_t>(k) * kMaxViews +
                              static_cast<std::uint64_t>(views[vi]));
            std::vector<float> eta = rng_normal(r, numel, 0.0, 1.0);
            std::vector<float>& mu = proto[k][vi];
            mu.resize(numel);
            for (std::size_t i = 0; i < numel; ++i) {
                mu[i] = static_cast<float>(rho * sig[k][i] + rho_c * eta[i]);
            }
        }
    }

    // Shrink hard classes toward their common per-view centroid.
    if (!config.hard_classes.empty() && config.hard_margin_scale < 1.0) {
        for (int vi = 0; vi < 2; ++vi) {
            std::vector<double> anchor(numel, 0.0);
            for (int k : config.hard_classes) {
                for (std::size_t i = 0; i < numel; ++i) anchor[i] += proto[k][vi][i];
            }
            for (std::size_t i = 0; i < numel; ++i) {
                anchor[i] /= static_cast<double>(config.hard_classes.size());
            }
            double s = config.hard_margin_scale;
            for (int k : config.hard_classes) {
                for (std::size_t i = 0; i < numel; ++i) {
                    proto[k][vi][i] =
                        static_cast<float>(anchor[i] + s * (proto[k][vi][i] - anchor[i]));
                }
            }
        }
    }

    // Pull paired classes together in the designated view: both shrink toward
    // the pair midpoint, keeping ambiguity_residual of their separation (0 =
    // fully indistinguishable there).
    for (const auto& [view, pairs] : config.view_ambiguity) {
        int vi = view - 1;
        double r = config.ambiguity_residual;
        for (auto [a, b] : pairs) {
            for (std::size_t i = 0; i < numel; ++i) {
                double mid = 0.5 * (static_cast<double>(proto[a][vi][i]) +
                                    static_cast<double>(proto[b][vi][i]));
                proto[a][vi][i] = static_cast<float>(mid + r * (proto[a][vi][i] - mid));
                proto[b][vi][i] = static_cast<float>(mid + r * (proto[b][vi][i] - mid));
            }
        }
    }

    // Per-(driver, view) style offsets.
    std::vector<std::array<std::vector<float>, 2>> driver_off(config.n_drivers);
    for (int d = 0; d < config.n_drivers; ++d) {
        for (int vi = 0; vi < 2; ++vi) {
            Rng r = root.fork(kStreamDriver)
                        .fork(static_cast<std::uint64_t>(d) * kMaxViews +
                              static_cast<std::uint64_t>(views[vi]));
            driver_off[d][vi] = rng_normal(r, numel, 0.0, config.driver_std);
        }
    }

    Dataset ds;
    ds.n_classes = config.n_classes;
    ds.samples.reserve(static_cast<std::size_t>(config.n_drivers) * config.n_classes *
                       config.clips_per_driver_per_class);
    for (int d = 0; d < config.n_drivers; ++d) {
        for (int k = 0; k < config.n_classes; ++k) {
            for (int j = 0; j < config.clips_per_driver_per_class; ++j) {
                std::uint64_t sample_index =
                    (static_cast<std::uint64_t>(d) * config.n_classes +
                     static_cast<std::uint64_t>(k)) *
                        config.clips_per_driver_per_class +
                    static_cast<std::uint64_t>(j);
                Sample smp;
                smp.id = sample_id(d, k, j);
                smp.label = k;
                smp.driver_id = d;
                for (int vi = 0; vi < 2; ++vi) {
                    Rng r = root.fork(kStreamSample)
                                .fork(sample_index * kMaxViews +
                                      static_cast<std::uint64_t>(views[vi]));
                    std::vector<float> noise = rng_normal(r, numel, 0.0, config.noise_std);
                    Tensor t(shape);
                    for (std::size_t i = 0; i < numel; ++i) {
                        t.data[i] = proto[k][vi][i] + driver_off[d][vi][i] + noise[i];
                    }
                    smp.views.emplace(views[vi], std::move(t));
                }
                ds.samples.push_back(std::move(smp));
            }
        }
    }
    return ds;
}

Dataset split_by_driver(Dataset dataset, const SplitSpec& spec) {
    if (spec.n_train_drivers < 0 || spec.n_val_drivers < 0 || spec.n_test_drivers < 0) {
        throw InvalidInputError("split: driver counts must be non-negative");
    }
    std::set<int> driver_set;
    for (const auto& smp : dataset.samples) driver_set.insert(smp.driver_id);
    std::vector<int> drivers(driver_set.begin(), driver_set.end());

    long long want = static_cast<long long>(spec.n_train_drivers) + spec.n_val_drivers +
                     spec.n_test_drivers;
    if (want != static_cast<long long>(drivers.size())) {
        throw InvalidInputError("split: counts sum to " + std::to_string(want) +
                                " but dataset has " + std::to_string(drivers.size()) +
                                " drivers");
    }

    // Seeded Fisher-Yates over the sorted driver list.
    Rng rng(spec.seed);
    for (std::size_t i = drivers.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(drivers[i - 1], drivers[j]);
    }

    std::map<int, Split> assign;
    std::size_t idx = 0;
    for (int i = 0; i < spec.n_train_drivers; ++i) assign[drivers[idx++]] = Split::Train;
    for (int i = 0; i < spec.n_val_drivers; ++i) assign[drivers[idx++]] = Split::Val;
    for (int i = 0; i < spec.n_test_drivers; ++i) assign[drivers[idx++]] = Split::Test;

    for (auto& smp : dataset.samples) smp.split = assign.at(smp.driver_id);
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("save_dataset: cannot create " + dir.string());

    nlohmann::json manifest = nlohmann::json::array();
    for (const auto& smp : dataset.samples) {
        nlohmann::json views = nlohmann::json::object();
        for (const auto& [v, tensor] : smp.views) {
            std::string fname = smp.id + "_cam" + std::to_string(v) + ".mifi";
            save_features(tensor, dir / fname);
            views["cam" + std::to_string(v)] = fname;
        }
        manifest.push_back(
            {{"id", smp.id}, {"label", smp.label}, {"driver", smp.driver_id}, {"views", views}});
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("save_dataset: cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& dir) {
    std::filesystem::path manifest_path = dir;
    if (std::filesystem::is_directory(dir)) manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("load_dataset: cannot open " + manifest_path.string());

    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_dataset: bad manifest " + manifest_path.string() + ": " + e.what());
    }
    if (!manifest.is_array()) throw IoError("load_dataset: manifest must be a JSON array");

    std::filesystem::path base = manifest_path.parent_path();
    Dataset ds;
    int max_label = -1;
    for (const auto& rec : manifest) {
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("label") ||
            !rec.contains("driver") || !rec.contains("views")) {
            throw IoError("load_dataset: manifest record missing id/label/driver/views");
        }
        Sample smp;
        smp.id = rec.at("id").get<std::string>();
        smp.label = rec.at("label").get<int>();
        smp.driver_id = rec.at("driver").get<int>();
        if (smp.label < 0) throw IoError("load_dataset: negative label for " + smp.id);
        for (const auto& [key, rel] : rec.at("views").items()) {
            if (key.rfind("cam", 0) != 0) {
                throw IoError("load_dataset: bad view key '" + key + "' for " + smp.id);
            }
            int v = std::stoi(key.substr(3));
            smp.views.emplace(v, load_features(base / rel.get<std::string>()));
        }
        if (smp.views.empty()) throw IoError("load_dataset: no views for " + smp.id);
        max_label = std::max(max_label, smp.label);
        ds.samples.push_back(std::move(smp));
    }
    ds.n_classes = max_label + 1;
    return ds;
}

Tensor keyframe_select(const Tensor& frames, std::size_t n) {
    require_rank(frames, 4, "keyframe_select");
    std::size_t C = frames.dims[0], T = frames.dims[1];
    std::size_t frame = frames.dims[2] * frames.dims[3];
    if (n < 1 || n > T) {
        throw InvalidInputError("keyframe_select: n must be in [1, " + std::to_string(T) + "]");
    }

    // score[t] = sum over other frames of the L1 distance between the frames
    std::vector<double> score(T, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
        const float* ch = frames.data.data() + c * T * frame;
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t u = t + 1; u < T; ++u) {
                double d = 0.0;
                const float* ft = ch + t * frame;
                const float* fu = ch + u * frame;
                for (std::size_t i = 0; i < frame; ++i) {
                    d += std::fabs(static_cast<double>(ft[i]) - static_cast<double>(fu[i]));
                }
                score[t] += d;
                score[u] += d;
            }
        }
    }

    std::vector<std::size_t> order(T);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    std::vector<std::size_t> keep(order.begin(), order.begin() + static_cast<long>(n));
    std::sort(keep.begin(), keep.end());

    Tensor out({C, n, frames.dims[2], frames.dims[3]});
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const float* src = frames.data.data() + (c * T + keep[i]) * frame;
            float* dst = out.data.data() + (c * n + i) * frame;
            std::copy(src, src + frame, dst);
        }
    }
    return out;
}

} // namespace mifi
