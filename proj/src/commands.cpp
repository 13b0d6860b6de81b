#include "mifi/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mifi/container.hpp"
#include "mifi/harness.hpp"
#include "mifi/numerics.hpp"

namespace mifi {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

// Timestamps are confined to the run log so every other artifact is
// byte-reproducible.
void log_line(const fs::path& dir, const std::string& msg) {
    std::ofstream log(dir / "run.log", std::ios::app);
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%F %T", std::gmtime(&now));
    log << stamp << " " << msg << "\n";
}

Dataset build_dataset(const RunConfig& cfg) {
    Dataset ds;
    if (!cfg.dataset.empty()) {
        ds = load_dataset(cfg.dataset);
    } else {
        ds = generate_synthetic(cfg.synth_config());
    }
    return split_by_driver(std::move(ds), cfg.split_spec());
}

Metrics eval_any(const HeadParams& head, const Dataset& ds, Split split, FusionMode mode,
                 int view) {
    return view == 0 ? evaluate(head, ds, split, mode)
                     : single_view_evaluate(head, ds, split, view);
}

void save_head(const HeadParams& head, const fs::path& dir, const RunConfig& cfg,
               const TrainHistory& hist) {
    // One container holds the parameters: row r = [weight row r | bias r].
    Tensor t({head.n_classes, head.dim + 1});
    for (std::size_t r = 0; r < head.n_classes; ++r) {
        for (std::size_t j = 0; j < head.dim; ++j) {
            t.data[r * (head.dim + 1) + j] = head.weight[r * head.dim + j];
        }
        t.data[r * (head.dim + 1) + head.dim] = head.bias[r];
    }
    save_features(t, dir / "head.mifi");

    json j{{"n-classes", head.n_classes},
           {"dim", head.dim},
           {"layout", "rows are [weight | bias]"},
           {"fusion", cfg.fusion},
           {"loss", cfg.loss},
           {"view", cfg.view},
           {"seed", cfg.seed},
           {"best-epoch", hist.best_epoch},
           {"best-val-accuracy", hist.best_val_acc}};
    write_text(dir / "head.json", j.dump(2) + "\n");
}

HeadParams load_head(const fs::path& dir, json& sidecar) {
    std::ifstream in(dir / "head.json");
    if (!in) throw IoError("cannot open " + (dir / "head.json").string());
    try {
        in >> sidecar;
    } catch (const json::exception& e) {
        throw IoError("bad head sidecar: " + std::string(e.what()));
    }
    Tensor t = load_features(dir / "head.mifi");
    if (t.rank() != 2 || t.dims[1] < 2) throw FormatError("head container must be rank 2", 5);
    HeadParams head;
    head.n_classes = t.dims[0];
    head.dim = t.dims[1] - 1;
    head.weight.resize(head.n_classes * head.dim);
    head.bias.resize(head.n_classes);
    for (std::size_t r = 0; r < head.n_classes; ++r) {
        for (std::size_t j = 0; j < head.dim; ++j) {
            head.weight[r * head.dim + j] = t.data[r * (head.dim + 1) + j];
        }
        head.bias[r] = t.data[r * (head.dim + 1) + head.dim];
    }
    return head;
}

} // namespace

int cmd_synth(const RunConfig& config) {
    SynthConfig synth = config.synth_config();
    synth.validate();
    Dataset ds = generate_synthetic(synth);
    save_dataset(ds, config.out);
    std::cout << "wrote " << ds.samples.size() << " samples (" << synth.n_drivers
              << " drivers x " << synth.n_classes << " classes x "
              << synth.clips_per_driver_per_class << " clips) to " << config.out << "\n";
    return 0;
}

int cmd_train(const RunConfig& config) {
    config.validate();
    fs::create_directories(config.out);
    log_line(config.out, "train start");

    Dataset ds = build_dataset(config);
    LossKind loss = config.loss_kind();
    SgdConfig sgd = config.sgd_config();

    auto [head, hist] = config.view == 0
                            ? train(ds, config.fusion_mode(), loss, sgd, config.seed)
                            : train_single_view(ds, config.view, loss, sgd, config.seed);

    fs::path dir = config.out;
    write_text(dir / "config.json", config_to_json(config) + "\n");
    write_text(dir / "history.csv", history_to_csv(hist));
    save_head(head, dir, config, hist);

    json summary{{"best-epoch", hist.best_epoch}, {"best-val-accuracy", hist.best_val_acc}};
    Split report_split = Split::Val;
    bool have_report = false;
    if (ds.count(Split::Val) > 0) {
        Metrics val = eval_any(head, ds, Split::Val, config.fusion_mode(), config.view);
        summary["val"] = json::parse(metrics_to_json(val));
        report_split = Split::Val;
        have_report = true;
    }
    if (ds.count(Split::Test) > 0) {
        Metrics test = eval_any(head, ds, Split::Test, config.fusion_mode(), config.view);
        summary["test"] = json::parse(metrics_to_json(test));
        report_split = Split::Test;
        have_report = true;
    }
    write_text(dir / "metrics.json", summary.dump(2) + "\n");
    if (have_report) {
        Metrics m = eval_any(head, ds, report_split, config.fusion_mode(), config.view);
        write_text(dir / "confusion.csv", confusion_to_csv(m));
        if (config.view == 0) {
            dump_embeddings(head, ds, report_split, config.fusion_mode(),
                            dir / "embeddings.csv");
        }
        std::cout << "train done: best val acc " << hist.best_val_acc << " (epoch "
                  << hist.best_epoch << "), " << split_name(report_split) << " acc "
                  << m.accuracy << "\n";
    } else {
        std::cout << "train done: no val/test split to report\n";
    }
    log_line(config.out, "train end");
    return 0;
}

int cmd_eval(const std::string& run_dir, const std::string& split, int view_override) {
    fs::path dir = run_dir;
    RunConfig cfg = load_config_file(dir / "config.json");
    json sidecar;
    HeadParams head = load_head(dir, sidecar);
    Dataset ds = build_dataset(cfg);
    Split sp = split_from_name(split);
    int view = view_override >= 0 ? view_override : sidecar.value("view", 0);
    FusionMode mode = fusion_mode_from_name(sidecar.value("fusion", cfg.fusion));

    Metrics m = eval_any(head, ds, sp, mode, view);
    std::string tag = "eval-" + split + (view > 0 ? "-view" + std::to_string(view) : "");
    write_text(dir / (tag + ".metrics.json"), metrics_to_json(m) + "\n");
    write_text(dir / (tag + ".confusion.csv"), confusion_to_csv(m));
    std::cout << tag << ": accuracy " << m.accuracy << ", macro_f1 " << m.macro_f1 << "\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed, bool corrupt) {
    const int n = 16, cases = 100;
    const double h = 1e-3, tolerance = 1e-4;
    struct Entry {
        const char* label;
        LossKind kind;
    };
    CaslConfig casl_cfg; // defaults
    Entry entries[] = {{"ce", LossKind::ce()},
                       {"fl", LossKind::fl(2.0)},
                       {"asl", LossKind::asl(1.0, 4.0)},
                       {"casl", LossKind::cyclical(casl_cfg)}};

    bool ok = true;
    Rng rng(seed);
    for (const Entry& e : entries) {
        double max_err = 0.0;
        for (int c = 0; c < cases; ++c) {
            std::vector<double> logits(n);
            for (double& z : logits) z = rng.next_normal();
            int target = static_cast<int>(rng.next_below(n));
            int epoch = static_cast<int>(rng.next_below(
                static_cast<std::uint64_t>(casl_cfg.total_epochs) + 1));

            std::vector<double> analytic = loss_grad_wrt_logits(e.kind, logits, target, epoch);
            if (corrupt) analytic[0] += 0.01; // test hook: simulate a broken gradient
            std::vector<double> z = logits;
            for (int i = 0; i < n; ++i) {
                double zi = z[i];
                z[i] = zi + h;
                double fp = loss_eval(e.kind, softmax(z), target, epoch).value;
                z[i] = zi - h;
                double fm = loss_eval(e.kind, softmax(z), target, epoch).value;
                z[i] = zi;
                double cd = (fp - fm) / (2.0 * h);
                double err = std::fabs(analytic[i] - cd) / std::max(1.0, std::fabs(cd));
                max_err = std::max(max_err, err);
            }
        }
        bool pass = max_err <= tolerance;
        ok = ok && pass;
        std::printf("%-5s max_rel_err %.3e %s\n", e.label, max_err, pass ? "pass" : "FAIL");
    }
    std::printf("gradcheck %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 4;
}

int cmd_sweep_alpha(const std::vector<double>& betas, int total_epochs,
                    const std::string& out_path) {
    if (betas.empty()) throw ConfigError("sweep-alpha: need at least one beta");
    if (total_epochs < 1) throw ConfigError("sweep-alpha: total epochs must be >= 1");
    std::string csv = "epoch";
    for (double b : betas) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), ",beta=%g", b);
        csv += buf;
    }
    csv += "\n";
    for (int e = 0; e <= total_epochs; ++e) {
        csv += std::to_string(e);
        for (double b : betas) {
            CaslConfig cfg;
            cfg.beta = b;
            cfg.total_epochs = total_epochs;
            char buf[32];
            std::snprintf(buf, sizeof(buf), ",%.9g", casl_alpha(e, cfg));
            csv += buf;
        }
        csv += "\n";
    }
    write_text(out_path, csv);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_keyframes(const std::string& input, std::size_t n, const std::string& output) {
    Tensor frames = load_features(input);
    Tensor kept = keyframe_select(frames, n);
    save_features(kept, output);
    std::cout << "kept " << kept.dims[1] << " of " << frames.dims[1] << " frames -> "
              << output << "\n";
    return 0;
}

} // namespace mifi
