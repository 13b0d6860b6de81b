// Acceptance harness: nine constructed checks, one pass/fail line each.
// Exits nonzero if any check fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "benchmarks.hpp"
#include "mifi/commands.hpp"
#include "mifi/config.hpp"
#include "mifi/container.hpp"
#include "mifi/harness.hpp"
#include "mifi/losses.hpp"
#include "mifi/numerics.hpp"

using namespace mifi;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * v);
    return buf;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

bool g_all_pass = true;

void report(int num, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s\n", pass ? "PASS" : "FAIL", num, detail.c_str());
    std::fflush(stdout);
    g_all_pass = g_all_pass && pass;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<unreadable:" + p.string() + ">";
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- criterion 1
void criterion_gradients() {
    auto start = Clock::now();
    struct Entry {
        const char* label;
        LossKind kind;
    };
    Entry entries[] = {{"ce", LossKind::ce()},
                       {"fl", LossKind::fl(2.0)},
                       {"asl", LossKind::asl(1.0, 4.0)},
                       {"casl", LossKind::cyclical()}};

    double worst_loss = 0.0;
    Rng rng(9001);
    for (const Entry& e : entries) {
        for (int c = 0; c < 100; ++c) {
            std::vector<double> z(16);
            for (double& v : z) v = rng.next_normal();
            int target = static_cast<int>(rng.next_below(16));
            int epoch = static_cast<int>(rng.next_below(101));
            worst_loss = std::max(worst_loss, finite_diff_check(e.kind, z, target, epoch, 1e-3));
        }
    }

    // Full pipeline: fuse -> pool -> linear -> softmax -> loss, differentiated
    // against the stored f32 parameters.
    SynthConfig sc;
    sc.n_classes = 4;
    sc.n_drivers = 1;
    sc.dims = {8, 2, 3, 3};
    sc.seed = 9002;
    Dataset ds = generate_synthetic(sc);
    const Sample& smp = ds.samples.front();
    LossKind loss = LossKind::cyclical();
    const double h = 1e-3;
    double worst_head = 0.0;
    Rng prng(9003);
    for (FusionMode mode : {FusionMode::Sum, FusionMode::ChannelConcat,
                            FusionMode::TemporalConcat, FusionMode::EarlyTemporal}) {
        std::vector<const Tensor*> views = {&smp.views.at(1), &smp.views.at(2)};
        FusedFeature fused = fuse_views(mode, views);
        std::size_t dim = global_average_pool(fused.tensor).size();
        HeadParams params = init_head(4, dim, prng);
        int target = smp.label;
        int epoch = 50;

        HeadOutput out = head_forward(fused, params);
        LossValue lv = loss_eval(loss, out.probs, target, epoch);
        HeadGrads grads = head_backward(out.pooled, lv.grad_logits);

        auto pipeline_loss = [&]() {
            HeadOutput o = head_forward(fused, params);
            return loss_eval(loss, o.probs, target, epoch).value;
        };
        for (std::size_t i = 0; i < params.weight.size(); ++i) {
            float saved = params.weight[i];
            params.weight[i] = static_cast<float>(saved + h);
            double up = pipeline_loss();
            params.weight[i] = static_cast<float>(saved - h);
            double down = pipeline_loss();
            params.weight[i] = saved;
            double cd = (up - down) / (2.0 * h);
            worst_head = std::max(worst_head,
                                  std::fabs(grads.grad_weight[i] - cd) / std::max(1.0, std::fabs(cd)));
        }
        for (std::size_t i = 0; i < params.bias.size(); ++i) {
            float saved = params.bias[i];
            params.bias[i] = static_cast<float>(saved + h);
            double up = pipeline_loss();
            params.bias[i] = static_cast<float>(saved - h);
            double down = pipeline_loss();
            params.bias[i] = saved;
            double cd = (up - down) / (2.0 * h);
            worst_head = std::max(worst_head,
                                  std::fabs(grads.grad_bias[i] - cd) / std::max(1.0, std::fabs(cd)));
        }
    }

    double elapsed = seconds_since(start);
    bool pass = worst_loss < 1e-6 && worst_head < 1e-4 && elapsed < 10.0;
    report(1, pass,
           "gradient oracle: losses max rel err " + fmt("%.2e", worst_loss) +
               " (< 1e-6), head pipeline " + fmt("%.2e", worst_head) + " (< 1e-4), " +
               fmt("%.1f", elapsed) + " s");
}

// ---------------------------------------------------------------- criterion 2
void criterion_schedule() {
    CaslConfig ref; // beta 4, 100 epochs
    bool exact = casl_alpha(0, ref) == 1.0 && casl_alpha(25, ref) == 0.0 &&
                 casl_alpha(50, ref) == 1.0 / 3.0 && casl_alpha(100, ref) == 1.0;

    bool continuous = true;
    for (int b = 1; b <= 6; ++b) {
        CaslConfig cfg;
        cfg.beta = b;
        cfg.total_epochs = 600; // branch point lands on an integer epoch
        int estar = 600 / b;
        if (casl_alpha(estar, cfg) != 0.0) continuous = false;
        // one-step neighbors bounded by each branch's slope: no jump at e*
        double left = casl_alpha(estar - 1, cfg);
        if (std::fabs(left - b / 600.0) > 1e-12) continuous = false;
        if (b > 1) {
            double right = casl_alpha(estar + 1, cfg);
            if (std::fabs(right - b / (600.0 * (b - 1))) > 1e-12) continuous = false;
        }
    }
    report(2, exact && continuous,
           std::string("schedule exactness: alpha(0,25,50,100) = {1, 0, 1/3, 1} exactly") +
               (exact ? "" : " VIOLATED") + "; branch point continuous for beta 1..6" +
               (continuous ? "" : " VIOLATED"));
}

// ---------------------------------------------------------------- criterion 3
void criterion_reductions() {
    double worst = 0.0;
    Rng rng(9010);
    CaslConfig casl_cfg; // gamma = 0
    for (int c = 0; c < 100; ++c) {
        std::vector<double> z(16);
        for (double& v : z) v = rng.next_normal();
        auto probs = softmax(z);
        int target = static_cast<int>(rng.next_below(16));

        LossValue ce = cross_entropy(probs, target);
        LossValue at_alpha1 = casl_loss(probs, target, 0, casl_cfg); // alpha(0) = 1
        LossValue fl0 = focal_loss(probs, target, 0.0);

        worst = std::max(worst, std::fabs(at_alpha1.value - ce.value));
        worst = std::max(worst, std::fabs(fl0.value - ce.value));
        for (std::size_t k = 0; k < 16; ++k) {
            worst = std::max(worst, std::fabs(at_alpha1.grad_logits[k] - ce.grad_logits[k]));
            worst = std::max(worst, std::fabs(fl0.grad_logits[k] - ce.grad_logits[k]));
        }
    }
    report(3, worst <= 1e-12,
           "reduction identities: CASL(alpha=1,gamma=0) == CE and FL(0) == CE, max dev " +
               fmt("%.2e", worst) + " (<= 1e-12)");
}

// ---------------------------------------------------------------- criterion 4
void criterion_fusion_algebra() {
    auto start = Clock::now();
    Rng rng(9020);
    bool ok = true;
    for (int c = 0; c < 1000 && ok; ++c) {
        std::vector<std::size_t> dims(4);
        for (auto& d : dims) d = 1 + rng.next_below(6);
        Tensor a(dims), b(dims);
        for (float& v : a.data) v = static_cast<float>(rng.next_normal());
        for (float& v : b.data) v = static_cast<float>(rng.next_normal());

        Tensor s1 = fuse_sum(a, b).tensor;
        Tensor s2 = fuse_sum(b, a).tensor;
        ok = ok && s1.dims == dims;
        for (std::size_t i = 0; i < s1.data.size() && ok; ++i) {
            ok = std::fabs(double(s1.data[i]) - double(s2.data[i])) <= 1e-5 &&
                 std::fabs(double(s1.data[i]) - (double(a.data[i]) + double(b.data[i]))) <= 1e-5;
        }

        Tensor cc = fuse_channel_concat(a, b).tensor;
        ok = ok && cc.dims == std::vector<std::size_t>{2 * dims[0], dims[1], dims[2], dims[3]};
        std::size_t half = a.data.size();
        ok = ok && std::memcmp(cc.data.data(), a.data.data(), half * 4) == 0 &&
             std::memcmp(cc.data.data() + half, b.data.data(), half * 4) == 0;

        for (FusionMode m : {FusionMode::TemporalConcat, FusionMode::EarlyTemporal}) {
            Tensor tc = fuse_views(m, {&a, &b}).tensor;
            ok = ok && tc.dims == std::vector<std::size_t>{dims[0], 2 * dims[1], dims[2], dims[3]};
            std::size_t block = dims[1] * dims[2] * dims[3]; // one source channel
            for (std::size_t ch = 0; ch < dims[0] && ok; ++ch) {
                ok = std::memcmp(tc.data.data() + ch * 2 * block, a.data.data() + ch * block,
                                 block * 4) == 0 &&
                     std::memcmp(tc.data.data() + ch * 2 * block + block,
                                 b.data.data() + ch * block, block * 4) == 0;
            }
        }
    }
    double elapsed = seconds_since(start);
    bool pass = ok && elapsed < 5.0;
    report(4, pass,
           std::string("fusion algebra: 1000 randomized cases, shapes + commutativity + "
                       "slice recovery ") +
               (ok ? "hold" : "VIOLATED") + ", " + fmt("%.2f", elapsed) + " s (< 5 s)");
}

// ----------------------------------------------------------- criteria 5 and 7
struct ComplementaryOutcome {
    std::map<FusionMode, std::vector<double>> fused_acc;
    std::vector<double> best_single_acc;
    std::vector<double> voting_acc;
    double elapsed = 0.0;
};

ComplementaryOutcome run_complementary() {
    auto start = Clock::now();
    ComplementaryOutcome out;
    const FusionMode modes[] = {FusionMode::Sum, FusionMode::ChannelConcat,
                                FusionMode::TemporalConcat, FusionMode::EarlyTemporal};
    SgdConfig sgd = bench::benchmark_sgd();
    for (std::uint64_t seed : bench::kSeeds) {
        SynthConfig sc = bench::complementary_benchmark();
        sc.seed = seed;
        Dataset ds = split_by_driver(generate_synthetic(sc), bench::benchmark_split(seed));

        auto [h1, t1] = train_single_view(ds, 1, LossKind::ce(), sgd, seed);
        auto [h2, t2] = train_single_view(ds, 2, LossKind::ce(), sgd, seed + 1);
        (void)t1;
        (void)t2;
        double a1 = single_view_evaluate(h1, ds, Split::Test, 1).accuracy;
        double a2 = single_view_evaluate(h2, ds, Split::Test, 2).accuracy;
        out.best_single_acc.push_back(std::max(a1, a2));
        out.voting_acc.push_back(evaluate_voting(h1, h2, ds, Split::Test, 1, 2).accuracy);

        for (FusionMode mode : modes) {
            auto [head, hist] = train(ds, mode, LossKind::ce(), sgd, seed);
            (void)hist;
            out.fused_acc[mode].push_back(evaluate(head, ds, Split::Test, mode).accuracy);
        }
    }
    out.elapsed = seconds_since(start);
    return out;
}

void criterion_complementary(const ComplementaryOutcome& r) {
    double single_med = median(r.best_single_acc);
    bool pass = r.elapsed < 120.0;
    bool in_band = single_med >= 0.50 && single_med <= 0.65;
    pass = pass && in_band;
    std::string detail = "complementary views: best single " + pct(single_med) + " (50-65%)";
    for (const auto& [mode, accs] : r.fused_acc) {
        double med = median(accs);
        bool mode_ok = med >= 0.90 && med - single_med >= 0.15;
        pass = pass && mode_ok;
        detail += ", " + std::string(fusion_mode_name(mode)) + " " + pct(med) +
                  (mode_ok ? "" : " VIOLATED");
    }
    detail += "; " + fmt("%.0f", r.elapsed) + " s (< 120 s)";
    report(5, pass, detail);
}

void criterion_voting(const ComplementaryOutcome& r) {
    double vote_med = median(r.voting_acc);
    bool pass = true;
    std::string detail = "fusion vs voting: voting " + pct(vote_med);
    for (const auto& [mode, accs] : r.fused_acc) {
        double med = median(accs);
        bool mode_ok = med >= vote_med;
        pass = pass && mode_ok;
        detail += ", " + std::string(fusion_mode_name(mode)) + " " + pct(med) +
                  (mode_ok ? " >=" : " VIOLATED");
    }
    report(7, pass, detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_reweighting() {
    auto start = Clock::now();
    SgdConfig sgd = bench::benchmark_sgd();
    std::vector<double> ce_f1, casl_f1, ce_minrec, casl_minrec;
    for (std::uint64_t seed : bench::kSeeds) {
        SynthConfig sc = bench::difficulty_benchmark();
        sc.seed = seed;
        Dataset ds = split_by_driver(generate_synthetic(sc), bench::benchmark_split(seed));

        auto [ce_head, ce_hist] = train(ds, FusionMode::TemporalConcat, LossKind::ce(), sgd, seed);
        (void)ce_hist;
        Metrics ce_m = evaluate(ce_head, ds, Split::Test, FusionMode::TemporalConcat);
        ce_f1.push_back(ce_m.macro_f1);
        ce_minrec.push_back(ce_m.min_recall());

        CaslConfig casl_cfg; // reference schedule: beta 4 over the 100 epochs
        casl_cfg.total_epochs = sgd.epochs;
        auto [cl_head, cl_hist] =
            train(ds, FusionMode::TemporalConcat, LossKind::cyclical(casl_cfg), sgd, seed);
        (void)cl_hist;
        Metrics cl_m = evaluate(cl_head, ds, Split::Test, FusionMode::TemporalConcat);
        casl_f1.push_back(cl_m.macro_f1);
        casl_minrec.push_back(cl_m.min_recall());
    }
    double elapsed = seconds_since(start);
    double ce_med = median(ce_f1), casl_med = median(casl_f1);
    double ce_rec = median(ce_minrec), casl_rec = median(casl_minrec);
    bool pass = casl_med >= ce_med + 0.02 && casl_rec >= ce_rec && elapsed < 120.0;
    report(6, pass,
           "re-weighting: macro-F1 CE " + pct(ce_med) + " -> cyclical " + pct(casl_med) +
               " (>= +2 pts), min recall " + pct(ce_rec) + " -> " + pct(casl_rec) +
               " (no worse); " + fmt("%.0f", elapsed) + " s (< 120 s)");
}

// ---------------------------------------------------------------- criterion 8
Tensor brute_force_keyframes(const Tensor& t, std::size_t n) {
    std::size_t C = t.dims[0], T = t.dims[1], W = t.dims[2], H = t.dims[3];
    std::vector<double> score(T, 0.0);
    for (std::size_t u = 0; u < T; ++u) {
        for (std::size_t v = 0; v < T; ++v) {
            double d = 0.0;
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t w = 0; w < W; ++w)
                    for (std::size_t h = 0; h < H; ++h)
                        d += std::fabs(double(t.at4(c, u, w, h)) - double(t.at4(c, v, w, h)));
            score[u] += d;
        }
    }
    std::vector<std::size_t> idx(T);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    Tensor out({C, n, W, H});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t w = 0; w < W; ++w)
                for (std::size_t h = 0; h < H; ++h)
                    out.at4(c, k, w, h) = t.at4(c, idx[k], w, h);
    return out;
}

void criterion_keyframes() {
    Rng rng(9030);
    bool ok = true;
    for (int c = 0; c < 200 && ok; ++c) {
        std::size_t C = 1 + rng.next_below(3);
        std::size_t T = 1 + rng.next_below(8);
        std::size_t W = 1 + rng.next_below(3);
        std::size_t H = 1 + rng.next_below(3);
        Tensor t({C, T, W, H});
        // quantized values so score ties actually occur and exercise the
        // lowest-index rule
        for (float& v : t.data) v = static_cast<float>(rng.next_below(4));
        std::size_t n = 1 + rng.next_below(T);

        Tensor got = keyframe_select(t, n);
        Tensor want = brute_force_keyframes(t, n);
        ok = got.dims == want.dims && got.data == want.data;
    }
    report(8, ok,
           std::string("keyframe oracle: 200 random (T<=8, n<=T) cases match brute force "
                       "exactly") +
               (ok ? "" : " VIOLATED"));
}

// ---------------------------------------------------------------- criterion 9
void criterion_determinism() {
    fs::path base = fs::temp_directory_path() / "mifi_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    RunConfig cfg;
    cfg.loss = "casl";
    cfg.epochs = 6;
    cfg.decay_epochs = {4};
    cfg.batch_size = 16;
    cfg.seed = 5;
    cfg.train_drivers = 5;
    cfg.val_drivers = 1;
    cfg.test_drivers = 2;
    cfg.synth.n_classes = 3;
    cfg.synth.n_drivers = 8;
    cfg.synth.dims = {8, 2, 3, 3};
    cfg.synth.noise_std = 0.4;
    cfg.synth.driver_std = 0.2;

    std::ostringstream sink;
    std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
    cfg.out = (base / "run_a").string();
    cmd_train(cfg);
    cfg.out = (base / "run_b").string();
    cmd_train(cfg);
    std::cout.rdbuf(old);

    bool repro = true;
    for (const char* name : {"metrics.json", "confusion.csv"}) {
        if (slurp(base / "run_a" / name) != slurp(base / "run_b" / name)) repro = false;
    }

    // container round-trip, bit for bit
    Rng rng(9040);
    Tensor t({7, 3, 2, 5});
    for (float& v : t.data) v = static_cast<float>(rng.next_normal());
    save_features(t, base / "rt.mifi");
    Tensor back = load_features(base / "rt.mifi");
    bool roundtrip = back.dims == t.dims &&
                     std::memcmp(back.data.data(), t.data.data(), t.data.size() * 4) == 0;

    // malformed corpus: each file must be rejected with the right offset
    std::string good = slurp(base / "rt.mifi");
    auto expect_reject = [&](const std::string& name, std::string bytes,
                             std::size_t want_offset) {
        fs::path p = base / name;
        std::ofstream(p, std::ios::binary).write(bytes.data(),
                                                 static_cast<std::streamsize>(bytes.size()));
        try {
            load_features(p);
            return false;
        } catch (const FormatError& e) {
            return e.offset() == want_offset;
        } catch (...) {
            return false;
        }
    };
    std::string bad_magic = good;
    bad_magic[1] = 'X';
    std::string truncated = good.substr(0, good.size() - 10);
    std::string overflow;
    overflow += "MIFI";
    overflow += '\x01';
    overflow += '\x02';
    overflow += '\x00';
    overflow += '\x00';
    overflow += std::string("\x00\x00\x00\x80", 4); // dim0 = 2^31
    overflow += std::string("\x00\x00\x00\x80", 4); // dim1 = 2^31 -> overflow at byte 12
    bool malformed = expect_reject("bad_magic.mifi", bad_magic, 1) &&
                     expect_reject("truncated.mifi", truncated, truncated.size()) &&
                     expect_reject("overflow.mifi", overflow, 12);

    report(9, repro && roundtrip && malformed,
           std::string("determinism & format: rerun artifacts byte-identical ") +
               (repro ? "yes" : "NO") + ", container round-trip bit-exact " +
               (roundtrip ? "yes" : "NO") + ", malformed corpus rejected with offsets " +
               (malformed ? "yes" : "NO"));
}

} // namespace

int main() {
    std::printf("acceptance checks\n");
    criterion_gradients();
    criterion_schedule();
    criterion_reductions();
    criterion_fusion_algebra();
    ComplementaryOutcome comp = run_complementary();
    criterion_complementary(comp);
    criterion_reweighting();
    criterion_voting(comp);
    criterion_keyframes();
    criterion_determinism();
    std::printf("%s\n", g_all_pass ? "all criteria satisfied" : "FAILURES present");
    return g_all_pass ? 0 : 1;
}
