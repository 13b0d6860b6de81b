#include "mifi/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "mifi/numerics.hpp"

namespace mifi {

namespace {

// stream ids under the run seed (data generation uses 1..4 under its own seed)
constexpr std::uint64_t kStreamInit = 10;
constexpr std::uint64_t kStreamShuffle = 11;

std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct PooledSplit {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

double pooled_accuracy(const PooledSplit& s, const HeadParams& params) {
    if (s.x.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        HeadOutput out = head_forward_pooled(s.x[i], params);
        if (static_cast<int>(argmax_lowest(out.probs)) == s.y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(s.x.size());
}

// Mean loss over a pooled split at fixed parameters (used for the terminal
// history row).
double pooled_mean_loss(const PooledSplit& s, const HeadParams& params,
                        const LossKind& loss, int epoch) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        HeadOutput out = head_forward_pooled(s.x[i], params);
        sum += loss_eval(loss, out.probs, s.y[i], epoch).value;
    }
    return sum / static_cast<double>(s.x.size());
}

std::pair<HeadParams, TrainHistory> train_core(const PooledSplit& tr, const PooledSplit& val,
                                               int n_classes, const LossKind& loss,
                                               const SgdConfig& sgd, std::uint64_t seed) {
    if (tr.x.empty()) throw InvalidInputError("train: train split is empty");
    sgd.validate();
    bool cyclical = loss.family == LossKind::Family::CASL;
    if (cyclical && loss.casl.total_epochs < sgd.epochs) {
        throw InvalidInputError("train: cyclical total_epochs must cover all epochs");
    }

    std::size_t dim = tr.x.front().size();
    Rng init_rng = Rng(seed).fork(kStreamInit);
    HeadParams params = init_head(static_cast<std::size_t>(n_classes), dim, init_rng);

    TrainHistory history;
    history.has_alpha = cyclical;
    HeadParams best = params;
    double best_val = -1.0;
    int best_epoch = -1;

    std::vector<std::size_t> order(tr.x.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < sgd.epochs; ++epoch) {
        double lr = lr_at(epoch, sgd);
        std::optional<double> alpha;
        if (cyclical) alpha = casl_alpha(epoch, loss.casl);

        Rng shuffle_rng = Rng(seed).fork(kStreamShuffle).fork(static_cast<std::uint64_t>(epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(shuffle_rng.next_below(i));
            std::swap(order[i - 1], order[j]);
        }

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(sgd.batch_size)) {
            std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(sgd.batch_size));
            HeadGrads acc;
            acc.grad_weight.assign(params.weight.size(), 0.0);
            acc.grad_bias.assign(params.bias.size(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                std::size_t s = order[i];
                HeadOutput out = head_forward_pooled(tr.x[s], params);
                LossValue lv = loss_eval(loss, out.probs, tr.y[s], epoch);
                if (!std::isfinite(lv.value)) {
                    throw NumericError("train: non-finite loss at epoch " +
                                       std::to_string(epoch) + " batch " +
                                       std::to_string(start / sgd.batch_size));
                }
                loss_sum += lv.value;
                if (static_cast<int>(argmax_lowest(out.probs)) == tr.y[s]) ++correct;
                HeadGrads g = head_backward(out.pooled, lv.grad_logits);
                for (std::size_t k = 0; k < acc.grad_weight.size(); ++k) {
                    acc.grad_weight[k] += g.grad_weight[k];
                }
                for (std::size_t k = 0; k < acc.grad_bias.size(); ++k) {
                    acc.grad_bias[k] += g.grad_bias[k];
                }
            }
            double inv = 1.0 / static_cast<double>(stop - start);
            for (double& g : acc.grad_weight) g *= inv;
            for (double& g : acc.grad_bias) g *= inv;
            sgd_step(params, acc, lr);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.alpha = alpha;
        rec.lr = lr;
        rec.train_loss = loss_sum / static_cast<double>(tr.x.size());
        rec.train_acc = static_cast<double>(correct) / static_cast<double>(tr.x.size());
        rec.val_acc = pooled_accuracy(val, params);
        history.records.push_back(rec);

        if (!val.x.empty() && rec.val_acc > best_val) {
            best_val = rec.val_acc;
            best = params;
            best_epoch = epoch;
        }
    }

    // Terminal row: the final parameters evaluated at epoch == epochs, so the
    // blending factor's end-of-cycle value is part of the record.
    EpochRecord fin;
    fin.epoch = sgd.epochs;
    if (cyclical) fin.alpha = casl_alpha(sgd.epochs, loss.casl);
    fin.lr = lr_at(sgd.epochs - 1, sgd);
    fin.train_loss = pooled_mean_loss(tr, params, loss, sgd.epochs);
    fin.train_acc = pooled_accuracy(tr, params);
    fin.val_acc = pooled_accuracy(val, params);
    history.records.push_back(fin);

    if (best_epoch < 0) {
        best = params; // no validation split: keep the final parameters
        best_val = fin.val_acc;
    }
    history.best_epoch = best_epoch;
    history.best_val_acc = best_val;
    return {std::move(best), std::move(history)};
}

PooledSplit pool_split(const Dataset& dataset, Split split, FusionMode mode, int view_id) {
    PooledSplit out;
    for (const auto& smp : dataset.samples) {
        if (smp.split != split) continue;
        out.x.push_back(view_id == 0 ? pooled_feature(smp, mode)
                                     : pooled_single_view(smp, view_id));
        out.y.push_back(smp.label);
    }
    return out;
}

} // namespace

std::vector<double> pooled_feature(const Sample& sample, FusionMode mode) {
    if (sample.views.empty()) throw InvalidInputError("sample has no views");
    std::vector<const Tensor*> views;
    for (const auto& [v, t] : sample.views) views.push_back(&t); // camera-id order
    return global_average_pool(fuse_views(mode, views).tensor);
}

std::vector<double> pooled_single_view(const Sample& sample, int view_id) {
    auto it = sample.views.find(view_id);
    if (it == sample.views.end()) {
        throw InvalidInputError("sample " + sample.id + " has no view " +
                                std::to_string(view_id));
    }
    return global_average_pool(it->second);
}

std::pair<HeadParams, TrainHistory> train(const Dataset& dataset, FusionMode fusion_mode,
                                          const LossKind& loss_kind,
                                          const SgdConfig& sgd_config, std::uint64_t seed) {
    PooledSplit tr = pool_split(dataset, Split::Train, fusion_mode, 0);
    PooledSplit val = pool_split(dataset, Split::Val, fusion_mode, 0);
    return train_core(tr, val, dataset.n_classes, loss_kind, sgd_config, seed);
}

std::pair<HeadParams, TrainHistory> train_single_view(const Dataset& dataset, int view_id,
                                                      const LossKind& loss_kind,
                                                      const SgdConfig& sgd_config,
                                                      std::uint64_t seed) {
    PooledSplit tr = pool_split(dataset, Split::Train, FusionMode::Sum, view_id);
    PooledSplit val = pool_split(dataset, Split::Val, FusionMode::Sum, view_id);
    return train_core(tr, val, dataset.n_classes, loss_kind, sgd_config, seed);
}

namespace {

Metrics evaluate_pooled(const HeadParams& head, const Dataset& dataset, Split split,
                        FusionMode mode, int view_id) {
    if (head.n_classes != static_cast<std::size_t>(dataset.n_classes)) {
        throw ShapeError("evaluate: head classes " + std::to_string(head.n_classes) +
                         " != dataset classes " + std::to_string(dataset.n_classes));
    }
    std::vector<int> y_true, y_pred;
    for (const auto& smp : dataset.samples) {
        if (smp.split != split) continue;
        std::vector<double> pooled = view_id == 0 ? pooled_feature(smp, mode)
                                                  : pooled_single_view(smp, view_id);
        HeadOutput out = head_forward_pooled(pooled, head);
        y_true.push_back(smp.label);
        y_pred.push_back(static_cast<int>(argmax_lowest(out.probs)));
    }
    if (y_true.empty()) {
        throw InvalidInputError("evaluate: split '" + split_name(split) + "' is empty");
    }
    return compute_metrics(y_true, y_pred, dataset.n_classes);
}

} // namespace

Metrics evaluate(const HeadParams& head, const Dataset& dataset, Split split,
                 FusionMode fusion_mode) {
    return evaluate_pooled(head, dataset, split, fusion_mode, 0);
}

Metrics single_view_evaluate(const HeadParams& head, const Dataset& dataset, Split split,
                             int view_id) {
    return evaluate_pooled(head, dataset, split, FusionMode::Sum, view_id);
}

int vote_predict(const std::vector<double>& probs_v1, const std::vector<double>& probs_v2) {
    if (probs_v1.size() != probs_v2.size()) {
        throw ShapeError("vote_predict: probability vectors differ in length");
    }
    if (probs_v1.empty()) throw InvalidInputError("vote_predict: empty probabilities");
    // Per class keep the larger of the two views, then argmax with lowest-index
    // tie-breaking; equal view probabilities resolve to view 1 implicitly.
    int best = 0;
    double best_p = std::max(probs_v1[0], probs_v2[0]);
    for (std::size_t k = 1; k < probs_v1.size(); ++k) {
        double p = std::max(probs_v1[k], probs_v2[k]);
        if (p > best_p) {
            best_p = p;
            best = static_cast<int>(k);
        }
    }
    return best;
}

Metrics evaluate_voting(const HeadParams& head_v1, const HeadParams& head_v2,
                        const Dataset& dataset, Split split, int view1, int view2) {
    if (head_v1.n_classes != static_cast<std::size_t>(dataset.n_classes) ||
        head_v2.n_classes != static_cast<std::size_t>(dataset.n_classes)) {
        throw ShapeError("evaluate_voting: head/dataset class count mismatch");
    }
    std::vector<int> y_true, y_pred;
    for (const auto& smp : dataset.samples) {
        if (smp.split != split) continue;
        HeadOutput o1 = head_forward_pooled(pooled_single_view(smp, view1), head_v1);
        HeadOutput o2 = head_forward_pooled(pooled_single_view(smp, view2), head_v2);
        y_true.push_back(smp.label);
        y_pred.push_back(vote_predict(o1.probs, o2.probs));
    }
    if (y_true.empty()) {
        throw InvalidInputError("evaluate_voting: split '" + split_name(split) + "' is empty");
    }
    return compute_metrics(y_true, y_pred, dataset.n_classes);
}

void dump_embeddings(const HeadParams& head, const Dataset& dataset, Split split,
                     FusionMode fusion_mode, const std::filesystem::path& path) {
    std::vector<std::string> rows;
    for (const auto& smp : dataset.samples) {
        if (smp.split != split) continue;
        std::vector<double> pooled = pooled_feature(smp, fusion_mode);
        if (pooled.size() != head.dim) {
            throw ShapeError("dump_embeddings: pooled length != head dim");
        }
        std::string row = smp.id + "," + std::to_string(smp.label);
        for (double v : pooled) row += "," + fmt_g9(v);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InvalidInputError("dump_embeddings: split '" + split_name(split) + "' is empty");
    }
    std::ofstream out(path);
    if (!out) throw IoError("dump_embeddings: cannot open " + path.string());
    out << "id,label";
    for (std::size_t j = 0; j < head.dim; ++j) out << ",f" << j;
    out << "\n";
    for (const auto& r : rows) out << r << "\n";
    if (!out) throw IoError("dump_embeddings: write failed for " + path.string());
}

std::string history_to_csv(const TrainHistory& history) {
    std::string out = history.has_alpha ? "epoch,alpha,lr,train_loss,train_acc,val_acc\n"
                                        : "epoch,lr,train_loss,train_acc,val_acc\n";
    for (const auto& r : history.records) {
        out += std::to_string(r.epoch);
        if (history.has_alpha) out += "," + fmt_g9(r.alpha.value());
        out += "," + fmt_g9(r.lr) + "," + fmt_g9(r.train_loss) + "," + fmt_g9(r.train_acc) +
               "," + fmt_g9(r.val_acc) + "\n";
    }
    return out;
}

} // namespace mifi
