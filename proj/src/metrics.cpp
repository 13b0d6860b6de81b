#include "mifi/metrics.hpp"

#include <algorithm>

#include <json.hpp>

namespace mifi {

long long Metrics::total() const {
    long long n = 0;
    for (const auto& row : confusion) {
        for (long long c : row) n += c;
    }
    return n;
}

double Metrics::min_recall() const {
    double m = 1.0;
    for (double r : per_class_recall) m = std::min(m, r);
    return m;
}

std::size_t argmax_lowest(const std::vector<double>& v) {
    if (v.empty()) throw InvalidInputError("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                        int n_classes) {
    if (y_true.size() != y_pred.size()) {
        throw InvalidInputError("compute_metrics: label/prediction count mismatch");
    }
    if (y_true.empty()) throw InvalidInputError("compute_metrics: no samples");
    if (n_classes < 1) throw InvalidInputError("compute_metrics: n_classes must be >= 1");

    Metrics m;
    m.confusion.assign(n_classes, std::vector<long long>(n_classes, 0));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        int t = y_true[i], p = y_pred[i];
        if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
            throw InvalidInputError("compute_metrics: label out of range");
        }
        ++m.confusion[t][p];
    }

    long long correct = 0;
    for (int k = 0; k < n_classes; ++k) correct += m.confusion[k][k];
    m.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());

    m.per_class_precision.resize(n_classes);
    m.per_class_recall.resize(n_classes);
    m.per_class_f1.resize(n_classes);
    double f1_sum = 0.0;
    for (int k = 0; k < n_classes; ++k) {
        long long tp = m.confusion[k][k];
        long long pred_k = 0, true_k = 0;
        for (int j = 0; j < n_classes; ++j) {
            pred_k += m.confusion[j][k];
            true_k += m.confusion[k][j];
        }
        double prec = pred_k > 0 ? static_cast<double>(tp) / pred_k : 0.0;
        double rec = true_k > 0 ? static_cast<double>(tp) / true_k : 0.0;
        double f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        m.per_class_precision[k] = prec;
        m.per_class_recall[k] = rec;
        m.per_class_f1[k] = f1;
        f1_sum += f1;
    }
    m.macro_f1 = f1_sum / n_classes;
    return m;
}

std::string metrics_to_json(const Metrics& m) {
    nlohmann::json j;
    j["accuracy"] = m.accuracy;
    j["macro_f1"] = m.macro_f1;
    j["per_class_precision"] = m.per_class_precision;
    j["per_class_recall"] = m.per_class_recall;
    j["per_class_f1"] = m.per_class_f1;
    j["n_samples"] = m.total();
    return j.dump(2);
}

std::string confusion_to_csv(const Metrics& m) {
    std::string out;
    for (std::size_t k = 0; k < m.confusion.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(k);
    }
    out += "\n";
    for (const auto& row : m.confusion) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ",";
            out += std::to_string(row[j]);
        }
        out += "\n";
    }
    return out;
}

} // namespace mifi
