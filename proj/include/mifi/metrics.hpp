#pragma once

#include <string>
#include <vector>

#include "mifi/error.hpp"

namespace mifi {

struct Metrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<double> per_class_precision;
    std::vector<double> per_class_recall;
    std::vector<double> per_class_f1;
    std::vector<std::vector<long long>> confusion; // [true class][predicted class]

    long long total() const;
    double min_recall() const;
};

// Index of the largest value; ties go to the lowest index.
std::size_t argmax_lowest(const std::vector<double>& v);

Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                        int n_classes);

// JSON object with accuracy, macro_f1, and the per-class vectors.
std::string metrics_to_json(const Metrics& m);

// Header row of class ids, then the n x n integer counts.
std::string confusion_to_csv(const Metrics& m);

} // namespace mifi
