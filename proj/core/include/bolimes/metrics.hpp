#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bolimes/dataset.hpp"
#include "bolimes/model.hpp"

namespace bolimes {

/// K x K count matrix; entry (i, j) counts samples of true class i predicted
/// as class j.
struct ConfusionMatrix {
    int k = 0;
    std::vector<std::int64_t> counts;  // row-major k*k

    std::int64_t& at(int i, int j) {
        return counts[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                      static_cast<std::size_t>(j)];
    }
    std::int64_t at(int i, int j) const {
        return counts[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                      static_cast<std::size_t>(j)];
    }
    std::int64_t total() const;
    std::int64_t trace() const;
};

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;  // support-weighted
    double recall = 0.0;     // support-weighted; equals accuracy by identity
    double f1 = 0.0;         // support-weighted
    ConfusionMatrix confusion;
    std::int64_t n_test = 0;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int k);

/// Support-weighted precision/recall/F1 and accuracy from a confusion matrix.
/// Per-class 0/0 ratios are defined as 0. The support weights cancel in the
/// recall sum (sum_c (n_c/n)(d_c/n_c) = trace/n), so weighted recall is
/// computed as trace/n and is bit-identical to accuracy.
MetricsReport weighted_metrics(const ConfusionMatrix& cm);

MetricsReport evaluate(const TrainedModel& model, const Dataset& test);

}  // namespace bolimes
