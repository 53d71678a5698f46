#include "bolimes/metrics.hpp"

#include <numeric>

#include "bolimes/errors.hpp"

namespace bolimes {

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t t = 0;
    for (int i = 0; i < k; ++i) t += at(i, i);
    return t;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int k) {
    if (y_true.size() != y_pred.size())
        throw InvalidArgument("confusion: y_true and y_pred lengths differ");
    if (k < 1) throw InvalidArgument("confusion: k must be >= 1");
    ConfusionMatrix cm{k, std::vector<std::int64_t>(static_cast<std::size_t>(k) *
                                                    static_cast<std::size_t>(k))};
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if (t < 0 || t >= k || p < 0 || p >= k)
            throw InvalidArgument("confusion: label out of range at index " + std::to_string(i));
        ++cm.at(t, p);
    }
    return cm;
}

MetricsReport weighted_metrics(const ConfusionMatrix& cm) {
    const std::int64_t n = cm.total();
    if (n <= 0) throw InvalidArgument("weighted_metrics: empty confusion matrix");

    MetricsReport report;
    report.confusion = cm;
    report.n_test = n;
    report.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(n);
    report.recall = report.accuracy;

    double weighted_precision = 0.0;
    double weighted_f1 = 0.0;
    for (int c = 0; c < cm.k; ++c) {
        std::int64_t support = 0;
        std::int64_t predicted = 0;
        for (int j = 0; j < cm.k; ++j) {
            support += cm.at(c, j);
            predicted += cm.at(j, c);
        }
        if (support == 0) continue;  // zero weight, zero contribution
        const std::int64_t hit = cm.at(c, c);
        const double precision =
            predicted > 0 ? static_cast<double>(hit) / static_cast<double>(predicted) : 0.0;
        const double recall = static_cast<double>(hit) / static_cast<double>(support);
        const double f1 =
            precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        const double weight = static_cast<double>(support) / static_cast<double>(n);
        weighted_precision += weight * precision;
        weighted_f1 += weight * f1;
    }
    report.precision = weighted_precision;
    report.f1 = weighted_f1;
    return report;
}

MetricsReport evaluate(const TrainedModel& model, const Dataset& test) {
    const auto predictions = predict(model, test.x);
    return weighted_metrics(confusion(test.labels, predictions,
                                      std::max(model.n_classes(), test.n_classes())));
}

}  // namespace bolimes
