#include "bolimes/model.hpp"

#include "bolimes/errors.hpp"

namespace bolimes {

int TrainedModel::n_classes() const {
    return std::visit([](const auto& m) { return m.n_classes(); }, model_);
}

std::size_t TrainedModel::n_features() const {
    return std::visit([](const auto& m) { return m.n_features(); }, model_);
}

int TrainedModel::predict_row(std::span<const double> row) const {
    return std::visit([&](const auto& m) { return m.predict_row(row); }, model_);
}

void TrainedModel::predict_proba_row(std::span<const double> row, std::span<double> out) const {
    std::visit([&](const auto& m) { m.predict_proba_row(row, out); }, model_);
}

const RandomForest& TrainedModel::forest() const {
    const auto* f = std::get_if<RandomForest>(&model_);
    if (!f) throw InvalidArgument("model is not a random forest");
    return *f;
}

const GradientBoosted& TrainedModel::gbt() const {
    const auto* g = std::get_if<GradientBoosted>(&model_);
    if (!g) throw InvalidArgument("model is not a gradient-boosted ensemble");
    return *g;
}

namespace {

void check_features(const TrainedModel& model, const Matrix& x) {
    if (x.cols() != model.n_features())
        throw InvalidArgument("predict: feature count " + std::to_string(x.cols()) +
                              " does not match training (" +
                              std::to_string(model.n_features()) + ")");
}

}  // namespace

std::vector<int> predict(const TrainedModel& model, const Matrix& x) {
    check_features(model, x);
    std::vector<int> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.predict_row(x.row(i));
    return out;
}

Matrix predict_proba(const TrainedModel& model, const Matrix& x) {
    check_features(model, x);
    Matrix out(x.rows(), static_cast<std::size_t>(model.n_classes()));
    for (std::size_t i = 0; i < x.rows(); ++i) model.predict_proba_row(x.row(i), out.row(i));
    return out;
}

ImportanceScores feature_importances(const TrainedModel& model) {
    return model.forest().feature_importances();
}

}  // namespace bolimes
