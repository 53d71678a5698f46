#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bolimes/dataset.hpp"
#include "bolimes/matrix.hpp"
#include "bolimes/model.hpp"

namespace bolimes {

enum class Aggregation { Mean, Sum, Median };

std::string to_string(Aggregation a);
Aggregation aggregation_from_string(const std::string& s);

struct LimeParams {
    int n_perturbations = 5000;
    double kernel_width = 0.0;  // <= 0 selects the default 0.75 * sqrt(p)
    double ridge = 1.0;         // penalty on coefficients; the intercept is free
    Aggregation aggregation = Aggregation::Mean;
    std::uint64_t seed = 42;

    void validate() const;
    double resolve_kernel_width(std::size_t n_features) const;
};

/// Perturbations around one instance in standardized space, with the
/// black-box outputs and proximity weights for the surrogate fit. Row 0 is
/// the unperturbed instance itself (weight 1).
struct PerturbationSet {
    Matrix z;
    std::vector<double> outputs;
    std::vector<double> weights;
};

struct LimeExplanation {
    std::size_t instance = 0;
    double intercept = 0.0;
    std::vector<double> coefficients;
    double weighted_r2 = 0.0;
};

/// Features ordered by aggregated local importance, descending; ties go to
/// the lower original index. scores[i] belongs to order[i].
struct GlobalRanking {
    std::vector<std::size_t> order;
    std::vector<double> scores;
};

/// m x p standard-gaussian sample in standardized space; row 0 is the
/// instance itself. Deterministic per seed.
Matrix perturb(std::span<const double> instance_std, int n_perturbations, std::uint64_t seed);

/// Exponential-squared kernel exp(-d^2 / width^2) over distances in
/// standardized space.
std::vector<double> proximity(std::span<const double> distances, double kernel_width);

/// Exact minimizer of sum_i w_i (f_i - g(z_i))^2 + ridge * |coef|^2 with
/// g(z) = intercept + coef . z, solved through the normal equations
/// (A^T W A + ridge * I') w = A^T W f with A = [1 | Z] and no penalty on the
/// intercept. Throws SingularSystem when ridge = 0 and the system is
/// rank-deficient.
LimeExplanation fit_surrogate(const Matrix& z, std::span<const double> outputs,
                              std::span<const double> weights, double ridge);

/// Scalar black box evaluated on original-scale rows.
using ScalarFn = std::function<double(std::span<const double>)>;

/// One local surrogate: perturb in standardized space, evaluate the black box
/// on the inverse-transformed rows, weight by proximity, fit.
LimeExplanation explain_instance(const ScalarFn& black_box, const Standardizer& standardizer,
                                 std::span<const double> instance, std::size_t instance_index,
                                 const LimeParams& params, std::uint64_t seed);

/// One explanation per instance of `ds`; the explained output is the model's
/// probability for that instance's predicted class. Instances run in parallel
/// on pre-derived seed streams.
std::vector<LimeExplanation> explain_all(const TrainedModel& model, const Dataset& ds,
                                         const LimeParams& params, int n_threads = 0);

/// Aggregate |coefficient| per feature across explanations and rank.
GlobalRanking global_ranking(std::span<const LimeExplanation> explanations,
                             Aggregation aggregation = Aggregation::Mean);

}  // namespace bolimes
