#include "bolimes/lime.hpp"

#include <algorithm>
#include <cmath>

#include "bolimes/errors.hpp"
#include "bolimes/parallel.hpp"
#include "bolimes/rng.hpp"

namespace bolimes {

std::string to_string(Aggregation a) {
    switch (a) {
        case Aggregation::Mean:
            return "mean";
        case Aggregation::Sum:
            return "sum";
        case Aggregation::Median:
            return "median";
    }
    return "mean";
}

Aggregation aggregation_from_string(const std::string& s) {
    if (s == "mean") return Aggregation::Mean;
    if (s == "sum") return Aggregation::Sum;
    if (s == "median") return Aggregation::Median;
    throw InvalidArgument("unknown aggregation: " + s);
}

void LimeParams::validate() const {
    if (n_perturbations < 10) throw InvalidArgument("lime: need at least 10 perturbations");
    if (ridge < 0.0) throw InvalidArgument("lime: ridge penalty must be >= 0");
}

double LimeParams::resolve_kernel_width(std::size_t n_features) const {
    if (kernel_width > 0.0) return kernel_width;
    return 0.75 * std::sqrt(static_cast<double>(n_features));
}

Matrix perturb(std::span<const double> instance_std, int n_perturbations, std::uint64_t seed) {
    if (instance_std.empty()) throw InvalidArgument("perturb: instance has no features");
    const auto m = static_cast<std::size_t>(n_perturbations);
    const std::size_t p = instance_std.size();
    Matrix z(m, p);
    std::copy(instance_std.begin(), instance_std.end(), z.row(0).begin());
    Rng rng(seed);
    for (std::size_t i = 1; i < m; ++i) {
        auto row = z.row(i);
        for (std::size_t j = 0; j < p; ++j) row[j] = rng.next_gaussian();
    }
    return z;
}

std::vector<double> proximity(std::span<const double> distances, double kernel_width) {
    if (!(kernel_width > 0.0)) throw InvalidArgument("proximity: kernel width must be positive");
    std::vector<double> weights(distances.size());
    const double inv_sq = 1.0 / (kernel_width * kernel_width);
    for (std::size_t i = 0; i < distances.size(); ++i)
        weights[i] = std::exp(-distances[i] * distances[i] * inv_sq);
    return weights;
}

namespace {

// Cholesky solve of the SPD system M w = b; M is overwritten. A non-positive
// pivot reports rank deficiency.
void solve_spd_inplace(std::vector<double>& m, std::vector<double>& b, std::size_t dim) {
    auto at = [&](std::size_t r, std::size_t c) -> double& { return m[r * dim + c]; };
    double max_diag = 0.0;
    for (std::size_t i = 0; i < dim; ++i) max_diag = std::max(max_diag, at(i, i));
    const double pivot_floor = std::max(max_diag, 1.0) * 1e-13;

    for (std::size_t c = 0; c < dim; ++c) {
        double pivot = at(c, c);
        for (std::size_t k = 0; k < c; ++k) pivot -= at(c, k) * at(c, k);
        if (!(pivot > pivot_floor))
            throw SingularSystem(
                "fit_surrogate: singular normal equations (rank-deficient design with no "
                "ridge penalty)");
        const double root = std::sqrt(pivot);
        at(c, c) = root;
        for (std::size_t r = c + 1; r < dim; ++r) {
            double v = at(r, c);
            for (std::size_t k = 0; k < c; ++k) v -= at(r, k) * at(c, k);
            at(r, c) = v / root;
        }
    }
    // Forward then backward substitution.
    for (std::size_t r = 0; r < dim; ++r) {
        double v = b[r];
        for (std::size_t k = 0; k < r; ++k) v -= at(r, k) * b[k];
        b[r] = v / at(r, r);
    }
    for (std::size_t r = dim; r > 0; --r) {
        double v = b[r - 1];
        for (std::size_t k = r; k < dim; ++k) v -= at(k, r - 1) * b[k];
        b[r - 1] = v / at(r - 1, r - 1);
    }
}

}  // namespace

LimeExplanation fit_surrogate(const Matrix& z, std::span<const double> outputs,
                              std::span<const double> weights, double ridge) {
    const std::size_t m = z.rows();
    const std::size_t p = z.cols();
    if (outputs.size() != m || weights.size() != m)
        throw InvalidArgument("fit_surrogate: outputs/weights size must match rows of Z");
    if (m == 0) throw InvalidArgument("fit_surrogate: empty perturbation set");
    if (ridge < 0.0) throw InvalidArgument("fit_surrogate: ridge must be >= 0");

    const std::size_t dim = p + 1;  // intercept first
    std::vector<double> normal(dim * dim, 0.0);
    std::vector<double> rhs(dim, 0.0);
    std::vector<double> a(dim);

    for (std::size_t i = 0; i < m; ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;
        a[0] = 1.0;
        auto row = z.row(i);
        std::copy(row.begin(), row.end(), a.begin() + 1);
        for (std::size_t r = 0; r < dim; ++r) {
            const double wa = w * a[r];
            rhs[r] += wa * outputs[i];
            for (std::size_t c = 0; c <= r; ++c) normal[r * dim + c] += wa * a[c];
        }
    }
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = r + 1; c < dim; ++c) normal[r * dim + c] = normal[c * dim + r];
    for (std::size_t j = 1; j < dim; ++j) normal[j * dim + j] += ridge;  // intercept unpenalized

    solve_spd_inplace(normal, rhs, dim);

    LimeExplanation exp;
    exp.intercept = rhs[0];
    exp.coefficients.assign(rhs.begin() + 1, rhs.end());

    double w_total = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        w_total += weights[i];
        mean += weights[i] * outputs[i];
    }
    mean = w_total > 0.0 ? mean / w_total : 0.0;
    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double g = exp.intercept;
        auto row = z.row(i);
        for (std::size_t j = 0; j < p; ++j) g += exp.coefficients[j] * row[j];
        const double d = outputs[i] - g;
        const double c = outputs[i] - mean;
        ss_res += weights[i] * d * d;
        ss_tot += weights[i] * c * c;
    }
    exp.weighted_r2 = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-12 ? 1.0 : 0.0);
    return exp;
}

LimeExplanation explain_instance(const ScalarFn& black_box, const Standardizer& standardizer,
                                 std::span<const double> instance, std::size_t instance_index,
                                 const LimeParams& params, std::uint64_t seed) {
    params.validate();
    const std::size_t p = instance.size();
    std::vector<double> instance_std(p);
    standardizer.transform_row(instance, instance_std);

    const Matrix z = perturb(instance_std, params.n_perturbations, seed);
    const std::size_t m = z.rows();

    std::vector<double> outputs(m);
    std::vector<double> distances(m);
    std::vector<double> original(p);
    for (std::size_t i = 0; i < m; ++i) {
        auto row = z.row(i);
        standardizer.inverse_row(row, original);
        outputs[i] = black_box(original);
        double d2 = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double diff = row[j] - instance_std[j];
            d2 += diff * diff;
        }
        distances[i] = std::sqrt(d2);
    }

    const auto weights = proximity(distances, params.resolve_kernel_width(p));
    LimeExplanation exp = fit_surrogate(z, outputs, weights, params.ridge);
    exp.instance = instance_index;
    return exp;
}

std::vector<LimeExplanation> explain_all(const TrainedModel& model, const Dataset& ds,
                                         const LimeParams& params, int n_threads) {
    params.validate();
    if (model.n_features() != ds.n_features())
        throw InvalidArgument("explain_all: model and dataset feature counts differ");

    const Standardizer standardizer = Standardizer::fit(ds.x);
    std::vector<LimeExplanation> out(ds.n_samples());
    parallel_for(ds.n_samples(), n_threads, [&](std::size_t i) {
        const auto instance = ds.x.row(i);
        const int predicted = model.predict_row(instance);
        std::vector<double> proba(static_cast<std::size_t>(model.n_classes()));
        const ScalarFn probability_of_predicted = [&](std::span<const double> row) {
            model.predict_proba_row(row, proba);
            return proba[static_cast<std::size_t>(predicted)];
        };
        out[i] = explain_instance(probability_of_predicted, standardizer, instance, i, params,
                                  derive_seed(params.seed, "lime/instance=" + std::to_string(i)));
    });
    return out;
}

GlobalRanking global_ranking(std::span<const LimeExplanation> explanations,
                             Aggregation aggregation) {
    if (explanations.empty()) throw InvalidArgument("global_ranking: no explanations");
    const std::size_t p = explanations[0].coefficients.size();
    for (const auto& e : explanations)
        if (e.coefficients.size() != p)
            throw InvalidArgument("global_ranking: explanations disagree on feature count");

    std::vector<double> scores(p, 0.0);
    if (aggregation == Aggregation::Median) {
        std::vector<double> column(explanations.size());
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t i = 0; i < explanations.size(); ++i)
                column[i] = std::abs(explanations[i].coefficients[j]);
            std::sort(column.begin(), column.end());
            const std::size_t n = column.size();
            scores[j] = n % 2 == 1 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
        }
    } else {
        for (const auto& e : explanations)
            for (std::size_t j = 0; j < p; ++j) scores[j] += std::abs(e.coefficients[j]);
        if (aggregation == Aggregation::Mean)
            for (auto& s : scores) s /= static_cast<double>(explanations.size());
    }

    GlobalRanking ranking;
    ranking.order.resize(p);
    for (std::size_t j = 0; j < p; ++j) ranking.order[j] = j;
    std::stable_sort(ranking.order.begin(), ranking.order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    ranking.scores.resize(p);
    for (std::size_t i = 0; i < p; ++i) ranking.scores[i] = scores[ranking.order[i]];
    return ranking;
}

}  // namespace bolimes
