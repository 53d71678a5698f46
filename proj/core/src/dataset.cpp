#include "bolimes/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bolimes/errors.hpp"
#include "bolimes/rng.hpp"

namespace bolimes {

void Dataset::validate() const {
    if (x.rows() != labels.size())
        throw InvalidArgument("dataset '" + name + "': row count does not match label count");
    if (x.cols() != feature_names.size())
        throw InvalidArgument("dataset '" + name + "': column count does not match feature names");
    if (class_names.size() < 2)
        throw InvalidArgument("dataset '" + name + "': needs at least two classes");
    for (double v : x.data())
        if (!std::isfinite(v))
            throw InvalidArgument("dataset '" + name + "': non-finite value in matrix");
    std::vector<bool> seen(class_names.size(), false);
    for (int y : labels) {
        if (y < 0 || y >= n_classes())
            throw InvalidArgument("dataset '" + name + "': label id out of range");
        seen[static_cast<std::size_t>(y)] = true;
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw InvalidArgument("dataset '" + name + "': a class id has no samples");
    std::unordered_set<std::string> names(feature_names.begin(), feature_names.end());
    if (names.size() != feature_names.size())
        throw InvalidArgument("dataset '" + name + "': duplicate feature names");
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
    Dataset out;
    out.x = x.select_rows(indices);
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) out.labels.push_back(labels[i]);
    out.feature_names = feature_names;
    out.class_names = class_names;
    out.name = name;
    out.label_column = label_column;
    return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> indices) const {
    Dataset out;
    out.x = x.select_columns(indices);
    out.labels = labels;
    out.feature_names.reserve(indices.size());
    for (std::size_t j : indices) out.feature_names.push_back(feature_names[j]);
    out.class_names = class_names;
    out.name = name;
    out.label_column = label_column;
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw CsvError(path + ": empty file, header row required");
    const auto header = split_line(strip_cr(line));
    if (header.empty()) throw CsvError(path + ": empty header row");

    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) {
            label_idx = i;
            break;
        }
    if (label_idx == header.size())
        throw CsvError(path + ": label column '" + label_column + "' not found in header");

    Dataset ds;
    ds.label_column = label_column;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != label_idx) ds.feature_names.push_back(header[i]);

    const std::size_t p = ds.feature_names.size();
    std::unordered_map<std::string, int> class_ids;
    std::vector<double> values;
    std::size_t data_row = 0;  // 1-based over data rows in error messages

    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        ++data_row;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw CsvError(path + ": row " + std::to_string(data_row) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(header.size()));
        std::size_t col = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i == label_idx) {
                auto [it, inserted] =
                    class_ids.emplace(cells[i], static_cast<int>(ds.class_names.size()));
                if (inserted) ds.class_names.push_back(cells[i]);
                ds.labels.push_back(it->second);
                continue;
            }
            const std::string& cell = cells[i];
            double v = 0.0;
            const auto* begin = cell.data();
            const auto* end = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc{} || ptr != end || !std::isfinite(v))
                throw CsvError(path + ": row " + std::to_string(data_row) + ", column '" +
                               ds.feature_names[col] + "': cannot parse '" + cell +
                               "' as a finite real");
            values.push_back(v);
            ++col;
        }
    }

    const std::size_t n = ds.labels.size();
    if (n == 0) throw CsvError(path + ": no data rows");
    if (ds.class_names.size() < 2)
        throw CsvError(path + ": only one class present, classification needs at least two");

    ds.x = Matrix(n, p);
    std::copy(values.begin(), values.end(), ds.x.data().begin());
    ds.name = path;
    const auto slash = ds.name.find_last_of('/');
    if (slash != std::string::npos) ds.name = ds.name.substr(slash + 1);
    const auto dot = ds.name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) ds.name = ds.name.substr(0, dot);
    ds.validate();
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write file: " + path);
    for (const auto& fn : ds.feature_names) out << fn << ',';
    out << ds.label_column << '\n';
    char buf[64];
    for (std::size_t r = 0; r < ds.n_samples(); ++r) {
        for (double v : ds.x.row(r)) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, ptr - buf);
            out << ',';
        }
        out << ds.class_names[static_cast<std::size_t>(ds.labels[r])] << '\n';
    }
    if (!out) throw CsvError("write failed: " + path);
}

namespace {

// Snap near-integers produced by n * fraction so the rational intent survives
// floating point (e.g. 100 * 0.3 must count as exactly 30).
double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
}

std::vector<std::size_t> per_class_test_counts(const std::vector<std::size_t>& class_sizes,
                                               std::size_t n, double fraction) {
    const std::size_t k = class_sizes.size();
    const auto total =
        static_cast<std::size_t>(std::ceil(snap(static_cast<double>(n) * fraction)));
    std::vector<std::size_t> counts(k);
    std::vector<std::pair<double, std::size_t>> remainders;  // (-frac, class id)
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double ideal = snap(static_cast<double>(class_sizes[c]) * fraction);
        counts[c] = static_cast<std::size_t>(std::floor(ideal));
        assigned += counts[c];
        remainders.emplace_back(-(ideal - std::floor(ideal)), c);
    }
    std::stable_sort(remainders.begin(), remainders.end());
    for (std::size_t i = 0; i < remainders.size() && assigned < total; ++i) {
        const std::size_t c = remainders[i].second;
        if (counts[c] < class_sizes[c]) {
            ++counts[c];
            ++assigned;
        }
    }
    return counts;
}

}  // namespace

SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 0.5))
        throw InvalidArgument("stratified_split: test_fraction must be in (0, 0.5)");
    const auto sizes = ds.class_counts();
    for (std::size_t c = 0; c < sizes.size(); ++c)
        if (sizes[c] < 2)
            throw InvalidArgument("stratified_split: class '" + ds.class_names[c] +
                                  "' has fewer than 2 samples");

    std::vector<std::vector<std::size_t>> by_class(sizes.size());
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);

    const auto test_counts = per_class_test_counts(sizes, ds.n_samples(), test_fraction);

    SplitPair out;
    out.seed = seed;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        shuffle_indices(members, child_seed(seed, c));
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < test_counts[c] ? out.test_indices : out.train_indices).push_back(members[i]);
    }
    std::sort(out.train_indices.begin(), out.train_indices.end());
    std::sort(out.test_indices.begin(), out.test_indices.end());
    out.train = ds.select_rows(out.train_indices);
    out.test = ds.select_rows(out.test_indices);
    return out;
}

std::vector<int> stratified_folds(const Dataset& ds, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw InvalidArgument("stratified_folds: need at least 2 folds");
    std::vector<std::vector<std::size_t>> by_class(ds.class_names.size());
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    std::vector<int> fold(ds.n_samples(), 0);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        shuffle_indices(members, child_seed(seed, c));
        for (std::size_t i = 0; i < members.size(); ++i)
            fold[members[i]] = static_cast<int>(i % static_cast<std::size_t>(n_folds));
    }
    return fold;
}

std::pair<Dataset, std::vector<std::size_t>> synthesize(const SyntheticSpec& spec) {
    if (spec.n_informative < 1) throw InvalidArgument("synthesize: n_informative must be >= 1");
    if (spec.n_classes < 2) throw InvalidArgument("synthesize: n_classes must be >= 2");
    if (spec.class_separation < 0.0)
        throw InvalidArgument("synthesize: class_separation must be >= 0");
    const std::size_t p = spec.n_informative + spec.n_noise;
    const std::size_t n = spec.n_samples;
    if (n < static_cast<std::size_t>(spec.n_classes) * 2)
        throw InvalidArgument("synthesize: need at least 2 samples per class");

    // Scatter the informative columns across the feature range.
    std::vector<std::size_t> positions(p);
    std::iota(positions.begin(), positions.end(), 0);
    shuffle_indices(positions, derive_seed(spec.seed, "synth/positions"));
    std::vector<std::size_t> informative(positions.begin(),
                                         positions.begin() + static_cast<std::ptrdiff_t>(spec.n_informative));
    std::sort(informative.begin(), informative.end());
    std::vector<bool> is_informative(p, false);
    for (std::size_t j : informative) is_informative[j] = true;

    Dataset ds;
    ds.name = "synthetic";
    ds.x = Matrix(n, p);
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ds.labels[i] = static_cast<int>(i % static_cast<std::size_t>(spec.n_classes));
    for (int c = 0; c < spec.n_classes; ++c) ds.class_names.push_back("c" + std::to_string(c));

    char buf[32];
    for (std::size_t j = 0; j < p; ++j) {
        std::snprintf(buf, sizeof buf, "f%05zu", j);
        ds.feature_names.emplace_back(buf);
    }

    const auto k = static_cast<std::size_t>(spec.n_classes);
    for (std::size_t j = 0; j < p; ++j) {
        Rng rng(derive_seed(spec.seed, "synth/col=" + std::to_string(j)));
        if (is_informative[j]) {
            // Class means are a per-column permutation of {0, sep, 2*sep, ...}
            // so no single direction separates every class.
            std::vector<std::size_t> levels(k);
            std::iota(levels.begin(), levels.end(), 0);
            shuffle_indices(levels, derive_seed(spec.seed, "synth/levels=" + std::to_string(j)));
            for (std::size_t i = 0; i < n; ++i) {
                const auto cls = static_cast<std::size_t>(ds.labels[i]);
                ds.x(i, j) = static_cast<double>(levels[cls]) * spec.class_separation +
                             rng.next_gaussian();
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) ds.x(i, j) = rng.next_gaussian();
        }
    }
    ds.validate();
    return {std::move(ds), std::move(informative)};
}

Standardizer Standardizer::fit(const Matrix& train) {
    Standardizer s;
    const std::size_t p = train.cols();
    const std::size_t n = train.rows();
    s.means_.assign(p, 0.0);
    s.stds_.assign(p, 0.0);
    s.constant_.assign(p, false);
    if (n == 0) return s;
    for (std::size_t r = 0; r < n; ++r) {
        auto row = train.row(r);
        for (std::size_t j = 0; j < p; ++j) s.means_[j] += row[j];
    }
    for (std::size_t j = 0; j < p; ++j) s.means_[j] /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = train.row(r);
        for (std::size_t j = 0; j < p; ++j) {
            const double d = row[j] - s.means_[j];
            s.stds_[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        s.stds_[j] = std::sqrt(s.stds_[j] / static_cast<double>(n));  // population std
        if (s.stds_[j] == 0.0) s.constant_[j] = true;
    }
    return s;
}

Matrix Standardizer::transform(const Matrix& m) const {
    if (m.cols() != n_features())
        throw InvalidArgument("Standardizer: feature-count mismatch");
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) transform_row(m.row(r), out.row(r));
    return out;
}

void Standardizer::transform_row(std::span<const double> in, std::span<double> out) const {
    if (in.size() != n_features() || out.size() != n_features())
        throw InvalidArgument("Standardizer: feature-count mismatch");
    for (std::size_t j = 0; j < in.size(); ++j)
        out[j] = constant_[j] ? 0.0 : (in[j] - means_[j]) / stds_[j];
}

void Standardizer::inverse_row(std::span<const double> in, std::span<double> out) const {
    if (in.size() != n_features() || out.size() != n_features())
        throw InvalidArgument("Standardizer: feature-count mismatch");
    for (std::size_t j = 0; j < in.size(); ++j)
        out[j] = constant_[j] ? means_[j] : in[j] * stds_[j] + means_[j];
}

ZScoreResult zscore(const Matrix& train, const Matrix& apply_to) {
    auto standardizer = Standardizer::fit(train);
    if (apply_to.cols() != standardizer.n_features())
        throw InvalidArgument("zscore: feature-count mismatch between train and apply_to");
    ZScoreResult out{standardizer.transform(train), standardizer.transform(apply_to),
                     std::move(standardizer)};
    return out;
}

}  // namespace bolimes
