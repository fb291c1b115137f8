#include "har/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace har {

KnnModel knn_fit(std::vector<Vec> vectors, std::vector<Activity> labels, int k) {
    if (vectors.empty()) throw DataError("knn: empty training set");
    if (vectors.size() != labels.size()) throw DataError("knn: vector/label count mismatch");
    if (k < 1 || static_cast<std::size_t>(k) > vectors.size())
        throw DataError("knn: k must be in [1, store size]");
    const std::size_t dim = vectors[0].size();
    for (const Vec& v : vectors) {
        if (v.size() != dim) throw DimensionMismatch("knn: inconsistent training dimensions");
    }
    return KnnModel{std::move(vectors), std::move(labels), k};
}

Activity knn_predict(const KnnModel& model, const Vec& x) {
    if (x.size() != model.vectors[0].size())
        throw DimensionMismatch("knn_predict: query dimension " + std::to_string(x.size()) +
                                ", store dimension " + std::to_string(model.vectors[0].size()));
    const std::size_t k = static_cast<std::size_t>(model.k);
    // (squared distance, stored index), kept as a sorted top-k list.
    std::vector<std::pair<double, std::size_t>> top;
    top.reserve(k + 1);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.vectors.size(); ++i) {
        const double d2 = squared_distance_bounded(model.vectors[i], x, worst);
        if (top.size() == k && d2 >= worst) continue;
        const std::pair<double, std::size_t> entry{d2, i};
        auto pos = std::upper_bound(top.begin(), top.end(), entry);
        top.insert(pos, entry);
        if (top.size() > k) top.pop_back();
        if (top.size() == k) worst = top.back().first;
    }
    std::array<int, kActivityCount> votes{};
    for (const auto& [d2, idx] : top) votes[static_cast<int>(model.labels[idx])]++;
    int best = 0;
    for (int c = 1; c < kActivityCount; ++c) {
        if (votes[c] > votes[best]) best = c;  // strict: earliest class wins ties
    }
    return static_cast<Activity>(best);
}

// --- linear SVM ------------------------------------------------------------------

namespace {

Vec standardize(const LinearSvmModel& model, const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - model.feature_mean[i]) * model.feature_scale[i];
    return out;
}

double hinge(double margin) {
    return margin < 1.0 ? 1.0 - margin : 0.0;
}

}  // namespace

LinearSvmModel svm_train(const std::vector<Vec>& vectors, const std::vector<Activity>& labels,
                         double lambda_reg, int epochs, std::uint64_t seed,
                         std::vector<double>* epoch_objective) {
    if (vectors.empty() || vectors.size() != labels.size()) throw DataError("svm: bad training set");
    if (lambda_reg <= 0.0) throw ConfigError("svm: lambda must be positive");
    if (epochs < 1) throw ConfigError("svm: epochs must be >= 1");
    const std::size_t dim = vectors[0].size();
    for (const Vec& v : vectors) {
        if (v.size() != dim) throw DimensionMismatch("svm: inconsistent training dimensions");
    }

    std::set<Activity> present(labels.begin(), labels.end());
    if (present.size() < 2) throw DataError("svm: training data has a single class");

    LinearSvmModel model;
    model.classes.assign(present.begin(), present.end());
    model.lambda_reg = lambda_reg;
    model.epochs = epochs;

    model.feature_mean.assign(dim, 0.0);
    model.feature_scale.assign(dim, 1.0);
    for (const Vec& v : vectors) {
        for (std::size_t i = 0; i < dim; ++i) model.feature_mean[i] += v[i];
    }
    const double inv_n = 1.0 / static_cast<double>(vectors.size());
    for (std::size_t i = 0; i < dim; ++i) model.feature_mean[i] *= inv_n;
    Vec variance(dim, 0.0);
    for (const Vec& v : vectors) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = v[i] - model.feature_mean[i];
            variance[i] += d * d;
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        const double sd = std::sqrt(variance[i] * inv_n);
        model.feature_scale[i] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }

    std::vector<Vec> standardized;
    standardized.reserve(vectors.size());
    for (const Vec& v : vectors) standardized.push_back(standardize(model, v));

    model.machines.assign(model.classes.size(), BinarySvm{Vec(dim, 0.0), 0.0});
    std::vector<std::vector<double>> per_class_objective(model.classes.size());

    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        const Activity positive = model.classes[c];
        BinarySvm& machine = model.machines[c];
        Rng rng = Rng(mix_seed(seed, 0x53564dULL, static_cast<std::uint64_t>(c)));
        std::vector<std::size_t> order(standardized.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        long t = 0;
        for (int epoch = 0; epoch < epochs; ++epoch) {
            rng.shuffle(order);
            for (std::size_t idx : order) {
                ++t;
                const double eta = 1.0 / (lambda_reg * static_cast<double>(t));
                const Vec& x = standardized[idx];
                const double y = labels[idx] == positive ? 1.0 : -1.0;
                double score = machine.bias;
                for (std::size_t i = 0; i < dim; ++i) score += machine.w[i] * x[i];
                const double shrink = 1.0 - eta * lambda_reg;
                if (y * score < 1.0) {
                    for (std::size_t i = 0; i < dim; ++i) machine.w[i] = shrink * machine.w[i] + eta * y * x[i];
                    machine.bias += eta * y;  // bias is not regularized
                } else {
                    for (std::size_t i = 0; i < dim; ++i) machine.w[i] *= shrink;
                }
            }
            if (epoch_objective) {
                double norm2 = 0.0;
                for (double wi : machine.w) norm2 += wi * wi;
                double loss = 0.0;
                for (std::size_t idx = 0; idx < standardized.size(); ++idx) {
                    const double y = labels[idx] == positive ? 1.0 : -1.0;
                    double score = machine.bias;
                    for (std::size_t i = 0; i < dim; ++i) score += machine.w[i] * standardized[idx][i];
                    loss += hinge(y * score);
                }
                per_class_objective[c].push_back(0.5 * lambda_reg * norm2 +
                                                 loss / static_cast<double>(standardized.size()));
            }
        }
    }

    if (epoch_objective) {
        for (int epoch = 0; epoch < epochs; ++epoch) {
            double sum = 0.0;
            for (const auto& series : per_class_objective) sum += series[static_cast<std::size_t>(epoch)];
            epoch_objective->push_back(sum / static_cast<double>(per_class_objective.size()));
        }
    }
    return model;
}

Vec svm_scores(const LinearSvmModel& model, const Vec& x) {
    if (x.size() != model.feature_mean.size())
        throw DimensionMismatch("svm: query dimension " + std::to_string(x.size()) + ", model dimension " +
                                std::to_string(model.feature_mean.size()));
    const Vec z = standardize(model, x);
    Vec scores(model.machines.size(), 0.0);
    for (std::size_t c = 0; c < model.machines.size(); ++c) {
        double s = model.machines[c].bias;
        for (std::size_t i = 0; i < z.size(); ++i) s += model.machines[c].w[i] * z[i];
        scores[c] = s;
    }
    return scores;
}

Activity svm_predict(const LinearSvmModel& model, const Vec& x) {
    const Vec scores = svm_scores(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;  // strict: canonical order wins ties
    }
    return model.classes[best];
}

double svm_binary_objective(const LinearSvmModel& model, std::size_t machine_index,
                            const std::vector<Vec>& vectors, const std::vector<Activity>& labels) {
    if (machine_index >= model.machines.size()) throw Error("svm: bad machine index");
    const BinarySvm& machine = model.machines[machine_index];
    const Activity positive = model.classes[machine_index];
    double norm2 = 0.0;
    for (double wi : machine.w) norm2 += wi * wi;
    double loss = 0.0;
    for (std::size_t idx = 0; idx < vectors.size(); ++idx) {
        const Vec z = standardize(model, vectors[idx]);
        double score = machine.bias;
        for (std::size_t i = 0; i < z.size(); ++i) score += machine.w[i] * z[i];
        const double y = labels[idx] == positive ? 1.0 : -1.0;
        loss += hinge(y * score);
    }
    return 0.5 * model.lambda_reg * norm2 + loss / static_cast<double>(vectors.size());
}

}  // namespace har
