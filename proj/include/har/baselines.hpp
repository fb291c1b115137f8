#pragma once

#include <cstdint>
#include <vector>

#include "har/common.hpp"
#include "har/dataset.hpp"

namespace har {

// Exact k-nearest-neighbour classifier over raw preconditioned vectors.
struct KnnModel {
    std::vector<Vec> vectors;
    std::vector<Activity> labels;
    int k = 1;
};

KnnModel knn_fit(std::vector<Vec> vectors, std::vector<Activity> labels, int k);

// Majority label among the k nearest stored vectors. Distance ties prefer
// the earlier stored index; vote ties the canonical label order.
Activity knn_predict(const KnnModel& model, const Vec& x);

struct BinarySvm {
    Vec w;
    double bias = 0.0;
};

// One-vs-rest linear SVM trained by stochastic subgradient descent on the
// regularized hinge loss. Features are standardized internally (zero mean,
// unit variance per dimension, estimated on the training fold).
struct LinearSvmModel {
    std::vector<Activity> classes;     // canonical order
    std::vector<BinarySvm> machines;   // parallel to classes
    Vec feature_mean;
    Vec feature_scale;                 // 1/stddev, with a floor for constant dims
    double lambda_reg = 1e-4;
    int epochs = 20;
};

// Minimizes, per class, (lambda/2)|w|^2 + mean(max(0, 1 - y (w.x + b)))
// with learning rate 1/(lambda * t) and seeded shuffling. When epoch_objective
// is given it receives the mean-over-classes objective after each epoch.
LinearSvmModel svm_train(const std::vector<Vec>& vectors, const std::vector<Activity>& labels,
                         double lambda_reg, int epochs, std::uint64_t seed,
                         std::vector<double>* epoch_objective = nullptr);

// Argmax of the per-class discriminants; ties resolve to the earliest class
// in canonical order.
Activity svm_predict(const LinearSvmModel& model, const Vec& x);

// Per-class discriminant values w_c . x + b_c on the standardized input.
Vec svm_scores(const LinearSvmModel& model, const Vec& x);

// Regularized hinge objective of one binary machine over a labelled set
// (+1 for `positive`, -1 otherwise). Exposed for training diagnostics.
double svm_binary_objective(const LinearSvmModel& model, std::size_t machine_index,
                            const std::vector<Vec>& vectors, const std::vector<Activity>& labels);

}  // namespace har
