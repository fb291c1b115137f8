#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "har/baselines.hpp"
#include "har/common.hpp"
#include "har/dataset.hpp"
#include "har/hierarchy.hpp"
#include "har/precondition.hpp"

namespace har {

// Square per-pose count table; rows are true classes, columns predictions.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<Activity> classes);

    const std::vector<Activity>& classes() const { return classes_; }
    void accumulate(Activity truth, Activity predicted);
    void merge(const ConfusionMatrix& other);  // other's classes must be a subset
    long count(Activity truth, Activity predicted) const;
    long total() const;
    long trace() const;
    double accuracy() const;  // trace/total; throws on an empty matrix

    struct ClassPR {
        Activity label;
        std::optional<double> precision;  // absent when the class was never predicted
        std::optional<double> recall;     // absent when the class has no true samples
    };
    std::vector<ClassPR> precision_recall() const;

private:
    std::size_t index(Activity a) const;

    std::vector<Activity> classes_;
    std::vector<long> counts_;  // row-major
};

enum class MethodKind { svm, knn, gng, gwr };

const std::string& method_name(MethodKind kind);
std::optional<MethodKind> method_from_name(std::string_view name);

struct KnnSpecOptions {
    int k = 1;
};

struct SvmSpecOptions {
    double lambda_reg = 1e-4;
    int epochs = 20;
};

struct MethodSpec {
    MethodKind kind = MethodKind::knn;
    KnnSpecOptions knn;
    SvmSpecOptions svm;
    HierarchySpec hierarchy;  // used by gng/gwr

    static MethodSpec make(MethodKind kind);
};

enum class ScenePolicy { per_scene, all_actions };

const std::string& scene_policy_name(ScenePolicy policy);
std::optional<ScenePolicy> scene_policy_from_name(std::string_view name);

struct SceneSubjectResult {
    MethodKind method;
    PreconditionMode mode;
    std::optional<Scene> scene;  // empty under all_actions
    int subject = 0;
    ConfusionMatrix confusion;
    double accuracy = 0.0;
};

struct ClassStat {
    Activity label;
    std::optional<double> precision_mean;
    std::optional<double> precision_stddev;  // sample stddev across subjects; absent for < 2 values
    std::optional<double> recall_mean;
    std::optional<double> recall_stddev;
};

struct SceneReport {
    std::optional<Scene> scene;
    double mean_accuracy = 0.0;  // mean over subjects with data
    std::vector<ClassStat> per_class;
};

struct AggregateReport {
    MethodKind method;
    PreconditionMode mode;
    ScenePolicy policy;
    std::vector<SceneSubjectResult> results;
    std::vector<SceneReport> scenes;
    // Mean over scenes of the mean over subjects.
    double global_accuracy = 0.0;
    // All folds pooled onto the full canonical class axes, with its own
    // pooled accuracy.
    ConfusionMatrix pooled;
    double pooled_accuracy = 0.0;
    int participants = 0;
    int scene_count = 0;
};

struct ExperimentOptions {
    bool include_random_still = false;  // per-scene runs only
    std::size_t jobs = 1;
    const SceneMap* scene_map = nullptr;  // default map when null
};

// One LOSO fold: train on every other subject, classify the held-out
// subject's poses step by step. Returns nothing when the fold has no test
// data for the scene.
std::optional<SceneSubjectResult> run_fold(const Corpus& corpus, int held_out_subject,
                                           std::optional<Scene> scene, const MethodSpec& method,
                                           PreconditionMode mode, std::uint64_t seed,
                                           const ExperimentOptions& options, Warnings* warnings = nullptr);

// The full experiment for one (method, preconditioning) cell: every subject
// as the held-out fold, every scene under per_scene policy, aggregated with
// the per-scene/per-subject averaging scheme.
AggregateReport run_loso_experiment(const Corpus& corpus, const MethodSpec& method, PreconditionMode mode,
                                    ScenePolicy policy, std::uint64_t seed,
                                    const ExperimentOptions& options = {}, Warnings* warnings = nullptr);

// Aggregation used by run_loso_experiment, exposed for direct testing:
// per-scene accuracy = mean over subjects, global = mean over scenes.
AggregateReport aggregate_results(MethodKind method, PreconditionMode mode, ScenePolicy policy,
                                  std::vector<SceneSubjectResult> results);

}  // namespace har
