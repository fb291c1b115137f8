#include "har/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

namespace har {

// --- confusion matrix ------------------------------------------------------------

ConfusionMatrix::ConfusionMatrix(std::vector<Activity> classes) : classes_(std::move(classes)) {
    if (classes_.empty()) throw DataError("confusion matrix needs at least one class");
    counts_.assign(classes_.size() * classes_.size(), 0);
}

std::size_t ConfusionMatrix::index(Activity a) const {
    const auto it = std::find(classes_.begin(), classes_.end(), a);
    if (it == classes_.end())
        throw DataError("label '" + activity_name(a) + "' is not on the confusion-matrix axes");
    return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::accumulate(Activity truth, Activity predicted) {
    counts_[index(truth) * classes_.size() + index(predicted)] += 1;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    for (std::size_t t = 0; t < other.classes_.size(); ++t) {
        for (std::size_t p = 0; p < other.classes_.size(); ++p) {
            const long c = other.counts_[t * other.classes_.size() + p];
            if (c == 0) continue;
            counts_[index(other.classes_[t]) * classes_.size() + index(other.classes_[p])] += c;
        }
    }
}

long ConfusionMatrix::count(Activity truth, Activity predicted) const {
    return counts_[index(truth) * classes_.size() + index(predicted)];
}

long ConfusionMatrix::total() const {
    long sum = 0;
    for (long c : counts_) sum += c;
    return sum;
}

long ConfusionMatrix::trace() const {
    long sum = 0;
    for (std::size_t i = 0; i < classes_.size(); ++i) sum += counts_[i * classes_.size() + i];
    return sum;
}

double ConfusionMatrix::accuracy() const {
    const long n = total();
    if (n == 0) throw DataError("accuracy of an empty confusion matrix");
    return static_cast<double>(trace()) / static_cast<double>(n);
}

std::vector<ConfusionMatrix::ClassPR> ConfusionMatrix::precision_recall() const {
    std::vector<ClassPR> out;
    out.reserve(classes_.size());
    const std::size_t n = classes_.size();
    for (std::size_t c = 0; c < n; ++c) {
        long column = 0, row = 0;
        for (std::size_t i = 0; i < n; ++i) {
            column += counts_[i * n + c];
            row += counts_[c * n + i];
        }
        const long diag = counts_[c * n + c];
        ClassPR pr{classes_[c], std::nullopt, std::nullopt};
        if (column > 0) pr.precision = static_cast<double>(diag) / static_cast<double>(column);
        if (row > 0) pr.recall = static_cast<double>(diag) / static_cast<double>(row);
        out.push_back(pr);
    }
    return out;
}

// --- method specs -----------------------------------------------------------------

namespace {

const std::array<std::string, 4> kMethodNames = {"svm", "knn", "gng", "gwr"};
const std::array<std::string, 2> kPolicyNames = {"per_scene", "all_actions"};

}  // namespace

const std::string& method_name(MethodKind kind) {
    return kMethodNames[static_cast<int>(kind)];
}

std::optional<MethodKind> method_from_name(std::string_view name) {
    for (int i = 0; i < 4; ++i) {
        if (name == kMethodNames[i]) return static_cast<MethodKind>(i);
    }
    return std::nullopt;
}

const std::string& scene_policy_name(ScenePolicy policy) {
    return kPolicyNames[static_cast<int>(policy)];
}

std::optional<ScenePolicy> scene_policy_from_name(std::string_view name) {
    for (int i = 0; i < 2; ++i) {
        if (name == kPolicyNames[i]) return static_cast<ScenePolicy>(i);
    }
    return std::nullopt;
}

MethodSpec MethodSpec::make(MethodKind kind) {
    MethodSpec spec;
    spec.kind = kind;
    if (kind == MethodKind::gng) spec.hierarchy = HierarchySpec::defaults(GasEngine::gng);
    else spec.hierarchy = HierarchySpec::defaults(GasEngine::gwr);
    return spec;
}

// --- fold execution -----------------------------------------------------------------

namespace {

std::vector<Activity> fold_class_axes(const SceneMap& scene_map, std::optional<Scene> scene,
                                      bool include_random_still, const Corpus& subset) {
    if (!scene) return all_activities();
    // The scene's configured class set keeps axes identical across subjects;
    // labels present in the data are unioned in so nothing is dropped.
    std::vector<Activity> axes;
    if (const auto it = scene_map.find(*scene); it != scene_map.end()) axes = it->second;
    if (include_random_still) {
        axes.push_back(Activity::random_movements);
        axes.push_back(Activity::still);
    }
    for (Activity a : subset.labels_present()) axes.push_back(a);
    std::sort(axes.begin(), axes.end());
    axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
    return axes;
}

void flatten(const std::vector<PreparedRecording>& prepared, std::vector<Vec>& vectors,
             std::vector<Activity>& labels) {
    for (const PreparedRecording& rec : prepared) {
        for (const Vec& v : rec.poses) {
            vectors.push_back(v);
            labels.push_back(rec.label);
        }
    }
}

}  // namespace

std::optional<SceneSubjectResult> run_fold(const Corpus& corpus, int held_out_subject,
                                           std::optional<Scene> scene, const MethodSpec& method,
                                           PreconditionMode mode, std::uint64_t seed,
                                           const ExperimentOptions& options, Warnings* warnings) {
    const SceneMap& scene_map = options.scene_map ? *options.scene_map : default_scene_map();
    const Corpus subset = scene ? scene_subset(corpus, *scene, options.include_random_still) : corpus;

    const auto subjects = subset.subject_ids();
    if (std::find(subjects.begin(), subjects.end(), held_out_subject) == subjects.end()) {
        warn(warnings, "fold subject " + std::to_string(held_out_subject) +
                           (scene ? " has no data in scene " + scene_name(*scene) : " has no data") +
                           "; skipped");
        return std::nullopt;
    }
    const LosoSplit split = split_loso(subset, held_out_subject);
    if (split.train.recordings.empty()) {
        warn(warnings, "fold subject " + std::to_string(held_out_subject) + " has no training data; skipped");
        return std::nullopt;
    }

    const auto train = apply_preconditioning(split.train, mode, DataRole::train, warnings);
    const auto test = apply_preconditioning(split.test, mode, DataRole::test, warnings);
    if (test.empty()) return std::nullopt;

    SceneSubjectResult result{
        method.kind, mode, scene, held_out_subject,
        ConfusionMatrix(fold_class_axes(scene_map, scene, options.include_random_still, subset)), 0.0};

    switch (method.kind) {
        case MethodKind::knn: {
            std::vector<Vec> vectors;
            std::vector<Activity> labels;
            flatten(train, vectors, labels);
            const int k = std::min<int>(method.knn.k, static_cast<int>(vectors.size()));
            const KnnModel model = knn_fit(std::move(vectors), std::move(labels), k);
            for (const PreparedRecording& rec : test) {
                for (const Vec& v : rec.poses) result.confusion.accumulate(rec.label, knn_predict(model, v));
            }
            break;
        }
        case MethodKind::svm: {
            std::vector<Vec> vectors;
            std::vector<Activity> labels;
            flatten(train, vectors, labels);
            const LinearSvmModel model =
                svm_train(vectors, labels, method.svm.lambda_reg, method.svm.epochs, seed);
            for (const PreparedRecording& rec : test) {
                for (const Vec& v : rec.poses) result.confusion.accumulate(rec.label, svm_predict(model, v));
            }
            break;
        }
        case MethodKind::gng:
        case MethodKind::gwr: {
            const HierarchyModel model = train_hierarchy(train, method.hierarchy, seed, warnings);
            for (const PreparedRecording& rec : test) {
                if (model.spec.classify_at == ClassifyAt::l3_combined &&
                    rec.poses.size() < static_cast<std::size_t>(kMinFramesForLayer3)) {
                    warn(warnings, "test recording too short for combined-layer classification; skipped");
                    continue;
                }
                const Classification labels = classify(model, rec.poses);
                for (Activity predicted : labels.per_step) result.confusion.accumulate(rec.label, predicted);
            }
            break;
        }
    }

    if (result.confusion.total() == 0) return std::nullopt;
    result.accuracy = result.confusion.accuracy();
    return result;
}

// --- aggregation ------------------------------------------------------------------

namespace {

struct MeanStd {
    std::optional<double> mean;
    std::optional<double> stddev;
};

MeanStd mean_and_sample_stddev(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    out.mean = mean;
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

}  // namespace

AggregateReport aggregate_results(MethodKind method, PreconditionMode mode, ScenePolicy policy,
                                  std::vector<SceneSubjectResult> results) {
    std::sort(results.begin(), results.end(), [](const SceneSubjectResult& a, const SceneSubjectResult& b) {
        const int sa = a.scene ? static_cast<int>(*a.scene) : -1;
        const int sb = b.scene ? static_cast<int>(*b.scene) : -1;
        if (sa != sb) return sa < sb;
        return a.subject < b.subject;
    });

    AggregateReport report{.method = method,
                           .mode = mode,
                           .policy = policy,
                           .results = std::move(results),
                           .scenes = {},
                           .global_accuracy = 0.0,
                           .pooled = ConfusionMatrix(all_activities()),
                           .pooled_accuracy = 0.0,
                           .participants = 0,
                           .scene_count = 0};

    std::set<int> subjects;
    std::map<int, std::vector<const SceneSubjectResult*>> by_scene;  // -1 = all_actions
    for (const SceneSubjectResult& r : report.results) {
        subjects.insert(r.subject);
        by_scene[r.scene ? static_cast<int>(*r.scene) : -1].push_back(&r);
        report.pooled.merge(r.confusion);
    }
    report.participants = static_cast<int>(subjects.size());
    report.scene_count = static_cast<int>(by_scene.size());

    double scene_accuracy_sum = 0.0;
    for (const auto& [scene_key, fold_results] : by_scene) {
        SceneReport scene_report;
        if (scene_key >= 0) scene_report.scene = static_cast<Scene>(scene_key);

        double subject_sum = 0.0;
        for (const SceneSubjectResult* r : fold_results) subject_sum += r->accuracy;
        scene_report.mean_accuracy = subject_sum / static_cast<double>(fold_results.size());
        scene_accuracy_sum += scene_report.mean_accuracy;

        // Per-class precision/recall across subjects; undefined cells are
        // excluded from the averages.
        const std::vector<Activity>& axes = fold_results.front()->confusion.classes();
        for (Activity label : axes) {
            std::vector<double> precisions, recalls;
            for (const SceneSubjectResult* r : fold_results) {
                for (const auto& pr : r->confusion.precision_recall()) {
                    if (pr.label != label) continue;
                    if (pr.precision) precisions.push_back(*pr.precision);
                    if (pr.recall) recalls.push_back(*pr.recall);
                }
            }
            const MeanStd p = mean_and_sample_stddev(precisions);
            const MeanStd r = mean_and_sample_stddev(recalls);
            scene_report.per_class.push_back(ClassStat{label, p.mean, p.stddev, r.mean, r.stddev});
        }
        report.scenes.push_back(std::move(scene_report));
    }

    if (!by_scene.empty()) report.global_accuracy = scene_accuracy_sum / static_cast<double>(by_scene.size());
    if (report.pooled.total() > 0) report.pooled_accuracy = report.pooled.accuracy();
    return report;
}

AggregateReport run_loso_experiment(const Corpus& corpus, const MethodSpec& method, PreconditionMode mode,
                                    ScenePolicy policy, std::uint64_t seed,
                                    const ExperimentOptions& options, Warnings* warnings) {
    const auto subjects = corpus.subject_ids();
    if (subjects.size() < 2) throw DataError("LOSO needs at least 2 subjects");

    struct FoldTask {
        int subject;
        std::optional<Scene> scene;
        std::uint64_t seed;
    };
    std::vector<FoldTask> tasks;
    for (int subject : subjects) {
        if (policy == ScenePolicy::all_actions) {
            tasks.push_back({subject, std::nullopt, mix_seed(seed, static_cast<std::uint64_t>(subject), 0xff)});
        } else {
            for (Scene scene : all_scenes()) {
                tasks.push_back({subject, scene,
                                 mix_seed(seed, static_cast<std::uint64_t>(subject),
                                          static_cast<std::uint64_t>(scene))});
            }
        }
    }

    // Each fold gets its own pre-mixed seed and result slot, so the output
    // is independent of worker scheduling.
    std::vector<std::optional<SceneSubjectResult>> fold_results(tasks.size());
    std::vector<Warnings> fold_warnings(tasks.size());
    std::vector<std::function<void()>> units;
    units.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        units.push_back([&, i]() {
            fold_results[i] = run_fold(corpus, tasks[i].subject, tasks[i].scene, method, mode, tasks[i].seed,
                                       options, &fold_warnings[i]);
        });
    }
    run_parallel(options.jobs, units);

    std::vector<SceneSubjectResult> results;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        for (const std::string& message : fold_warnings[i].messages()) warn(warnings, message);
        if (fold_results[i]) results.push_back(std::move(*fold_results[i]));
    }
    if (results.empty()) throw DataError("experiment produced no classifiable folds");
    return aggregate_results(method.kind, mode, policy, std::move(results));
}

}  // namespace har
