#include <doctest.h>

#include <cmath>

#include "har/eval.hpp"
#include "test_support.hpp"

using namespace har;

namespace {

constexpr Activity kA = Activity::brushing_teeth;
constexpr Activity kB = Activity::cooking_chopping;
constexpr Activity kC = Activity::cooking_stirring;

// Builds a 2-class matrix with the given counts: rows true, columns predicted.
ConfusionMatrix matrix2(long aa, long ab, long ba, long bb) {
    ConfusionMatrix m({kA, kB});
    for (long i = 0; i < aa; ++i) m.accumulate(kA, kA);
    for (long i = 0; i < ab; ++i) m.accumulate(kA, kB);
    for (long i = 0; i < ba; ++i) m.accumulate(kB, kA);
    for (long i = 0; i < bb; ++i) m.accumulate(kB, kB);
    return m;
}

SceneSubjectResult make_result(std::optional<Scene> scene, int subject, ConfusionMatrix confusion) {
    const double accuracy = confusion.accuracy();
    return SceneSubjectResult{MethodKind::knn, PreconditionMode::centre_mirror, scene, subject,
                              std::move(confusion), accuracy};
}

}  // namespace

TEST_CASE("accumulate: counting basics") {
    ConfusionMatrix m({kA, kB});
    m.accumulate(kA, kA);
    CHECK(m.trace() == 1);
    CHECK(m.total() == 1);

    ConfusionMatrix m2({kA, kB});
    m2.accumulate(kA, kB);
    m2.accumulate(kB, kA);
    CHECK(m2.trace() == 0);
    CHECK(m2.total() == 2);

    Rng rng(401);
    ConfusionMatrix m3({kA, kB, kC});
    const int n = 137;
    for (int i = 0; i < n; ++i)
        m3.accumulate(static_cast<Activity>(rng.below(3)), static_cast<Activity>(rng.below(3)));
    CHECK(m3.total() == n);

    CHECK_THROWS_AS(m.accumulate(kC, kA), DataError);
}

TEST_CASE("accuracy: trace over total") {
    const ConfusionMatrix m = matrix2(8, 2, 1, 9);
    CHECK(m.accuracy() == doctest::Approx(0.85).epsilon(1e-12));

    const ConfusionMatrix diag = matrix2(5, 0, 0, 7);
    CHECK(diag.accuracy() == 1.0);

    const ConfusionMatrix off = matrix2(0, 4, 6, 0);
    CHECK(off.accuracy() == 0.0);

    const ConfusionMatrix empty({kA, kB});
    CHECK_THROWS_AS(empty.accuracy(), DataError);
}

TEST_CASE("accuracy is invariant under class-order permutation") {
    Rng rng(402);
    for (int trial = 0; trial < 20; ++trial) {
        ConfusionMatrix forward({kA, kB, kC});
        ConfusionMatrix backward({kC, kB, kA});
        for (int i = 0; i < 60; ++i) {
            const Activity truth = static_cast<Activity>(rng.below(3));
            const Activity predicted = static_cast<Activity>(rng.below(3));
            forward.accumulate(truth, predicted);
            backward.accumulate(truth, predicted);
        }
        CHECK(forward.accuracy() == backward.accuracy());
        CHECK(forward.trace() == backward.trace());
    }
}

TEST_CASE("precision_recall: the worked 2x2 example") {
    const ConfusionMatrix m = matrix2(8, 2, 1, 9);
    const auto pr = m.precision_recall();
    REQUIRE(pr.size() == 2);
    CHECK(*pr[0].precision == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(*pr[0].recall == doctest::Approx(8.0 / 10.0).epsilon(1e-12));
    CHECK(*pr[1].precision == doctest::Approx(9.0 / 11.0).epsilon(1e-12));
    CHECK(*pr[1].recall == doctest::Approx(9.0 / 10.0).epsilon(1e-12));
}

TEST_CASE("precision_recall: perfect matrix and degenerate denominators") {
    const ConfusionMatrix perfect = matrix2(10, 0, 0, 10);
    for (const auto& pr : perfect.precision_recall()) {
        CHECK(*pr.precision == 1.0);
        CHECK(*pr.recall == 1.0);
    }

    // class B never predicted: precision absent, recall 0
    ConfusionMatrix m({kA, kB});
    m.accumulate(kA, kA);
    m.accumulate(kB, kA);
    const auto pr = m.precision_recall();
    CHECK(!pr[1].precision.has_value());
    CHECK(*pr[1].recall == 0.0);
    // class never seen at all: both absent
    ConfusionMatrix sparse({kA, kB, kC});
    sparse.accumulate(kA, kA);
    const auto pr3 = sparse.precision_recall();
    CHECK(!pr3[2].precision.has_value());
    CHECK(!pr3[2].recall.has_value());
}

TEST_CASE("aggregation: hand-built two-scene example gives 0.75 exactly") {
    // scene 1 accuracies {0.8, 0.6}; scene 2 accuracies {1.0, 0.6}
    std::vector<SceneSubjectResult> results;
    results.push_back(make_result(Scene::bathroom, 1, matrix2(4, 1, 0, 0)));   // 4/5 = 0.8
    results.push_back(make_result(Scene::bathroom, 2, matrix2(3, 2, 0, 0)));   // 3/5 = 0.6
    results.push_back(make_result(Scene::bedroom, 1, matrix2(5, 0, 0, 0)));    // 5/5 = 1.0
    results.push_back(make_result(Scene::bedroom, 2, matrix2(3, 2, 0, 0)));    // 3/5 = 0.6
    const AggregateReport report = aggregate_results(MethodKind::knn, PreconditionMode::centre_mirror,
                                                     ScenePolicy::per_scene, std::move(results));
    REQUIRE(report.scenes.size() == 2);
    CHECK(std::abs(report.scenes[0].mean_accuracy - 0.7) < 1e-12);
    CHECK(std::abs(report.scenes[1].mean_accuracy - 0.8) < 1e-12);
    CHECK(std::abs(report.global_accuracy - 0.75) < 1e-12);
    CHECK(report.participants == 2);
    CHECK(report.scene_count == 2);
    // pooled matrix counts every pose once
    CHECK(report.pooled.total() == 20);
}

TEST_CASE("aggregation: identity confusions give accuracy 1.0") {
    std::vector<SceneSubjectResult> results;
    for (int scene = 0; scene < 2; ++scene) {
        for (int subject = 1; subject <= 2; ++subject) {
            results.push_back(make_result(static_cast<Scene>(scene), subject, matrix2(1, 0, 0, 1)));
        }
    }
    const AggregateReport report = aggregate_results(MethodKind::knn, PreconditionMode::none,
                                                     ScenePolicy::per_scene, std::move(results));
    CHECK(report.global_accuracy == 1.0);
    CHECK(report.pooled_accuracy == 1.0);
}

TEST_CASE("aggregation: per-class mean and sample stddev across subjects") {
    std::vector<SceneSubjectResult> results;
    results.push_back(make_result(Scene::bathroom, 1, matrix2(8, 2, 1, 9)));  // precision A: 8/9
    results.push_back(make_result(Scene::bathroom, 2, matrix2(6, 4, 0, 10)));  // precision A: 6/6 = 1
    const AggregateReport report = aggregate_results(MethodKind::knn, PreconditionMode::centre_mirror,
                                                     ScenePolicy::per_scene, std::move(results));
    REQUIRE(report.scenes.size() == 1);
    const auto& stats = report.scenes[0].per_class;
    REQUIRE(stats.size() == 2);
    const double p1 = 8.0 / 9.0, p2 = 1.0;
    const double mean = (p1 + p2) / 2.0;
    const double stddev = std::sqrt(((p1 - mean) * (p1 - mean) + (p2 - mean) * (p2 - mean)) / 1.0);
    CHECK(*stats[0].precision_mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(*stats[0].precision_stddev == doctest::Approx(stddev).epsilon(1e-12));
    // recalls: 8/10 and 6/10
    CHECK(*stats[0].recall_mean == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("run_loso_experiment: per-scene fold counting on a synthetic corpus") {
    const Corpus corpus = generate_synthetic_corpus(42, 4, 3, 24);
    MethodSpec method = MethodSpec::make(MethodKind::knn);
    const AggregateReport report = run_loso_experiment(corpus, method, PreconditionMode::centre_mirror,
                                                       ScenePolicy::per_scene, 1234);
    // 4 subjects x 5 scenes (synthetic recordings belong to every scene)
    CHECK(report.results.size() == 20);
    CHECK(report.participants == 4);
    CHECK(report.scene_count == 5);
    for (const auto& result : report.results) {
        CHECK(result.accuracy >= 0.0);
        CHECK(result.accuracy <= 1.0);
    }

    // totals: each scene's folds classify each subject's poses exactly once
    const std::size_t poses = corpus.total_frames();
    for (const auto& scene : report.scenes) {
        long scene_total = 0;
        for (const auto& result : report.results) {
            if (result.scene == scene.scene) scene_total += result.confusion.total();
        }
        CHECK(static_cast<std::size_t>(scene_total) == poses);
    }
}

TEST_CASE("run_loso_experiment: all_actions pools onto the canonical axes") {
    const Corpus corpus = generate_synthetic_corpus(43, 3, 4, 20);
    MethodSpec method = MethodSpec::make(MethodKind::knn);
    const AggregateReport report = run_loso_experiment(corpus, method, PreconditionMode::centre_mirror,
                                                       ScenePolicy::all_actions, 99);
    CHECK(report.results.size() == 3);
    CHECK(report.scene_count == 1);
    CHECK(report.pooled.classes().size() == kActivityCount);
    CHECK(static_cast<std::size_t>(report.pooled.total()) == corpus.total_frames());
}

TEST_CASE("run_loso_experiment: results do not depend on the worker count") {
    const Corpus corpus = generate_synthetic_corpus(44, 3, 3, 18);
    MethodSpec method = MethodSpec::make(MethodKind::knn);
    ExperimentOptions serial;
    serial.jobs = 1;
    ExperimentOptions parallel;
    parallel.jobs = 4;
    const AggregateReport a = run_loso_experiment(corpus, method, PreconditionMode::centre_mirror,
                                                  ScenePolicy::per_scene, 7, serial);
    const AggregateReport b = run_loso_experiment(corpus, method, PreconditionMode::centre_mirror,
                                                  ScenePolicy::per_scene, 7, parallel);
    REQUIRE(a.results.size() == b.results.size());
    CHECK(a.global_accuracy == b.global_accuracy);
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        CHECK(a.results[i].subject == b.results[i].subject);
        CHECK(a.results[i].accuracy == b.results[i].accuracy);
    }
}

TEST_CASE("run_loso_experiment: gwr hierarchy classifies above chance at layer 1") {
    const Corpus corpus = generate_synthetic_corpus(46, 3, 3, 30);
    MethodSpec method = MethodSpec::make(MethodKind::gwr);
    for (LayerSpec* layer : {&method.hierarchy.l1, &method.hierarchy.l2, &method.hierarchy.l3}) {
        layer->gwr.max_nodes = 60;
        layer->gwr.epochs = 3;
    }
    const AggregateReport report = run_loso_experiment(corpus, method, PreconditionMode::centre_mirror,
                                                       ScenePolicy::all_actions, 17);
    CHECK(report.results.size() == 3);
    CHECK(report.global_accuracy > 1.0 / 3.0);
    // per-step counting: every test pose is classified once in l1 mode
    CHECK(static_cast<std::size_t>(report.pooled.total()) == corpus.total_frames());
}

TEST_CASE("run_loso_experiment: gng hierarchy classifies at the combined third layer") {
    const Corpus corpus = generate_synthetic_corpus(47, 3, 2, 20);
    MethodSpec method = MethodSpec::make(MethodKind::gng);
    method.hierarchy.classify_at = ClassifyAt::l3_combined;
    for (LayerSpec* layer : {&method.hierarchy.l1, &method.hierarchy.l2, &method.hierarchy.l3}) {
        layer->gng.max_nodes = 40;
        layer->gng.epochs = 2;
        layer->gng.max_edge_age = 30;
    }
    const AggregateReport report = run_loso_experiment(corpus, method, PreconditionMode::centre_mirror,
                                                       ScenePolicy::all_actions, 18);
    CHECK(report.results.size() == 3);
    // layer-3 steps per recording: N - 5 of the N poses
    const std::size_t recordings_per_subject = 2;
    const std::size_t expected_steps = recordings_per_subject * (20 - 5);
    for (const auto& result : report.results) {
        CHECK(static_cast<std::size_t>(result.confusion.total()) == expected_steps);
    }
    CHECK(report.global_accuracy > 0.5);  // two classes, must beat chance
}

TEST_CASE("run_fold: test recordings below the layer-3 length are skipped with a warning") {
    Corpus corpus = generate_synthetic_corpus(48, 3, 2, 20);
    // truncate subject 1's recordings below the combined-layer threshold
    for (auto& rec : corpus.recordings) {
        if (rec.subject_id == 1) rec.frames.resize(kMinFramesForLayer3 - 2);
    }
    MethodSpec method = MethodSpec::make(MethodKind::gwr);
    method.hierarchy.classify_at = ClassifyAt::l3_combined;
    for (LayerSpec* layer : {&method.hierarchy.l1, &method.hierarchy.l2, &method.hierarchy.l3}) {
        layer->gwr.max_nodes = 30;
        layer->gwr.epochs = 2;
    }
    Warnings warnings;
    const auto result = run_fold(corpus, 1, std::nullopt, method, PreconditionMode::centre_mirror, 3,
                                 ExperimentOptions{}, &warnings);
    CHECK(!result.has_value());  // every test recording was too short
    bool mentioned = false;
    for (const auto& message : warnings.messages()) {
        if (message.find("too short") != std::string::npos) mentioned = true;
    }
    CHECK(mentioned);

    // fold for a subject with no data in the corpus subset
    Corpus bathroom_only = corpus;
    bathroom_only.recordings.clear();
    for (const auto& rec : corpus.recordings) {
        if (rec.subject_id != 2) bathroom_only.recordings.push_back(rec);
    }
    Warnings no_data;
    const auto missing = run_fold(bathroom_only, 2, std::nullopt, MethodSpec::make(MethodKind::knn),
                                  PreconditionMode::none, 3, ExperimentOptions{}, &no_data);
    CHECK(!missing.has_value());
    CHECK(no_data.count() > 0);
}

TEST_CASE("run_loso_experiment rejects single-subject corpora") {
    Corpus corpus = generate_synthetic_corpus(45, 2, 2, 15);
    corpus.recordings.erase(
        std::remove_if(corpus.recordings.begin(), corpus.recordings.end(),
                       [](const ActionRecording& rec) { return rec.subject_id != 1; }),
        corpus.recordings.end());
    MethodSpec method = MethodSpec::make(MethodKind::knn);
    CHECK_THROWS_AS(run_loso_experiment(corpus, method, PreconditionMode::none, ScenePolicy::all_actions, 1),
                    DataError);
}
